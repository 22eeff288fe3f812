"""Liouvillian of the dephasing master equation with trapping.

The generator acts on density matrices as::

    drho/dt = -i [H0, rho] - {Gamma, rho} - 2 lam (rho - diag(rho))

and is stored as an ``N^2 x N^2`` matrix on the row-major vectorisation
``vec(rho)[j * N + k] = rho[j, k]``. With this ordering
``vec(A @ rho @ B) = kron(A, B.T) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    NoCrossingError,
    SingularSystemError,
    SpectralDecompositionError,
    StepSizeError,
)
from .model import DensityMatrix, NetworkSpec

COND_LIMIT = 1e8
ZERO_MODE = 1e-9
HERMITICITY_TOL = 1e-8


@dataclass(frozen=True)
class Liouvillian:
    n: int
    matrix: np.ndarray
    spec: NetworkSpec
    lam: float

    def apply(self, rho) -> np.ndarray:
        """Time derivative of the ``n x n`` matrix ``rho``."""
        rho = np.asarray(rho, dtype=complex)
        return (self.matrix @ rho.ravel()).reshape(self.n, self.n)


@dataclass(frozen=True)
class LiouvillianSpectrum:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    inverse_vectors: np.ndarray
    n: int
    condition: float

    def reconstruct(self) -> np.ndarray:
        return (self.right_vectors * self.eigenvalues) @ self.inverse_vectors


@dataclass(frozen=True)
class Trajectory:
    """Density matrices ``states[i]`` at ``times[i]``, with ``survival = tr(rho)``."""

    times: np.ndarray
    states: np.ndarray
    survival: np.ndarray

    @classmethod
    def from_states(cls, times, states) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=complex)
        survival = np.trace(states, axis1=1, axis2=2).real
        return cls(times, states, survival)

    def state(self, i: int) -> DensityMatrix:
        return DensityMatrix(self.states[i])

    @property
    def n(self) -> int:
        return self.states.shape[1]


def build_liouvillian(spec: NetworkSpec, lam: float) -> Liouvillian:
    lam = float(lam)
    if not lam >= 0 or not np.isfinite(lam):
        raise ValueError(f"dephasing rate must be >= 0, got {lam}")
    n = spec.n
    h0 = spec.couplings.astype(complex)
    trap = spec.trap_operator().astype(complex)
    eye = np.eye(n)
    matrix = -1j * (np.kron(h0, eye) - np.kron(eye, h0.T))
    matrix -= np.kron(trap, eye) + np.kron(eye, trap.T)
    off_diagonal = 1.0 - eye.ravel()
    matrix -= np.diag(2 * lam * off_diagonal)
    matrix.setflags(write=False)
    return Liouvillian(n, matrix, spec, lam)


def spectral_decompose(liou: Liouvillian) -> LiouvillianSpectrum:
    """Full eigendecomposition ``L = Q diag(mu) Q^-1``.

    Raises
    ------
    SpectralDecompositionError
        If ``cond(Q) > 1e8``, i.e. the Liouvillian is close to defective.
    """
    if not np.all(np.isfinite(liou.matrix)):
        raise ValueError("Liouvillian has non-finite entries")
    mu, q = np.linalg.eig(liou.matrix)
    cond = float(np.linalg.cond(q))
    if not cond < COND_LIMIT:
        raise SpectralDecompositionError(
            f"eigenvector matrix is ill-conditioned (cond = {cond:.3e}); "
            "Liouvillian is near an exceptional point"
        )
    return LiouvillianSpectrum(mu, q, np.linalg.inv(q), liou.n, cond)


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ValueError("times must be non-negative and strictly increasing")
    return times


def _as_density(rho0) -> DensityMatrix:
    return rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)


def evolve_spectral(spectrum: LiouvillianSpectrum, rho0, times) -> Trajectory:
    times = _check_times(times)
    rho0 = _as_density(rho0)
    n = spectrum.n
    coeffs = spectrum.inverse_vectors @ rho0.entries.ravel()
    phases = np.exp(np.outer(times, spectrum.eigenvalues))
    vecs = (phases * coeffs) @ spectrum.right_vectors.T
    states = vecs.reshape(len(times), n, n)
    # t = 0 is the identity propagator
    states[times == 0] = rho0.entries
    adjoint = states.conj().transpose(0, 2, 1)
    deviation = np.max(np.abs(states - adjoint))
    if deviation > HERMITICITY_TOL:
        raise SpectralDecompositionError(
            f"spectral propagation lost Hermiticity ({deviation:.3e})"
        )
    return Trajectory.from_states(times, 0.5 * (states + adjoint))


def _integrate(liou: Liouvillian, y0, t_end, rtol, atol, t_eval=None, dense=False):
    matrix = liou.matrix

    def rhs(_t, y):
        return matrix @ y

    sol = solve_ivp(
        rhs, (0.0, float(t_end)), y0, method="RK45", t_eval=t_eval,
        dense_output=dense, rtol=rtol, atol=atol,
    )
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else 0.0
        raise StepSizeError(f"integration failed at t = {t_fail:.6g}: {sol.message}", t=t_fail)
    return sol


def evolve_ode(
    liou: Liouvillian,
    rho0,
    t_end: float,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    times=None,
) -> Trajectory:
    """Adaptive Dormand-Prince 4(5) propagation of the vectorised equation.

    ``times`` defaults to 201 uniform samples on ``[0, t_end]``; the solver's
    dense output supplies the values between steps.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    rho0 = _as_density(rho0)
    if times is None:
        times = np.linspace(0.0, t_end, 201)
    times = _check_times(times)
    if times[-1] > t_end * (1 + 1e-12):
        raise ValueError("requested times exceed t_end")
    times = np.minimum(times, t_end)
    sol = _integrate(liou, rho0.entries.ravel(), t_end, rtol, atol, t_eval=times)
    states = sol.y.T.reshape(len(times), liou.n, liou.n)
    adjoint = states.conj().transpose(0, 2, 1)
    return Trajectory.from_states(times, 0.5 * (states + adjoint))


def averaged_initial_state(spec: NetworkSpec) -> np.ndarray:
    """Mean of ``|k><k|`` over the non-trap nodes."""
    starts = spec.non_trap_indices
    if len(starts) == 0:
        raise ValueError("every node is a trap: no initial node to average over")
    rho = np.zeros((spec.n, spec.n), dtype=complex)
    rho[starts, starts] = 1.0 / len(starts)
    return rho


class SurvivalCurve:
    """Vectorised ``t -> tr rho(t)`` for a fixed generator and initial state.

    On the spectral path the trace is a finite sum of exponentials
    ``Re sum_i a_i exp(mu_i t)``, cheap to sample densely. Near exceptional
    points (or with ``method="ode"``) the curve falls back to the dense
    output of the adaptive integrator, extended on demand.
    """

    def __init__(self, liou: Liouvillian, rho0, method: str = "auto"):
        if method not in ("auto", "spectral", "ode"):
            raise ValueError(f"unknown method {method!r}")
        self.liou = liou
        self.rho0 = _as_density(rho0)
        self.spectrum = None
        self._ode = None
        self._horizon = 0.0
        if method != "ode":
            try:
                self.spectrum = spectral_decompose(liou)
            except SpectralDecompositionError:
                if method == "spectral":
                    raise
        if self.spectrum is not None:
            diag = np.arange(liou.n) * (liou.n + 1)
            weights = self.spectrum.right_vectors[diag, :].sum(axis=0)
            coeffs = self.spectrum.inverse_vectors @ self.rho0.entries.ravel()
            self._amplitudes = weights * coeffs
        self.method = "spectral" if self.spectrum is not None else "ode"

    def _extend(self, t_needed):
        horizon = max(2 * t_needed, 10.0)
        self._ode = _integrate(
            self.liou, self.rho0.entries.ravel(), horizon, 1e-11, 1e-13, dense=True
        ).sol
        self._horizon = horizon

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t_arr).ravel()
        if self.spectrum is not None:
            values = np.real(np.exp(np.outer(flat, self.spectrum.eigenvalues)) @ self._amplitudes)
        else:
            t_top = flat.max() if flat.size else 0.0
            if self._ode is None or t_top > self._horizon:
                self._extend(t_top)
            diag = np.arange(self.liou.n) * (self.liou.n + 1)
            values = np.real(self._ode(flat)[diag].sum(axis=0))
        return values.reshape(t_arr.shape) if t_arr.ndim else float(values[0])


def survival_curve(spec: NetworkSpec, lam: float, method: str = "auto") -> SurvivalCurve:
    """Mean survival probability over localized non-trap initial nodes.

    The average of the traces equals the trace evolved from the averaged
    initial state, so one propagation covers all starting nodes.
    """
    rho0 = averaged_initial_state(spec)
    return SurvivalCurve(build_liouvillian(spec, lam), rho0, method=method)


def survival_probability(spec: NetworkSpec, lam: float, times, method: str = "auto") -> np.ndarray:
    times = _check_times(times)
    return survival_curve(spec, lam, method=method)(times)


def tau_infinity(spectrum: LiouvillianSpectrum | np.ndarray) -> float:
    """Inverse of the slowest non-zero decay rate ``min |Re mu|``."""
    mu = spectrum.eigenvalues if isinstance(spectrum, LiouvillianSpectrum) else np.asarray(spectrum)
    rates = np.abs(mu.real)
    decaying = rates[rates > ZERO_MODE]
    if decaying.size == 0:
        raise NoCrossingError("no decaying Liouvillian mode (no trap)", horizon=np.inf)
    return float(1.0 / decaying.min())


def mean_first_passage(liou: Liouvillian, rho0) -> float:
    """``int_0^inf tr rho(t) dt`` from the linear system ``L x = -vec(rho0)``."""
    rho0 = _as_density(rho0)
    cond = np.linalg.cond(liou.matrix)
    if not cond < 1e12:
        raise SingularSystemError(
            f"Liouvillian is singular (cond = {cond:.3e}): no trap drains the state"
        )
    x = np.linalg.solve(liou.matrix, -rho0.entries.ravel())
    return float(np.trace(x.reshape(liou.n, liou.n)).real)


def ring_with_central_trap(n_ring: int, v_ring: float, v_spoke: float, gamma: float) -> NetworkSpec:
    """Ring of ``n_ring`` nodes, each coupled by ``-v_spoke`` to a trapped centre.

    Ring nodes are ``0 .. n_ring-1``; the centre is node ``n_ring``. For
    ``n_ring == 2`` the ring degenerates to a single bond.
    """
    n_ring = int(n_ring)
    if n_ring < 2:
        raise ValueError(f"n_ring must be >= 2, got {n_ring}")
    if not v_spoke > 0:
        raise ValueError(f"v_spoke must be > 0, got {v_spoke}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    n = n_ring + 1
    h0 = np.zeros((n, n))
    for j in range(n_ring):
        k = (j + 1) % n_ring
        if j != k:
            h0[j, k] = h0[k, j] = -v_ring
        h0[j, n_ring] = h0[n_ring, j] = -v_spoke
    traps = [(n_ring, gamma)] if gamma > 0 else []
    return NetworkSpec(n, h0, traps)
