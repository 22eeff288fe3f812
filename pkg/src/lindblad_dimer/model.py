"""Parameter/state types, network Hamiltonians and the dimer eigensystem.

Energies are in units of the inter-node coupling ``v`` with hbar = 1, so
times are in units of ``1/v``. Nodes are indexed from 0: in the dimer,
node 0 carries the initial excitation and node 1 is the trap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, OverdampedWarning

DELTA_SIGNS = ("node1_high", "node2_high")
DEGENERACY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class DimerParams:
    """Scalar knobs of the trapped dimer.

    Parameters
    ----------
    e1 : float
        On-site energy of the initial node.
    delta : float
        Energy offset ``|E1 - E2|`` (>= 0).
    v : float
        Inter-node coupling (> 0).
    gamma : float
        Trap rate on the second node (>= 0).
    lam : float
        Dephasing rate (>= 0).
    delta_sign : {"node1_high", "node2_high"}
        ``node1_high`` gives ``E2 = E1 - delta``, ``node2_high`` gives
        ``E2 = E1 + delta``. Survival probabilities do not depend on it.
    """

    e1: float = 0.0
    delta: float = 0.0
    v: float = 1.0
    gamma: float = 1.0
    lam: float = 0.0
    delta_sign: str = "node1_high"

    def __post_init__(self):
        for name in ("e1", "delta", "v", "gamma", "lam"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.v <= 0:
            raise ValueError(f"v must be > 0, got {self.v}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.delta_sign not in DELTA_SIGNS:
            raise ValueError(f"delta_sign must be one of {DELTA_SIGNS}, got {self.delta_sign!r}")
        if self.overdamped:
            warnings.warn(
                f"gamma={self.gamma} > 2*v={2 * self.v}: overdamped dimer",
                OverdampedWarning,
                stacklevel=3,
            )

    @property
    def e2(self) -> float:
        if self.delta_sign == "node1_high":
            return self.e1 - self.delta
        return self.e1 + self.delta

    @property
    def overdamped(self) -> bool:
        return self.gamma > 2 * self.v

    def replace(self, **changes) -> "DimerParams":
        values = dict(
            e1=self.e1, delta=self.delta, v=self.v, gamma=self.gamma,
            lam=self.lam, delta_sign=self.delta_sign,
        )
        values.update(changes)
        return DimerParams(**values)


@dataclass(frozen=True)
class NetworkSpec:
    """Network of ``n`` nodes with Hamiltonian ``couplings`` and trap set.

    ``couplings`` is the real symmetric matrix of H0 (on-site energies on
    the diagonal, ``-V_jk`` off the diagonal). ``traps`` holds
    ``(node_index, rate)`` pairs with 0-based indices and rates > 0.
    """

    n: int
    couplings: np.ndarray
    traps: tuple = field(default=())

    def __post_init__(self):
        n = int(self.n)
        if n <= 0:
            raise ValueError(f"n must be positive, got {self.n}")
        h0 = np.array(self.couplings, dtype=float)
        if h0.shape != (n, n):
            raise ValueError(f"couplings must have shape ({n}, {n}), got {h0.shape}")
        if not np.all(np.isfinite(h0)):
            raise ValueError("couplings must be finite")
        if np.max(np.abs(h0 - h0.T)) > 1e-12:
            raise ValueError("couplings must be symmetric")
        traps = []
        seen = set()
        for index, rate in self.traps:
            index, rate = int(index), float(rate)
            if not 0 <= index < n:
                raise ValueError(f"trap index {index} outside [0, {n})")
            if not rate > 0 or not np.isfinite(rate):
                raise ValueError(f"trap rate must be > 0, got {rate} at node {index}")
            if index in seen:
                raise ValueError(f"duplicate trap index {index}")
            seen.add(index)
            traps.append((index, rate))
        h0.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "couplings", h0)
        object.__setattr__(self, "traps", tuple(traps))

    @property
    def trap_indices(self) -> list[int]:
        return [m for m, _ in self.traps]

    @property
    def non_trap_indices(self) -> list[int]:
        trapped = set(self.trap_indices)
        return [k for k in range(self.n) if k not in trapped]

    def trap_operator(self) -> np.ndarray:
        """Diagonal matrix ``sum_m Gamma_m |m><m|``."""
        rates = np.zeros(self.n)
        for m, rate in self.traps:
            rates[m] = rate
        return np.diag(rates)

    def effective_hamiltonian(self) -> np.ndarray:
        """Non-Hermitian ``H0 - i Gamma``."""
        return self.couplings - 1j * self.trap_operator()


@dataclass(frozen=True)
class DensityMatrix:
    """Validated ``dim x dim`` density operator (trace may be below one)."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("density matrix must be Hermitian")
        tr = np.trace(rho)
        if not (-1e-10 <= tr.real <= 1 + 1e-10) or abs(tr.imag) > 1e-10:
            raise ValueError(f"trace {tr} outside [0, 1]")
        if np.min(np.diag(rho).real) < -1e-8:
            raise ValueError("negative population on the diagonal")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    @classmethod
    def localized(cls, n: int, k: int) -> "DensityMatrix":
        """``|k><k|`` on ``n`` nodes."""
        rho = np.zeros((n, n), dtype=complex)
        rho[k, k] = 1.0
        return cls(rho)

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class DimerEigensystem:
    phi_delta: complex
    e_plus: complex
    e_minus: complex
    right_plus: np.ndarray
    right_minus: np.ndarray
    left_plus: np.ndarray
    left_minus: np.ndarray


def make_dimer(params: DimerParams) -> NetworkSpec:
    """Two-node network with off-diagonal ``-v`` and the trap on node 1.

    A zero trap rate gives an empty trap set.
    """
    h0 = np.array([[params.e1, -params.v], [-params.v, params.e2]])
    traps = [(1, params.gamma)] if params.gamma > 0 else []
    return NetworkSpec(2, h0, traps)


def dimer_hamiltonian(params: DimerParams) -> np.ndarray:
    return make_dimer(params).effective_hamiltonian()


def dimer_eigensystem(params: DimerParams) -> DimerEigensystem:
    """Analytic eigenvalues and bi-orthonormal eigenvectors of ``H0 - i Gamma``.

    With ``sinh(phi) = (E2 - E1 - i gamma) / 2v`` (principal branch) the
    eigenvalues are ``E1 + v exp(phi)`` and ``E1 - v exp(-phi)``. The
    matrix is complex symmetric, so left eigenvectors are the complex
    conjugates of the right ones and ``<left_a|right_b> = right_a^T right_b``.

    Raises
    ------
    DegeneracyError
        At an exceptional point, ``|cosh(phi)| < 1e-8``.
    """
    v = params.v
    phi = complex(np.arcsinh((params.e2 - params.e1 - 1j * params.gamma) / (2 * v)))
    cosh_phi = np.cosh(phi)
    if abs(cosh_phi) < DEGENERACY_THRESHOLD:
        raise DegeneracyError(
            f"exceptional point: |cosh(phi_delta)| = {abs(cosh_phi):.3e}", params=params
        )
    norm = np.sqrt(2 * cosh_phi)
    # the -v off-diagonal flips the sign of the second component
    right_plus = np.array([np.exp(-phi / 2), -np.exp(phi / 2)]) / norm
    right_minus = np.array([np.exp(phi / 2), np.exp(-phi / 2)]) / norm
    return DimerEigensystem(
        phi_delta=phi,
        e_plus=params.e1 + v * np.exp(phi),
        e_minus=params.e1 - v * np.exp(-phi),
        right_plus=right_plus,
        right_minus=right_minus,
        left_plus=right_plus.conj(),
        left_minus=right_minus.conj(),
    )


def verify_biorthonormality(eig: DimerEigensystem) -> float:
    """Max over a, b of ``|<left_a|right_b> - delta_ab|``."""
    left = np.array([eig.left_plus, eig.left_minus])
    right = np.array([eig.right_plus, eig.right_minus])
    overlap = left.conj() @ right.T
    return float(np.max(np.abs(overlap - np.eye(2))))
