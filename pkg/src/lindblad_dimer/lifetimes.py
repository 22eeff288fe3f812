"""Lifetimes from survival-probability threshold crossings.

``tau_s`` is the time ``Pi`` takes to fall from ``exp(-(s-1))`` to
``exp(-s)``; ``t_s = tau_1 + ... + tau_s`` is the cumulative crossing
time. ``tau_inf`` is the inverse slowest decay rate of the Liouvillian.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import LindbladDimerError, NoCrossingError
from .liouville import (
    SurvivalCurve,
    build_liouvillian,
    mean_first_passage,
    tau_infinity,
)
from .model import DensityMatrix, DimerParams, make_dimer

T_MAX = 1e4
CROSSING_TOL = 1e-9
MAX_SAMPLES = 2_000_000
SELECTORS = ("tau1", "tau2", "tau3", "tau_inf", "mfpt")
STATUSES = ("ok", "no_crossing", "degenerate")
INV_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class LifetimeRecord:
    lam: float
    delta: float
    v: float
    gamma: float
    tau1: float
    tau2: float
    tau3: float
    tau_inf: float
    t1: float
    t2: float
    t3: float
    status: str = "ok"

    @property
    def taus(self) -> tuple[float, float, float, float]:
        return (self.tau1, self.tau2, self.tau3, self.tau_inf)

    @classmethod
    def failed(cls, params: DimerParams, status: str) -> "LifetimeRecord":
        nan = float("nan")
        return cls(params.lam, params.delta, params.v, params.gamma,
                   nan, nan, nan, nan, nan, nan, nan, status)


@dataclass(frozen=True)
class ScanGrid:
    """Lifetimes on a (delta, lambda) grid; ``records[i][j]`` is ``(delta_i, lambda_j)``."""

    lambda_values: tuple
    delta_values: tuple
    records: tuple

    def field(self, name: str) -> np.ndarray:
        """2-d array (delta by lambda) of one record attribute."""
        return np.array([[getattr(r, name) for r in row] for row in self.records], dtype=float)

    def rows(self):
        for row in self.records:
            yield from row


@dataclass(frozen=True)
class LambdaOptimum:
    delta: float
    which: str
    lambda_star: float
    tau_min: float
    interior: bool
    multimodal: bool = False


def _sample(pi, ts: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(pi(ts), dtype=float)
    except TypeError:
        values = None
    if values is None or values.shape != ts.shape:
        values = np.array([float(pi(t)) for t in ts])
    return values


def crossing_time(
    pi,
    threshold: float,
    t_start: float = 0.0,
    t_hint: float = 1.0,
    resolution: float | None = None,
    t_max: float = T_MAX,
    tol: float = CROSSING_TOL,
) -> float:
    """First ``t > t_start`` at which the curve ``pi`` falls to ``threshold``.

    The upper bracket grows geometrically from ``t_start + t_hint`` until
    ``pi`` is below threshold. The bracket is then sampled at spacing
    ``resolution`` (default ``1e-3 * t_hint``) so that the root refined by
    Brent's method belongs to the first sign change, not just any one.

    ``pi`` should accept numpy arrays; scalar-only callables also work,
    only slower.

    Raises
    ------
    NoCrossingError
        If ``pi`` stays above ``threshold`` up to ``t_max``.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if not float(pi(t_start)) > threshold:
        raise ValueError(f"curve is not above threshold {threshold} at t_start={t_start}")
    step = t_hint if t_hint > 0 else 1.0
    hi = min(t_start + step, t_max)
    while float(pi(hi)) > threshold:
        if hi >= t_max:
            raise NoCrossingError(
                f"survival stays above {threshold:.6g} up to t = {t_max:g}", horizon=t_max
            )
        step *= 2
        hi = min(t_start + step, t_max)

    h = resolution if resolution is not None and resolution > 0 else 1e-3 * step
    count = int(min(math.ceil((hi - t_start) / h) + 1, MAX_SAMPLES))
    grid = np.linspace(t_start, hi, max(count, 2))
    below = np.nonzero(_sample(pi, grid) <= threshold)[0]
    first = int(below[0])
    # values[0] > threshold was checked above, so first >= 1
    lo, hi = grid[first - 1], grid[first]
    root = brentq(lambda t: float(pi(t)) - threshold, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    residual = abs(float(pi(root)) - threshold)
    if residual > tol:
        raise NoCrossingError(f"crossing not resolved: |pi - threshold| = {residual:.3e}")
    return float(root)


def survival_curve_for(params: DimerParams, method: str = "auto") -> SurvivalCurve:
    liou = build_liouvillian(make_dimer(params), params.lam)
    return SurvivalCurve(liou, DensityMatrix.localized(2, 0), method=method)


def _reraise_with(params, exc):
    raise type(exc)(str(exc), params=params) from exc


def lifetimes(params: DimerParams, method: str = "auto") -> LifetimeRecord:
    """tau_1..tau_3 and tau_inf for one parameter point.

    The survival curve uses the spectral propagator, switching to the ODE
    integrator near exceptional points.
    """
    try:
        curve = survival_curve_for(params, method=method)
        rate = params.gamma
        resolution = 1e-3 / rate if rate > 0 else None
        hint = 1.0 / rate if rate > 0 else 1.0
        crossings = []
        t_prev = 0.0
        for s in (1, 2, 3):
            t_s = crossing_time(curve, math.exp(-s), t_prev, hint, resolution)
            hint = t_s - t_prev
            crossings.append(t_s)
            t_prev = t_s
        mu = curve.spectrum.eigenvalues if curve.spectrum is not None else np.linalg.eigvals(curve.liou.matrix)
        tau_inf = tau_infinity(mu)
    except LindbladDimerError as exc:
        _reraise_with(params, exc)
    t1, t2, t3 = crossings
    return LifetimeRecord(
        params.lam, params.delta, params.v, params.gamma,
        t1, t2 - t1, t3 - t2, tau_inf, t1, t2, t3,
    )


def _status_of(exc: LindbladDimerError) -> str:
    return "no_crossing" if isinstance(exc, NoCrossingError) else "degenerate"


def _scan_point(params: DimerParams) -> LifetimeRecord:
    try:
        return lifetimes(params)
    except LindbladDimerError as exc:
        return LifetimeRecord.failed(params, _status_of(exc))


def _check_axis(values, name) -> tuple:
    values = tuple(float(x) for x in values)
    if len(values) == 0:
        raise ValueError(f"{name} grid is empty")
    if any(x < 0 or not math.isfinite(x) for x in values):
        raise ValueError(f"{name} values must be finite and >= 0")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} values must be strictly increasing")
    return values


def default_jobs() -> int:
    env = os.environ.get("LINDBLAD_DIMER_JOBS")
    if env:
        jobs = int(env)
        if jobs < 1:
            raise ValueError(f"LINDBLAD_DIMER_JOBS must be >= 1, got {env}")
        return jobs
    return os.cpu_count() or 1


def grid_scan(
    lambda_values,
    delta_values,
    v: float = 1.0,
    gamma: float = 1.0,
    e1: float = 0.0,
    delta_sign: str = "node1_high",
    jobs: int = 1,
) -> ScanGrid:
    """Evaluate :func:`lifetimes` on every (delta, lambda) grid point.

    Failed points carry a non-``ok`` status and NaN lifetimes. Points are
    independent; ``jobs > 1`` spreads them over worker processes without
    changing the result.
    """
    lambdas = _check_axis(lambda_values, "lambda")
    deltas = _check_axis(delta_values, "delta")
    points = [
        DimerParams(e1=e1, delta=d, v=v, gamma=gamma, lam=lam, delta_sign=delta_sign)
        for d in deltas
        for lam in lambdas
    ]
    if jobs <= 1 or len(points) == 1:
        flat = [_scan_point(p) for p in points]
    else:
        chunk = max(1, len(points) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(_scan_point, points, chunksize=chunk))
    m = len(lambdas)
    records = tuple(tuple(flat[i * m:(i + 1) * m]) for i in range(len(deltas)))
    return ScanGrid(lambdas, deltas, records)


def golden_section(f, a: float, b: float, tol: float = 1e-4, max_iter: int = 200):
    """Minimise a unimodal ``f`` on ``[a, b]`` until the bracket is below ``tol``.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    x1 = b - INV_GOLDEN * (b - a)
    x2 = a + INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def lifetime_objective(which: str, delta: float, v: float = 1.0, gamma: float = 1.0,
                       e1: float = 0.0, delta_sign: str = "node1_high"):
    """``lam -> lifetime`` for one of :data:`SELECTORS` at fixed offset."""
    if which not in SELECTORS:
        raise ValueError(f"which must be one of {SELECTORS}, got {which!r}")

    def objective(lam: float) -> float:
        params = DimerParams(e1=e1, delta=delta, v=v, gamma=gamma, lam=lam, delta_sign=delta_sign)
        if which in ("tau1", "tau2", "tau3"):
            return getattr(lifetimes(params), which)
        liou = build_liouvillian(make_dimer(params), lam)
        try:
            if which == "tau_inf":
                return tau_infinity(np.linalg.eigvals(liou.matrix))
            return mean_first_passage(liou, DensityMatrix.localized(2, 0))
        except LindbladDimerError as exc:
            _reraise_with(params, exc)

    return objective


def optimal_lambda(
    delta: float,
    v: float = 1.0,
    gamma: float = 1.0,
    which: str = "tau2",
    lam_max: float = 10.0,
    step: float = 0.1,
    tol: float = 1e-4,
    e1: float = 0.0,
    delta_sign: str = "node1_high",
) -> LambdaOptimum:
    """Dephasing rate in ``[0, lam_max]`` minimising the selected lifetime.

    A coarse grid of spacing ``step`` locates candidate minima; each
    candidate cell pair is refined by golden-section search. Boundary
    cells are refined too, so an optimum closer to 0 than one grid step is
    not lost. ``interior`` is False when the best value sits on the
    boundary; ``multimodal`` flags more than one interior local minimum.
    """
    if lam_max <= 0 or step <= 0:
        raise ValueError("lam_max and step must be > 0")
    f = lifetime_objective(which, delta, v, gamma, e1, delta_sign)
    count = int(round(lam_max / step)) + 1
    lams = np.linspace(0.0, lam_max, count)
    values = np.array([f(x) for x in lams])
    last = count - 1

    candidates = []
    for i in range(count):
        left = values[i - 1] if i > 0 else np.inf
        right = values[i + 1] if i < last else np.inf
        if values[i] <= left and values[i] <= right:
            candidates.append(i)

    best_lam, best_val = float(lams[np.argmin(values)]), float(values.min())
    interior_minima = []
    for i in candidates:
        lo, hi = lams[max(i - 1, 0)], lams[min(i + 1, last)]
        x, fx = golden_section(f, lo, hi, tol)
        if tol < x < lam_max - tol and fx < min(values[0], values[last]):
            interior_minima.append((x, fx))
        if fx < best_val:
            best_lam, best_val = float(x), float(fx)

    edge_value = min(values[0], values[last])
    interior = bool(tol < best_lam < lam_max - tol and best_val < edge_value)
    if not interior:
        best_lam = 0.0 if values[0] <= values[last] else float(lam_max)
        best_val = float(edge_value)
    return LambdaOptimum(
        float(delta), which, best_lam, best_val, interior,
        multimodal=len(interior_minima) > 1,
    )


def piecewise_exponential_check(taus) -> float:
    """Max pairwise relative difference among tau_2, tau_3 and tau_inf.

    ``taus`` is a :class:`LifetimeRecord` or a sequence of lifetimes. Zero
    spread means equal stage lifetimes, i.e. on-average exponential decay.
    """
    if isinstance(taus, LifetimeRecord):
        taus = (taus.tau2, taus.tau3, taus.tau_inf)
    taus = [float(x) for x in taus]
    spread = 0.0
    for i, a in enumerate(taus):
        for b in taus[i + 1:]:
            spread = max(spread, abs(a - b) / max(abs(a), abs(b)))
    return spread

