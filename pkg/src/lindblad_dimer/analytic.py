"""Closed-form survival probabilities of the dimer without dephasing.

These serve as oracles for the numerical propagators. The general
offset formula is evaluated in complex arithmetic as written, with
``phi = arcsinh((delta - i gamma) / 2v)`` on the principal branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError
from .model import DEGENERACY_THRESHOLD, DimerParams


@dataclass(frozen=True)
class ClosedFormContext:
    params: DimerParams
    r: float
    y: float
    f: complex
    phi_delta: complex
    phi_gamma: float | None


def closed_form_context(params: DimerParams) -> ClosedFormContext:
    v, gamma, delta = params.v, params.gamma, params.delta
    y = 4 * v**2 - gamma**2 + delta**2
    r = float(np.sqrt(y**2 + 4 * gamma**2 * delta**2))
    # r >= |y| analytically; clip rounding so both roots stay real
    f = 0.5 * (np.sqrt(max(r - y, 0.0) / 2) + 1j * np.sqrt(max(r + y, 0.0) / 2))
    phi_delta = complex(np.arcsinh((delta - 1j * gamma) / (2 * v)))
    phi_gamma = float(np.arcsin(gamma / (2 * v))) if gamma <= 2 * v else None
    return ClosedFormContext(params, r, float(y), complex(f), phi_delta, phi_gamma)


def pi_lambda0(params: DimerParams, t):
    """Survival probability at zero dephasing for any offset.

    ``exp(-gamma t) / |cosh phi|^2 * (|cosh(t f + phi)|^2 + |sinh(t f)|^2)``.
    ``params.lam`` is ignored. Accepts scalar or array ``t``.
    """
    ctx = closed_form_context(params)
    cosh_phi = np.cosh(ctx.phi_delta)
    if abs(cosh_phi) < DEGENERACY_THRESHOLD:
        raise DegeneracyError(
            f"exceptional point: |cosh(phi_delta)| = {abs(cosh_phi):.3e}", params=params
        )
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    bracket = np.abs(np.cosh(t * ctx.f + ctx.phi_delta)) ** 2 + np.abs(np.sinh(t * ctx.f)) ** 2
    out = np.exp(-params.gamma * t) / abs(cosh_phi) ** 2 * bracket
    return float(out) if out.ndim == 0 else out


def pi_delta0(v: float, gamma: float, t):
    """Zero-offset limit, with ``phi_gamma = arcsin(gamma / 2v)``.

    Raises ``ValueError`` in the overdamped regime ``gamma > 2v``.
    """
    if not v > 0:
        raise ValueError(f"v must be > 0, got {v}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma > 2 * v:
        raise ValueError(f"gamma={gamma} > 2v={2 * v}: zero-offset formula needs a real arcsin")
    phi = np.arcsin(gamma / (2 * v))
    cos_phi = np.cos(phi)
    if cos_phi < DEGENERACY_THRESHOLD:
        raise DegeneracyError(f"exceptional point gamma = 2v = {2 * v}")
    t = np.asarray(t, dtype=float)
    wt = v * t * cos_phi
    out = np.exp(-gamma * t) / cos_phi**2 * (np.cos(wt - phi) ** 2 + np.sin(wt) ** 2)
    return float(out) if out.ndim == 0 else out


def pi_weak_coupling(gamma: float, t):
    """``exp(-gamma t)``; meaningful for gamma, lam << v and not too short t."""
    out = np.exp(-gamma * np.asarray(t, dtype=float))
    return float(out) if out.ndim == 0 else out
