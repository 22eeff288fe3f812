"""Comma-separated output formats and their round-trip validation.

Floats are written with 12 significant digits, booleans as ``true`` /
``false``. Lines starting with ``#`` are provenance comments and are
ignored when reading.
"""

from __future__ import annotations

import io
import math
import sys
from contextlib import contextmanager

import numpy as np

from .lifetimes import STATUSES, SELECTORS

TRAJECTORY_DIMER = ("t", "pi", "rho11", "rho22", "re_rho12", "im_rho12")
ANALYTIC = ("t", "pi_eq7", "pi_eq8", "pi_weak")
SCAN = ("lambda", "delta", "v", "gamma", "tau1", "tau2", "tau3", "tau_inf", "status")
OPTIMUM = ("delta", "which", "lambda_star", "tau_min", "interior")
MFPT = ("lambda", "delta", "v", "gamma", "mfpt")
SPECTRUM = ("index", "re", "im")


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def format_rows(header, rows, annotate: str | None = None) -> str:
    out = io.StringIO()
    if annotate:
        out.write(f"# {annotate}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        out.write(",".join(format_value(x) for x in row) + "\n")
    return out.getvalue()


@contextmanager
def open_output(path):
    """Text handle for ``path``; ``-`` or None means standard output."""
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def trajectory_header(n: int, full: bool = False) -> tuple[str, ...]:
    if n == 2 and not full:
        return TRAJECTORY_DIMER
    cols = ["t", "pi"]
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            cols += [f"rho_{j}_{k}_re", f"rho_{j}_{k}_im"]
    return tuple(cols)


def trajectory_rows(traj, full: bool = False):
    n = traj.n
    for t, p, rho in zip(traj.times, traj.survival, traj.states):
        if n == 2 and not full:
            yield (t, p, rho[0, 0].real, rho[1, 1].real, rho[0, 1].real, rho[0, 1].imag)
        else:
            row = [t, p]
            for j in range(n):
                for k in range(j, n):
                    row += [rho[j, k].real, rho[j, k].imag]
            yield tuple(row)


def scan_rows(records):
    for r in records:
        yield (r.lam, r.delta, r.v, r.gamma, r.tau1, r.tau2, r.tau3, r.tau_inf, r.status)


def optimum_rows(optima):
    for o in optima:
        yield (o.delta, o.which, o.lambda_star, o.tau_min, o.interior)


def _enum(values):
    def parse(text):
        if text not in values:
            raise ValueError(f"{text!r} not in {values}")
        return text
    return parse


def _bool(text):
    if text not in ("true", "false"):
        raise ValueError(f"{text!r} is not true/false")
    return text == "true"


def _float(text):
    value = float(text)
    if text.strip() != text:
        raise ValueError(f"padded number {text!r}")
    return value


def _schema_types(header: tuple[str, ...]):
    if header == SCAN:
        return [_float] * 8 + [_enum(STATUSES)]
    if header == OPTIMUM:
        return [_float, _enum(SELECTORS), _float, _float, _bool]
    if header == SPECTRUM:
        return [int, _float, _float]
    if header in (TRAJECTORY_DIMER, ANALYTIC, MFPT):
        return [_float] * len(header)
    if len(header) >= 4 and header[:2] == ("t", "pi"):
        n = 1
        while len(trajectory_header(n, full=True)) < len(header):
            n += 1
        if trajectory_header(n, full=True) == header:
            return [_float] * len(header)
    raise ValueError(f"unrecognised header: {','.join(header)}")


def read_table(text: str):
    """Parse CSV text into ``(header, rows)`` with typed values."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    if not lines:
        raise ValueError("no header line")
    header = tuple(lines[0].split(","))
    types = _schema_types(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(header):
            raise ValueError(f"line {lineno}: {len(fields)} fields, expected {len(header)}")
        try:
            rows.append(tuple(parse(x) for parse, x in zip(types, fields)))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return header, rows


def validate_text(text: str) -> list[str]:
    """Re-serialise parsed CSV text; return the lines that do not round-trip."""
    header, rows = read_table(text)
    canonical = format_rows(header, rows).splitlines()
    original = [ln for ln in text.splitlines() if not ln.startswith("#")]
    diffs = [
        f"line {i + 1}: {a!r} != {b!r}"
        for i, (a, b) in enumerate(zip(original, canonical))
        if a != b
    ]
    if len(original) != len(canonical):
        diffs.append(f"line count {len(original)} != {len(canonical)}")
    return diffs
