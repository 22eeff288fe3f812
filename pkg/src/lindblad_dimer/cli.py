"""Command-line interface: ``lindblad-dimer <subcommand> [flags]``.

Data goes to ``-o`` (default standard output) as CSV; a one-line summary
goes to standard error. Exit codes: 0 success, 2 invalid input, 3
numerical failure, each failure with an ``error=<kind>`` line.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from . import __version__, csvio
from .analytic import pi_delta0, pi_lambda0, pi_weak_coupling
from .errors import LindbladDimerError, SpectralDecompositionError
from .lifetimes import (
    SELECTORS,
    default_jobs,
    grid_scan,
    lifetimes,
    optimal_lambda,
)
from .liouville import (
    build_liouvillian,
    evolve_ode,
    evolve_spectral,
    mean_first_passage,
    spectral_decompose,
    tau_infinity,
)
from .model import DELTA_SIGNS, DensityMatrix, DimerParams, make_dimer

COMMANDS = ("evolve", "analytic", "lifetimes", "scan", "optimize", "mfpt", "spectrum")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` (endpoints inclusive within half a step) or a single value."""
    parts = text.split(":")
    try:
        numbers = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}") from None
    if len(numbers) == 1:
        return numbers
    if len(numbers) != 3:
        raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = numbers
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError(f"range needs step > 0 and stop >= start, got {text!r}")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    # round away float noise so that 0:3:0.05 gives 0.15, not 0.15000000000000002
    return [round(start + i * step, 12) for i in range(count)]


def _float_flag(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _common(lambda_range: bool, delta_range: bool) -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--e1", type=_float_flag, default=0.0, help="on-site energy of node 1")
    p.add_argument("--delta", type=parse_range if delta_range else _float_flag,
                   default=[0.0] if delta_range else 0.0, help="energy offset")
    p.add_argument("--v", type=_float_flag, default=1.0, help="inter-node coupling")
    p.add_argument("--gamma", type=_float_flag, default=1.0, help="trap rate")
    p.add_argument("--lambda", dest="lam", type=parse_range if lambda_range else _float_flag,
                   default=[0.0] if lambda_range else 0.0, help="dephasing rate")
    p.add_argument("--delta-sign", choices=DELTA_SIGNS, default="node1_high")
    p.add_argument("-o", "--output", default="-", help="output CSV path, '-' for stdout")
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--annotate", action="store_true", help="prepend a provenance comment")
    return p


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="lindblad-dimer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--from-csv", metavar="PATH",
                        help="validate a CSV written by this tool and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    time_flags = _Parser(add_help=False)
    time_flags.add_argument("--t-max", type=_float_flag, default=20.0)
    time_flags.add_argument("--samples", type=_positive_int, default=400)

    p = sub.add_parser("evolve", parents=[_common(False, False), time_flags],
                       help="density-matrix trajectory from node 1")
    p.add_argument("--method", choices=("auto", "spectral", "ode"), default="auto")
    p.add_argument("--full-matrix", action="store_true",
                   help="write rho_j_k_re/im columns instead of the dimer columns")
    subs["evolve"] = p

    p = sub.add_parser("analytic", parents=[_common(False, False), time_flags],
                       help="closed-form survival curves at zero dephasing")
    subs["analytic"] = p

    p = sub.add_parser("lifetimes", parents=[_common(False, False)],
                       help="tau1, tau2, tau3, tau_inf at one point")
    subs["lifetimes"] = p

    p = sub.add_parser("scan", parents=[_common(True, True)], help="lifetime grid over (lambda, delta)")
    p.add_argument("--jobs", type=_positive_int, default=None,
                   help="worker processes (default: $LINDBLAD_DIMER_JOBS or CPU count)")
    subs["scan"] = p

    p = sub.add_parser("optimize", parents=[_common(False, True)], help="optimal dephasing rate")
    p.add_argument("--which", default="tau2",
                   help=f"comma-separated subset of {','.join(SELECTORS)}")
    p.add_argument("--lambda-max", type=_float_flag, default=10.0)
    p.add_argument("--step", type=_float_flag, default=0.1)
    p.add_argument("--tol", type=_float_flag, default=1e-4)
    subs["optimize"] = p

    p = sub.add_parser("mfpt", parents=[_common(True, False)], help="mean first-passage time")
    subs["mfpt"] = p

    p = sub.add_parser("spectrum", parents=[_common(False, False)], help="Liouvillian eigenvalues")
    subs["spectrum"] = p
    return parser, subs


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _apply_config(subparser: argparse.ArgumentParser, config: dict[str, str]):
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in config.items():
        dest = "lam" if key == "lambda" else key
        if dest not in actions or dest in ("help", "config"):
            raise ValueError(f"unknown config key {key!r}")
        action = actions[dest]
        if isinstance(action, argparse._StoreTrueAction):
            if value not in ("true", "false"):
                raise ValueError(f"config key {key!r} needs true/false, got {value!r}")
            defaults[dest] = value == "true"
        else:
            try:
                defaults[dest] = action.type(value) if action.type else value
            except argparse.ArgumentTypeError as exc:
                raise ValueError(f"config key {key!r}: {exc}") from None
            if action.choices is not None and defaults[dest] not in action.choices:
                raise ValueError(f"config key {key!r}: {value!r} not in {action.choices}")
    subparser.set_defaults(**defaults)


def _params(args, lam=None, delta=None) -> DimerParams:
    return DimerParams(
        e1=args.e1,
        delta=args.delta if delta is None else delta,
        v=args.v,
        gamma=args.gamma,
        lam=args.lam if lam is None else lam,
        delta_sign=args.delta_sign,
    )


def _fmt(x) -> str:
    return csvio.format_value(x)


def _times(args) -> np.ndarray:
    if not args.t_max > 0:
        raise ValueError(f"--t-max must be > 0, got {args.t_max}")
    return np.linspace(0.0, args.t_max, args.samples)


def cmd_evolve(args):
    params = _params(args)
    liou = build_liouvillian(make_dimer(params), params.lam)
    rho0 = DensityMatrix.localized(2, 0)
    times = _times(args)
    method = args.method
    if method in ("auto", "spectral"):
        try:
            traj = evolve_spectral(spectral_decompose(liou), rho0, times)
            method = "spectral"
        except SpectralDecompositionError:
            if method == "spectral":
                raise
            method = "ode"
    if method == "ode":
        traj = evolve_ode(liou, rho0, times[-1] if times[-1] > 0 else 1.0, times=times)
    header = csvio.trajectory_header(2, full=args.full_matrix)
    rows = csvio.trajectory_rows(traj, full=args.full_matrix)
    summary = f"pi={_fmt(traj.survival[-1])} at t={_fmt(times[-1])} method={method}"
    return header, rows, summary


def cmd_analytic(args):
    params = _params(args)
    times = _times(args)
    eq7 = pi_lambda0(params, times)
    if params.gamma < 2 * params.v:
        eq8 = pi_delta0(params.v, params.gamma, times)
    else:
        eq8 = np.full_like(times, np.nan)
    weak = pi_weak_coupling(params.gamma, times)
    rows = zip(times, np.atleast_1d(eq7), np.atleast_1d(eq8), np.atleast_1d(weak))
    summary = f"pi_eq7={_fmt(np.atleast_1d(eq7)[-1])} at t={_fmt(times[-1])}"
    return csvio.ANALYTIC, rows, summary


def cmd_lifetimes(args):
    rec = lifetimes(_params(args))
    summary = " ".join(f"{k}={_fmt(getattr(rec, k))}" for k in ("tau1", "tau2", "tau3", "tau_inf"))
    return csvio.SCAN, list(csvio.scan_rows([rec])), summary


def cmd_scan(args):
    jobs = args.jobs if args.jobs is not None else default_jobs()
    grid = grid_scan(args.lam, args.delta, v=args.v, gamma=args.gamma, e1=args.e1,
                     delta_sign=args.delta_sign, jobs=jobs)
    records = list(grid.rows())
    ok = sum(r.status == "ok" for r in records)
    summary = f"points={len(records)} ok={ok}"
    return csvio.SCAN, list(csvio.scan_rows(records)), summary


def cmd_optimize(args):
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    for w in which:
        if w not in SELECTORS:
            raise ValueError(f"--which entries must be in {SELECTORS}, got {w!r}")
    # validate the parameter point once before the search
    _params(args, delta=args.delta[0])
    optima = [
        optimal_lambda(d, v=args.v, gamma=args.gamma, which=w, lam_max=args.lambda_max,
                       step=args.step, tol=args.tol, e1=args.e1, delta_sign=args.delta_sign)
        for d in args.delta
        for w in which
    ]
    first = optima[0]
    summary = f"{first.which}={_fmt(first.tau_min)} at lambda={_fmt(first.lambda_star)}"
    if not first.interior:
        summary += " (no interior optimum)"
    return csvio.OPTIMUM, list(csvio.optimum_rows(optima)), summary


def cmd_mfpt(args):
    rows = []
    for lam in args.lam:
        params = _params(args, lam=lam)
        liou = build_liouvillian(make_dimer(params), lam)
        try:
            value = mean_first_passage(liou, DensityMatrix.localized(2, 0))
        except LindbladDimerError as exc:
            raise type(exc)(str(exc), params=params) from exc
        rows.append((lam, params.delta, params.v, params.gamma, value))
    best = min(rows, key=lambda r: r[-1])
    summary = f"mfpt={_fmt(best[-1])} at lambda={_fmt(best[0])}"
    return csvio.MFPT, rows, summary


def cmd_spectrum(args):
    params = _params(args)
    liou = build_liouvillian(make_dimer(params), params.lam)
    mu = np.linalg.eigvals(liou.matrix)
    order = np.lexsort((mu.imag, mu.real))
    mu = mu[order]
    rows = [(i, z.real, z.imag) for i, z in enumerate(mu)]
    try:
        summary = f"tau_inf={_fmt(tau_infinity(mu))}"
    except LindbladDimerError:
        summary = "tau_inf=inf (no decaying mode)"
    return csvio.SPECTRUM, rows, summary


HANDLERS = {
    "evolve": cmd_evolve,
    "analytic": cmd_analytic,
    "lifetimes": cmd_lifetimes,
    "scan": cmd_scan,
    "optimize": cmd_optimize,
    "mfpt": cmd_mfpt,
    "spectrum": cmd_spectrum,
}


def validate_csv(path: str) -> int:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    diffs = csvio.validate_text(text)
    header, rows = csvio.read_table(text)
    if diffs:
        for d in diffs[:20]:
            print(d, file=sys.stderr)
        print("error=csv_mismatch", file=sys.stderr)
        return 2
    print(f"rows={len(rows)} columns={len(header)} diffs=0", file=sys.stderr)
    return 0


def run(argv) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.from_csv:
        if args.command:
            raise UsageError("--from-csv cannot be combined with a subcommand")
        return validate_csv(args.from_csv)
    if not args.command:
        raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
    if args.config:
        _apply_config(subs[args.command], read_config(args.config))
        args = parser.parse_args(argv)

    header, rows, summary = HANDLERS[args.command](args)
    annotate = None
    if args.annotate:
        annotate = f"lindblad-dimer {__version__} {' '.join(argv)}"
    text = csvio.format_rows(header, rows, annotate=annotate)
    with csvio.open_output(args.output) as fh:
        fh.write(text)
    print(summary, file=sys.stderr)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        try:
            code = run(argv)
        except UsageError as exc:
            print(f"lindblad-dimer: {exc}", file=sys.stderr)
            print("error=usage", file=sys.stderr)
            code = 2
        except LindbladDimerError as exc:
            print(f"lindblad-dimer: {exc}", file=sys.stderr)
            print(f"error={exc.kind}", file=sys.stderr)
            code = 3
        except (ValueError, OSError) as exc:
            print(f"lindblad-dimer: {exc}", file=sys.stderr)
            print("error=validation", file=sys.stderr)
            code = 2
    return code


if __name__ == "__main__":
    sys.exit(main())
