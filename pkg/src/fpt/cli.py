"""Command-line interface.

``fpt <command> --config FILE [--out PATH]``.  Commands:

laplace   transform at ``--lambda`` (complex allowed, e.g. ``1+2j``)
survival  survival curve on the configured grid (``--density`` adds a column)
density   first-passage density on the grid
bound     closed-form density bound on the grid
approx    linearization error budget at resolution ``--n``
mc        Monte Carlo crossing probability at the configured horizon

Exit status: 0 on success, 1 on a numerical failure, 2 on a
configuration or usage error.  ``FPT_LOG`` sets the log level.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

import numpy as np

from .bounds import crossing_diff_bound, density_upper_bound
from .config import ExpressionSpec, RunConfig, load_config
from .errors import ConfigError, FPTError, NonpositiveLambda, NumericalError, SinkError
from .invert import SurvivalCurve, invert_density, survival_curve
from .lapsolve import FirstPassageQuery, laplace_fpt
from .mc import estimate_crossing

log = logging.getLogger("fpt")


def fmt(v) -> str:
    """10 significant digits; complex values as ``re+imj``."""
    if isinstance(v, complex) or np.iscomplexobj(v):
        v = complex(v)
        if v.imag == 0:
            return format(v.real, ".10g")
        return f"{v.real:.10g}{v.imag:+.10g}j"
    return format(float(v), ".10g")


def write_table(header: Sequence[str], columns: Sequence, sink) -> None:
    """CSV with a header row and LF line endings."""
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    try:
        if isinstance(sink, (str, os.PathLike)):
            with open(sink, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sink.write(text)
    except OSError as exc:
        raise SinkError(f"cannot write output: {exc}") from None


def write_csv(curve: SurvivalCurve, sink) -> None:
    """Write ``t,survival`` (plus ``density`` when present)."""
    header = ["t", "survival"]
    cols = [curve.times, curve.survival]
    if curve.density is not None:
        header.append("density")
        cols.append(curve.density)
    write_table(header, cols, sink)


def _emit(lines, sink) -> None:
    text = "".join(f"{k}={v}\n" for k, v in lines)
    try:
        if sink is None:
            sys.stdout.write(text)
        else:
            with open(sink, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        raise SinkError(f"cannot write output: {exc}") from None


def _parse_lambda(raw: str) -> complex:
    try:
        lam = complex(raw.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"--lambda: cannot parse {raw!r} as a number") from None
    if not np.isfinite(lam):
        raise ConfigError("--lambda must be finite")
    if lam.real <= 0:
        raise NonpositiveLambda(f"--lambda needs a positive real part, got {raw}")
    return lam


def _query(cfg: RunConfig, n: Optional[int]) -> FirstPassageQuery:
    return FirstPassageQuery(cfg.piecewise(n), cfg.x0, cfg.barrier)


def cmd_laplace(cfg: RunConfig, args) -> None:
    lam = _parse_lambda(args.lam)
    val = laplace_fpt(cfg.piecewise(args.n), cfg.x0, cfg.barrier, lam)
    if lam.imag == 0:
        val = complex(val).real
    _emit([("lambda", fmt(lam)), ("transform", fmt(val))], args.out)


def cmd_survival(cfg: RunConfig, args) -> None:
    curve = survival_curve(_query(cfg, args.n), cfg.time_grid(), cfg.inversion, density=args.density)
    write_csv(curve, args.out or sys.stdout)


def cmd_density(cfg: RunConfig, args) -> None:
    times = cfg.time_grid()
    q = _query(cfg, args.n)
    dens = np.atleast_1d(invert_density(q.transform(), times, cfg.inversion))
    write_table(["t", "density"], [times, dens], args.out or sys.stdout)


def cmd_bound(cfg: RunConfig, args) -> None:
    times = cfg.time_grid()
    drift = cfg.piecewise(args.n)
    vals = [density_upper_bound(drift, cfg.x0, cfg.barrier, t) for t in times]
    write_table(["t", "density_bound"], [times, vals], args.out or sys.stdout)


def cmd_approx(cfg: RunConfig, args) -> None:
    n = args.n or (cfg.drift.resolution if isinstance(cfg.drift, ExpressionSpec) else 64)
    fn = cfg.drift_function()
    budget = crossing_diff_bound(fn.m1, fn.m2, cfg.x0, cfg.barrier, cfg.t_max, 1.0 / n)
    _emit([
        ("n", str(n)),
        ("m1", fmt(fn.m1)),
        ("m2", fmt(fn.m2)),
        ("sup_error_bound", fmt(fn.m2 / n)),
        ("horizon", fmt(budget.horizon)),
        ("kernel_integral", fmt(budget.integral)),
        ("crossing_error_bound", fmt(budget.bound_value)),
    ], args.out)


def cmd_mc(cfg: RunConfig, args) -> None:
    if cfg.mc is None:
        raise ConfigError("mc command needs an [mc] section")
    est = estimate_crossing(cfg.simulation_drift(), cfg.x0, cfg.barrier, cfg.mc)
    _emit([
        ("horizon", fmt(cfg.mc.horizon)),
        ("n_paths", str(est.n_paths)),
        ("p_hat", fmt(est.p_hat)),
        ("std_err", fmt(est.std_err)),
    ], args.out)


COMMANDS = {
    "laplace": cmd_laplace,
    "survival": cmd_survival,
    "density": cmd_density,
    "bound": cmd_bound,
    "approx": cmd_approx,
    "mc": cmd_mc,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpt", description="First-passage times of dX = mu(X) dt + dW.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run configuration file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--n", type=int, help="linearization resolution for expression drifts")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("laplace", parents=[common], help="Laplace transform of the passage time")
    p.add_argument("--lambda", dest="lam", required=True, help="transform variable, Re > 0")
    p = sub.add_parser("survival", parents=[common], help="survival curve")
    p.add_argument("--density", action="store_true", help="add a density column")
    for name, text in (("density", "passage-time density"), ("bound", "closed-form density bound"),
                       ("approx", "linearization error budget"), ("mc", "Monte Carlo estimate")):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("FPT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.n is not None and args.n < 1:
        print("fpt: error: --n must be at least 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        log.info("running %s", args.command)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"fpt: config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"fpt: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FPTError as exc:
        print(f"fpt: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
