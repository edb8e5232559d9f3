"""Run configuration files.

INI-style sections with ``key = value`` lines; ``#`` or ``;`` start
comments.  Unknown sections and keys are rejected.  Example::

    [drift]
    # either the piecewise-linear form ...
    breakpoints = -1, 1
    slopes = 0, -1, 0
    intercepts = 1, 0, -1
    # ... or an expression, linearized at `resolution` nodes per unit
    # expression = tanh(x)
    # domain = -4, 4
    # resolution = 64

    [query]
    x0 = 0
    barrier = 1

    [inversion]
    method = euler_summation
    terms = 32
    target_rel_tol = 1e-8

    [grid]
    t_max = 2
    steps = 50
    # or an explicit list: times = 0.5, 1, 2

    [mc]
    n_paths = 100000
    dt = 0.001
    seed = 12345
    bridge_correction = true
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .drift import DriftFunction, PiecewiseLinearDrift, linearize, make_piecewise
from .errors import (
    ConfigError,
    ConstraintViolation,
    MissingField,
    TypeMismatch,
    UnknownField,
)
from .expr import DriftExpression, parse_expression
from .invert import InversionConfig
from .mc import McConfig

DEFAULT_RESOLUTION = 64
DEFAULT_MARGIN = 8.0

SCHEMA = {
    "drift": {"breakpoints", "slopes", "intercepts", "expression", "domain", "resolution", "m1", "m2"},
    "query": {"x0", "barrier"},
    "inversion": {"method", "terms", "target_rel_tol"},
    "grid": {"t_max", "steps", "times"},
    "mc": {"n_paths", "dt", "seed", "bridge_correction", "horizon"},
}
REQUIRED_SECTIONS = ("drift", "query")


@dataclass(frozen=True)
class PiecewiseSpec:
    breakpoints: tuple
    slopes: tuple
    intercepts: tuple


@dataclass(frozen=True)
class ExpressionSpec:
    expression: DriftExpression
    domain: Optional[tuple]
    resolution: int
    m1: Optional[float] = None
    m2: Optional[float] = None


@dataclass(frozen=True)
class RunConfig:
    drift: object
    x0: float
    barrier: float
    inversion: InversionConfig = field(default_factory=InversionConfig)
    t_max: float = 2.0
    steps: int = 50
    times: Optional[tuple] = None
    mc: Optional[McConfig] = None

    def time_grid(self) -> np.ndarray:
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        return self.t_max * np.arange(1, self.steps + 1) / self.steps

    def domain(self):
        spec = self.drift
        if isinstance(spec, ExpressionSpec) and spec.domain is not None:
            return spec.domain
        lo, hi = sorted((self.x0, self.barrier))
        return (lo - DEFAULT_MARGIN, hi + DEFAULT_MARGIN)

    def drift_function(self) -> DriftFunction:
        """The drift as a general function with its constants ``M1``, ``M2``."""
        spec = self.drift
        if isinstance(spec, ExpressionSpec):
            return DriftFunction.estimate(spec.expression, self.domain(), spec.m1, spec.m2)
        pw = self.piecewise()
        m1 = max(abs(v) for v in list(pw.node_values()) + [pw.intercepts[0], pw.intercepts[-1]])
        m2 = max(abs(a) for a in pw.slopes)
        return DriftFunction(pw, m1, m2)

    def piecewise(self, n: Optional[int] = None) -> PiecewiseLinearDrift:
        """Drift handed to the solver; expressions are linearized at resolution ``n``."""
        spec = self.drift
        if isinstance(spec, PiecewiseSpec):
            return make_piecewise(spec.breakpoints, spec.slopes, spec.intercepts)
        return linearize(spec.expression, self.domain(), n or spec.resolution)

    def simulation_drift(self):
        """Drift used by Monte Carlo: the expression itself when one is given."""
        spec = self.drift
        if isinstance(spec, ExpressionSpec):
            return spec.expression
        return self.piecewise()


def _floats(raw, key):
    raw = raw.strip()
    if raw == "":
        return ()
    try:
        return tuple(float(v) for v in raw.split(","))
    except ValueError:
        raise TypeMismatch(f"{key}: expected a comma-separated list of numbers, got {raw!r}") from None


def _float(raw, key):
    try:
        v = float(raw)
    except ValueError:
        raise TypeMismatch(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise TypeMismatch(f"{key}: expected a finite number, got {raw!r}")
    return v


def _int(raw, key):
    try:
        return int(raw)
    except ValueError:
        raise TypeMismatch(f"{key}: expected an integer, got {raw!r}") from None


def _bool(raw, key):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise TypeMismatch(f"{key}: expected true/false, got {raw!r}")


def parse_config(text: str) -> RunConfig:
    """Parse configuration text; see the module docstring for the format."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise TypeMismatch(f"malformed configuration: {exc}") from None
    for section in parser.sections():
        if section not in SCHEMA:
            raise UnknownField(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise UnknownField(f"unknown key {section}.{key}")
    for section in REQUIRED_SECTIONS:
        if not parser.has_section(section):
            raise MissingField(f"missing section [{section}]")

    q = parser["query"]
    for key in ("x0", "barrier"):
        if key not in q:
            raise MissingField(f"missing query.{key}")
    x0 = _float(q["x0"], "query.x0")
    barrier = _float(q["barrier"], "query.barrier")
    if not x0 < barrier:
        raise ConstraintViolation(f"query.x0 = {x0} must be below query.barrier = {barrier}")

    drift = _parse_drift(parser["drift"])

    inv = parser["inversion"] if parser.has_section("inversion") else {}
    method = inv.get("method", "euler_summation").strip()
    terms = _int(inv["terms"], "inversion.terms") if "terms" in inv else None
    tol = _float(inv["target_rel_tol"], "inversion.target_rel_tol") if "target_rel_tol" in inv else 1e-8
    try:
        inversion = InversionConfig(method, terms, tol)
    except ConfigError as exc:
        raise ConstraintViolation(f"inversion: {exc}") from None

    grid = parser["grid"] if parser.has_section("grid") else {}
    t_max = _float(grid["t_max"], "grid.t_max") if "t_max" in grid else 2.0
    steps = _int(grid["steps"], "grid.steps") if "steps" in grid else 50
    times = None
    if "times" in grid:
        if "t_max" in grid or "steps" in grid:
            raise ConstraintViolation("grid: give either times or t_max/steps, not both")
        times = _floats(grid["times"], "grid.times")
        if not times or any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise ConstraintViolation("grid.times must be positive and strictly increasing")
        t_max = times[-1]
        steps = len(times)
    if not t_max > 0:
        raise ConstraintViolation("grid.t_max must be positive")
    if steps < 1:
        raise ConstraintViolation("grid.steps must be at least 1")

    mc = None
    if parser.has_section("mc"):
        m = parser["mc"]
        horizon = _float(m["horizon"], "mc.horizon") if "horizon" in m else t_max
        n_paths = _int(m["n_paths"], "mc.n_paths") if "n_paths" in m else 100_000
        dt = _float(m["dt"], "mc.dt") if "dt" in m else 1e-3
        seed = _int(m["seed"], "mc.seed") if "seed" in m else 12345
        bridge = _bool(m["bridge_correction"], "mc.bridge_correction") if "bridge_correction" in m else True
        try:
            mc = McConfig(n_paths=n_paths, dt=dt, seed=seed, bridge_correction=bridge, horizon=horizon)
        except ConfigError as exc:
            raise ConstraintViolation(f"mc: {exc}") from None

    return RunConfig(drift, x0, barrier, inversion, t_max, steps, times, mc)


def _parse_drift(d) -> object:
    piecewise_keys = {"breakpoints", "slopes", "intercepts"} & set(d)
    expression_keys = {"expression", "domain", "resolution", "m1", "m2"} & set(d)
    if piecewise_keys and expression_keys:
        raise ConstraintViolation("drift: give either breakpoints/slopes/intercepts or expression, not both")
    if piecewise_keys:
        for key in ("slopes", "intercepts"):
            if key not in d:
                raise MissingField(f"missing drift.{key}")
        bp = _floats(d.get("breakpoints", ""), "drift.breakpoints")
        slopes = _floats(d["slopes"], "drift.slopes")
        intercepts = _floats(d["intercepts"], "drift.intercepts")
        try:
            make_piecewise(bp, slopes, intercepts)
        except ValueError as exc:
            raise ConstraintViolation(f"drift: {exc}") from None
        return PiecewiseSpec(bp, slopes, intercepts)
    if "expression" not in d:
        raise MissingField("drift needs breakpoints/slopes/intercepts or expression")
    expression = parse_expression(d["expression"])
    domain = None
    if "domain" in d:
        domain = _floats(d["domain"], "drift.domain")
        if len(domain) != 2 or not domain[0] < domain[1]:
            raise ConstraintViolation("drift.domain must be two increasing numbers L, R")
    resolution = _int(d["resolution"], "drift.resolution") if "resolution" in d else DEFAULT_RESOLUTION
    if resolution < 1:
        raise ConstraintViolation("drift.resolution must be at least 1")
    m1 = _float(d["m1"], "drift.m1") if "m1" in d else None
    m2 = _float(d["m2"], "drift.m2") if "m2" in d else None
    if (m1 is not None and m1 < 0) or (m2 is not None and m2 < 0):
        raise ConstraintViolation("drift.m1 and drift.m2 must be non-negative")
    return ExpressionSpec(expression, domain, resolution, m1, m2)


def load_config(path) -> RunConfig:
    """Read and validate a configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
