"""Continuous piecewise-linear drifts and general drift functions.

A :class:`PiecewiseLinearDrift` is ``mu(x) = a_i x + b_i`` on consecutive
segments of the real line, with constant outermost segments.  General
drifts (:class:`DriftFunction`) are reduced to that form by
:func:`linearize`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import (
    DiscontinuousDrift,
    EmptyDomain,
    NonConstantTail,
    NonMonotoneBreakpoints,
    QuadratureFail,
    SigmaVanishes,
    UnboundedValue,
)

CONTINUITY_RTOL = 1e-12


@dataclass(frozen=True)
class PiecewiseLinearDrift:
    """Drift ``mu(x) = slopes[i] * x + intercepts[i]`` on segment ``i``.

    Segment ``i`` covers ``[breakpoints[i-1], breakpoints[i]]`` with the
    conventions ``breakpoints[-1] = -inf`` and ``breakpoints[m] = +inf``, so
    there are ``m + 1`` segments for ``m`` breakpoints.  Build instances
    with :func:`make_piecewise`, which validates them.
    """

    breakpoints: tuple
    slopes: tuple
    intercepts: tuple

    @property
    def n_segments(self) -> int:
        return len(self.slopes)

    def segment_index(self, x):
        """Index of the segment containing ``x`` (right-closed at breakpoints)."""
        return np.searchsorted(np.asarray(self.breakpoints, dtype=float), x, side="left")

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        idx = self.segment_index(x)
        out = np.asarray(self.slopes)[idx] * x + np.asarray(self.intercepts)[idx]
        return float(out) if scalar else out

    def node_values(self):
        """Drift values at the breakpoints."""
        bp = np.asarray(self.breakpoints, dtype=float)
        return np.asarray(self.slopes[:-1]) * bp + np.asarray(self.intercepts[:-1])

    @property
    def canonical(self) -> bool:
        return self.slopes[0] == 0.0 and self.slopes[-1] == 0.0

    def reflected(self) -> "PiecewiseLinearDrift":
        """Drift of ``-X``: ``x -> -mu(-x)``.

        Turns a downward barrier problem into an upward one.
        """
        bp = tuple(-b for b in reversed(self.breakpoints))
        slopes = tuple(reversed(self.slopes))
        intercepts = tuple(-b for b in reversed(self.intercepts))
        return PiecewiseLinearDrift(bp, slopes, intercepts)


def make_piecewise(breakpoints: Sequence[float], slopes: Sequence[float], intercepts: Sequence[float],
                   canonical: bool = True) -> PiecewiseLinearDrift:
    """Validate and build a :class:`PiecewiseLinearDrift`.

    Parameters
    ----------
    breakpoints : sequence of float
        Strictly increasing ``x_1 < ... < x_m``.
    slopes, intercepts : sequence of float
        ``m + 1`` values each.
    canonical : bool
        Require zero slope on both outermost segments (the solver needs it).

    Raises
    ------
    NonMonotoneBreakpoints, DiscontinuousDrift, NonConstantTail
    """
    bp = tuple(float(v) for v in breakpoints)
    a = tuple(float(v) for v in slopes)
    b = tuple(float(v) for v in intercepts)
    if len(a) != len(bp) + 1 or len(b) != len(bp) + 1:
        raise ValueError(f"{len(bp)} breakpoints need {len(bp) + 1} slopes and intercepts, "
                         f"got {len(a)} and {len(b)}")
    if not all(math.isfinite(v) for v in bp + a + b):
        raise ValueError("drift coefficients must be finite")
    if any(x1 >= x2 for x1, x2 in zip(bp, bp[1:])):
        raise NonMonotoneBreakpoints("breakpoints must be strictly increasing")
    for i, x in enumerate(bp):
        left = a[i] * x + b[i]
        right = a[i + 1] * x + b[i + 1]
        scale = max(abs(left), abs(right), abs(a[i] * x), abs(a[i + 1] * x), 1.0)
        if abs(left - right) > CONTINUITY_RTOL * scale:
            raise DiscontinuousDrift(f"drift jumps from {left} to {right} at x={x}")
    if canonical and (a[0] != 0.0 or a[-1] != 0.0):
        raise NonConstantTail("outermost segments must have slope 0")
    return PiecewiseLinearDrift(bp, a, b)


def constant_drift(value: float) -> PiecewiseLinearDrift:
    return make_piecewise([], [0.0], [value])


def from_nodes(nodes: Sequence[float], values: Sequence[float]) -> PiecewiseLinearDrift:
    """Continuous interpolant through ``(nodes[i], values[i])``, constant outside."""
    x = np.asarray(nodes, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.size == 0:
        raise EmptyDomain("need at least one node")
    if np.any(np.diff(x) <= 0):
        raise NonMonotoneBreakpoints("nodes must be strictly increasing")
    slopes = [0.0]
    intercepts = [float(y[0])]
    for i in range(x.size - 1):
        s = (y[i + 1] - y[i]) / (x[i + 1] - x[i])
        slopes.append(float(s))
        # anchor on the left node so the left value is reproduced exactly
        intercepts.append(float(y[i] - s * x[i]))
    slopes.append(0.0)
    intercepts.append(float(y[-1]))
    return make_piecewise(x, slopes, intercepts)


@dataclass(frozen=True)
class DriftFunction:
    """A general drift ``y -> mu(y)`` with sup bound ``m1`` and Lipschitz constant ``m2``."""

    evaluator: Callable
    m1: float
    m2: float

    def __call__(self, y):
        return self.evaluator(y)

    @classmethod
    def estimate(cls, evaluator: Callable, domain, m1: Optional[float] = None,
                 m2: Optional[float] = None, points: int = 10_000, margin: float = 0.1) -> "DriftFunction":
        """Fill in missing constants from a dense grid over ``domain`` plus a safety margin."""
        lo, hi = domain
        if not lo < hi:
            raise EmptyDomain(f"empty domain [{lo}, {hi}]")
        y = np.linspace(lo, hi, points)
        v = np.asarray(evaluator(y), dtype=float) * np.ones_like(y)
        if not np.all(np.isfinite(v)):
            raise UnboundedValue("drift is not finite on the sampling grid")
        if m1 is None:
            m1 = (1.0 + margin) * float(np.max(np.abs(v)))
        if m2 is None:
            m2 = (1.0 + margin) * float(np.max(np.abs(np.diff(v) / np.diff(y)))) if points > 1 else 0.0
        return cls(evaluator, float(m1), float(m2))


def linearize(drift, domain, n: int) -> PiecewiseLinearDrift:
    """Piecewise-linear interpolant of ``drift`` on a grid of step ``1/n``.

    Nodes are ``L + i/n`` for ``i = 0, 1, ...`` up to ``R`` (``R`` is added
    when ``(R - L) n`` is not an integer).  Outside ``[L, R]`` the drift is
    extended by the constants ``mu(L)`` and ``mu(R)``.  On ``[L, R]`` the
    interpolation error is at most ``M2 / n`` for an ``M2``-Lipschitz drift.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise EmptyDomain(f"empty domain [{lo}, {hi}]")
    if n < 1:
        raise ValueError("resolution n must be at least 1")
    count = int(math.floor((hi - lo) * n + 1e-9))
    nodes = lo + np.arange(count + 1) / n
    if hi - nodes[-1] > 1e-9 / n:
        nodes = np.append(nodes, hi)
    else:
        nodes[-1] = hi
    values = np.asarray(drift(nodes), dtype=float) * np.ones_like(nodes)
    if not np.all(np.isfinite(values)):
        raise UnboundedValue("drift returned a non-finite value on the grid")
    return from_nodes(nodes, values)


def antiderivative_diff(drift: PiecewiseLinearDrift, a: float, b: float) -> float:
    """``G(b) - G(a)`` where ``G' = mu``, summed exactly segment by segment."""
    if a == b:
        return 0.0
    if a > b:
        return -antiderivative_diff(drift, b, a)
    cuts = [a] + [x for x in drift.breakpoints if a < x < b] + [b]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        i = int(drift.segment_index(0.5 * (lo + hi)))
        s, c = drift.slopes[i], drift.intercepts[i]
        total += 0.5 * s * (hi - lo) * (hi + lo) + c * (hi - lo)
    return total


def m_constant(drift: PiecewiseLinearDrift) -> float:
    """``inf_y { mu(y)^2 + mu'_-(y)/3 }``.

    ``mu'_-`` is the lower derivative: the slope inside a segment, and the
    smaller adjacent slope at a breakpoint.
    """
    bp = drift.breakpoints
    best = math.inf
    for i, (s, c) in enumerate(zip(drift.slopes, drift.intercepts)):
        lo = bp[i - 1] if i > 0 else -math.inf
        hi = bp[i] if i < len(bp) else math.inf
        if s == 0.0:
            cand = c * c
        else:
            vertex = -c / s
            if lo <= vertex <= hi:
                cand = 0.0
            else:
                cand = min((s * e + c) ** 2 for e in (lo, hi) if math.isfinite(e))
        best = min(best, cand + s / 3.0)
    for i, x in enumerate(bp):
        mu = drift.slopes[i] * x + drift.intercepts[i]
        best = min(best, mu * mu + min(drift.slopes[i], drift.slopes[i + 1]) / 3.0)
    return best


def extremes(drift: PiecewiseLinearDrift):
    """``(inf mu, sup mu)`` over the real line."""
    if not drift.canonical:
        raise NonConstantTail("extremes need constant outermost segments")
    vals = [drift.intercepts[0], drift.intercepts[-1]]
    vals.extend(drift.node_values().tolist())
    return min(vals), max(vals)


def lamperti(mu: Callable, sigma: Callable, sigma_prime: Callable, y0: float, point: float):
    """Unit-noise reduction of ``dX = mu dt + sigma dW``.

    Returns ``(F(point), new_drift)`` with ``F(y) = int_{y0}^{y} du / sigma(u)``
    and ``new_drift = mu(point)/sigma(point) - sigma'(point)/2``, the drift of
    ``F(X)`` evaluated at ``F(point)``.
    """
    lo, hi = sorted((y0, point))
    probe = np.linspace(lo, hi, 65)
    if np.any(np.asarray([sigma(p) for p in probe]) <= 0.0):
        raise SigmaVanishes("sigma must stay positive between y0 and point")

    def inv_sigma(u):
        s = sigma(u)
        if s <= 0.0:
            raise SigmaVanishes(f"sigma({u}) = {s}")
        return 1.0 / s

    value, err = integrate.quad(inv_sigma, y0, point, epsabs=0.0, epsrel=1e-10, limit=200)
    if not math.isfinite(value) or err > 1e-8 * max(abs(value), 1e-300) + 1e-14:
        raise QuadratureFail(f"quadrature error estimate {err:g} too large")
    s = sigma(point)
    return value, mu(point) / s - 0.5 * sigma_prime(point)
