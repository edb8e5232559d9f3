"""Closed-form certificates and Brownian crossing formulas.

* :func:`density_upper_bound` -- pointwise bound on the first-passage density
  of a piecewise-linear-drift diffusion.
* :func:`crossing_diff_bound` -- first-order bound on the change in the
  non-crossing probability when the drift is perturbed by at most ``eps``
  (used with ``eps = 1/n`` for the linearization at resolution ``n``).
* :func:`anderson_crossing` -- exact crossing probability of Brownian motion
  with constant drift, and the Brownian-bridge crossing factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .drift import PiecewiseLinearDrift, antiderivative_diff, m_constant
from .errors import BarrierNotAbove, ConfigError, QuadratureFail
from .specfun import normal_cdf

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def brownian_fpt_density(d: float, t: float) -> float:
    """First-passage density of driftless Brownian motion to a level ``d > 0`` above."""
    return d / (_SQRT_2PI * t ** 1.5) * math.exp(-d * d / (2.0 * t))


def density_upper_bound(drift: PiecewiseLinearDrift, x0: float, c: float, t: float) -> float:
    """``(c-x0)/(sqrt(2 pi) t^1.5) exp(G(c) - G(x0) - 3 M t/2 - (c-x0)^2/(2t))``.

    ``G`` is an antiderivative of the drift and ``M`` is
    :func:`fpt.drift.m_constant`.
    """
    if not x0 < c:
        raise BarrierNotAbove(f"start {x0} must lie below the barrier {c}")
    if not t > 0:
        raise ConfigError("t must be positive")
    d = c - x0
    log_val = (math.log(d) - math.log(_SQRT_2PI) - 1.5 * math.log(t)
               + antiderivative_diff(drift, x0, c) - 1.5 * m_constant(drift) * t
               - d * d / (2.0 * t))
    return math.exp(log_val)


@dataclass(frozen=True)
class ErrorBudget:
    """Inputs and value of the drift-perturbation crossing bound."""

    eps: float
    horizon: float
    m1: float
    m2: float
    integral: float
    bound_value: float


def _kernel_integral(m1: float, d: float, T: float) -> float:
    # int_0^T d/(sqrt(2pi) s^1.5) e^{-d^2/(2s)} (m1 + 1/sqrt(2pi(T-s))) ds
    # split at T/2; near T substitute s = T - w^2 to remove (T-s)^(-1/2)
    half = 0.5 * T

    def left(s):
        if s <= 0.0:
            return 0.0
        return brownian_fpt_density(d, s) * (m1 + 1.0 / math.sqrt(2.0 * math.pi * (T - s)))

    def right(w):
        s = T - w * w
        return 2.0 * d / (_SQRT_2PI * s ** 1.5) * math.exp(-d * d / (2.0 * s)) * (m1 * w + 1.0 / _SQRT_2PI)

    total = 0.0
    for f, a, b in ((left, 0.0, half), (right, 0.0, math.sqrt(T - half))):
        val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-10, limit=200)
        if not math.isfinite(val) or err > 1e-8 * abs(val) + 1e-300:
            raise QuadratureFail(f"kernel quadrature error {err:g} for value {val:g}")
        total += val
    return total


def crossing_diff_bound(m1: float, m2: float, x0: float, c: float, T: float, eps: float) -> ErrorBudget:
    """Leading-order bound on ``|P(tau_c > T) - P(tau_c^eps > T)|``.

    ``2 T m2 e^{3 m2 T/2} e^{m1 (c-x0)} * I * eps`` with
    ``I = int_0^T (c-x0)/(sqrt(2 pi) s^1.5) e^{-(c-x0)^2/(2s)} (m1 + 1/sqrt(2 pi (T-s))) ds``.

    ``m1`` bounds ``|mu|``, ``m2`` is the Lipschitz constant and ``eps``
    the sup-distance between the drifts (``1/n`` for the grid
    interpolant).  The generic perturbation form is obtained by passing the
    Lipschitz constant ``K`` for ``m2`` and ``|inf mu|`` for ``m1``.  The
    ``o(eps)`` remainder is not included.
    """
    if not x0 < c:
        raise BarrierNotAbove(f"start {x0} must lie below the barrier {c}")
    if min(m1, m2, T, eps) < 0 or T == 0:
        raise ConfigError("bound inputs must be non-negative and T positive")
    d = c - x0
    integral = _kernel_integral(m1, d, T) if d * d / (2.0 * T) < 700.0 else 0.0
    prefactor = 2.0 * T * m2 * math.exp(1.5 * m2 * T + m1 * d)
    return ErrorBudget(eps, T, m1, m2, integral, prefactor * integral * eps)


def anderson_crossing(mu: float, h: float, d: float) -> float:
    """``P(sup_{s<=h} (mu s + W_s) >= d)`` for ``d > 0``.

    ``1 - Phi((d - mu h)/sqrt h) + e^{2 mu d} Phi((-mu h - d)/sqrt h)``.
    """
    if not h > 0:
        raise ConfigError("horizon must be positive")
    if d <= 0:
        return 1.0
    sq = math.sqrt(h)
    first = 0.5 * math.erfc((d - mu * h) / (sq * math.sqrt(2.0)))
    arg = (-mu * h - d) / sq
    # e^{2 mu d} Phi(arg) in log form; Phi(arg) via erfc keeps the tail accurate
    tail = 0.5 * math.erfc(-arg / math.sqrt(2.0))
    second = math.exp(2.0 * mu * d + math.log(tail)) if tail > 0 else 0.0
    return min(1.0, first + second)


def anderson_survival(mu: float, h: float, d: float) -> float:
    """Complement of :func:`anderson_crossing`."""
    if d <= 0:
        return 0.0
    sq = math.sqrt(h)
    return normal_cdf((d - mu * h) / sq) - math.exp(2.0 * mu * d) * normal_cdf((-mu * h - d) / sq)


def bridge_survival(x: float, z: float, c: float, t: float) -> float:
    """``1 - exp(-2 (c-x)(c-z)/t)``: a Brownian bridge from ``x`` to ``z`` stays below ``c``."""
    if x >= c or z >= c:
        return 0.0
    return -math.expm1(-2.0 * (c - x) * (c - z) / t)
