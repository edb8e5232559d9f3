"""Laplace transform of the first-passage density for piecewise-linear drifts.

For ``dX = mu(X) dt + dW`` started at ``x < c`` the transform of the
first-passage density is ``u(x)/u(c)``, where ``u`` solves

    u''/2 + mu(x) u' - lam u = 0,   u(-inf) = 0.

On a constant-drift segment ``u`` is a combination of two exponentials; on
a segment with slope ``a != 0`` it is a combination of the Kummer pair from
:func:`fpt.specfun.kummer_basis`.  The global solution is assembled left to
right with C1 matching at the breakpoints.  The state ``(u, u')`` is
renormalized after every segment and the discarded factor is kept as a
complex logarithm, so nothing overflows and only ratios are ever formed.

Every routine is vectorized over an array of ``lam`` values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate

from .drift import PiecewiseLinearDrift
from .errors import (
    BarrierNotAbove,
    DegenerateSeed,
    NonConstantTail,
    NonpositiveLambda,
    SingularBasisMatrix,
    StepUnderflow,
    TooCloseToBreakpoint,
)
from .specfun import kummer_series

# Kummer pair is used only where |z| and the series stay inside these limits
KUMMER_MAX_Z = 30.0
KUMMER_MAX_GROWTH = 40.0
# accepted amplification of rounding errors by the Kummer basis solve
KUMMER_MAX_LOSS = 1e3
# local power series: step length times local rate
LOCAL_STEP_RATE = 0.5
EQUAL_ROOT_TOL = 1e-8


class SegmentState(NamedTuple):
    """``(u, u')`` up to the common factor ``exp(log_scale)``."""

    u: np.ndarray
    du: np.ndarray
    log_scale: np.ndarray


def _as_lambda(lam):
    arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    if arr.ndim != 1:
        arr = arr.ravel()
    return arr


def _check_lambda(lam):
    if np.any(lam.real <= 0.0):
        raise NonpositiveLambda("the transform variable needs Re(lambda) > 0")


def exponential_roots(b, lam):
    """Roots ``r+-`` of ``r^2/2 + b r - lam = 0``, i.e. ``-b +- sqrt(b^2 + 2 lam)``.

    Computed without cancellation; ``Re r+ > 0 > Re r-`` when ``Re lam > 0``.
    """
    lam = np.asarray(lam, dtype=complex)
    w = np.sqrt(b * b + 2.0 * lam)
    if b >= 0.0:
        r_minus = -b - w
        with np.errstate(divide="ignore", invalid="ignore"):
            r_plus = np.where(r_minus != 0, -2.0 * lam / r_minus, 0.0)
    else:
        r_plus = -b + w
        with np.errstate(divide="ignore", invalid="ignore"):
            r_minus = np.where(r_plus != 0, -2.0 * lam / r_plus, 0.0)
    return r_plus, r_minus


def leftmost_seed(b0: float, lam, x_start: float = 0.0):
    """State of the solution that vanishes at ``-inf`` on a constant tail.

    Returns ``(u, u')`` at ``x_start`` for ``u(x) = exp(r+ (x - x_start))``,
    ``r+ = -b0 + sqrt(b0^2 + 2 lam)``.  ``lam = 0`` is accepted only when
    ``r+ > 0`` (that is ``b0 < 0``).
    """
    lam_arr = _as_lambda(lam)
    bad = (lam_arr.real < 0.0) | ((lam_arr.real == 0.0) & (lam_arr.imag != 0.0))
    if np.any(bad):
        raise NonpositiveLambda("the transform variable needs Re(lambda) > 0")
    r_plus, _ = exponential_roots(float(b0), lam_arr)
    if np.any(r_plus.real <= 0.0):
        raise DegenerateSeed("no solution decays at -inf (r+ = 0)")
    u = np.ones_like(r_plus)
    if np.ndim(lam) == 0:
        return complex(u[0]), complex(r_plus[0])
    return u, r_plus


@dataclass(frozen=True)
class SegmentBasis:
    """Fundamental-solution descriptor for one segment ``[left, right]``.

    ``kind`` is ``"kummer"`` (slope != 0, vertex and Kummer parameter set)
    or ``"exponential"`` (slope 0, roots ``r+-`` set).
    """

    kind: str
    left: float
    right: float
    slope: float
    intercept: float
    lam: np.ndarray
    vertex: Optional[float] = None
    alpha: Optional[np.ndarray] = None
    r_plus: Optional[np.ndarray] = None
    r_minus: Optional[np.ndarray] = None


def segment_basis(slope: float, intercept: float, lam, left: float, right: float) -> SegmentBasis:
    lam = _as_lambda(lam)
    if slope == 0.0:
        rp, rm = exponential_roots(intercept, lam)
        return SegmentBasis("exponential", left, right, 0.0, intercept, lam, r_plus=rp, r_minus=rm)
    return SegmentBasis("kummer", left, right, slope, intercept, lam,
                        vertex=-intercept / slope, alpha=-lam / (2.0 * slope))


class Propagation(NamedTuple):
    state: SegmentState
    c1: np.ndarray
    c2: np.ndarray
    kummer_used: np.ndarray


def _kummer_pair(alpha, slope, d):
    # e1 = Psi(alpha, 1/2; z), e2 = d Psi(alpha + 1/2, 3/2; z) and derivatives,
    # plus the worst cancellation ratio of the four series
    z = -slope * d * d
    p1, dp1, m1, ok1 = kummer_series(alpha, 0.5, z)
    p2, dp2, m2, ok2 = kummer_series(alpha + 0.5, 1.5, z)
    e1 = p1
    de1 = -2.0 * slope * d * dp1
    e2 = d * p2
    de2 = p2 + 2.0 * z * dp2
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = np.maximum(m1 / np.abs(p1), m2 / np.abs(p2))
    loss = np.where(ok1 & ok2, loss, np.inf)
    return e1, de1, e2, de2, loss, z


def _local_series(slope, intercept, lam, u, du, left, right):
    """Exact power-series propagation of the segment ODE from ``left`` to ``right``.

    The solution of ``u''/2 + (slope x + intercept) u' - lam u = 0`` is
    entire; around a point with drift ``m`` its Taylor coefficients obey
    ``c[k+2] = -2 (m (k+1) c[k+1] + (slope k - lam) c[k]) / ((k+1)(k+2))``.
    The segment is cut into sub-steps short enough that the series converges
    quickly and without cancellation.
    """
    h_total = right - left
    mu_max = max(abs(slope * left + intercept), abs(slope * right + intercept))
    rate = mu_max + math.sqrt(2.0 * float(np.max(np.abs(lam)))) + math.sqrt(abs(slope))
    nsub = max(1, int(math.ceil(h_total * rate / LOCAL_STEP_RATE)))
    h = h_total / nsub
    log_scale = np.zeros(lam.shape, dtype=complex)
    x = left
    for _ in range(nsub):
        m = slope * x + intercept
        g0 = u
        g1 = du * h
        su = g0 + g1
        sd = g1.copy()
        k = 0
        while True:
            g2 = -2.0 * (m * (k + 1) * g1 * h + (slope * k - lam) * g0 * h * h) / ((k + 1) * (k + 2))
            su = su + g2
            sd = sd + (k + 2) * g2
            k += 1
            g0, g1 = g1, g2
            if k > 2 and np.all(np.abs(g0) + np.abs(g1) <= 1e-17 * (np.abs(su) + np.abs(sd))):
                break
            if k > 300:
                raise StepUnderflow("local series failed to converge")
        u, du = su, sd / h
        norm = np.maximum(np.abs(u), np.abs(du))
        if np.any(norm == 0.0) or not np.all(np.isfinite(norm)):
            raise SingularBasisMatrix("solution vanished or overflowed inside a segment")
        u, du = u / norm, du / norm
        log_scale = log_scale + np.log(norm)
        x += h
    return u, du, log_scale


def propagate_segment(basis: SegmentBasis, state_in: SegmentState) -> Propagation:
    """Carry ``(u, u')`` from the left end of ``basis`` to its right end.

    The left values fix the coefficients ``(C1, C2)`` of the segment's
    solution pair (continuity of ``u`` and ``u'``); the pair is then
    evaluated at the right end.  The output is renormalized to unit size and
    the factor is added to ``log_scale``.

    For Kummer segments the pair is used wherever its evaluation is well
    conditioned; for the remaining ``lam`` values (vertex far away, huge
    Kummer parameter) the same ODE is integrated by its local power series
    and ``C1, C2`` are reported as ``nan``.
    """
    lam = basis.lam
    u, du, ls = (np.asarray(v, dtype=complex) for v in state_in)
    h = basis.right - basis.left
    if basis.kind == "exponential":
        rp, rm = basis.r_plus, basis.r_minus
        diff = rp - rm
        equal = np.abs(diff) < EQUAL_ROOT_TOL
        safe = np.where(equal, 1.0, diff)
        cp = (du - rm * u) / safe
        cm = (rp * u - du) / safe
        decay = np.exp(-diff * h)
        u_out = cp + cm * decay
        du_out = rp * cp + rm * cm * decay
        shift = rp * h
        if np.any(equal):
            # repeated root r = -b: u = (C1 s + C2) e^{r s}
            r = -basis.intercept
            c1e = du - r * u
            c2e = u
            u_out = np.where(equal, c1e * h + c2e, u_out)
            du_out = np.where(equal, c1e + r * (c1e * h + c2e), du_out)
            shift = np.where(equal, r * h, shift)
            cp = np.where(equal, c1e, cp)
            cm = np.where(equal, c2e, cm)
        norm = np.maximum(np.abs(u_out), np.abs(du_out))
        if np.any(norm == 0.0) or not np.all(np.isfinite(norm)):
            raise SingularBasisMatrix("exponential segment produced a degenerate state")
        state = SegmentState(u_out / norm, du_out / norm, ls + shift + np.log(norm))
        return Propagation(state, cp, cm, np.zeros(lam.shape, dtype=bool))

    alpha = basis.alpha
    slope = basis.slope
    d_l = basis.left - basis.vertex
    d_r = basis.right - basis.vertex
    z_max = abs(slope) * max(d_l * d_l, d_r * d_r)
    use = (z_max <= KUMMER_MAX_Z) & (2.0 * np.sqrt(np.abs(alpha) * z_max) <= KUMMER_MAX_GROWTH)
    c1 = np.full(lam.shape, np.nan, dtype=complex)
    c2 = np.full(lam.shape, np.nan, dtype=complex)
    u_out = np.empty(lam.shape, dtype=complex)
    du_out = np.empty(lam.shape, dtype=complex)
    shift = np.zeros(lam.shape, dtype=complex)
    if np.any(use):
        al = alpha[use]
        e1l, de1l, e2l, de2l, loss_l, z_l = _kummer_pair(al, slope, d_l)
        e1r, de1r, e2r, de2r, loss_r, z_r = _kummer_pair(al, slope, d_r)
        w_l = e1l * de2l - e2l * de1l
        # exact Wronskian is exp(z); the ratio measures cancellation in the solve
        kappa = (np.abs(e1l * de2l) + np.abs(e2l * de1l)) / math.exp(z_l)
        kappa_r = (np.abs(e1r * de2r) + np.abs(e2r * de1r)) / math.exp(z_r)
        good = (np.maximum(loss_l, loss_r) * np.maximum(kappa, kappa_r) <= KUMMER_MAX_LOSS) & (w_l != 0)
        idx = np.flatnonzero(use)[good]
        ul, dul = u[idx], du[idx]
        w = w_l[good]
        k1 = (ul * de2l[good] - dul * e2l[good]) / w
        k2 = (e1l[good] * dul - de1l[good] * ul) / w
        c1[idx] = k1
        c2[idx] = k2
        u_out[idx] = k1 * e1r[good] + k2 * e2r[good]
        du_out[idx] = k1 * de1r[good] + k2 * de2r[good]
        use = np.zeros(lam.shape, dtype=bool)
        use[idx] = True
    rest = ~use
    if np.any(rest):
        ur, dur, lsr = _local_series(slope, basis.intercept, lam[rest], u[rest], du[rest],
                                     basis.left, basis.right)
        u_out[rest] = ur
        du_out[rest] = dur
        shift[rest] = lsr
    norm = np.maximum(np.abs(u_out), np.abs(du_out))
    if np.any(norm == 0.0) or not np.all(np.isfinite(norm)):
        raise SingularBasisMatrix("Kummer segment produced a degenerate state")
    state = SegmentState(u_out / norm, du_out / norm, ls + shift + np.log(norm))
    return Propagation(state, c1, c2, use)


@dataclass(frozen=True)
class LaplaceSolution:
    """Global solution ``u`` of ``u''/2 + mu u' - lam u = 0`` with ``u(-inf) = 0``.

    Stores the normalized state at every node (breakpoints plus requested
    evaluation points) for each ``lam``; :meth:`state` evaluates anywhere.
    """

    drift: PiecewiseLinearDrift
    lam: np.ndarray
    nodes: np.ndarray
    u: np.ndarray
    du: np.ndarray
    log_scale: np.ndarray
    seed_rate: np.ndarray
    kummer_fraction: float

    def _segment_at(self, x):
        i = int(self.drift.segment_index(x))
        return self.drift.slopes[i], self.drift.intercepts[i]

    def state(self, x: float) -> SegmentState:
        """Normalized ``(u, u')`` and log factor at ``x``."""
        nodes = self.nodes
        j = int(np.searchsorted(nodes, x, side="right")) - 1
        if j >= 0 and nodes[j] == x:
            return SegmentState(self.u[j], self.du[j], self.log_scale[j])
        if j < 0:
            # left of every node: pure decaying exponential
            shift = self.seed_rate * (x - nodes[0])
            return SegmentState(self.u[0], self.du[0], self.log_scale[0] + shift)
        start = nodes[j]
        slope, intercept = self._segment_at(0.5 * (start + x))
        basis = segment_basis(slope, intercept, self.lam, start, x)
        st = SegmentState(self.u[j], self.du[j], self.log_scale[j])
        return propagate_segment(basis, st).state

    def log_u(self, x: float) -> np.ndarray:
        st = self.state(x)
        return np.log(st.u) + st.log_scale

    def values(self, x: float):
        """``(u(x), u'(x))`` in absolute scale; may overflow for long ranges."""
        st = self.state(x)
        f = np.exp(st.log_scale)
        return st.u * f, st.du * f


def solve_u(drift: PiecewiseLinearDrift, lam, points=(), seed_scale: complex = 1.0) -> LaplaceSolution:
    """Assemble ``u`` for every ``lam`` (array or scalar, ``Re lam > 0``).

    ``points`` are inserted as zero-kink nodes so each is stored exactly.
    ``seed_scale`` multiplies the seed; ratios of ``u`` do not depend on it.
    """
    if not drift.canonical:
        raise NonConstantTail("solver needs constant outermost drift segments")
    lam = _as_lambda(lam)
    _check_lambda(lam)
    nodes = np.unique(np.concatenate([np.asarray(drift.breakpoints, dtype=float),
                                      np.asarray(points, dtype=float).ravel()]))
    if nodes.size == 0:
        nodes = np.array([0.0])
    b0 = drift.intercepts[0]
    seed_u, seed_du = leftmost_seed(b0, lam, nodes[0])
    r_plus = seed_du
    u = np.empty((nodes.size, lam.size), dtype=complex)
    du = np.empty_like(u)
    ls = np.empty_like(u)
    scale = complex(seed_scale)
    if scale == 0:
        raise ValueError("seed_scale must be non-zero")
    norm = np.maximum(1.0, np.abs(r_plus))
    u[0] = seed_u / norm
    du[0] = seed_du / norm
    ls[0] = np.log(norm) + np.log(scale)
    state = SegmentState(u[0], du[0], ls[0])
    used = 0
    total = 0
    for j in range(nodes.size - 1):
        left, right = nodes[j], nodes[j + 1]
        i = int(drift.segment_index(0.5 * (left + right)))
        basis = segment_basis(drift.slopes[i], drift.intercepts[i], lam, left, right)
        prop = propagate_segment(basis, state)
        state = prop.state
        if basis.kind == "kummer":
            used += int(np.count_nonzero(prop.kummer_used))
            total += lam.size
        u[j + 1], du[j + 1], ls[j + 1] = state
    frac = used / total if total else 1.0
    return LaplaceSolution(drift, lam, nodes, u, du, ls, r_plus, frac)


def laplace_fpt(drift: PiecewiseLinearDrift, x0: float, c: float, lam):
    """``E[exp(-lam tau_c)]`` for the process started at ``x0 < c``.

    Vectorized over ``lam``; real input gives real output.
    """
    if not x0 < c:
        raise BarrierNotAbove(f"start {x0} must lie below the barrier {c}")
    scalar = np.ndim(lam) == 0
    real = not np.iscomplexobj(lam)
    sol = solve_u(drift, lam, points=(x0, c))
    out = ratio(sol, x0, c)
    if real:
        out = out.real
    return out[0] if scalar else out


def ratio(sol: LaplaceSolution, x0: float, c: float) -> np.ndarray:
    """``u(x0)/u(c)`` formed in log scale."""
    s0 = sol.state(x0)
    sc = sol.state(c)
    return s0.u / sc.u * np.exp(s0.log_scale - sc.log_scale)


def ode_residual(solution: LaplaceSolution, x: float, h: float = 1e-4) -> np.ndarray:
    """Relative residual ``|u''/2 + mu u' - lam u| / max(|u|, |lam u|)`` by central differences."""
    if np.min(np.abs(solution.nodes - x)) <= h:
        raise TooCloseToBreakpoint(f"x={x} lies within {h} of a node")
    s0 = solution.state(x)
    lu0 = np.log(s0.u) + s0.log_scale
    up = np.exp(solution.log_u(x + h) - lu0)
    um = np.exp(solution.log_u(x - h) - lu0)
    u0 = 1.0
    d1 = (up - um) / (2.0 * h)
    d2 = (up - 2.0 * u0 + um) / (h * h)
    mu = solution.drift(x)
    lam = solution.lam
    res = np.abs(0.5 * d2 + mu * d1 - lam * u0)
    return res / np.maximum(1.0, np.abs(lam))


def numeric_ode_oracle(drift: PiecewiseLinearDrift, lam: complex, x_start: float, seed, x_end: float,
                       rtol: float = 1e-10, return_log: bool = False):
    """Integrate ``(u, u')' = (u', 2 lam u - 2 mu u')`` with adaptive RK45.

    Independent of the closed-form path: it only evaluates the drift.  The
    integration is split at breakpoints and at least every unit of ``x``;
    the state is renormalized between pieces and the factor tracked as a
    logarithm.  Returns ``(u, u')`` at ``x_end`` (or ``(u, u', log_scale)``
    with ``return_log``).
    """
    lam = complex(lam)
    y = np.array([seed[0], seed[1]], dtype=complex)
    cuts = [x_start]
    cuts += [b for b in drift.breakpoints if x_start < b < x_end]
    cuts.append(x_end)
    pieces = [x_start]
    for lo, hi in zip(cuts, cuts[1:]):
        n = max(1, int(math.ceil(hi - lo)))
        pieces.extend(lo + (hi - lo) * np.arange(1, n + 1) / n)
    log_scale = 0j

    def rhs(x, v):
        return np.array([v[1], 2.0 * lam * v[0] - 2.0 * drift(x) * v[1]])

    for lo, hi in zip(pieces, pieces[1:]):
        if hi <= lo:
            continue
        sol = integrate.solve_ivp(rhs, (lo, hi), y, method="RK45", rtol=rtol,
                                  atol=rtol * 1e-3, first_step=None)
        if not sol.success:
            raise StepUnderflow(sol.message)
        y = sol.y[:, -1]
        norm = float(np.max(np.abs(y)))
        y = y / norm
        log_scale += math.log(norm)
    if return_log:
        return y[0], y[1], log_scale
    f = np.exp(log_scale)
    return y[0] * f, y[1] * f


def oracle_transform(drift: PiecewiseLinearDrift, x0: float, c: float, lam: complex, start: Optional[float] = None,
                     rtol: float = 1e-10) -> complex:
    """``u(x0)/u(c)`` from :func:`numeric_ode_oracle`, seeded on the left constant tail."""
    if not x0 < c:
        raise BarrierNotAbove(f"start {x0} must lie below the barrier {c}")
    lam = complex(lam)
    if start is None:
        start = min(drift.breakpoints[0] if drift.breakpoints else x0, x0)
    r_plus, _ = exponential_roots(drift.intercepts[0], np.array([lam]))
    u0, du0, l0 = numeric_ode_oracle(drift, lam, start, (1.0, complex(r_plus[0])), x0, rtol, True)
    uc, duc, lc = numeric_ode_oracle(drift, lam, x0, (u0, du0), c, rtol, True)
    return u0 / uc * np.exp(-lc)


@dataclass(frozen=True)
class FirstPassageQuery:
    """Start ``x0``, upper barrier ``barrier`` and a canonical piecewise-linear drift."""

    drift: PiecewiseLinearDrift
    x0: float
    barrier: float

    def __post_init__(self):
        if not self.x0 < self.barrier:
            raise BarrierNotAbove(f"start {self.x0} must lie below the barrier {self.barrier}")
        if not self.drift.canonical:
            raise NonConstantTail("solver needs constant outermost drift segments")

    def transform(self):
        """``lam -> E[exp(-lam tau)]`` as a vectorized callable."""
        def f(lam):
            return laplace_fpt(self.drift, self.x0, self.barrier, np.asarray(lam, dtype=complex))
        return f
