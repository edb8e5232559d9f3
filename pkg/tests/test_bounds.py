import math

import numpy as np
import pytest

from fpt.bounds import (
    anderson_crossing,
    anderson_survival,
    bridge_survival,
    brownian_fpt_density,
    crossing_diff_bound,
    density_upper_bound,
)
from fpt.drift import constant_drift, linearize, make_piecewise
from fpt.errors import BarrierNotAbove
from fpt.invert import invert_density
from fpt.lapsolve import FirstPassageQuery

CLAMP = make_piecewise([-1.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, -1.0])


def simpson_kernel(m1, d, T, panels=100_000):
    # s = T - w^2 over the whole range removes the endpoint singularity at s = T
    w = np.linspace(0.0, math.sqrt(T), panels + 1)
    s = T - w * w
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = np.where(s > 0, d / (math.sqrt(2 * math.pi) * s ** 1.5) * np.exp(-d * d / (2 * s)), 0.0)
    g = f * (2 * m1 * w + 2 / math.sqrt(2 * math.pi))
    h = w[1] - w[0]
    return h / 3 * (g[0] + g[-1] + 4 * g[1:-1:2].sum() + 2 * g[2:-1:2].sum())


@pytest.mark.parametrize("m1,d,T", [(1.0, 1.0, 1.0), (0.0, 0.5, 2.0), (2.5, 3.0, 0.7)])
def test_kernel_integral_against_simpson(m1, d, T):
    budget = crossing_diff_bound(m1, 1.0, 0.0, d, T, 0.1)
    assert budget.integral == pytest.approx(simpson_kernel(m1, d, T), rel=1e-8)


def test_budget_scales_linearly_in_eps():
    a = crossing_diff_bound(1.0, 1.0, 0.0, 1.0, 1.0, 1 / 8).bound_value
    b = crossing_diff_bound(1.0, 1.0, 0.0, 1.0, 1.0, 1 / 16).bound_value
    assert a == pytest.approx(2 * b, rel=1e-14)


def test_budget_far_barrier_is_zero():
    assert crossing_diff_bound(1.0, 1.0, 0.0, 60.0, 1.0, 0.1).bound_value == 0.0


def test_anderson_values():
    assert anderson_crossing(0.0, 1.0, 1.0) == pytest.approx(0.3173105078629141, abs=1e-12)
    assert anderson_crossing(1.0, 1.0, 1.0) == pytest.approx(0.6681020012, abs=1e-10)
    assert anderson_crossing(-1.0, 2.0, 1.0) + anderson_survival(-1.0, 2.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert anderson_crossing(0.3, 1.0, 0.0) == 1.0


def test_bridge_survival():
    assert bridge_survival(0.0, 0.0, 1.0, 1.0) == pytest.approx(1 - math.exp(-2))
    assert bridge_survival(0.0, 1.0, 1.0, 1.0) == 0.0


def test_zero_drift_bound_is_the_exact_density():
    for t in (0.2, 1.0, 3.0):
        assert density_upper_bound(constant_drift(0.0), 0.0, 1.0, t) == pytest.approx(
            brownian_fpt_density(1.0, t), rel=1e-14)


def test_bound_rejects_bad_geometry():
    with pytest.raises(BarrierNotAbove):
        density_upper_bound(CLAMP, 1.0, 0.5, 1.0)


def test_tanh_density_has_closed_form():
    # mu = tanh has mu^2 + mu' = 1, so the density is f_BM e^{G(c)-G(x0)-t/2}
    drift = linearize(np.tanh, (-5.0, 5.0), 64)
    t = np.array([0.3, 1.0, 2.0])
    got = invert_density(FirstPassageQuery(drift, 0.0, 1.0).transform(), t)
    want = [brownian_fpt_density(1.0, s) * math.cosh(1.0) * math.exp(-s / 2) for s in t]
    np.testing.assert_allclose(got, want, rtol=5e-5)


def test_bound_fails_for_unit_drift():
    # the certificate is not valid for every drift: drift 1 gives M = 1, and the
    # exact density e^{1 - t/2} f_BM exceeds e^{1 - 3t/2} f_BM
    t = np.array([0.5, 1.0, 2.0])
    dens = invert_density(FirstPassageQuery(constant_drift(1.0), 0.0, 1.0).transform(), t)
    bound = np.array([density_upper_bound(constant_drift(1.0), 0.0, 1.0, s) for s in t])
    assert np.all(dens > bound + 1e-3)
