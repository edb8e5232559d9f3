import math

import numpy as np
import pytest

from fpt.bounds import anderson_crossing
from fpt.drift import constant_drift
from fpt.errors import InvalidConfig
from fpt.mc import McConfig, McEstimate, bridge_crossing_prob, estimate_crossing, estimate_crossing_antithetic

ZERO = constant_drift(0.0)


def test_bridge_probability():
    assert bridge_crossing_prob(0.0, 0.0, 1.0, 1.0) == pytest.approx(math.exp(-2))
    assert bridge_crossing_prob(0.0, 1.0 - 1e-12, 1.0, 1.0) == pytest.approx(1.0)
    assert bridge_crossing_prob(0.0, 0.0, 1.0, 1e-4) == 0.0


def test_config_validation():
    for bad in ({"n_paths": 10}, {"dt": 2.0}, {"seed": -1}, {"workers": 0}):
        with pytest.raises(InvalidConfig):
            McConfig(**bad)
    assert McConfig(dt=1e-3, horizon=1.0).n_steps == 1000


def test_binomial_std_err():
    e = McEstimate.binomial(300, 1000)
    assert abs(e.std_err - math.sqrt(0.3 * 0.7 / 1000)) < 1e-12


def test_deterministic_and_worker_independent():
    cfg = McConfig(n_paths=20_000, dt=1e-2, seed=99)
    a = estimate_crossing(ZERO, 0.0, 1.0, cfg)
    b = estimate_crossing(ZERO, 0.0, 1.0, McConfig(n_paths=20_000, dt=1e-2, seed=99, workers=3))
    assert a == b
    assert estimate_crossing(ZERO, 0.0, 1.0, McConfig(n_paths=20_000, dt=1e-2, seed=100)) != a


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_corrected_estimate_hits_closed_form(m):
    cfg = McConfig(n_paths=40_000, dt=2e-3, seed=5)
    est = estimate_crossing(constant_drift(m), 0.0, 1.0, cfg)
    assert abs(est.p_hat - anderson_crossing(m, 1.0, 1.0)) < 3 * est.std_err


def test_correction_removes_discretization_bias():
    target = anderson_crossing(0.0, 1.0, 1.0)
    plain = estimate_crossing(ZERO, 0.0, 1.0, McConfig(n_paths=40_000, dt=1e-2, seed=3, bridge_correction=False))
    fixed = estimate_crossing(ZERO, 0.0, 1.0, McConfig(n_paths=40_000, dt=1e-2, seed=3))
    assert plain.p_hat < target - 3 * plain.std_err
    assert abs(fixed.p_hat - target) < abs(plain.p_hat - target)


def test_antithetic():
    cfg = McConfig(n_paths=20_000, dt=5e-3, seed=11)
    anti = estimate_crossing_antithetic(ZERO, 0.0, 1.0, cfg)
    plain = estimate_crossing(ZERO, 0.0, 1.0, cfg)
    assert abs(anti.p_hat - anderson_crossing(0.0, 1.0, 1.0)) < 3 * anti.std_err
    assert anti.std_err <= plain.std_err
    assert estimate_crossing_antithetic(ZERO, 0.0, 1.0, cfg) == anti
    with pytest.raises(InvalidConfig):
        estimate_crossing_antithetic(ZERO, 0.0, 1.0, McConfig(n_paths=101, dt=5e-3))


def test_rejects_start_above_barrier():
    with pytest.raises(InvalidConfig):
        estimate_crossing(ZERO, 1.0, 0.5, McConfig(n_paths=100))
