import math

import numpy as np
import pytest

from fpt.drift import (
    DriftFunction,
    antiderivative_diff,
    constant_drift,
    extremes,
    from_nodes,
    lamperti,
    linearize,
    m_constant,
    make_piecewise,
)
from fpt.errors import (
    DiscontinuousDrift,
    EmptyDomain,
    NonConstantTail,
    NonMonotoneBreakpoints,
    SigmaVanishes,
    UnboundedValue,
)

CLAMP = make_piecewise([-1.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, -1.0])


def test_clamp_values_and_segments():
    x = np.array([-3.0, -1.0, -0.25, 0.5, 1.0, 4.0])
    np.testing.assert_allclose(CLAMP(x), np.clip(-x, -1, 1))
    assert CLAMP(0.5) == -0.5
    assert CLAMP.segment_index(-1.0) == 0
    assert CLAMP.segment_index(1.0) == 1


def test_validation_errors():
    with pytest.raises(NonMonotoneBreakpoints):
        make_piecewise([1.0, 0.0], [0, 0, 0], [0, 0, 0])
    with pytest.raises(DiscontinuousDrift):
        make_piecewise([0.0], [0, 0], [0, 1])
    with pytest.raises(NonConstantTail):
        make_piecewise([0.0], [1, 0], [0, 0])
    with pytest.raises(ValueError):
        make_piecewise([0.0], [0], [0])
    make_piecewise([0.0], [1, 0], [0, 0], canonical=False)


def test_reflection_is_an_involution():
    d = from_nodes([-1.0, 0.0, 2.0], [0.5, -1.0, 3.0])
    r = d.reflected()
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(r(x), -d(-x), atol=1e-15)
    assert r.reflected() == d


def test_linearize_nodes_and_error():
    lin = linearize(np.tanh, (-4.0, 4.0), 16)
    assert len(lin.breakpoints) == 129
    nodes = np.asarray(lin.breakpoints)
    np.testing.assert_allclose(lin(nodes), np.tanh(nodes), atol=1e-15)
    y = np.linspace(-4, 4, 5001)
    assert np.max(np.abs(lin(y) - np.tanh(y))) <= 1.0 / 16
    # constant tails
    assert lin(10.0) == pytest.approx(math.tanh(4.0))


def test_linearize_adds_right_end():
    lin = linearize(np.sin, (0.0, 1.05), 4)
    assert lin.breakpoints[-1] == 1.05


def test_linearize_rejects_bad_input():
    with pytest.raises(EmptyDomain):
        linearize(np.sin, (1.0, 1.0), 4)
    with pytest.raises(UnboundedValue), np.errstate(divide="ignore"):
        linearize(lambda x: 1.0 / x, (-1.0, 1.0), 2)


def test_drift_function_estimate():
    fn = DriftFunction.estimate(np.sin, (-4, 4), margin=0.0)
    assert fn.m1 == pytest.approx(1.0, abs=1e-6)
    assert fn.m2 == pytest.approx(1.0, abs=1e-6)
    assert DriftFunction.estimate(np.sin, (-4, 4), m1=2.0).m1 == 2.0


def test_antiderivative_matches_quadrature():
    from scipy import integrate
    val, _ = integrate.quad(CLAMP, -2.5, 3.0, points=[-1, 1])
    assert antiderivative_diff(CLAMP, -2.5, 3.0) == pytest.approx(val, abs=1e-12)
    assert antiderivative_diff(CLAMP, 3.0, -2.5) == pytest.approx(-val, abs=1e-12)


def test_m_constant():
    # clamp: on the middle segment mu^2 - 1/3 reaches -1/3 at the origin
    assert m_constant(CLAMP) == pytest.approx(-1.0 / 3.0)
    assert m_constant(constant_drift(2.0)) == 4.0
    assert extremes(CLAMP) == (-1.0, 1.0)


def test_lamperti_geometric_brownian_motion():
    # dX = m X dt + s X dW -> F = log(X/y0)/s, drift m/s - s/2
    m, s = 0.3, 0.4
    f, drift = lamperti(lambda y: m * y, lambda y: s * y, lambda y: s, 1.0, 2.5)
    assert f == pytest.approx(math.log(2.5) / s, rel=1e-10)
    assert drift == pytest.approx(m / s - s / 2, rel=1e-12)
    with pytest.raises(SigmaVanishes):
        lamperti(lambda y: 0.0, lambda y: y, lambda y: 1.0, -1.0, 1.0)
