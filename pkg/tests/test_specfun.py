import cmath
import math

import mpmath
import numpy as np
import pytest

from fpt.errors import BNonPositiveInteger, PoleAtNonPositiveInteger
from fpt.specfun import (
    gamma,
    kummer_basis,
    kummer_psi,
    kummer_series,
    loggamma,
    normal_cdf,
    normal_ppf,
    pochhammer,
    rgamma,
)


def series_oracle(a, b, x):
    with mpmath.workdps(60):
        return complex(mpmath.hyp1f1(mpmath.mpmathify(a), mpmath.mpmathify(b), mpmath.mpmathify(x),
                                     maxterms=10 ** 6))


@pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 10.0, -0.5, -2.5, 2.0 + 3.0j, -1.5 + 0.5j])
def test_gamma_matches_mpmath(z):
    ref = complex(mpmath.gamma(z))
    assert abs(gamma(z) - ref) <= 1e-12 * abs(ref)


def test_gamma_real_input_stays_real():
    assert complex(gamma(4.5)).imag == 0.0
    assert gamma(5.0).real == pytest.approx(24.0, rel=1e-14)


def test_gamma_poles():
    for n in (0, -1, -7):
        with pytest.raises(PoleAtNonPositiveInteger):
            gamma(n)
    assert rgamma(-3) == 0


def test_loggamma_large_argument():
    assert loggamma(200.0).real == pytest.approx(float(mpmath.loggamma(200.0)), rel=1e-14)


def test_pochhammer():
    assert pochhammer(3, 4).real == pytest.approx(3 * 4 * 5 * 6)
    assert pochhammer(-2, 3) == 0
    assert pochhammer(0.5, 0) == 1


@pytest.mark.parametrize("a,b,x", [(0.3, 0.5, 2.0), (-2.5, 1.5, -8.0), (1.2, 2.5, 25.0),
                                   (-3.0, 0.5, 4.0), (0.7, 1.5, -45.0), (1.5, 0.5, 70.0),
                                   (0.25, 1.5, -80.0)])
def test_psi_against_extended_precision(a, b, x):
    ref = series_oracle(a, b, x)
    assert abs(kummer_psi(a, b, x) - ref) <= 2e-11 * max(abs(ref), 1.0)


def test_psi_terminates_for_negative_integer_a():
    # Psi(-2, b; x) is the polynomial 1 - 2x/b + x^2/(b(b+1))
    b, x = 1.5, 3.0
    assert kummer_psi(-2, b, x).real == pytest.approx(1 - 2 * x / b + x * x / (b * (b + 1)), rel=1e-14)


def test_psi_rejects_nonpositive_integer_b():
    with pytest.raises(BNonPositiveInteger):
        kummer_psi(0.5, -1, 1.0)


def test_series_derivative_is_contiguous_function():
    a, b, z = 0.8, 1.5, np.array([-3.0, 0.5, 4.0])
    _, deriv, _, ok = kummer_series(a, b, z)
    assert ok.all()
    want = [a / b * kummer_psi(a + 1, b + 1, v) for v in z]
    np.testing.assert_allclose(deriv, want, rtol=1e-13)


@pytest.mark.parametrize("lam", [0.5, 3.0 + 2.0j])
def test_kummer_basis_wronskian(lam):
    a_seg, b_seg = -1.0, 0.3
    for x in (-1.0, 0.2, 1.4):
        e1, de1, e2, de2 = kummer_basis(a_seg, b_seg, lam, x)
        z = -a_seg * (x + b_seg / a_seg) ** 2
        assert abs((e1 * de2 - e2 * de1) / cmath.exp(z) - 1) < 1e-12


def test_kummer_basis_solves_segment_ode():
    a_seg, b_seg, lam, h = 0.7, -0.2, 1.3 + 0.4j, 1e-4
    for x in (-0.8, 0.4):
        for k in (0, 2):
            f = lambda s: kummer_basis(a_seg, b_seg, lam, s)[k]
            d1 = kummer_basis(a_seg, b_seg, lam, x)[k + 1]
            d2 = (kummer_basis(a_seg, b_seg, lam, x + h)[k + 1] - kummer_basis(a_seg, b_seg, lam, x - h)[k + 1]) / (2 * h)
            res = 0.5 * d2 + (a_seg * x + b_seg) * d1 - lam * f(x)
            assert abs(res) < 1e-6


def test_normal_cdf_and_ppf():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(-10.0) == pytest.approx(7.619853024160527e-24, rel=1e-12)
    p = np.array([1e-12, 0.025, 0.5, 0.975])
    np.testing.assert_allclose(normal_cdf(normal_ppf(p)), p, rtol=1e-12)
