"""Special functions over complex scalars.

Gamma (Lanczos with reflection), Pochhammer symbols, Kummer's confluent
hypergeometric series ``Psi(a, b; x) = 1F1(a; b; x)`` with its large-argument
expansions, the Kummer solution pair used by the segment solver, and the
standard normal distribution function.
"""
import cmath
import math

import numpy as np
from scipy import special as _sp

from .errors import BNonPositiveInteger, PoleAtNonPositiveInteger, SeriesDiverged

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

SERIES_RADIUS = 30.0
ASYMPTOTIC_RADIUS = 60.0
SERIES_TOL = 1e-16
SERIES_MAX_TERMS = 500


def _is_nonpositive_integer(z):
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 0.5
    z = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def loggamma(z):
    """log Gamma(z) for complex ``z`` (not necessarily the principal branch).

    Only ``exp(loggamma(z))`` is meaningful; the imaginary part may differ
    from the principal value by a multiple of ``2*pi``.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _lanczos_log(1.0 - z)
    return _lanczos_log(z)


def gamma(z):
    """Gamma function of a complex argument.

    Parameters
    ----------
    z : complex
        Any point other than ``0, -1, -2, ...``.

    Returns
    -------
    complex
        ``Gamma(z)``, accurate to roughly 1e-14 relative for moderate ``|z|``.
        Real input returns a complex with zero imaginary part.

    Raises
    ------
    PoleAtNonPositiveInteger
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z))
    zm = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    if z.imag == 0.0:
        # real path: avoids complex pow rounding and keeps im exactly 0
        tr = t.real
        return complex(math.sqrt(2.0 * math.pi) * tr ** (zm.real + 0.5) * math.exp(-tr) * acc.real)
    return math.sqrt(2.0 * math.pi) * cmath.exp((zm + 0.5) * cmath.log(t) - t) * acc


def rgamma(z):
    """1/Gamma(z); zero at the poles."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0j
    return cmath.exp(-loggamma(z))


def pochhammer(a, k):
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)``, with ``(a)_0 = 1``."""
    if k < 0 or int(k) != k:
        raise ValueError("k must be a non-negative integer")
    out = 1.0 + 0j if isinstance(a, complex) else 1.0
    for i in range(int(k)):
        out *= a + i
    return out


def kummer_series(a, b, z, max_terms=SERIES_MAX_TERMS):
    """Direct power series of ``Psi(a, b; z)`` and its ``z``-derivative.

    Vectorized: ``a`` and ``z`` broadcast against each other, ``b`` is a real
    scalar.  The derivative is summed term-wise as
    ``sum_k t_k (a+k)/(b+k)``, which needs no division by ``z``.

    Returns
    -------
    value, deriv, magnitude, converged
        ``magnitude`` is ``sum_k |t_k|``; the ratio ``magnitude/|value|``
        bounds the cancellation in the sum.
    """
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    a, z = np.broadcast_arrays(a, z)
    term = np.ones(a.shape, dtype=complex)
    value = term.copy()
    dterm = a / b
    deriv = dterm.copy()
    magnitude = np.ones(a.shape)
    converged = np.zeros(a.shape, dtype=bool)
    for k in range(max_terms):
        term = term * ((a + k) / (b + k)) * z / (k + 1)
        dterm = term * (a + k + 1) / (b + k + 1)
        value = value + term
        deriv = deriv + dterm
        mag = np.abs(term)
        magnitude = magnitude + mag
        ratio = np.abs((a + k + 1) * z) / ((abs(b + k + 1)) * (k + 2))
        small = (mag <= SERIES_TOL * np.abs(value)) & (np.abs(dterm) <= SERIES_TOL * np.abs(deriv))
        converged = (small & (ratio < 1.0)) | (mag == 0.0)
        if converged.all():
            break
    return value, deriv, magnitude, converged


def _series_scalar(a, b, x):
    value, _, magnitude, converged = kummer_series(a, b, x)
    if not converged:
        raise SeriesDiverged(f"Kummer series did not converge for a={a}, b={b}, x={x}")
    value = complex(value)
    loss = float(magnitude) / abs(value) if value != 0 else math.inf
    return value, loss


def _asymptotic_sum(p, q, w):
    # sum_s (p)_s (q)_s / s! * w^s, truncated at the smallest term
    total = 1.0 + 0j
    term = 1.0 + 0j
    prev = math.inf
    for s in range(200):
        term = term * (p + s) * (q + s) / (s + 1) * w
        size = abs(term)
        if size > prev:
            break
        total += term
        if size <= 1e-17 * abs(total):
            break
        prev = size
    return total


def _psi_asymptotic_left(a, b, z):
    # Re z < 0: dominant algebraic term (-z)^(-a), subdominant exponential term
    lg_b = loggamma(b)
    first = 0j
    if not _is_nonpositive_integer(b - a):
        first = cmath.exp(lg_b - loggamma(b - a) - a * cmath.log(-z)) * _asymptotic_sum(a, a - b + 1, -1.0 / z)
    second = 0j
    if not _is_nonpositive_integer(a):
        second = cmath.exp(lg_b - loggamma(a) + z + (a - b) * cmath.log(z)) * _asymptotic_sum(
            b - a, 1 - a, 1.0 / z
        )
    return first + second


def kummer_psi(a, b, x):
    """Confluent hypergeometric function ``Psi(a, b; x) = sum (a)_k/(b)_k x^k/k!``.

    Evaluation regime by ``|x|``:

    * ``|x| <= 30``: direct series; for ``Re x < 0`` the Kummer transformation
      ``e^x Psi(b-a, b; -x)`` is used instead when it cancels less.
    * ``30 < |x| <= 60``: series on whichever side has ``Re >= 0``.
    * ``|x| > 60``: large-argument expansions with gamma-function prefactors.

    Raises
    ------
    BNonPositiveInteger
        ``b`` in ``{0, -1, -2, ...}``.
    SeriesDiverged
    """
    if _is_nonpositive_integer(b):
        raise BNonPositiveInteger(f"b={b} is a non-positive integer")
    a = complex(a)
    b = float(b) if complex(b).imag == 0 else complex(b)
    x = complex(x)
    if x == 0:
        return 1.0 + 0j
    r = abs(x)
    if r <= SERIES_RADIUS:
        value, loss = _series_scalar(a, b, x)
        if x.real < 0 and loss > 10.0:
            alt, alt_loss = _series_scalar(b - a, b, -x)
            if alt_loss < loss:
                value, loss = cmath.exp(x) * alt, alt_loss
        if loss > 1e4 and r >= 20.0:
            # oscillatory argument: expansions beat a cancelling series
            return _psi_asymptotic(a, b, x)
        return value
    if r <= ASYMPTOTIC_RADIUS:
        if x.real >= 0:
            return _series_scalar(a, b, x)[0]
        return cmath.exp(x) * _series_scalar(b - a, b, -x)[0]
    return _psi_asymptotic(a, b, x)


def _psi_asymptotic(a, b, x):
    if x.real < 0:
        return _psi_asymptotic_left(a, b, x)
    return cmath.exp(x) * _psi_asymptotic_left(b - a, b, -x)


def kummer_basis(a_seg, b_seg, lam, x):
    """Kummer solution pair of ``y''/2 + (a_seg x + b_seg) y' - lam y = 0``.

    With vertex ``x* = -b_seg/a_seg``, ``d = x - x*``, ``z = -a_seg d^2`` and
    ``alpha = -lam/(2 a_seg)``::

        e1 = Psi(alpha, 1/2; z)            (even about x*)
        e2 = d * Psi(alpha + 1/2, 3/2; z)  (odd about x*)

    Returns ``(e1, e1', e2, e2')`` as complex numbers.  The derivatives come
    from ``dPsi/dz(a, b) = (a/b) Psi(a+1, b+1)`` and ``dz/dx = -2 a_seg d``.
    """
    if a_seg == 0:
        raise ValueError("kummer_basis needs a non-zero slope")
    alpha = -complex(lam) / (2.0 * a_seg)
    d = x - (-b_seg / a_seg)
    z = -a_seg * d * d
    p1 = kummer_psi(alpha, 0.5, z)
    dp1 = 2.0 * alpha * kummer_psi(alpha + 1.0, 1.5, z)
    p2 = kummer_psi(alpha + 0.5, 1.5, z)
    dp2 = (alpha + 0.5) / 1.5 * kummer_psi(alpha + 1.5, 2.5, z)
    e1 = p1
    de1 = -2.0 * a_seg * d * dp1
    e2 = d * p2
    de2 = p2 + 2.0 * z * dp2
    return e1, de1, e2, de2


def normal_cdf(y):
    """Standard normal distribution function, ``0.5 erfc(-y/sqrt 2)``.

    Accepts scalars or arrays.
    """
    if np.ndim(y) == 0:
        return 0.5 * math.erfc(-float(y) / math.sqrt(2.0))
    return 0.5 * _sp.erfc(-np.asarray(y, dtype=float) / math.sqrt(2.0))


def normal_ppf(p):
    """Inverse of :func:`normal_cdf`; vectorized."""
    return _sp.ndtri(p)
