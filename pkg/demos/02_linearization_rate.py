"""How fast does the piecewise-linear approximation converge?

The solver needs a piecewise-linear drift, so a smooth drift such as tanh
is interpolated on a grid of step 1/n.  The interpolation error is of
order 1/n^2 for a smooth drift, and the survival probability inherits
that rate: each doubling of n divides the error by about 4.  The
first-order crossing bound, linear in 1/n, is therefore conservative.
"""
import numpy as np

from fpt import FirstPassageQuery, crossing_diff_bound, linearize, survival_curve


def survival_at_one(n):
    drift = linearize(np.tanh, (-4.0, 4.0), n)
    return survival_curve(FirstPassageQuery(drift, 0.0, 1.0), [1.0]).survival[0]


ns = [4, 8, 16, 32, 64, 128]
p = {n: survival_at_one(n) for n in ns + [256]}

print("   n   P_n(tau > 1)   |P_n - P_2n|   ratio   |P_n - P_256|   first-order bound")
prev = None
for n in ns[:-1]:
    diff = abs(p[n] - p[2 * n])
    ratio = f"{diff / prev:6.3f}" if prev else "      "
    bound = crossing_diff_bound(1.0, 1.0, 0.0, 1.0, 1.0, 1.0 / n).bound_value
    print(f"{n:4d}   {p[n]:.10f}   {diff:.3e}   {ratio}   {abs(p[n] - p[256]):.3e}       {bound:.3e}")
    prev = diff
