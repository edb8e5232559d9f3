"""A closed-form upper bound on the first-passage density.

For a piecewise-linear drift the bound is

    (c - x0)/(sqrt(2 pi) t^1.5) exp(G(c) - G(x0) - 3 M t/2 - (c - x0)^2/(2t)),

with G an antiderivative of the drift and M = inf(mu^2 + mu'/3).  We
compare it with the inverted density for three drifts.  For a constant
drift of 1 the bound falls below the true density, so it cannot be used
as a certificate there: the exact density is exp(G(c) - G(x0) - t/2) times
the Brownian one, which decays more slowly in t than the bound.
"""
import numpy as np

from fpt import FirstPassageQuery, constant_drift, density_upper_bound, invert_density, linearize, make_piecewise

drifts = {
    "zero": constant_drift(0.0),
    "clamp": make_piecewise([-1.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, -1.0]),
    "tanh, n=16": linearize(np.tanh, (-4.0, 4.0), 16),
    "constant 1": constant_drift(1.0),
}
times = np.array([0.1, 0.5, 1.0, 2.0])

for name, drift in drifts.items():
    dens = invert_density(FirstPassageQuery(drift, 0.0, 1.0).transform(), times)
    bound = np.array([density_upper_bound(drift, 0.0, 1.0, t) for t in times])
    verdict = "holds" if np.all(dens <= bound + 1e-6) else "VIOLATED"
    print(f"{name:>11}: bound {verdict}")
    for t, d, b in zip(times, dens, bound):
        print(f"    t={t:4.1f}  density {d:.6f}  bound {b:.6f}")
