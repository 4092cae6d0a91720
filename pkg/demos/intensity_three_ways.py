"""One constant, three independent routes.

The headline object of this package is the limiting intensity: among n
independent points from a planar density, the smallest triangle area times
n^3 converges to an exponential law, and the intensity of that law is

    (2/3) * integral over all lines of (line marginal density)^3.

This script computes it for a few measures by closed form, by adaptive
quadrature of that line integral, and by Monte Carlo over point pairs, and
shows the three agreeing to their stated error scales.
"""

import math

from tripois import (MEASURES, RngStream, kappa_closed_form,
                     kappa_monte_carlo, kappa_quadrature)

PAIRS = 400_000

print(f"{'measure':18s} {'closed':>12s} {'quadrature':>14s} "
      f"{'monte carlo':>22s}")
for idx, name in enumerate(("uniform-square", "uniform-disk",
                            "gaussian-std", "gaussian-aniso",
                            "sheared-square")):
    measure = MEASURES[name]()
    closed = kappa_closed_form(measure)
    quad = kappa_quadrature(measure, rel_tol=1e-10)
    mc = kappa_monte_carlo(measure, PAIRS, RngStream(1000, idx))
    closed_text = f"{closed.value:.9f}" if closed else "(none)"
    z = (mc.value - quad.value) / mc.se
    print(f"{name:18s} {closed_text:>12s} {quad.value:>14.9f} "
          f"{mc.value:>12.6f} +- {mc.se:.6f}")
    if closed:
        assert abs(closed.value - quad.value) <= 1e-7 * closed.value
    assert abs(z) < 4.0, "Monte Carlo off by more than 4 standard errors"

print()
print("Notable values: the unit square gives exactly 2; any uniform convex "
      "region gives 2/area;")
print("the standard normal gives 1/(3 sqrt 3) = "
      f"{1.0 / (3.0 * math.sqrt(3.0)):.9f}; a determinant-1 shear changes "
      "nothing.")
