"""Chord-length power averages over a region, and what they reveal.

For a region K, integrate the chord length raised to a power p over all
lines (distance-angle parametrisation, angle in [0, pi)):

    I(p) = integral of chord(r, theta)^p  dr dtheta.

Two classical facts make this a sharp self-test:

    I(1) = pi * area(K)          for ANY region (each angle slice
                                 integrates total crossing length to the
                                 area),
    I(3) = 3 * area(K)^2         for CONVEX K only.

The dimensionless ratio pi * I(3) / (I(1) * area) is therefore exactly 3
for every convex body and strictly smaller once the region has a notch.
This script checks the identities by adaptive quadrature, cross-checks a
Monte Carlo line sampler, and watches fractional powers collapse on thin
rectangles.
"""

import math

from tripois import (REGIONS, Rectangle, RngStream, crofton_integral,
                     crofton_monte_carlo, mean_chord_ratio)

print("Identity check (quadrature vs. closed form):")
for name in ("unit-square", "disk", "hexagon", "rect-2x3"):
    region = REGIONS[name]()
    area = region.area()
    i1, _ = crofton_integral(region, 1.0)
    i3, _ = crofton_integral(region, 3.0)
    print(f"  {name:11s} I(1)={i1:.9f} (want {math.pi * area:.9f})"
          f"   I(3)={i3:.9f} (want {3.0 * area * area:.9f})")
    assert abs(i1 - math.pi * area) < 1e-7 * (1.0 + area)
    assert abs(i3 - 3.0 * area * area) < 1e-7 * (1.0 + area * area)

print()
print("Monte Carlo line sampler agrees (unit square, power 3):")
square = REGIONS["unit-square"]()
mc, mc_se = crofton_monte_carlo(square, 3.0, 200_000, RngStream(2000, 0))
quad, _ = crofton_integral(square, 3.0)
print(f"  quadrature {quad:.9f}   monte carlo {mc:.6f} +- {mc_se:.6f}")
assert abs(mc - quad) < 4.0 * mc_se

print()
print("Convexity detector: the cubed-chord ratio is 3 for convex bodies")
print("and drops when a bite is missing:")
for name in ("unit-square", "disk", "l-shape", "star"):
    ratio, se = mean_chord_ratio(REGIONS[name](), 200_000,
                                 RngStream(2000, 1))
    print(f"  {name:11s} ratio = {ratio:.4f} +- {se:.4f}")

print()
print("Fractional powers on a 1 x h rectangle (h -> 0): short crossings")
print("dominate, so every I(p) with p > 0 collapses with the height:")
for power in (0.5, 1.5, 2.5):
    row = []
    for h in (1.0, 0.3, 0.1, 0.03):
        region = Rectangle((0.0, 0.0), 1.0, h)
        value, _ = crofton_integral(region, power)
        row.append(value)
    text = "  ".join(f"{v:.6f}" for v in row)
    print(f"  p={power}: h=1,0.3,0.1,0.03 -> {text}")
    assert all(a > b for a, b in zip(row, row[1:]))
