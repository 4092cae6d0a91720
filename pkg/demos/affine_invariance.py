"""A dimensionless score for point-process "triangle-avoidance".

The limiting intensity by itself has units of inverse area, so comparing
it across measures is unfair.  Multiplying by the square root of the
covariance determinant cancels every affine change of variables:

    score(measure) = intensity * sqrt(det covariance)

is invariant under any invertible affine map of the plane.  This makes it
a genuine shape constant: 1/6 for uniform rectangles of any aspect,
1/(2 pi) for the uniform disk, 1/(3 sqrt 3) for every Gaussian.

The script verifies the invariance numerically under a deliberately ugly
map, then shows the score is unbounded above by walking up a family of
two-scale Gaussian mixtures.
"""

import math

import numpy as np

from tripois import (AffineImage, Gaussian, MEASURES, Mixture,
                     affine_invariant, kappa_quadrature)
from tripois.measures import CovMatrix

print("Catalog scores (quadrature; closed values in parentheses):")
expected = {
    "uniform-square": ("1/6", 1.0 / 6.0),
    "uniform-rect-2x3": ("1/6", 1.0 / 6.0),
    "uniform-disk": ("1/(2 pi)", 1.0 / (2.0 * math.pi)),
    "gaussian-std": ("1/(3 sqrt 3)", 1.0 / (3.0 * math.sqrt(3.0))),
    "gaussian-aniso": ("1/(3 sqrt 3)", 1.0 / (3.0 * math.sqrt(3.0))),
}
for name, (label, value) in expected.items():
    score = affine_invariant(MEASURES[name](), rel_tol=1e-8)
    print(f"  {name:16s} {score:.8f}   ({label} = {value:.8f})")
    assert abs(score - value) < 1e-6

print()
print("Invariance under an ugly affine map (shear + stretch + shift):")
matrix = np.array([[2.0, 1.0], [0.5, 1.5]])
for name in ("uniform-l-shape", "gaussian-aniso"):
    base = MEASURES[name]()
    mapped = AffineImage(matrix, (3.0, -1.0), base)
    k_base = kappa_quadrature(base, rel_tol=1e-8).value
    k_mapped = kappa_quadrature(mapped, rel_tol=1e-8).value
    s_base = affine_invariant(base, rel_tol=1e-8)
    s_mapped = affine_invariant(mapped, rel_tol=1e-8)
    print(f"  {name:16s} intensity {k_base:.6f} -> {k_mapped:.6f} "
          f"(changes)   score {s_base:.8f} -> {s_mapped:.8f} (does not)")
    assert abs(s_base - s_mapped) < 1e-6 * s_base

print()
print("No upper bound: half-and-half mixture of N(0, I) and N(0, a^2 I).")
print("Pulling the scales apart piles line-marginal mass near the origin,")
print("and the score grows without limit:")
last = 0.0
for a in (1.0, 3.0, 10.0, 30.0):
    mixture = Mixture(
        (0.5, 0.5),
        (Gaussian((0.0, 0.0), CovMatrix(1.0, 0.0, 1.0)),
         Gaussian((0.0, 0.0), CovMatrix(a * a, 0.0, a * a))))
    score = affine_invariant(mixture, rel_tol=1e-8)
    print(f"  a = {a:4g}: score = {score:.6f}")
    assert score > last
    last = score
