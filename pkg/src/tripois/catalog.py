"""Named example regions and measures used by the verification suite.

Regions: a unit square, a 2x3 rectangle, an area-one thin rectangle family,
a regular hexagon, the unit disk, an L-shaped hexagon (non-convex, area
3/4), and a ten-vertex star (non-convex).  Measures: the uniform law on
each region, standard and anisotropic Gaussians, a two-scale Gaussian
mixture whose affine invariant grows without bound, and a sheared copy of
the uniform square.

Everything is a zero-argument factory (parameterized families take the
parameter), so tests and demos can request fresh immutable objects by name
through the REGIONS / MEASURES registries.
"""

from __future__ import annotations

import math
from typing import Callable, Dict

from .geometry import ConvexPolygon, Disk, Rectangle, Region, SimplePolygon
from .measures import (AffineImage, CovMatrix, Gaussian, Measure, Mixture,
                       UniformRegion)

# Arm width of the L-shape: outer square of side 3/2 minus a corner square,
# sized so the area is exactly 3/4.  The thin arms make the convexity
# defect of the chord-moment identities unambiguous (about 21% for the
# cubed-chord integral, versus about 3% for the quarter-cut unit square L).
_L_OUTER = 1.5
_L_ARM = _L_OUTER - math.sqrt(_L_OUTER * _L_OUTER - 0.75)


def unit_square() -> Rectangle:
    return Rectangle((0.0, 0.0), 1.0, 1.0)


def rect_2x3() -> Rectangle:
    return Rectangle((0.0, 0.0), 2.0, 3.0)


def thin_rectangle(eps: float) -> Rectangle:
    """[0, 1/eps] x [0, eps]: area one, aspect ratio 1/eps^2."""
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    return Rectangle((0.0, 0.0), 1.0 / eps, eps)


def regular_hexagon() -> ConvexPolygon:
    """Regular hexagon with unit circumradius, centered at the origin."""
    pts = [(math.cos(j * math.pi / 3.0), math.sin(j * math.pi / 3.0))
           for j in range(6)]
    return ConvexPolygon(pts)


def unit_disk() -> Disk:
    return Disk((0.0, 0.0), 1.0)


def l_shape() -> SimplePolygon:
    """Non-convex L: outer 1.5-square minus its upper-right corner, area 3/4."""
    a, t = _L_OUTER, _L_ARM
    return SimplePolygon([(0.0, 0.0), (a, 0.0), (a, t), (t, t), (t, a),
                          (0.0, a)])


def star_polygon() -> SimplePolygon:
    """Five-pointed star (ten vertices), strongly non-convex."""
    pts = []
    for j in range(10):
        ang = math.pi / 2.0 + j * math.pi / 5.0
        rad = 1.0 if j % 2 == 0 else 0.38
        pts.append((rad * math.cos(ang), rad * math.sin(ang)))
    return SimplePolygon(pts)


def gaussian_std() -> Gaussian:
    return Gaussian((0.0, 0.0), CovMatrix(1.0, 0.0, 1.0))


def gaussian_aniso() -> Gaussian:
    """Centered Gaussian with covariance diag(4, 1)."""
    return Gaussian((0.0, 0.0), CovMatrix(4.0, 0.0, 1.0))


def gaussian_scale_mixture(a: float) -> Mixture:
    """Half-half mix of centered round Gaussians with covariances I, a^2 I.

    Its kappa times sqrt(det covariance) grows without bound as the scale
    ratio a grows, showing the affine invariant has no finite upper bound.
    """
    if a <= 0:
        raise ValueError("scale ratio a must be positive")
    return Mixture((0.5, 0.5), (
        Gaussian((0.0, 0.0), CovMatrix(1.0, 0.0, 1.0)),
        Gaussian((0.0, 0.0), CovMatrix(a * a, 0.0, a * a)),
    ))


def sheared_square() -> AffineImage:
    """Unit-determinant shear of the uniform unit square."""
    return AffineImage(((1.0, 1.0), (0.0, 1.0)), (0.5, -0.25),
                       UniformRegion(unit_square()))


REGIONS: Dict[str, Callable[[], Region]] = {
    "unit-square": unit_square,
    "rect-2x3": rect_2x3,
    "thin-rect-8": lambda: thin_rectangle(0.125),
    "hexagon": regular_hexagon,
    "disk": unit_disk,
    "l-shape": l_shape,
    "star": star_polygon,
}

# Regions where the cubed-chord identity is exact (convex up to null sets).
CONVEX_REGION_NAMES = ("unit-square", "rect-2x3", "thin-rect-8", "hexagon",
                      "disk")

MEASURES: Dict[str, Callable[[], Measure]] = {
    "uniform-square": lambda: UniformRegion(unit_square()),
    "uniform-rect-2x3": lambda: UniformRegion(rect_2x3()),
    "uniform-thin-rect-8": lambda: UniformRegion(thin_rectangle(0.125)),
    "uniform-hexagon": lambda: UniformRegion(regular_hexagon()),
    "uniform-disk": lambda: UniformRegion(unit_disk()),
    "uniform-l-shape": lambda: UniformRegion(l_shape()),
    "uniform-star": lambda: UniformRegion(star_polygon()),
    "gaussian-std": gaussian_std,
    "gaussian-aniso": gaussian_aniso,
    "gaussian-mix-3": lambda: gaussian_scale_mixture(3.0),
    "sheared-square": sheared_square,
}
