"""Planar primitives: points, lines, regions, chords."""

import math

import numpy as np
import pytest

from tripois.geometry import (ChordSet, ConvexPolygon, Disk, LineRT, Point,
                              Rectangle, SimplePolygon, line_through,
                              point_line_distance, region_from_dict,
                              triangle_area)
from tripois.catalog import REGIONS
from tripois.errors import FormatError


def test_triangle_area_hand_values():
    assert triangle_area(Point(0, 0), Point(1, 0), Point(0, 1)) == 0.5
    assert triangle_area(Point(0, 0), Point(2, 0), Point(1, 3)) == 3.0
    # Collinear and coincident triples are degenerate, never negative.
    assert triangle_area(Point(0, 0), Point(1, 1), Point(2, 2)) == 0.0
    assert triangle_area(Point(1, 2), Point(1, 2), Point(3, 4)) == 0.0


def test_area_equals_base_times_height():
    rng = np.random.default_rng(7)
    for _ in range(50):
        ax, ay, bx, by, cx, cy = rng.uniform(-3, 3, 6)
        a, b, c = Point(ax, ay), Point(bx, by), Point(cx, cy)
        base = math.hypot(bx - ax, by - ay)
        if base < 1e-9:
            continue
        height = point_line_distance(c, line_through(a, b))
        assert triangle_area(a, b, c) == pytest.approx(
            0.5 * base * height, rel=1e-12, abs=1e-15)


def test_line_canonical_form():
    line = line_through(Point(0, 0), Point(1, 0))
    assert line.theta == pytest.approx(math.pi / 2)
    assert line.r == pytest.approx(0.0, abs=1e-15)
    # The same geometric line from swapped endpoints canonicalizes alike.
    other = line_through(Point(5, 0), Point(-2, 0))
    assert other.theta == pytest.approx(line.theta)
    assert other.r == pytest.approx(line.r, abs=1e-12)
    # theta folds modulo pi with a compensating sign flip on r.
    folded = LineRT(-1.0, 0.25 + math.pi)
    assert folded.theta == pytest.approx(0.25)
    assert folded.r == pytest.approx(1.0)
    assert 0.0 <= folded.theta < math.pi


def test_point_on_line_has_zero_distance():
    a, b = Point(0.3, -1.2), Point(2.0, 0.7)
    line = line_through(a, b)
    for p in (a, b):
        assert point_line_distance(p, line) == pytest.approx(0.0, abs=1e-12)
    mid = Point(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
    assert point_line_distance(mid, line) == pytest.approx(0.0, abs=1e-12)


def test_rectangle_basic_quantities():
    rect = Rectangle((0.0, 0.0), 2.0, 3.0)
    assert rect.area() == 6.0
    assert rect.bbox() == (0.0, 0.0, 2.0, 3.0)
    assert rect.diameter() == pytest.approx(math.hypot(2, 3))
    np.testing.assert_allclose(rect.uniform_mean(), [1.0, 1.5])
    np.testing.assert_allclose(rect.uniform_covariance(),
                               np.diag([4.0 / 12.0, 9.0 / 12.0]))


def test_unit_square_chords_hand_values():
    sq = Rectangle((0.0, 0.0), 1.0, 1.0)
    # Horizontal line y = 0.5: chord of length 1.
    horiz = LineRT(0.5, math.pi / 2)
    assert sq.chord_length(horiz) == pytest.approx(1.0)
    # Main diagonal x = y: length sqrt(2).
    diag = line_through(Point(0, 0), Point(1, 1))
    assert sq.chord_length(diag) == pytest.approx(math.sqrt(2.0))
    # A line far outside misses entirely.
    assert sq.chord_length(LineRT(3.0, 0.3)) == 0.0


def test_disk_chord_against_circle_geometry():
    disk = Disk((0.0, 0.0), 1.5)
    assert disk.area() == pytest.approx(math.pi * 1.5 ** 2)
    for offset in (0.0, 0.4, 1.1, 1.49):
        got = disk.chord_length(LineRT(offset, 0.77))
        assert got == pytest.approx(2.0 * math.sqrt(1.5 ** 2 - offset ** 2))
    assert disk.chord_length(LineRT(1.51, 0.0)) == 0.0


def test_chord_profile_matches_scalar_chords():
    for region in (REGIONS["hexagon"](), REGIONS["l-shape"](),
                   REGIONS["disk"]()):
        rng = np.random.default_rng(11)
        for theta in rng.uniform(0.0, math.pi, 5):
            rs = rng.uniform(-2.0, 2.0, 40)
            prof = region.chord_profile(float(theta), rs)
            scalar = [region.chord_length(LineRT(float(r), float(theta)))
                      for r in rs]
            np.testing.assert_allclose(prof, scalar, atol=1e-12)


def test_chord_set_intervals_disjoint_and_sorted():
    # A line crossing both arms of the L-shape produces two intervals.
    lshape = REGIONS["l-shape"]()
    arm = lshape.vertices[2][1]  # arm thickness
    line = line_through(Point(0.0, 1.2 * arm), Point(1.0, 0.9 * arm))
    cs = lshape.chord_set(line)
    assert len(cs.intervals) >= 1
    for (lo, hi) in cs.intervals:
        assert hi > lo
    for (_, hi), (lo2, _) in zip(cs.intervals, cs.intervals[1:]):
        assert lo2 > hi
    assert cs.total_length == pytest.approx(
        sum(hi - lo for lo, hi in cs.intervals))


def test_chord_set_rejects_odd_crossings():
    with pytest.raises(ValueError):
        ChordSet.from_crossings(LineRT(0.0, 0.0), [0.0, 1.0, 2.0])


def test_containment_and_area_by_monte_carlo():
    rng = np.random.default_rng(3)
    for name in ("hexagon", "star", "l-shape"):
        region = REGIONS[name]()
        x0, y0, x1, y1 = region.bbox()
        pts = np.column_stack([rng.uniform(x0, x1, 200_000),
                               rng.uniform(y0, y1, 200_000)])
        frac = float(region.contains(pts).mean())
        box = (x1 - x0) * (y1 - y0)
        assert frac * box == pytest.approx(region.area(), rel=0.02)


def test_polygon_validation():
    with pytest.raises(ValueError):
        ConvexPolygon([(0, 0), (2, 0), (2, 2), (1, 0.5), (0, 2)])  # reflex
    with pytest.raises(ValueError):
        SimplePolygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # self-intersecting
    with pytest.raises(ValueError):
        SimplePolygon([(0, 0), (0, 0), (1, 0)])  # repeated vertex
    with pytest.raises(ValueError):
        Rectangle((0, 0), -1.0, 2.0)
    with pytest.raises(ValueError):
        Disk((0, 0), 0.0)


def test_orientation_normalized():
    cw = ConvexPolygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    ccw = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert cw.area() == ccw.area() == 1.0


def test_projection_range_supports_chords():
    hexagon = REGIONS["hexagon"]()
    for theta in (0.0, 0.4, 1.3, 2.9):
        lo, hi = hexagon.projection_range(theta)
        assert lo < hi
        assert hexagon.chord_length(LineRT(lo - 1e-6, theta)) == 0.0
        assert hexagon.chord_length(LineRT(hi + 1e-6, theta)) == 0.0
        mid = 0.5 * (lo + hi)
        assert hexagon.chord_length(LineRT(mid, theta)) > 0.0


def test_region_dict_round_trip():
    for name, factory in REGIONS.items():
        region = factory()
        data = region.to_dict()
        back = region_from_dict(data)
        assert type(back) is type(region)
        assert back.to_dict() == data
        assert back.area() == pytest.approx(region.area(), rel=1e-15)


def test_region_from_dict_rejects_garbage():
    with pytest.raises(FormatError):
        region_from_dict({"kind": "dodecahedron"})
    with pytest.raises(FormatError):
        region_from_dict({"kind": "rectangle", "corner": [0, 0]})
    with pytest.raises(FormatError):
        region_from_dict("not an object")


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(math.nan, 0.0)
    with pytest.raises(ValueError):
        LineRT(math.inf, 0.0)
