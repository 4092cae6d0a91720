"""Exact smallest-triangle search: brute oracle vs grid-pruned paths."""

import itertools
import math

import numpy as np
import pytest

from tripois.geometry import Point, triangle_area
from tripois.triangles import (all_areas_array, all_areas_brute, count_below,
                               min_area, smallest_and_count, smallest_k,
                               triangle_count)


def _manual_areas(xy):
    out = []
    for i, j, k in itertools.combinations(range(len(xy)), 3):
        area = triangle_area(Point(*xy[i]), Point(*xy[j]), Point(*xy[k]))
        out.append((area, i, j, k))
    out.sort()
    return out


def test_triangle_count_values():
    assert triangle_count(3) == 1
    assert triangle_count(10) == 120
    assert triangle_count(200) == 1313400


def test_brute_oracle_against_itertools():
    rng = np.random.default_rng(0)
    xy = rng.random((12, 2))
    manual = _manual_areas(xy)
    hits = all_areas_brute(xy)
    assert len(hits) == triangle_count(12)
    for hit, (area, i, j, k) in zip(hits, manual):
        assert (hit.i, hit.j, hit.k) == (i, j, k)
        assert hit.area == pytest.approx(area, rel=1e-12, abs=1e-300)
        assert hit.i < hit.j < hit.k
    areas = all_areas_array(xy)
    np.testing.assert_allclose(areas, [m[0] for m in manual], rtol=1e-12)
    assert np.all(np.diff(areas) >= 0)


def test_grid_equals_brute_on_random_instances():
    rng = np.random.default_rng(42)
    for trial in range(6):
        n = int(rng.integers(20, 70))
        xy = rng.random((n, 2))
        brute = all_areas_brute(xy)
        k = min(9, n - 2)
        got = smallest_k(xy, k, method="grid")
        assert [(h.i, h.j, h.k) for h in got] == \
            [(h.i, h.j, h.k) for h in brute[:k]]
        assert [h.area for h in got] == [h.area for h in brute[:k]]


def test_methods_agree_explicitly():
    rng = np.random.default_rng(5)
    xy = rng.random((40, 2))
    for k in (1, 3, 10):
        a = smallest_k(xy, k, method="brute")
        b = smallest_k(xy, k, method="grid")
        c = smallest_k(xy, k, method="auto")
        assert a == b == c


def test_min_area_matches_smallest_k():
    rng = np.random.default_rng(6)
    xy = rng.random((50, 2))
    assert min_area(xy) == smallest_k(xy, 1)[0].area


def test_count_below_inclusive_threshold():
    rng = np.random.default_rng(9)
    xy = rng.random((25, 2))
    brute = all_areas_brute(xy)
    # Thresholds sitting exactly on an attained area count it in (closed
    # inequality), checked on both sides of the search.
    for idx in (0, 3, 10):
        threshold = brute[idx].area
        expected = sum(1 for h in brute if h.area <= threshold)
        for method in ("brute", "grid"):
            cnt, hits = count_below(xy, threshold, method=method)
            assert cnt == expected
            assert len(hits) == cnt
            assert [(h.i, h.j, h.k) for h in hits] == \
                [(h.i, h.j, h.k) for h in brute[:cnt]]


def test_count_below_zero_threshold_without_degeneracy():
    rng = np.random.default_rng(10)
    xy = rng.random((30, 2))
    cnt, hits = count_below(xy, 0.0)
    assert cnt == 0 and hits == []


def test_degenerate_inputs():
    # Duplicated points and exact collinearity produce zero-area triangles
    # that every path must count identically.
    xy = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.0, 0.0],
                   [0.3, 0.9], [0.7, 0.1]])
    brute = all_areas_brute(xy)
    zeros = sum(1 for h in brute if h.area == 0.0)
    assert zeros >= 2  # the collinear triple and the duplicate-pair triples
    for method in ("brute", "grid"):
        cnt, hits = count_below(xy, 0.0, method=method)
        assert cnt == zeros
        assert all(h.area == 0.0 for h in hits)
    assert min_area(xy) == 0.0


def test_smallest_k_clamps_to_brute_for_large_k():
    rng = np.random.default_rng(11)
    xy = rng.random((10, 2))
    # k beyond n - 2 exceeds what the pruned pass guarantees; the search
    # falls back to the exact enumeration and still returns sorted hits.
    hits = smallest_k(xy, triangle_count(10))
    assert len(hits) == 120
    assert all(a.area <= b.area for a, b in zip(hits, hits[1:]))


def test_smallest_and_count_consistent():
    rng = np.random.default_rng(12)
    xy = rng.random((45, 2))
    brute = all_areas_brute(xy)
    threshold = brute[7].area * (1.0 + 1e-12)
    hits, cnt = smallest_and_count(xy, 5, threshold)
    assert cnt == sum(1 for h in brute if h.area <= threshold)
    assert [(h.i, h.j, h.k) for h in hits] == \
        [(h.i, h.j, h.k) for h in brute[:5]]


def test_input_validation():
    rng = np.random.default_rng(13)
    xy = rng.random((8, 2))
    with pytest.raises(ValueError):
        smallest_k(xy, 0)
    with pytest.raises(ValueError):
        smallest_k(rng.random((2, 2)), 1)  # fewer than 3 points
    with pytest.raises(ValueError):
        count_below(xy, math.nan)
    with pytest.raises(ValueError):
        smallest_k(np.array([[0.0, np.inf], [0, 0], [1, 1]]), 1)


def test_scaling_sanity():
    # Doubling coordinates multiplies every area by 4 and preserves order.
    rng = np.random.default_rng(14)
    xy = rng.random((30, 2))
    base = smallest_k(xy, 6)
    scaled = smallest_k(2.0 * xy, 6)
    for h, g in zip(base, scaled):
        assert (h.i, h.j, h.k) == (g.i, g.j, g.k)
        assert g.area == pytest.approx(4.0 * h.area, rel=1e-12)
