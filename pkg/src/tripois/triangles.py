"""Exact search for the smallest triangles among a planar point set.

Two independent implementations are provided:

* a brute-force enumeration of all C(n, 3) triangles, used as an oracle and
  for small inputs, and
* a grid-pruned search that walks a covering strip of cells around the line
  of each point pair and tests only the points inside, maintaining a
  monotonically shrinking area threshold.

Both produce exactly the same results: the accelerated path over-approximates
the candidate set with padded strips and then applies the same exact area
predicate, evaluated with the identical floating-point expression, so areas
agree bit for bit and ties resolve identically (by ascending area, then
lexicographic index triple).

The only area formula in this module is
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);  area = 0.5 |cross|
for an index triple i < j < k mapped to (a, b, c).  Keeping the operand order
fixed everywhere is what makes the cross-implementation bit-equality hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


BRUTE_MAX_POINTS = 512

# The on-disk JIT cache stores pickled references under the module name the
# compiling process imported this file as.  A source checkout can alias this
# module through a parent-directory namespace package (src.tripois.triangles),
# and a cache written under that alias breaks every process that resolves
# only the installed name.  Cache solely under the canonical name; aliased
# imports still compile, they just don't persist.
_CACHE_JIT = __name__ == "tripois.triangles"


@dataclass(frozen=True)
class TriangleHit:
    """One triangle, identified by its sorted vertex indices, with its area."""

    i: int
    j: int
    k: int
    area: float

    def sort_key(self) -> tuple[float, int, int, int]:
        return (self.area, self.i, self.j, self.k)


def as_points_array(points) -> np.ndarray:
    """Validate and convert to a float64 (n, 2) array with n >= 3."""
    xy = np.ascontiguousarray(np.asarray(points, dtype=float))
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if xy.shape[0] < 3:
        raise ValueError("need at least 3 points")
    if not np.all(np.isfinite(xy)):
        raise ValueError("points must be finite")
    return xy


def triangle_count(n: int) -> int:
    return n * (n - 1) * (n - 2) // 6


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------

def _brute_blocks(xy: np.ndarray):
    """Yield (areas, i, j, k) arrays per leading index, each triangle once."""
    x, y = xy[:, 0], xy[:, 1]
    n = len(xy)
    for i in range(n - 2):
        dx = x[i + 1:] - x[i]
        dy = y[i + 1:] - y[i]
        ju, ku = np.triu_indices(len(dx), k=1)
        cross = dx[ju] * dy[ku] - dy[ju] * dx[ku]
        areas = 0.5 * np.abs(cross)
        yield areas, i, ju + i + 1, ku + i + 1


def all_areas_brute(points) -> list[TriangleHit]:
    """Every triangle as a hit, sorted by (area, index triple).

    Cubic output (all C(n,3) triples), so n is capped; this is the oracle
    the pruned search is validated against.
    """
    xy = as_points_array(points)
    if len(xy) > BRUTE_MAX_POINTS:
        raise ValueError(f"brute enumeration is capped at {BRUTE_MAX_POINTS} points")
    return smallest_k_brute(xy, triangle_count(len(xy)))


def all_areas_array(points) -> np.ndarray:
    """Sorted areas only (no index triples) — cheaper than all_areas_brute."""
    xy = as_points_array(points)
    if len(xy) > BRUTE_MAX_POINTS:
        raise ValueError(f"brute enumeration is capped at {BRUTE_MAX_POINTS} points")
    parts = [areas for areas, *_ in _brute_blocks(xy)]
    out = np.concatenate(parts)
    out.sort()
    return out


def smallest_k_brute(points, k: int) -> list[TriangleHit]:
    """The k smallest triangles by brute enumeration, ties by index triple."""
    xy = as_points_array(points)
    if len(xy) > BRUTE_MAX_POINTS:
        raise ValueError(f"brute enumeration is capped at {BRUTE_MAX_POINTS} points")
    if k < 1:
        raise ValueError("k must be positive")
    k = min(k, triangle_count(len(xy)))
    areas_all = []
    ii_all = []
    jj_all = []
    kk_all = []
    for areas, i, jj, kk in _brute_blocks(xy):
        areas_all.append(areas)
        ii_all.append(np.full(len(areas), i, dtype=np.int64))
        jj_all.append(jj.astype(np.int64))
        kk_all.append(kk.astype(np.int64))
    areas = np.concatenate(areas_all)
    ii = np.concatenate(ii_all)
    jj = np.concatenate(jj_all)
    kk = np.concatenate(kk_all)
    order = np.lexsort((kk, jj, ii, areas))[:k]
    return [TriangleHit(int(ii[t]), int(jj[t]), int(kk[t]), float(areas[t]))
            for t in order]


def count_below_brute(points, threshold: float) -> int:
    """Number of triangles with area <= threshold, by brute enumeration."""
    xy = as_points_array(points)
    if len(xy) > BRUTE_MAX_POINTS:
        raise ValueError(f"brute enumeration is capped at {BRUTE_MAX_POINTS} points")
    return int(sum(int((areas <= threshold).sum())
                   for areas, *_ in _brute_blocks(xy)))


# ---------------------------------------------------------------------------
# Grid-pruned search
# ---------------------------------------------------------------------------

@njit(cache=_CACHE_JIT, nogil=True)
def _candidate_better(area, i, j, z, top_area, top_i, top_j, top_k, filled):
    """Is (area, i, j, z) strictly before the current worst kept entry?"""
    if filled < top_area.shape[0]:
        return True
    last = filled - 1
    if area != top_area[last]:
        return area < top_area[last]
    if i != top_i[last]:
        return i < top_i[last]
    if j != top_j[last]:
        return j < top_j[last]
    return z < top_k[last]


@njit(cache=_CACHE_JIT, nogil=True)
def _insert_candidate(area, i, j, z, top_area, top_i, top_j, top_k, filled):
    """Insert into the sorted top list, dropping the worst if full.

    Returns the new fill count.  Assumes _candidate_better was true.
    """
    k = top_area.shape[0]
    if filled < k:
        pos = filled
        filled += 1
    else:
        pos = k - 1
    while pos > 0:
        better = False
        if area != top_area[pos - 1]:
            better = area < top_area[pos - 1]
        elif i != top_i[pos - 1]:
            better = i < top_i[pos - 1]
        elif j != top_j[pos - 1]:
            better = j < top_j[pos - 1]
        else:
            better = z < top_k[pos - 1]
        if not better:
            break
        top_area[pos] = top_area[pos - 1]
        top_i[pos] = top_i[pos - 1]
        top_j[pos] = top_j[pos - 1]
        top_k[pos] = top_k[pos - 1]
        pos -= 1
    top_area[pos] = area
    top_i[pos] = i
    top_j[pos] = j
    top_k[pos] = z
    return filled


@njit(cache=_CACHE_JIT, nogil=True)
def _scan_kernel(x, y, start, items, ncx, ncy, minx, miny, side,
                 beta_cap, fixed, top_area, top_i, top_j, top_k, stamp):
    """Single pass over all pairs: exact top-k and exact threshold count.

    For each index pair (i, j), i < j, every third index z > j whose triangle
    area can be at or below the running bound lies within perpendicular
    distance 2 * bound / |p_i - p_j| of the line through the pair; the walk
    stamps every grid cell within a padded radius of that strip, so the exact
    area test afterwards is the only filter that rejects.  Each triangle is
    examined exactly once, via its two smallest indices.

    Returns the number of triangles with area <= fixed (0 if fixed < 0).
    """
    n = x.shape[0]
    kk = top_area.shape[0]
    filled = 0
    count = 0
    maxx = minx + ncx * side
    maxy = miny + ncy * side
    for i in range(n - 2):
        ax = x[i]
        ay = y[i]
        for j in range(i + 1, n - 1):
            serial = i * n + j
            bx = x[j]
            by = y[j]
            dx = bx - ax
            dy = by - ay
            dist = math.hypot(dx, dy)

            if kk > 0:
                if filled == kk and top_area[kk - 1] < beta_cap:
                    beta = top_area[kk - 1]
                else:
                    beta = beta_cap
            else:
                beta = -1.0
            bmax = beta if beta > fixed else fixed
            if bmax < 0.0:
                continue

            full_scan = False
            h = 0.0
            radius = 0
            if dist <= 0.0:
                full_scan = True
            else:
                h = (2.0 * bmax / dist) * (1.0 + 1e-9) + 1e-12
                radius = int((h + 0.5 * side) / side) + 1
                if radius >= ncx and radius >= ncy:
                    full_scan = True

            if full_scan:
                for z in range(j + 1, n):
                    cross = (bx - ax) * (y[z] - ay) - (by - ay) * (x[z] - ax)
                    area = 0.5 * abs(cross)
                    if fixed >= 0.0 and area <= fixed:
                        count += 1
                    if kk > 0 and _candidate_better(
                            area, i, j, z, top_area, top_i, top_j, top_k, filled):
                        filled = _insert_candidate(
                            area, i, j, z, top_area, top_i, top_j, top_k, filled)
                continue

            ux = dx / dist
            uy = dy / dist
            t0 = (minx - ax) * ux + (miny - ay) * uy
            t1 = (maxx - ax) * ux + (miny - ay) * uy
            t2 = (minx - ax) * ux + (maxy - ay) * uy
            t3 = (maxx - ax) * ux + (maxy - ay) * uy
            tmin = min(min(t0, t1), min(t2, t3)) - side
            tmax = max(max(t0, t1), max(t2, t3)) + side
            # Sample spacing `side` along the line: a point within strip
            # distance h of the line projects within side/2 of some sample,
            # hence sits within h + side/2 of it, which `radius` covers.
            step = side
            nsteps = int((tmax - tmin) / step) + 2
            for s in range(nsteps):
                t = tmin + s * step
                px = ax + t * ux
                py = ay + t * uy
                cx = int((px - minx) / side)
                if cx < 0:
                    cx = 0
                elif cx >= ncx:
                    cx = ncx - 1
                cy = int((py - miny) / side)
                if cy < 0:
                    cy = 0
                elif cy >= ncy:
                    cy = ncy - 1
                ylo = cy - radius
                if ylo < 0:
                    ylo = 0
                yhi = cy + radius
                if yhi > ncy - 1:
                    yhi = ncy - 1
                xlo = cx - radius
                if xlo < 0:
                    xlo = 0
                xhi = cx + radius
                if xhi > ncx - 1:
                    xhi = ncx - 1
                for gy in range(ylo, yhi + 1):
                    for gx in range(xlo, xhi + 1):
                        c = gy * ncx + gx
                        if stamp[c] == serial:
                            continue
                        stamp[c] = serial
                        for ptr in range(start[c], start[c + 1]):
                            z = items[ptr]
                            if z <= j:
                                continue
                            cross = (bx - ax) * (y[z] - ay) - (by - ay) * (x[z] - ax)
                            area = 0.5 * abs(cross)
                            if fixed >= 0.0 and area <= fixed:
                                count += 1
                            if kk > 0 and _candidate_better(
                                    area, i, j, z,
                                    top_area, top_i, top_j, top_k, filled):
                                filled = _insert_candidate(
                                    area, i, j, z,
                                    top_area, top_i, top_j, top_k, filled)
    return count


def _build_grid(xy: np.ndarray):
    """Uniform bucket grid with roughly one point per cell, CSR layout."""
    n = len(xy)
    minx = float(xy[:, 0].min())
    miny = float(xy[:, 1].min())
    maxx = float(xy[:, 0].max())
    maxy = float(xy[:, 1].max())
    width = maxx - minx
    height = maxy - miny
    diag = math.hypot(width, height)
    if diag <= 0.0:
        return None  # all points coincide
    target = max(1, math.ceil(math.sqrt(n)))
    side = diag / target
    ncx = max(1, int(width / side) + 1)
    ncy = max(1, int(height / side) + 1)
    cellx = np.minimum((xy[:, 0] - minx) / side, ncx - 1).astype(np.int64)
    celly = np.minimum((xy[:, 1] - miny) / side, ncy - 1).astype(np.int64)
    cell = celly * ncx + cellx
    order = np.argsort(cell, kind="stable").astype(np.int64)
    counts = np.bincount(cell, minlength=ncx * ncy)
    start = np.zeros(ncx * ncy + 1, dtype=np.int64)
    np.cumsum(counts, out=start[1:])
    return order, start, ncx, ncy, minx, miny, side


def _seed_bound(xy: np.ndarray, order: np.ndarray, k: int) -> float:
    """Upper bound for the k-th smallest area: k-th best among the triangles
    of consecutive triples in spatial (cell-sorted) order."""
    x = xy[:, 0]
    y = xy[:, 1]
    a, b, c = order[:-2], order[1:-1], order[2:]
    cross = (x[b] - x[a]) * (y[c] - y[a]) - (y[b] - y[a]) * (x[c] - x[a])
    areas = 0.5 * np.abs(cross)
    if k > len(areas):
        k = len(areas)
    return float(np.partition(areas, k - 1)[k - 1])


def _run_grid(xy: np.ndarray, k: int, fixed: float):
    """Shared driver for the grid kernel; returns (hits, count)."""
    n = len(xy)
    grid = _build_grid(xy)
    top_area = np.full(k, np.inf)
    top_i = np.full(k, n, dtype=np.int64)
    top_j = np.full(k, n, dtype=np.int64)
    top_k = np.full(k, n, dtype=np.int64)
    x = np.ascontiguousarray(xy[:, 0])
    y = np.ascontiguousarray(xy[:, 1])
    if grid is None:
        # Coincident cloud: every triangle is degenerate with area 0.
        count = triangle_count(n) if fixed >= 0.0 else 0
        hits: list[TriangleHit] = []
        for i in range(n - 2):
            for j in range(i + 1, n - 1):
                for z in range(j + 1, n):
                    if len(hits) >= k:
                        return hits, count
                    hits.append(TriangleHit(i, j, z, 0.0))
        return hits, count
    order, start, ncx, ncy, minx, miny, side = grid
    if k > 0:
        beta_cap = _seed_bound(xy, order, k)
    else:
        beta_cap = -1.0
    stamp = np.full(ncx * ncy, -1, dtype=np.int64)
    count = _scan_kernel(x, y, start, order, ncx, ncy, minx, miny, side,
                         beta_cap, fixed, top_area, top_i, top_j, top_k, stamp)
    hits = [TriangleHit(int(top_i[t]), int(top_j[t]), int(top_k[t]),
                        float(top_area[t]))
            for t in range(k) if np.isfinite(top_area[t])]
    return hits, int(count)


def _resolve_method(method: str, n: int, k: int) -> str:
    if method not in ("auto", "grid", "brute"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        return "brute" if n <= 60 else "grid"
    return method


def smallest_k(points, k: int, method: str = "auto") -> list[TriangleHit]:
    """The k smallest triangles, sorted by (area, index triple).

    method 'auto' picks brute force for small inputs and the grid search
    otherwise; 'grid' and 'brute' force a specific implementation.
    """
    xy = as_points_array(points)
    if k < 1:
        raise ValueError("k must be positive")
    n = len(xy)
    k = min(k, triangle_count(n))
    chosen = _resolve_method(method, n, k)
    if chosen == "grid" and k > n - 2:
        # The seed bound needs n - 2 window triangles; such large k only
        # makes sense at small n where brute force is exact and cheap.
        chosen = "brute"
    if chosen == "brute":
        if n > BRUTE_MAX_POINTS:
            raise ValueError(
                f"k > n - 2 requires brute enumeration, capped at {BRUTE_MAX_POINTS}")
        return smallest_k_brute(xy, k)
    hits, _ = _run_grid(xy, k, -1.0)
    return hits


def count_below(points, threshold: float,
                method: str = "auto") -> tuple[int, list[TriangleHit]]:
    """Exact count of triangles with area <= threshold, plus those hits.

    The returned list holds exactly the qualifying triangles, sorted by
    (area, index triple).  The inequality is inclusive.
    """
    xy = as_points_array(points)
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    n = len(xy)
    if threshold < 0 or triangle_count(n) == 0:
        return 0, []
    chosen = _resolve_method(method, n, 0)
    if chosen == "brute" or n <= 4:
        count = count_below_brute(xy, threshold)
        return count, (smallest_k_brute(xy, count) if count else [])
    k = min(64, n - 2)
    hits, count = _run_grid(xy, k, float(threshold))
    if count > len(hits):
        if count <= n - 2:
            hits, _ = _run_grid(xy, count, float(threshold))
        elif n <= BRUTE_MAX_POINTS:
            count = count_below_brute(xy, threshold)
            return count, (smallest_k_brute(xy, count) if count else [])
        else:
            # The grid's safe priming bound covers at most n - 2 listed
            # hits; materializing more above the brute-force cap is not
            # supported (the count itself is still exact).
            raise ValueError(
                f"cannot list {count} qualifying triangles for n = {n}; "
                "lower the threshold")
    return count, hits[:count]


def smallest_and_count(points, k: int, threshold: float) -> tuple[list[TriangleHit], int]:
    """Top-k triangles and the count with area <= threshold, in one pass."""
    xy = as_points_array(points)
    if k < 1:
        raise ValueError("k must be positive")
    if not math.isfinite(threshold) or threshold < 0:
        raise ValueError("threshold must be finite and non-negative")
    n = len(xy)
    k = min(k, triangle_count(n))
    if k > n - 2 or n <= 60:
        if n > BRUTE_MAX_POINTS:
            raise ValueError(
                f"k > n - 2 requires brute enumeration, capped at {BRUTE_MAX_POINTS}")
        return smallest_k_brute(xy, k), count_below_brute(xy, threshold)
    hits, count = _run_grid(xy, k, float(threshold))
    return hits, count


def min_area(points, method: str = "auto") -> float:
    """Smallest triangle area over all index triples."""
    return smallest_k(points, 1, method)[0].area
