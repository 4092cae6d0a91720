"""Planar primitives: points, lines in (r, theta) form, regions, chords.

Conventions used throughout the package:

* A line is the set {x : x . u = r} with unit normal u = (cos theta, sin theta)
  and theta in [0, pi).  The same geometric line with theta + pi is stored as
  (-r, theta).
* Points on a line are parameterized as p(t) = r * u + t * v with direction
  v = (-sin theta, cos theta); chord intervals live in this t coordinate.
* Triangle areas are computed as 0.5 * |cross(b - a, c - a)| with exactly this
  operand order everywhere (oracle, accelerated search, simulation), so the
  two search paths produce bit-identical areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError

# Geometric tolerance for degeneracy handling: interval merging, on-line
# vertices, strip padding.  Not a comparison tolerance for test assertions.
EPS_GEOM = 1e-12


def _require_finite(name: str, *values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True, slots=True)
class Point:
    """A point in the plane with finite coordinates."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite("Point coordinate", self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True, slots=True)
class LineRT:
    """A line in normal form, canonicalized to theta in [0, pi).

    Any finite (r, theta) is accepted; theta is folded modulo pi and r's sign
    flips once per fold, so (r, theta + pi) and (-r, theta) construct equal
    objects.
    """

    r: float
    theta: float

    def __post_init__(self) -> None:
        _require_finite("LineRT field", self.r, self.theta)
        r, theta = self.r, self.theta
        folded = math.fmod(theta, math.pi)
        if folded < 0.0:
            folded += math.pi
        if folded >= math.pi:  # fmod rounding can land exactly on pi
            folded -= math.pi
        k = round((theta - folded) / math.pi)
        if k % 2:
            r = -r
        object.__setattr__(self, "r", r + 0.0)
        object.__setattr__(self, "theta", folded + 0.0)

    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def direction(self) -> np.ndarray:
        return np.array([-math.sin(self.theta), math.cos(self.theta)])

    def point_at(self, t: float) -> Point:
        u = self.normal()
        v = self.direction()
        return Point(self.r * u[0] + t * v[0], self.r * u[1] + t * v[1])


def triangle_area(a: Point, b: Point, c: Point) -> float:
    """Area of the (possibly degenerate) triangle abc.

    Returns 0.0 for collinear or coincident inputs; never negative.
    """
    cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    return 0.5 * abs(cross)


def line_through(a: Point, b: Point) -> LineRT:
    """The unique line through two distinct points, in canonical (r, theta).

    Symmetric by construction: the direction b - a is negated to a canonical
    half-plane before the normal is formed, and r is evaluated at the midpoint,
    so line_through(a, b) and line_through(b, a) are bit-identical.

    Raises:
        ValueError: if the points coincide exactly.
    """
    dx = b.x - a.x
    dy = b.y - a.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("coincident points do not determine a line")
    if dx < 0.0 or (dx == 0.0 and dy < 0.0):
        dx = -dx
        dy = -dy
    # Normal obtained by rotating the canonical direction by +90 degrees;
    # with dx >= 0 its angle already lies in (0, pi], and pi folds to 0.
    theta = math.atan2(dx, -dy)
    if theta >= math.pi:
        theta = 0.0
    mx = (a.x + b.x) / 2.0
    my = (a.y + b.y) / 2.0
    r = mx * math.cos(theta) + my * math.sin(theta)
    return LineRT(r, theta)


def point_line_distance(p: Point, line: LineRT) -> float:
    """Euclidean distance from p to the line."""
    return abs(p.x * math.cos(line.theta) + p.y * math.sin(line.theta) - line.r)


def lines_through(a_xy: np.ndarray, b_xy: np.ndarray):
    """Vectorized line_through for arrays of point pairs.

    Returns (r, theta, distance) arrays.  Agrees with the scalar line_through
    to within a unit in the last place (numpy's vector trig and libm may round
    differently); the canonical fold itself is identical.  Coincident pairs
    are reported with distance 0 and an arbitrary line; callers must mask
    them out.
    """
    a_xy = np.asarray(a_xy, dtype=float)
    b_xy = np.asarray(b_xy, dtype=float)
    ax, ay = a_xy[:, 0], a_xy[:, 1]
    bx, by = b_xy[:, 0], b_xy[:, 1]
    dx = bx - ax
    dy = by - ay
    flip = (dx < 0.0) | ((dx == 0.0) & (dy < 0.0))
    dx = np.where(flip, -dx, dx)
    dy = np.where(flip, -dy, dy)
    theta = np.arctan2(dx, -dy)
    theta = np.where(theta >= math.pi, 0.0, theta)
    mx = (ax + bx) / 2.0
    my = (ay + by) / 2.0
    r = mx * np.cos(theta) + my * np.sin(theta)
    return r, theta, np.hypot(dx, dy)


@dataclass(frozen=True)
class ChordSet:
    """Intersection of a line with a region: disjoint t-intervals on the line.

    Intervals are sorted, pairwise disjoint (gaps below EPS_GEOM are merged)
    and each has positive length (shorter ones are dropped).
    """

    line: LineRT
    intervals: tuple[tuple[float, float], ...]

    @staticmethod
    def from_crossings(line: LineRT, ts: Sequence[float]) -> "ChordSet":
        ts = sorted(ts)
        if len(ts) % 2:
            # Cannot happen for a closed curve once on-line vertices are
            # perturbed off the line; guard against caller misuse.
            raise ValueError("odd number of boundary crossings")
        merged: list[list[float]] = []
        for lo, hi in zip(ts[0::2], ts[1::2]):
            if merged and lo - merged[-1][1] <= EPS_GEOM:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        kept = tuple((lo, hi) for lo, hi in merged if hi - lo > EPS_GEOM)
        return ChordSet(line, kept)

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)


class Region:
    """Abstract closed planar region with positive area."""

    kind: str = ""

    def area(self) -> float:
        raise NotImplementedError

    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def contains(self, xy: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (m, 2) array; boundary counts inside
        for convex shapes and is unspecified (measure zero) for simple
        polygons."""
        raise NotImplementedError

    def contains_point(self, p: Point) -> bool:
        return bool(self.contains(np.array([[p.x, p.y]]))[0])

    def chord_set(self, line: LineRT) -> ChordSet:
        raise NotImplementedError

    def chord_length(self, line: LineRT) -> float:
        """1-D Lebesgue measure of the intersection with the line.

        Defined as the exact interval-length sum of chord_set, so the two
        never disagree.
        """
        return self.chord_set(line).total_length

    def chord_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        """Vectorized chord_length over an array of offsets at fixed theta."""
        raise NotImplementedError

    def chord_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        """Chord length for per-entry (theta, r) line arrays.

        Generic fallback loops; polygon and disk subclasses vectorize.
        """
        theta = np.asarray(theta, dtype=float)
        r = np.asarray(r, dtype=float)
        return np.array([
            self.chord_profile(float(t), np.array([ri]))[0]
            for t, ri in zip(theta, r)
        ])

    def projection_range(self, theta: float) -> tuple[float, float]:
        """Range of x . u over the region for u = (cos theta, sin theta)."""
        raise NotImplementedError

    def r_breakpoints(self, theta: float) -> np.ndarray:
        """Offsets where the chord profile is non-smooth (kinks), sorted."""
        raise NotImplementedError

    def uniform_mean(self) -> np.ndarray:
        raise NotImplementedError

    def uniform_covariance(self) -> np.ndarray:
        """Covariance matrix of a uniform draw from the region."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _as_vertex_array(vertices: Iterable[Sequence[float]]) -> np.ndarray:
    arr = np.asarray(list(vertices), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("a polygon needs at least 3 two-dimensional vertices")
    if not np.all(np.isfinite(arr)):
        raise ValueError("polygon vertices must be finite")
    return arr


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p, q, a, b) -> bool:
    """True if segment pq meets segment ab anywhere (touching included)."""

    def orient(o, s, t):
        return (s[0] - o[0]) * (t[1] - o[1]) - (s[1] - o[1]) * (t[0] - o[0])

    d1 = orient(a, b, p)
    d2 = orient(a, b, q)
    d3 = orient(p, q, a)
    d4 = orient(p, q, b)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 \
            and d3 != 0 and d4 != 0:
        return True

    def on_seg(o, s, t):
        return (orient(o, s, t) == 0
                and min(o[0], s[0]) <= t[0] <= max(o[0], s[0])
                and min(o[1], s[1]) <= t[1] <= max(o[1], s[1]))

    return on_seg(a, b, p) or on_seg(a, b, q) or on_seg(p, q, a) or on_seg(p, q, b)


class _Polygon(Region):
    """Shared implementation for convex and simple polygons.

    A single even-odd crossing code path computes chords for both kinds; a
    convex boundary simply produces at most one interval.
    """

    def __init__(self, vertices: Iterable[Sequence[float]]):
        v = _as_vertex_array(vertices)
        d = np.diff(np.vstack([v, v[:1]]), axis=0)
        if np.any(np.hypot(d[:, 0], d[:, 1]) <= EPS_GEOM):
            raise ValueError("polygon has repeated consecutive vertices")
        area2 = _signed_area(v)
        if area2 < 0:
            v = v[::-1].copy()
        if abs(area2) <= EPS_GEOM:
            raise ValueError("polygon area must be positive")
        self.vertices = v
        self._area = abs(area2)

    def area(self) -> float:
        return self._area

    def bbox(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (float(v[:, 0].min()), float(v[:, 1].min()),
                float(v[:, 0].max()), float(v[:, 1].max()))

    def diameter(self) -> float:
        v = self.vertices
        d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=2)
        return float(np.sqrt(d2.max()))

    def projection_range(self, theta: float) -> tuple[float, float]:
        proj = self.vertices @ np.array([math.cos(theta), math.sin(theta)])
        return float(proj.min()), float(proj.max())

    def r_breakpoints(self, theta: float) -> np.ndarray:
        proj = self.vertices @ np.array([math.cos(theta), math.sin(theta)])
        return np.unique(proj)

    def chord_set(self, line: LineRT) -> ChordSet:
        u = line.normal()
        w = line.direction()
        d = self.vertices @ u - line.r
        # Vertices exactly on the line are pushed to the positive side so the
        # crossing count around the closed boundary stays even.
        d = np.where(np.abs(d) < EPS_GEOM, EPS_GEOM, d)
        d_next = np.roll(d, -1)
        crossing = (d * d_next) < 0.0
        if not np.any(crossing):
            return ChordSet(line, ())
        lam = d[crossing] / (d[crossing] - d_next[crossing])
        v0 = self.vertices[crossing]
        v1 = np.roll(self.vertices, -1, axis=0)[crossing]
        pts = v0 + lam[:, None] * (v1 - v0)
        ts = pts @ w
        return ChordSet.from_crossings(line, ts.tolist())

    @staticmethod
    def _chords_from_projections(proj: np.ndarray, tv: np.ndarray,
                                 r: np.ndarray) -> np.ndarray:
        """Alternating-crossing chord totals; proj/tv are (m, nv) or (1, nv)
        vertex projections onto the per-row normal and direction."""
        proj_next = np.roll(proj, -1, axis=1)
        tv_next = np.roll(tv, -1, axis=1)
        d = proj - r[:, None]
        d = np.where(np.abs(d) < EPS_GEOM, EPS_GEOM, d)
        d_next = proj_next - r[:, None]
        d_next = np.where(np.abs(d_next) < EPS_GEOM, EPS_GEOM, d_next)
        crossing = (d * d_next) < 0.0
        denom = d - d_next
        lam = np.where(crossing, d / np.where(denom == 0.0, 1.0, denom), 0.0)
        t = tv + lam * (tv_next - tv)
        t = np.where(crossing, t, np.inf)
        t.sort(axis=1)
        count = crossing.sum(axis=1)
        t = np.where(np.isfinite(t), t, 0.0)
        hi = t[:, 1::2]
        lo = t[:, 0::2][:, :hi.shape[1]]
        pair_idx = np.arange(lo.shape[1])
        valid = (2 * pair_idx + 1)[None, :] < count[:, None]
        return np.where(valid, hi - lo, 0.0).sum(axis=1)

    def chord_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        u = np.array([math.cos(theta), math.sin(theta)])
        w = np.array([-math.sin(theta), math.cos(theta)])
        proj = (self.vertices @ u)[None, :]
        tv = (self.vertices @ w)[None, :]
        return self._chords_from_projections(proj, tv, r)

    def chord_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = np.asarray(r, dtype=float)
        out = np.empty(len(r))
        vx = self.vertices[:, 0]
        vy = self.vertices[:, 1]
        step = 1 << 15
        for start in range(0, len(r), step):
            sl = slice(start, min(start + step, len(r)))
            c = np.cos(theta[sl])[:, None]
            s = np.sin(theta[sl])[:, None]
            proj = c * vx[None, :] + s * vy[None, :]
            tv = -s * vx[None, :] + c * vy[None, :]
            out[sl] = self._chords_from_projections(proj, tv, r[sl])
        return out


class ConvexPolygon(_Polygon):
    """Convex polygon, vertices stored counterclockwise."""

    kind = "convex_polygon"

    def __init__(self, vertices: Iterable[Sequence[float]]):
        super().__init__(vertices)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        turn = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        scale = float(np.abs(e).max()) ** 2
        if np.any(turn < -EPS_GEOM * max(scale, 1.0)):
            raise ValueError("vertices do not describe a convex polygon")

    def contains(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        rel_x = xy[:, None, 0] - v[None, :, 0]
        rel_y = xy[:, None, 1] - v[None, :, 1]
        cross = e[None, :, 0] * rel_y - e[None, :, 1] * rel_x
        return np.all(cross >= -EPS_GEOM, axis=1)

    def uniform_mean(self) -> np.ndarray:
        return _polygon_moments(self.vertices)[0]

    def uniform_covariance(self) -> np.ndarray:
        return _polygon_moments(self.vertices)[1]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vertices": self.vertices.tolist()}


class SimplePolygon(_Polygon):
    """Simple (possibly non-convex) polygon; edges may not cross each other."""

    kind = "simple_polygon"

    def __init__(self, vertices: Iterable[Sequence[float]]):
        super().__init__(vertices)
        v = self.vertices
        n = len(v)
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                c, dpt = v[j], v[(j + 1) % n]
                if _segments_properly_intersect(a, b, c, dpt):
                    raise ValueError(
                        f"polygon edges {i} and {j} intersect; not a simple polygon")

    def contains(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        v = self.vertices
        x0, y0 = v[:, 0], v[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        px = xy[:, None, 0]
        py = xy[:, None, 1]
        straddles = (y0[None, :] > py) != (y1[None, :] > py)
        dy = np.where(y1 - y0 == 0.0, 1.0, y1 - y0)[None, :]
        x_cross = x0[None, :] + (py - y0[None, :]) * (x1 - x0)[None, :] / dy
        hits = straddles & (px < x_cross)
        return (hits.sum(axis=1) % 2).astype(bool)

    def uniform_mean(self) -> np.ndarray:
        return _polygon_moments(self.vertices)[0]

    def uniform_covariance(self) -> np.ndarray:
        return _polygon_moments(self.vertices)[1]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vertices": self.vertices.tolist()}


class Rectangle(ConvexPolygon):
    """Axis-aligned rectangle; shares the convex-polygon code path."""

    kind = "rectangle"

    def __init__(self, corner: Sequence[float], width: float, height: float):
        if not (width > 0 and height > 0):
            raise ValueError("rectangle width and height must be positive")
        cx, cy = float(corner[0]), float(corner[1])
        _require_finite("Rectangle parameter", cx, cy, width, height)
        self.corner = (cx, cy)
        self.width = float(width)
        self.height = float(height)
        super().__init__([
            (cx, cy), (cx + width, cy), (cx + width, cy + height), (cx, cy + height),
        ])

    def contains(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        cx, cy = self.corner
        return ((xy[:, 0] >= cx - EPS_GEOM) & (xy[:, 0] <= cx + self.width + EPS_GEOM)
                & (xy[:, 1] >= cy - EPS_GEOM) & (xy[:, 1] <= cy + self.height + EPS_GEOM))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "corner": list(self.corner),
                "width": self.width, "height": self.height}


class Disk(Region):
    """Closed disk of positive radius."""

    kind = "disk"

    def __init__(self, center: Sequence[float], radius: float):
        cx, cy = float(center[0]), float(center[1])
        _require_finite("Disk parameter", cx, cy, radius)
        if not radius > 0:
            raise ValueError("disk radius must be positive")
        self.center = np.array([cx, cy])
        self.radius = float(radius)

    def area(self) -> float:
        return math.pi * self.radius ** 2

    def bbox(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        R = self.radius
        return (cx - R, cy - R, cx + R, cy + R)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        d2 = (xy[:, 0] - self.center[0]) ** 2 + (xy[:, 1] - self.center[1]) ** 2
        return d2 <= self.radius ** 2

    def chord_set(self, line: LineRT) -> ChordSet:
        u = line.normal()
        w = line.direction()
        d = float(self.center @ u) - line.r
        if abs(d) >= self.radius:
            return ChordSet(line, ())
        half = math.sqrt(self.radius ** 2 - d * d)
        tc = float(self.center @ w)
        if 2.0 * half <= EPS_GEOM:
            return ChordSet(line, ())
        return ChordSet(line, ((tc - half, tc + half),))

    def chord_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        u = np.array([math.cos(theta), math.sin(theta)])
        d = float(self.center @ u) - r
        inside = np.abs(d) < self.radius
        return np.where(inside, 2.0 * np.sqrt(np.maximum(self.radius ** 2 - d * d, 0.0)), 0.0)

    def chord_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = np.asarray(r, dtype=float)
        d = self.center[0] * np.cos(theta) + self.center[1] * np.sin(theta) - r
        inside = np.abs(d) < self.radius
        return np.where(inside, 2.0 * np.sqrt(np.maximum(self.radius ** 2 - d * d, 0.0)), 0.0)

    def projection_range(self, theta: float) -> tuple[float, float]:
        u = np.array([math.cos(theta), math.sin(theta)])
        c = float(self.center @ u)
        return (c - self.radius, c + self.radius)

    def r_breakpoints(self, theta: float) -> np.ndarray:
        return np.array([])

    def uniform_mean(self) -> np.ndarray:
        return self.center.copy()

    def uniform_covariance(self) -> np.ndarray:
        return np.eye(2) * (self.radius ** 2 / 4.0)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "center": self.center.tolist(),
                "radius": self.radius}


def _polygon_moments(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of the uniform law on a CCW polygon, closed form."""
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = float(cr.sum()) / 2.0
    cx = float(((x + xn) * cr).sum()) / (6.0 * a)
    cy = float(((y + yn) * cr).sum()) / (6.0 * a)
    exx = float(((x * x + x * xn + xn * xn) * cr).sum()) / (12.0 * a)
    eyy = float(((y * y + y * yn + yn * yn) * cr).sum()) / (12.0 * a)
    exy = float(((x * yn + 2.0 * x * y + 2.0 * xn * yn + xn * y) * cr).sum()) / (24.0 * a)
    mean = np.array([cx, cy])
    cov = np.array([[exx - cx * cx, exy - cx * cy],
                    [exy - cx * cy, eyy - cy * cy]])
    return mean, cov


_REGION_KINDS = {}


def _register(cls):
    _REGION_KINDS[cls.kind] = cls
    return cls


for _cls in (ConvexPolygon, SimplePolygon, Rectangle, Disk):
    _register(_cls)


def region_from_dict(data: dict) -> Region:
    """Deserialize a region from its JSON dictionary form.

    Raises:
        FormatError: naming the offending field, for unknown kinds or missing
            or malformed entries.
    """
    if not isinstance(data, dict):
        raise FormatError("region", "expected a JSON object")
    kind = data.get("kind")
    if kind not in _REGION_KINDS:
        raise FormatError("region.kind", f"unknown region kind {kind!r}")
    try:
        if kind in ("convex_polygon", "simple_polygon"):
            return _REGION_KINDS[kind](data["vertices"])
        if kind == "rectangle":
            return Rectangle(data["corner"], data["width"], data["height"])
        return Disk(data["center"], data["radius"])
    except KeyError as exc:
        raise FormatError(f"region.{exc.args[0]}", "missing required field") from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(f"region[kind={kind}]", str(exc)) from exc
