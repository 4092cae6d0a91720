"""Probability measures on the plane and their line marginals.

Every measure knows its density, its 1-D marginal along the normal of a line
(the density of X . u at r, written f_{r,theta}), how to draw samples from a
seeded stream, and global bounds on both densities.  The marginal is the
object the intensity computations integrate, so measures also expose the
support interval, the offsets where the marginal profile has kinks, and the
angles where the angular integrand has kinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import FormatError, SamplingError
from .geometry import LineRT, Point, Region, region_from_dict

# Gaussian marginals are treated as supported within this many standard
# deviations; the truncated tail mass is below 1e-15.
TRUNC_SIGMA = 8.0

_MAX_CONSECUTIVE_REJECTIONS = 1_000_000

_MASK64 = (1 << 64) - 1


@dataclass
class RngStream:
    """Deterministic random stream keyed by (seed, stream).

    Backed by the Philox counter-based generator, so distinct stream ids give
    statistically independent sequences and a fixed pair reproduces the exact
    same draws on every platform and run.
    """

    seed: int
    stream: int = 0
    _gen: Optional[np.random.Generator] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream id must be non-negative")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.seed & _MASK64, self.stream & _MASK64],
                           dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def random(self, size=None):
        return self.generator.random(size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric positive semi-definite 2x2 covariance."""

    v11: float
    v12: float
    v22: float

    def __post_init__(self) -> None:
        for v in (self.v11, self.v12, self.v22):
            if not math.isfinite(v):
                raise ValueError("covariance entries must be finite")
        if self.v11 < 0 or self.v22 < 0 or self.det < -1e-12:
            raise ValueError("covariance must be positive semi-definite")

    @property
    def det(self) -> float:
        return self.v11 * self.v22 - self.v12 * self.v12

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.v11, self.v12], [self.v12, self.v22]])

    @property
    def min_eigenvalue(self) -> float:
        tr = self.v11 + self.v22
        gap = math.sqrt((self.v11 - self.v22) ** 2 + 4.0 * self.v12 ** 2)
        return 0.5 * (tr - gap)

    @staticmethod
    def from_matrix(m: np.ndarray) -> "CovMatrix":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("covariance must be a 2x2 matrix")
        if abs(m[0, 1] - m[1, 0]) > 1e-9 * max(1.0, abs(m[0, 1])):
            raise ValueError("covariance must be symmetric")
        return CovMatrix(float(m[0, 0]), 0.5 * float(m[0, 1] + m[1, 0]), float(m[1, 1]))


def _unit(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


class Measure:
    """Abstract probability measure on R^2 with a bounded density."""

    kind: str = ""

    # -- pointwise evaluations -------------------------------------------
    def density(self, p: Point) -> float:
        return float(self.density_many(np.array([[p.x, p.y]]))[0])

    def density_many(self, xy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def marginal(self, line: LineRT) -> float:
        """Density of X . (cos theta, sin theta) at r, for the canonical line."""
        return float(self.marginal_profile(line.theta, np.array([line.r]))[0])

    def marginal_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def marginal_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        """Marginal density for per-entry (theta, r) line arrays."""
        theta = np.asarray(theta, dtype=float)
        r = np.asarray(r, dtype=float)
        return np.array([
            float(self.marginal_profile(float(t), np.array([ri]))[0])
            for t, ri in zip(theta, r)
        ])

    # -- structure used by the quadrature --------------------------------
    def marginal_support(self, theta: float) -> tuple[float, float]:
        raise NotImplementedError

    def r_breakpoints(self, theta: float) -> np.ndarray:
        return np.array([])

    def theta_breakpoints(self) -> np.ndarray:
        groups = self._vertex_groups()
        angles: list[float] = []
        for g in groups:
            if len(g) < 2:
                continue
            diff = g[:, None, :] - g[None, :, :]
            iu = np.triu_indices(len(g), k=1)
            dx = diff[..., 0][iu]
            dy = diff[..., 1][iu]
            keep = (dx != 0) | (dy != 0)
            ang = (np.arctan2(dy[keep], dx[keep]) + 0.5 * math.pi) % math.pi
            angles.extend(ang.tolist())
        inner = sorted(a for a in angles if 1e-12 < a < math.pi - 1e-12)
        dedup: list[float] = []
        for a in inner:
            if not dedup or a - dedup[-1] > 1e-12:
                dedup.append(a)
        return np.array(dedup)

    def _vertex_groups(self) -> list[np.ndarray]:
        """Vertex sets whose equal-projection angles are kinks of the angular
        integrand; empty for smooth measures."""
        return []

    @property
    def bounded_support(self) -> bool:
        raise NotImplementedError

    # -- sampling ---------------------------------------------------------
    def sample(self, rng: RngStream) -> Point:
        xy = self.sample_many(rng, 1)
        return Point(float(xy[0, 0]), float(xy[0, 1]))

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        raise NotImplementedError

    # -- moments and bounds ----------------------------------------------
    def mean(self) -> np.ndarray:
        raise NotImplementedError

    def covariance(self) -> CovMatrix:
        raise NotImplementedError

    def density_bound(self) -> float:
        raise NotImplementedError

    def marginal_bound(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class UniformRegion(Measure):
    """Uniform law on a region; the marginal is chord length / area."""

    kind = "uniform"

    def __init__(self, region: Region):
        self.region = region
        self._area = region.area()

    def density_many(self, xy: np.ndarray) -> np.ndarray:
        inside = self.region.contains(np.asarray(xy, dtype=float))
        return np.where(inside, 1.0 / self._area, 0.0)

    def marginal(self, line: LineRT) -> float:
        return self.region.chord_length(line) / self._area

    def marginal_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        return self.region.chord_profile(theta, np.asarray(r, dtype=float)) / self._area

    def marginal_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        return self.region.chord_many(theta, r) / self._area

    def marginal_support(self, theta: float) -> tuple[float, float]:
        return self.region.projection_range(theta)

    def r_breakpoints(self, theta: float) -> np.ndarray:
        return self.region.r_breakpoints(theta)

    def _vertex_groups(self) -> list[np.ndarray]:
        verts = getattr(self.region, "vertices", None)
        return [verts] if verts is not None else []

    @property
    def bounded_support(self) -> bool:
        return True

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        minx, miny, maxx, maxy = self.region.bbox()
        w, h = maxx - minx, maxy - miny
        accept_rate = self._area / (w * h)
        if accept_rate >= 1.0 - 1e-12:
            # The region fills its bounding box (axis-aligned rectangle):
            # every proposal is accepted, so skip the membership test.
            xy = rng.generator.random((size, 2))
            xy[:, 0] = minx + w * xy[:, 0]
            xy[:, 1] = miny + h * xy[:, 1]
            return xy
        out = np.empty((size, 2))
        got = 0
        starved = 0
        gen = rng.generator
        while got < size:
            need = size - got
            batch = max(64, int(need / max(accept_rate, 1e-9) * 1.2))
            batch = min(batch, 4_000_000)
            xy = gen.random((batch, 2))
            xy[:, 0] = minx + w * xy[:, 0]
            xy[:, 1] = miny + h * xy[:, 1]
            ok = self.region.contains(xy)
            hits = xy[ok]
            if len(hits) == 0:
                starved += batch
                if starved > _MAX_CONSECUTIVE_REJECTIONS:
                    raise SamplingError(
                        "rejection sampler starved; region is degenerate "
                        f"(acceptance below {1.0 / starved:.1e})")
                continue
            starved = 0
            take = min(need, len(hits))
            out[got:got + take] = hits[:take]
            got += take
        return out

    def mean(self) -> np.ndarray:
        return self.region.uniform_mean()

    def covariance(self) -> CovMatrix:
        return CovMatrix.from_matrix(self.region.uniform_covariance())

    def density_bound(self) -> float:
        return 1.0 / self._area

    def marginal_bound(self) -> float:
        # No chord exceeds the diameter of the region.
        return self.region.diameter() / self._area

    def to_dict(self) -> dict:
        return {"kind": self.kind, "region": self.region.to_dict()}


class Gaussian(Measure):
    """Bivariate normal with positive definite covariance."""

    kind = "gaussian"

    def __init__(self, mean: Sequence[float], cov: CovMatrix):
        self.mu = np.asarray(mean, dtype=float).reshape(2)
        if not np.all(np.isfinite(self.mu)):
            raise ValueError("Gaussian mean must be finite")
        if not (cov.v11 > 0 and cov.det > 0):
            raise ValueError("Gaussian covariance must be positive definite")
        self.cov = cov
        self._chol = np.linalg.cholesky(cov.matrix)

    def density_many(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        diff = xy - self.mu
        v = self.cov
        det = v.det
        inv11, inv12, inv22 = v.v22 / det, -v.v12 / det, v.v11 / det
        q = (inv11 * diff[:, 0] ** 2 + 2.0 * inv12 * diff[:, 0] * diff[:, 1]
             + inv22 * diff[:, 1] ** 2)
        return np.exp(-0.5 * q) / (2.0 * math.pi * math.sqrt(det))

    def _sigma_along(self, theta: float) -> float:
        u = _unit(theta)
        return math.sqrt(float(u @ self.cov.matrix @ u))

    def marginal_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        s = self._sigma_along(theta)
        m = float(self.mu @ _unit(theta))
        z = (r - m) / s
        return np.exp(-0.5 * z * z) / (s * math.sqrt(2.0 * math.pi))

    def marginal_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = np.asarray(r, dtype=float)
        c, sn = np.cos(theta), np.sin(theta)
        v = self.cov
        s = np.sqrt(v.v11 * c * c + 2.0 * v.v12 * c * sn + v.v22 * sn * sn)
        m = self.mu[0] * c + self.mu[1] * sn
        z = (r - m) / s
        return np.exp(-0.5 * z * z) / (s * math.sqrt(2.0 * math.pi))

    def marginal_support(self, theta: float) -> tuple[float, float]:
        s = self._sigma_along(theta)
        m = float(self.mu @ _unit(theta))
        return (m - TRUNC_SIGMA * s, m + TRUNC_SIGMA * s)

    @property
    def bounded_support(self) -> bool:
        return False

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        z = rng.generator.standard_normal((size, 2))
        return self.mu + z @ self._chol.T

    def mean(self) -> np.ndarray:
        return self.mu.copy()

    def covariance(self) -> CovMatrix:
        return self.cov

    def density_bound(self) -> float:
        return 1.0 / (2.0 * math.pi * math.sqrt(self.cov.det))

    def marginal_bound(self) -> float:
        return 1.0 / math.sqrt(2.0 * math.pi * self.cov.min_eigenvalue)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "mean": self.mu.tolist(),
                "cov": self.cov.matrix.tolist()}


class Mixture(Measure):
    """Finite convex combination of measures."""

    kind = "mixture"

    def __init__(self, weights: Sequence[float], components: Sequence[Measure]):
        w = np.asarray(weights, dtype=float)
        if len(w) != len(components) or len(w) == 0:
            raise ValueError("weights and components must align and be non-empty")
        if np.any(w <= 0):
            raise ValueError("mixture weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        self.weights = w
        self.components = list(components)

    def density_many(self, xy: np.ndarray) -> np.ndarray:
        return sum(w * c.density_many(xy) for w, c in zip(self.weights, self.components))

    def marginal_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        return sum(w * c.marginal_profile(theta, r)
                   for w, c in zip(self.weights, self.components))

    def marginal_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        return sum(w * c.marginal_many(theta, r)
                   for w, c in zip(self.weights, self.components))

    def marginal_support(self, theta: float) -> tuple[float, float]:
        spans = [c.marginal_support(theta) for c in self.components]
        return (min(s[0] for s in spans), max(s[1] for s in spans))

    def r_breakpoints(self, theta: float) -> np.ndarray:
        # Component support endpoints are kinks of the mixture marginal as
        # well; including them keeps adaptive panels from stepping across an
        # isolated bump (e.g. one far-apart component of a Gaussian pair).
        parts = [c.r_breakpoints(theta) for c in self.components]
        parts.extend(np.array(c.marginal_support(theta))
                     for c in self.components)
        return np.unique(np.concatenate(parts)) if parts else np.array([])

    def _vertex_groups(self) -> list[np.ndarray]:
        groups: list[np.ndarray] = []
        for c in self.components:
            groups.extend(c._vertex_groups())
        return groups

    @property
    def bounded_support(self) -> bool:
        return all(c.bounded_support for c in self.components)

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        u = rng.generator.random(size)
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        choice = np.searchsorted(cum, u, side="right")
        out = np.empty((size, 2))
        for idx, comp in enumerate(self.components):
            mask = choice == idx
            count = int(mask.sum())
            if count:
                out[mask] = comp.sample_many(rng, count)
        return out

    def mean(self) -> np.ndarray:
        return sum(w * c.mean() for w, c in zip(self.weights, self.components))

    def covariance(self) -> CovMatrix:
        m = self.mean()
        total = np.zeros((2, 2))
        for w, c in zip(self.weights, self.components):
            cm = c.mean()
            total += w * (c.covariance().matrix + np.outer(cm, cm))
        return CovMatrix.from_matrix(total - np.outer(m, m))

    def density_bound(self) -> float:
        return float(sum(w * c.density_bound()
                         for w, c in zip(self.weights, self.components)))

    def marginal_bound(self) -> float:
        return float(sum(w * c.marginal_bound()
                         for w, c in zip(self.weights, self.components)))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "weights": self.weights.tolist(),
                "components": [c.to_dict() for c in self.components]}


class AffineImage(Measure):
    """Image of a base measure under x -> A x + b with non-singular A."""

    kind = "affine"

    def __init__(self, matrix: np.ndarray, offset: Sequence[float], base: Measure):
        a = np.asarray(matrix, dtype=float)
        if a.shape != (2, 2) or not np.all(np.isfinite(a)):
            raise ValueError("affine matrix must be a finite 2x2 matrix")
        det = float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
        if abs(det) <= 1e-12:
            raise ValueError("affine matrix must be non-singular")
        self.matrix = a
        self.offset = np.asarray(offset, dtype=float).reshape(2)
        if not np.all(np.isfinite(self.offset)):
            raise ValueError("affine offset must be finite")
        self.base = base
        self._det = det
        self._inv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det

    def density_many(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        back = (xy - self.offset) @ self._inv.T
        return self.base.density_many(back) / abs(self._det)

    def _fold(self, theta: float) -> tuple[float, float, float, float]:
        """Decompose the pullback of direction theta.

        Returns (scale s, base angle phi in [0, pi), sign, offset shift b.u)
        such that the marginal at (r, theta) equals
        marginal_base(sign * (r - shift) / s, phi) / s.
        """
        u = _unit(theta)
        w = self.matrix.T @ u
        s = float(np.hypot(w[0], w[1]))
        phi = math.atan2(w[1], w[0])
        if phi < 0.0:
            phi += 2.0 * math.pi
        if phi < math.pi:
            sign = 1.0
        else:
            phi -= math.pi
            sign = -1.0
        if phi >= math.pi:  # rounding guard
            phi = 0.0
            sign = -sign
        return s, phi, sign, float(self.offset @ u)

    def marginal_profile(self, theta: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        s, phi, sign, shift = self._fold(theta)
        return self.base.marginal_profile(phi, sign * (r - shift) / s) / s

    def marginal_many(self, theta: np.ndarray, r: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = np.asarray(r, dtype=float)
        c, sn = np.cos(theta), np.sin(theta)
        a = self.matrix
        w1 = a[0, 0] * c + a[1, 0] * sn
        w2 = a[0, 1] * c + a[1, 1] * sn
        s = np.hypot(w1, w2)
        phi = np.arctan2(w2, w1)
        phi = np.where(phi < 0.0, phi + 2.0 * math.pi, phi)
        sign = np.where(phi < math.pi, 1.0, -1.0)
        phi = np.where(phi < math.pi, phi, phi - math.pi)
        over = phi >= math.pi  # rounding guard
        phi = np.where(over, 0.0, phi)
        sign = np.where(over, -sign, sign)
        shift = self.offset[0] * c + self.offset[1] * sn
        return self.base.marginal_many(phi, sign * (r - shift) / s) / s

    def marginal_support(self, theta: float) -> tuple[float, float]:
        s, phi, sign, shift = self._fold(theta)
        lo, hi = self.base.marginal_support(phi)
        a = shift + s * sign * lo
        b = shift + s * sign * hi
        return (min(a, b), max(a, b))

    def r_breakpoints(self, theta: float) -> np.ndarray:
        s, phi, sign, shift = self._fold(theta)
        base = self.base.r_breakpoints(phi)
        return np.sort(shift + s * sign * base) if len(base) else base

    def _vertex_groups(self) -> list[np.ndarray]:
        return [g @ self.matrix.T + self.offset for g in self.base._vertex_groups()]

    @property
    def bounded_support(self) -> bool:
        return self.base.bounded_support

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        return self.base.sample_many(rng, size) @ self.matrix.T + self.offset

    def mean(self) -> np.ndarray:
        return self.matrix @ self.base.mean() + self.offset

    def covariance(self) -> CovMatrix:
        v = self.base.covariance().matrix
        return CovMatrix.from_matrix(self.matrix @ v @ self.matrix.T)

    def density_bound(self) -> float:
        return self.base.density_bound() / abs(self._det)

    def marginal_bound(self) -> float:
        smin = math.sqrt(CovMatrix.from_matrix(
            self.matrix @ self.matrix.T).min_eigenvalue)
        return self.base.marginal_bound() / smin

    def to_dict(self) -> dict:
        return {"kind": self.kind, "matrix": self.matrix.tolist(),
                "offset": self.offset.tolist(), "base": self.base.to_dict()}


def measure_from_dict(data: dict) -> Measure:
    """Deserialize a measure from its JSON dictionary form."""
    if not isinstance(data, dict):
        raise FormatError("measure", "expected a JSON object")
    kind = data.get("kind")
    try:
        if kind == "uniform":
            return UniformRegion(region_from_dict(data["region"]))
        if kind == "gaussian":
            cov = CovMatrix.from_matrix(np.asarray(data["cov"], dtype=float))
            return Gaussian(data["mean"], cov)
        if kind == "mixture":
            comps = [measure_from_dict(c) for c in data["components"]]
            return Mixture(data["weights"], comps)
        if kind == "affine":
            base = measure_from_dict(data["base"])
            return AffineImage(np.asarray(data["matrix"], dtype=float),
                               data["offset"], base)
    except FormatError:
        raise
    except KeyError as exc:
        raise FormatError(f"measure[kind={kind}].{exc.args[0]}",
                          "missing required field") from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(f"measure[kind={kind}]", str(exc)) from exc
    raise FormatError("measure.kind", f"unknown measure kind {kind!r}")
