"""The limiting intensity for smallest triangle areas, three independent ways.

For n i.i.d. points from a measure with bounded density, the rescaled minimum
triangle area n^3 * A_min converges to an exponential law whose rate kappa is

    kappa = (2/3) * integral over lines of (marginal density)^3  dr dtheta
          = (2/3) * E[ marginal(line(X, Y)) / |X - Y| ],     X, Y i.i.d.

This module evaluates kappa by closed form (when one exists), by adaptive
quadrature of the line integral, and by Monte Carlo of the pair expectation —
three routes through genuinely different code so they can cross-check each
other.  It also exposes the companion chord-power line integrals over a region
and the inverse-distance moment, which obey classical integral-geometry
identities used by the verification suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import ConvexPolygon, Disk, Region, lines_through
from .measures import AffineImage, Gaussian, Measure, RngStream, UniformRegion
from .quadrature import integrate_scalar_outer, integrate_segments, sqrt_end_segments

_PAIR_BATCH = 1 << 16


@dataclass(frozen=True)
class KappaEstimate:
    """An estimate of the limiting intensity with its error scale.

    se is a statistical standard error for Monte Carlo, a quadrature error
    estimate for the integral route, and exactly 0.0 for closed forms.
    """

    value: float
    se: float
    method: str
    samples: Optional[int] = None


def plane_integral(measure: Measure, power: float,
                   rel_tol: float = 1e-9) -> tuple[float, float]:
    """integral_0^pi integral_R (marginal density)^power dr dtheta.

    Splits the angle axis at directions where some pair of support vertices
    projects equally, and the offset axis at the marginal's kinks; bounded
    supports get an endpoint substitution so root-type behavior at the edge
    of the support does not stall the polynomial rule.

    Returns (value, absolute error estimate).
    """
    inner_tol = rel_tol * 0.05
    subst = measure.bounded_support
    integer_power = float(power).is_integer()

    def inner(theta: float) -> float:
        lo, hi = measure.marginal_support(theta)
        if not hi > lo:
            return 0.0
        br = measure.r_breakpoints(theta)
        br = br[(br > lo) & (br < hi)]
        breaks = np.concatenate([[lo], br, [hi]])

        if integer_power:
            def f(r: np.ndarray) -> np.ndarray:
                return measure.marginal_profile(theta, r) ** power
        else:
            def f(r: np.ndarray) -> np.ndarray:
                return np.maximum(measure.marginal_profile(theta, r), 0.0) ** power

        segs = sqrt_end_segments(f, breaks, subst, subst)
        value, _ = integrate_segments(segs, inner_tol)
        return value

    theta_breaks = [0.0] + measure.theta_breakpoints().tolist() + [math.pi]
    return integrate_scalar_outer(inner, theta_breaks, rel_tol)


def kappa_closed_form(measure: Measure) -> Optional[KappaEstimate]:
    """Exact kappa where a formula is known; None otherwise.

    Uniform on a convex region: 2 / area.  Gaussian with covariance V:
    1 / (3 * sqrt(3 * det V)).  A non-singular affine image scales areas by
    |det A|, hence kappa by 1 / |det A|.
    """
    value = _closed_form_value(measure)
    if value is None:
        return None
    return KappaEstimate(value=value, se=0.0, method="closed_form")


def _closed_form_value(measure: Measure) -> Optional[float]:
    if isinstance(measure, UniformRegion):
        region = measure.region
        if isinstance(region, (ConvexPolygon, Disk)):
            return 2.0 / region.area()
        return None
    if isinstance(measure, Gaussian):
        return 1.0 / (3.0 * math.sqrt(3.0 * measure.cov.det))
    if isinstance(measure, AffineImage):
        base = _closed_form_value(measure.base)
        if base is None:
            return None
        return base / abs(measure._det)
    return None


def kappa_quadrature(measure: Measure, rel_tol: float = 1e-9) -> KappaEstimate:
    """kappa via deterministic quadrature of the cubed-marginal line integral."""
    value, err = plane_integral(measure, 3.0, rel_tol)
    return KappaEstimate(value=(2.0 / 3.0) * value, se=(2.0 / 3.0) * err,
                         method="quadrature")


def kappa_monte_carlo(measure: Measure, samples: int,
                      rng: RngStream) -> KappaEstimate:
    """kappa via the pair expectation (2/3) E[marginal(line(X,Y)) / |X-Y|].

    The summand has a heavy upper tail (the inverse distance is not square
    integrable), so the reported standard error is the usual sample one and
    mildly optimistic; agreement tests should allow a few of these.
    """
    if samples < 2:
        raise ValueError("need at least 2 Monte Carlo samples")
    total = 0.0
    total_sq = 0.0
    used = 0
    remaining = samples
    while remaining > 0:
        m = min(_PAIR_BATCH, remaining)
        remaining -= m
        xy = measure.sample_many(rng, 2 * m)
        r, theta, dist = lines_through(xy[:m], xy[m:])
        good = dist > 1e-300
        vals = measure.marginal_many(theta[good], r[good]) / dist[good]
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        used += int(good.sum())
    mean = total / used
    var = max(total_sq / used - mean * mean, 0.0)
    return KappaEstimate(value=(2.0 / 3.0) * mean,
                         se=(2.0 / 3.0) * math.sqrt(var / used),
                         method="monte_carlo", samples=used)


def crofton_integral(region: Region, power: float,
                     rel_tol: float = 1e-9) -> tuple[float, float]:
    """integral over lines of (chord length)^power dr dtheta, by quadrature.

    For power 1 this is pi * area for any region (Fubini along each
    direction); for power 3 it equals 3 * area^2 exactly when the region is
    convex.  Returns (value, error estimate).
    """
    if power <= 0:
        raise ValueError("chord power must be positive")
    uniform = UniformRegion(region)
    value, err = plane_integral(uniform, power, rel_tol)
    scale = region.area() ** power
    return value * scale, err * scale


def crofton_monte_carlo(region: Region, power: float, samples: int,
                        rng: RngStream) -> tuple[float, float]:
    """The same chord-power line integral via the two-point identity.

    area^2 * E[ L^(power-2) / |X-Y| ] with X, Y uniform in the region and L
    the full chord-set length of the line through them.  Returns (value, se).
    """
    if power <= 0:
        raise ValueError("chord power must be positive")
    mean, se = _pair_chord_moment(region, power - 2.0, samples, rng)
    scale = region.area() ** 2
    return mean * scale, se * scale


def mean_chord_ratio(region: Region, samples: int,
                     rng: RngStream) -> tuple[float, float]:
    """E[ L / |X-Y| ] for uniform X, Y on the region, as (value, se).

    Equals exactly 3 when the region is convex up to null sets and falls
    strictly below 3 otherwise: L is the full chord length while a
    non-convex region's pairs cannot use the parts of the chord outside
    it, deflating the third-moment identity the value 3 rests on."""
    return _pair_chord_moment(region, 1.0, samples, rng)


def _pair_chord_moment(region: Region, chord_power: float, samples: int,
                       rng: RngStream) -> tuple[float, float]:
    uniform = UniformRegion(region)
    total = 0.0
    total_sq = 0.0
    used = 0
    remaining = samples
    while remaining > 0:
        m = min(_PAIR_BATCH, remaining)
        remaining -= m
        xy = uniform.sample_many(rng, 2 * m)
        r, theta, dist = lines_through(xy[:m], xy[m:])
        good = dist > 1e-300
        chords = region.chord_many(theta[good], r[good])
        vals = chords ** chord_power / dist[good]
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        used += int(good.sum())
    mean = total / used
    var = max(total_sq / used - mean * mean, 0.0)
    return mean, math.sqrt(var / used)


def inv_distance_moment(measure: Measure, rel_tol: float = 1e-9) -> tuple[float, float]:
    """E |X - Y|^(-1) for X, Y i.i.d. from the measure, by quadrature.

    Equals the line integral of the squared marginal: projecting the pair
    onto the line through it turns the inverse distance into the product of
    two one-dimensional marginal evaluations.
    """
    return plane_integral(measure, 2.0, rel_tol)


def inv_distance_moment_mc(measure: Measure, samples: int,
                           rng: RngStream) -> tuple[float, float]:
    """Direct pair Monte Carlo of E |X - Y|^(-1); heavy-tailed, se optimistic."""
    total = 0.0
    total_sq = 0.0
    used = 0
    remaining = samples
    while remaining > 0:
        m = min(_PAIR_BATCH, remaining)
        remaining -= m
        xy = measure.sample_many(rng, 2 * m)
        dist = np.hypot(xy[:m, 0] - xy[m:, 0], xy[:m, 1] - xy[m:, 1])
        good = dist > 1e-300
        vals = 1.0 / dist[good]
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        used += int(good.sum())
    mean = total / used
    var = max(total_sq / used - mean * mean, 0.0)
    return mean, math.sqrt(var / used)


def affine_invariant(measure: Measure, rel_tol: float = 1e-9) -> float:
    """kappa * sqrt(det covariance) — unchanged by any non-singular affine map.

    Its infimum over all measures with a density is 1 / (6 pi), attained in
    the limit by the uniform law on an ellipse; the uniform square gives 1/6
    and the Gaussian 1 / (3 sqrt 3).
    """
    est = kappa_closed_form(measure)
    if est is None:
        est = kappa_quadrature(measure, rel_tol)
    return est.value * math.sqrt(measure.covariance().det)
