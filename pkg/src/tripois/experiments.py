"""Statistical experiments around the smallest-triangle limit law.

The central object is a replicated simulation: draw n points, extract the
smallest triangle areas and threshold counts exactly, rescale areas by n^3,
and compare the empirical law against the limiting exponential / Poisson
description — by Kolmogorov-Smirnov distance, total variation of the count
distribution, moments, and spacing independence.

The module also estimates the small probabilities driving the limit argument:
pi(beta), the chance that three i.i.d. points span area at most beta, and its
one- and two-shared-point pair variants pi1 and pi2, via direct indicator
Monte Carlo and, on the unit square, via an importance sampler with an exact
conditional strip probability that reaches probabilities far below direct
reach.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import FormatError
from .geometry import Rectangle
from .measures import Measure, RngStream, UniformRegion, measure_from_dict
from .triangles import smallest_and_count, triangle_count

_QUINTUPLE_BLOCK = 1 << 19

THREADS_ENV_VAR = "TRIPOIS_THREADS"


def resolve_threads(explicit: Optional[int] = None) -> int:
    """Worker-thread count: explicit argument, else TRIPOIS_THREADS, else 1."""
    if explicit is not None:
        if explicit < 1:
            raise ValueError("thread count must be >= 1")
        return explicit
    env = os.environ.get(THREADS_ENV_VAR, "").strip()
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(
                f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from exc
        if value < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
        return value
    return 1


# ---------------------------------------------------------------------------
# Replicated simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    """Description of one replicated run: measure, sizes, thresholds, seed.

    counts are taken at areas <= alpha * n^-3 for each alpha (strictly
    increasing); k_order is how many smallest areas each replicate records.
    `threads` only changes wall time — results are bit-identical for any
    worker count because replicate r always uses the random stream
    (seed, r).
    """

    measure: Measure
    n: int
    replicates: int
    alphas: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    k_order: int = 8
    seed: int = 0
    threads: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "alphas",
                           tuple(float(a) for a in self.alphas))
        if self.n < 3:
            raise ValueError("need n >= 3 points")
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if self.k_order < 1:
            raise ValueError("k_order must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not self.alphas or any(a <= 0 or not math.isfinite(a)
                                  for a in self.alphas):
            raise ValueError("alphas must be positive and finite")
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("alphas must be strictly increasing")

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.to_dict(),
            "n": self.n,
            "replicates": self.replicates,
            "alphas": list(self.alphas),
            "k_order": self.k_order,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(data: dict) -> "SimConfig":
        if not isinstance(data, dict):
            raise FormatError("config", "simulation config must be a JSON object")
        for key in ("measure", "n", "replicates"):
            if key not in data:
                raise FormatError(f"config.{key}", "missing required field")
        measure = measure_from_dict(data["measure"])
        try:
            return SimConfig(
                measure=measure,
                n=int(data["n"]),
                replicates=int(data["replicates"]),
                alphas=tuple(float(a) for a in
                             data.get("alphas", (0.25, 0.5, 1.0, 2.0, 4.0))),
                k_order=int(data.get("k_order", 8)),
                seed=int(data.get("seed", 0)),
            )
        except (TypeError, ValueError) as exc:
            raise FormatError("config", str(exc)) from exc


@dataclass(frozen=True)
class SimResult:
    """Replicated smallest-triangle simulation, exact per replicate.

    scaled_areas[r] holds the k_order smallest areas of replicate r
    multiplied by n^3, ascending.  counts[r, a] is the exact number of
    triangles with area <= alphas[a] * n^-3 (closed inequality; ties carry
    probability zero and count in).  diameters[r] is the largest pairwise
    vertex distance of replicate r's smallest-area triangle — recorded
    because the limit theory says this diameter stays order-1 rather than
    shrinking with n.  Replicate r uses the random stream (seed, r), so any
    single replicate can be reproduced in isolation.  elapsed_seconds is
    wall time and is excluded from serialized outputs so reruns are
    byte-identical.
    """

    n: int
    replicates: int
    seed: int
    alphas: tuple[float, ...]
    k_order: int
    scaled_areas: np.ndarray
    counts: np.ndarray
    diameters: np.ndarray
    measure_dict: dict
    elapsed_seconds: float

    @property
    def scaled_minima(self) -> np.ndarray:
        return self.scaled_areas[:, 0]

    def spacings(self, count: int) -> np.ndarray:
        """First `count` gaps of the rescaled ascending areas, per replicate."""
        if count + 1 > self.k_order:
            raise ValueError("simulation kept too few areas for these spacings")
        return np.diff(self.scaled_areas[:, :count + 1], axis=1)

    def implied_kappa(self) -> float:
        """1 / mean rescaled minimum: the rate the exponential limit implies."""
        return 1.0 / float(self.scaled_minima.mean())

    def mean_counts(self) -> np.ndarray:
        return self.counts.mean(axis=0)

    def summary(self, reference_rate: Optional[float] = None,
                bound_samples: int = 200_000) -> dict:
        """All run statistics in one JSON-ready dict.

        The exponential/Poisson comparisons use `reference_rate` when given
        (e.g. a closed-form or quadrature kappa) and the run's own implied
        rate otherwise.  Per-alpha total-variation distances appear both in
        the `tv_by_alpha` list and as flat `tv_alpha{alpha}` keys.  When
        bound_samples > 0 the dict also carries the concentration bounds
        (Poisson-approximation and tail), with the pairwise probability
        re-estimated by direct Monte Carlo on the reserved stream
        (seed, replicates) — at simulation-scale thresholds that direct
        estimate is usually exactly zero, which the bounds report honestly.
        """
        minima = self.scaled_minima
        rate = self.implied_kappa() if reference_rate is None else reference_rate
        ks_d, ks_p = ks_exponential(minima, rate)
        out = {
            "n": self.n,
            "replicates": self.replicates,
            "seed": self.seed,
            "alphas": list(self.alphas),
            "k_order": self.k_order,
            "kappa_reference": reference_rate,
            "implied_kappa": self.implied_kappa(),
            "scaled_min_mean": float(minima.mean()),
            "scaled_min_se": float(minima.std(ddof=1) / math.sqrt(len(minima))),
            "ks_D": ks_d,
            "ks_p": ks_p,
            "mean_counts": self.mean_counts().tolist(),
            "zero_count_fraction": (self.counts == 0).mean(axis=0).tolist(),
            "median_diameter": float(np.median(self.diameters)),
            "moments": moment_check(self, rate, 3),
        }
        tv_rows = []
        for idx, alpha in enumerate(self.alphas):
            lam = float(self.counts[:, idx].mean())
            tv = tv_to_poisson(self.counts[:, idx], lam) if lam > 0 else 0.0
            tv_rows.append({"alpha": alpha, "lambda_hat": lam, "tv": tv})
            out[f"tv_alpha{alpha:g}"] = tv
        out["tv_by_alpha"] = tv_rows
        if self.k_order >= 2:
            out["spacings"] = spacings_check(
                self, rate, count=min(3, self.k_order - 1))
        if bound_samples > 0:
            measure = measure_from_dict(self.measure_dict)
            rng = RngStream(self.seed, self.replicates)
            bounds = []
            for idx, alpha in enumerate(self.alphas):
                lam = float(self.counts[:, idx].mean())
                pi2 = estimate_pi(measure, alpha * float(self.n) ** -3,
                                  bound_samples, rng).pi2
                p0 = float((self.counts[:, idx] == 0).mean())
                mn = max(4.0 * lam,
                         6.0 * float(self.n) ** 5 * pi2.estimate)
                bounds.append({
                    "alpha": alpha,
                    "lambda_hat": lam,
                    "pi2_hat": pi2.estimate,
                    "pi2_se": pi2.se,
                    "poisson_tv_bound": (chen_stein_bound(self.n, alpha, pi2, lam)
                                         if lam > 0 else 0.0),
                    "m_n": mn,
                    "tail_bound": math.exp(-lam * lam / mn) if mn > 0 else 1.0,
                    "survival_freq": p0,
                })
            out["theorem_bounds"] = bounds
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "replicates": self.replicates,
            "seed": self.seed,
            "alphas": list(self.alphas),
            "k_order": self.k_order,
            "scaled_areas": self.scaled_areas.tolist(),
            "counts": self.counts.tolist(),
            "diameters": self.diameters.tolist(),
            "measure": self.measure_dict,
        }

    @staticmethod
    def from_dict(data: dict) -> "SimResult":
        measure_from_dict(data["measure"])  # validate early
        return SimResult(
            n=int(data["n"]),
            replicates=int(data["replicates"]),
            seed=int(data["seed"]),
            alphas=tuple(float(a) for a in data["alphas"]),
            k_order=int(data["k_order"]),
            scaled_areas=np.asarray(data["scaled_areas"], dtype=float),
            counts=np.asarray(data["counts"], dtype=np.int64),
            diameters=np.asarray(data["diameters"], dtype=float),
            measure_dict=data["measure"],
            elapsed_seconds=0.0,
        )


def _one_replicate(measure: Measure, n: int, seed: int, rep: int,
                   k_order: int, threshold: float):
    rng = RngStream(seed, rep)
    pts = measure.sample_many(rng, n)
    hits, count = smallest_and_count(pts, k_order, threshold)
    if count > k_order:
        # The top list cannot certify per-threshold counts below the maximum
        # alpha; rerun this replicate keeping every triangle under it.
        hits, count = smallest_and_count(pts, count + 8, threshold)
        hits = hits[:max(k_order, count)]
    areas = np.array([h.area for h in hits])
    best = hits[0]
    corners = pts[[best.i, best.j, best.k]]
    diam = max(
        math.hypot(corners[0, 0] - corners[1, 0], corners[0, 1] - corners[1, 1]),
        math.hypot(corners[0, 0] - corners[2, 0], corners[0, 1] - corners[2, 1]),
        math.hypot(corners[1, 0] - corners[2, 0], corners[1, 1] - corners[2, 1]),
    )
    return areas, count, diam


def run_simulation(cfg: SimConfig) -> SimResult:
    """Replicate the point process and record exact smallest-triangle data.

    Each replicate keeps at least cfg.k_order smallest areas (more when more
    fall under max(alphas) * n^-3), the exact count per alpha, and the
    diameter of the smallest-area triangle.  Replicates are independent
    streams of one seed; cfg.threads only changes wall time.
    """
    n = cfg.n
    replicates = cfg.replicates
    k_order = min(cfg.k_order, triangle_count(n))
    nworkers = resolve_threads(cfg.threads)
    threshold = max(cfg.alphas) * float(n) ** -3

    start_time = time.perf_counter()
    if nworkers == 1:
        rows = [_one_replicate(cfg.measure, n, cfg.seed, rep, k_order, threshold)
                for rep in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            rows = list(pool.map(
                lambda rep: _one_replicate(cfg.measure, n, cfg.seed, rep,
                                           k_order, threshold),
                range(replicates)))
    elapsed = time.perf_counter() - start_time

    scale = float(n) ** 3
    scaled = np.full((replicates, k_order), np.inf)
    counts = np.zeros((replicates, len(cfg.alphas)), dtype=np.int64)
    diameters = np.zeros(replicates)
    thresholds = np.array(cfg.alphas) * float(n) ** -3
    for rep, (areas, _, diam) in enumerate(rows):
        scaled[rep] = areas[:k_order] * scale
        counts[rep] = np.searchsorted(areas, thresholds, side="right")
        diameters[rep] = diam
    return SimResult(n=n, replicates=replicates, seed=cfg.seed,
                     alphas=cfg.alphas, k_order=k_order, scaled_areas=scaled,
                     counts=counts, diameters=diameters,
                     measure_dict=cfg.measure.to_dict(),
                     elapsed_seconds=elapsed)


# ---------------------------------------------------------------------------
# Distributional comparisons
# ---------------------------------------------------------------------------

def ks_exponential(samples: np.ndarray, rate: float) -> tuple[float, float]:
    """Two-sided Kolmogorov-Smirnov distance to Exp(rate), with asymptotic p.

    The p-value uses the Kolmogorov series at sqrt(m) * D; it is an m -> inf
    approximation, adequate for the hundreds-to-thousands of replicates used
    here.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    m = len(x)
    if m == 0 or rate <= 0:
        raise ValueError("need samples and a positive rate")
    cdf = 1.0 - np.exp(-rate * x)
    grid = np.arange(m + 1) / m
    d_plus = float(np.max(grid[1:] - cdf))
    d_minus = float(np.max(cdf - grid[:-1]))
    d = max(d_plus, d_minus)
    t = math.sqrt(m) * d
    if t < 0.2:
        return d, 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * t * t)
        total += term
        if abs(term) < 1e-16:
            break
    return d, min(max(total, 0.0), 1.0)


def tv_to_poisson(counts: np.ndarray, lam: float) -> float:
    """Total variation between empirical counts and Poisson(lam).

    Sums |frequency - pmf| / 2 over observed support and folds the Poisson
    tail beyond the largest observed count in as mass the empirical law
    assigns zero.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if lam <= 0:
        raise ValueError("lam must be positive")
    jmax = int(counts.max())
    freq = np.bincount(counts, minlength=jmax + 1) / len(counts)
    j = np.arange(jmax + 1)
    log_pmf = -lam + j * math.log(lam) - np.cumsum(
        np.concatenate([[0.0], np.log(np.maximum(j[1:], 1))]))
    pmf = np.exp(log_pmf)
    tail = max(0.0, 1.0 - float(pmf.sum()))
    return 0.5 * float(np.abs(freq - pmf).sum()) + 0.5 * tail


def moment_check(result: SimResult, kappa: float, pmax: int = 3) -> list[dict]:
    """Compare E[(n^3 A_min)^p] with p! / kappa^p for p = 1..pmax.

    Returns one row per moment with the empirical mean, reference value,
    standard error, and z-score.
    """
    minima = result.scaled_minima
    rows = []
    for p in range(1, pmax + 1):
        powered = minima ** p
        emp = float(powered.mean())
        se = float(powered.std(ddof=1)) / math.sqrt(len(powered))
        ref = math.factorial(p) / kappa ** p
        rows.append({"p": p, "empirical": emp, "reference": ref, "se": se,
                     "z": (emp - ref) / se if se > 0 else math.inf})
    return rows


def spacings_check(result: SimResult, kappa: float, count: int = 3) -> dict:
    """Test that consecutive rescaled-area gaps look like i.i.d. Exp(kappa).

    Returns per-gap KS distances/p-values and the correlation between each
    adjacent pair of gaps with its +-3/sqrt(replicates) acceptance band.
    """
    gaps = result.spacings(count)
    per_gap = []
    for idx in range(count):
        d, p = ks_exponential(gaps[:, idx], kappa)
        per_gap.append({"gap": idx + 1, "ks_distance": d, "p_value": p})
    correlations = []
    for idx in range(count - 1):
        a = gaps[:, idx]
        b = gaps[:, idx + 1]
        rho = float(np.corrcoef(a, b)[0, 1])
        correlations.append({"pair": (idx + 1, idx + 2), "correlation": rho})
    return {
        "per_gap": per_gap,
        "correlations": correlations,
        "correlation_band": 3.0 / math.sqrt(result.replicates),
    }


# ---------------------------------------------------------------------------
# Small-probability estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BernoulliEstimate:
    """Indicator-mean estimate with an add-one smoothed standard error.

    The smoothing keeps the error bar meaningful when no hit is observed:
    se uses (hits + 1) / (draws + 2) so zero hits still yield a positive,
    honest scale rather than a spurious exact zero.
    """

    hits: int
    draws: int

    @property
    def estimate(self) -> float:
        return self.hits / self.draws

    @property
    def se(self) -> float:
        smoothed = (self.hits + 1) / (self.draws + 2)
        return math.sqrt(smoothed * (1.0 - smoothed) / self.draws)


@dataclass(frozen=True)
class PiEstimates:
    """Joint estimates of pi, pi1, pi2 at one area threshold.

    All three come from the same quintuples (U, V, X, Y, Z): pi from the
    triangle XYZ, pi1 from the pair XYZ & XUV sharing one point, pi2 from
    the pair XYZ & XYU sharing two points — so the chain comparison
    pi^2 <= pi1 <= pi2 is evaluated on common randomness.
    """

    beta: float
    pi: BernoulliEstimate
    pi1: BernoulliEstimate
    pi2: BernoulliEstimate


def _areas(ax, ay, bx, by, cx, cy):
    return 0.5 * np.abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def estimate_pi(measure: Measure, beta: float, quintuples: int,
                rng: RngStream) -> PiEstimates:
    """Direct indicator Monte Carlo for pi, pi1, pi2 at threshold beta."""
    if beta <= 0 or quintuples < 1:
        raise ValueError("need positive beta and at least one draw")
    hits = np.zeros(3, dtype=np.int64)
    remaining = quintuples
    while remaining > 0:
        m = min(_QUINTUPLE_BLOCK, remaining)
        remaining -= m
        pts = measure.sample_many(rng, 5 * m)
        u, v, x, y, z = (pts[i * m:(i + 1) * m] for i in range(5))
        a_xyz = _areas(x[:, 0], x[:, 1], y[:, 0], y[:, 1], z[:, 0], z[:, 1])
        i_xyz = a_xyz <= beta
        a_xuv = _areas(x[:, 0], x[:, 1], u[:, 0], u[:, 1], v[:, 0], v[:, 1])
        a_xyu = _areas(x[:, 0], x[:, 1], y[:, 0], y[:, 1], u[:, 0], u[:, 1])
        hits[0] += int(i_xyz.sum())
        hits[1] += int((i_xyz & (a_xuv <= beta)).sum())
        hits[2] += int((i_xyz & (a_xyu <= beta)).sum())
    return PiEstimates(
        beta=beta,
        pi=BernoulliEstimate(int(hits[0]), quintuples),
        pi1=BernoulliEstimate(int(hits[1]), quintuples),
        pi2=BernoulliEstimate(int(hits[2]), quintuples),
    )


def lambda_n(measure: Measure, n: int, alpha: float, samples: int,
             rng: RngStream) -> tuple[float, float]:
    """Estimated mean triangle count C(n,3) * pi(alpha * n^-3), with SE.

    Approaches kappa * alpha from below as n grows; alpha = 0 returns (0, 0)
    without sampling.
    """
    if alpha < 0 or not math.isfinite(alpha):
        raise ValueError("alpha must be non-negative and finite")
    if alpha == 0.0:
        return 0.0, 0.0
    est = estimate_pi(measure, alpha * float(n) ** -3, samples, rng).pi
    scale = float(triangle_count(n))
    return scale * est.estimate, scale * est.se


def chen_stein_bound(n: int, alpha: float, pi2_hat, lambda_hat: float) -> float:
    """Poisson-approximation total-variation bound from the pairwise term.

    (1 - e^-lambda_hat) / (2 lambda_hat) * n^5 * pi2 — the two-shared-point
    probability is the dominant dependence term and the n^5 factor counts
    ordered quintuples.  `alpha` only labels the threshold pi2_hat was
    estimated at (beta = alpha * n^-3); pi2_hat may be a plain float or a
    BernoulliEstimate.
    """
    pi2 = float(getattr(pi2_hat, "estimate", pi2_hat))
    if lambda_hat <= 0:
        raise ValueError("lambda_hat must be positive")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return ((1.0 - math.exp(-lambda_hat)) / (2.0 * lambda_hat)
            * float(n) ** 5 * pi2)


def tail_bound_check(result: SimResult, measure: Measure,
                     n: Optional[int] = None, *,
                     samples: int = 1_000_000,
                     rng: Optional[RngStream] = None,
                     pi2_values: Optional[Sequence[float]] = None) -> list[dict]:
    """Check P(no triangle under alpha n^-3) against exp(-lam^2 / M_n).

    M_n = max(4 lam, 6 n^5 pi2).  lam and the zero-count frequency come
    from the simulation; pi2 per alpha comes from a direct estimate with
    `samples` quintuples on the reserved stream (seed, replicates) unless
    pi2_values supplies it.  A row is ok when the empirical survival
    does not exceed the bound by more than three binomial standard errors.
    """
    if n is None:
        n = result.n
    if n != result.n:
        raise ValueError("n disagrees with the simulation result")
    if pi2_values is None:
        if rng is None:
            rng = RngStream(result.seed, result.replicates)
        pi2_values = [
            estimate_pi(measure, alpha * float(n) ** -3, samples, rng)
            .pi2.estimate
            for alpha in result.alphas]
    if len(pi2_values) != len(result.alphas):
        raise ValueError("need one pi2 value per alpha")
    rows = []
    for idx, alpha in enumerate(result.alphas):
        lam = float(result.counts[:, idx].mean())
        p0 = float((result.counts[:, idx] == 0).mean())
        se = math.sqrt(max(p0 * (1 - p0), 1.0 / result.replicates)
                       / result.replicates)
        mn = max(4.0 * lam, 6.0 * float(n) ** 5 * float(pi2_values[idx]))
        bound = math.exp(-lam * lam / mn) if mn > 0 else 1.0
        rows.append({"alpha": alpha, "lambda": lam, "zero_prob": p0,
                     "zero_prob_se": se, "m_n": mn, "bound": bound,
                     "ok": p0 <= bound + 3.0 * se})
    return rows


def nu_estimate(samples: int, rng: RngStream,
                measure: Optional[Measure] = None,
                eps_grid: Optional[Sequence[float]] = None,
                min_hits: int = 50) -> dict:
    """Empirical pair-closeness constant sup_eps P(|X-Y| <= eps) / eps^2.

    The supremum over a dyadic epsilon grid of the normalized closeness
    probability; finite for any bounded-density measure.  The default
    measure is the uniform unit square, where interior dominance puts the
    fine-epsilon ratio near pi.  Grid points with fewer than min_hits
    observed close pairs are reported in the table but excluded from the
    supremum — their ratio is dominated by Poisson noise and would bias the
    sup upward.
    """
    if measure is None:
        measure = UniformRegion(Rectangle((0.0, 0.0), 1.0, 1.0))
    if eps_grid is None:
        eps_grid = [2.0 ** -e for e in range(1, 11)]
    eps = np.asarray(sorted(eps_grid, reverse=True), dtype=float)
    hits = np.zeros(len(eps), dtype=np.int64)
    remaining = samples
    while remaining > 0:
        m = min(_QUINTUPLE_BLOCK, remaining)
        remaining -= m
        pts = measure.sample_many(rng, 2 * m)
        d = np.hypot(pts[:m, 0] - pts[m:, 0], pts[:m, 1] - pts[m:, 1])
        for idx, e in enumerate(eps):
            hits[idx] += int((d <= e).sum())
    ratios = hits / samples / eps ** 2
    reliable = (hits >= min_hits)
    reliable[0] = True  # the widest epsilon always anchors the sup
    table = [{"eps": float(e), "probability": int(h) / samples,
              "ratio": float(rt), "hits": int(h), "in_sup": bool(ok)}
             for e, h, rt, ok in zip(eps, hits, ratios, reliable)]
    return {"nu": float(ratios[reliable].max()), "table": table}


# ---------------------------------------------------------------------------
# Importance sampling on the unit square
# ---------------------------------------------------------------------------

def strip_area_unit_square(r: np.ndarray, theta: np.ndarray,
                           h: np.ndarray) -> np.ndarray:
    """Exact area of {x in [0,1]^2 : |x . u(theta) - r| <= h}, vectorized.

    The projection of a uniform square point onto u is a sum of two
    independent uniforms, whose CDF is piecewise quadratic and closed-form;
    the strip area is a CDF difference.  Exact up to rounding for every
    theta, including the axis-aligned cases.
    """
    c = np.cos(theta)
    s = np.sin(theta)
    c1 = np.abs(c)
    c2 = np.abs(s)
    shift = np.minimum(c, 0.0) + np.minimum(s, 0.0)

    def cdf(v: np.ndarray) -> np.ndarray:
        t = v - shift

        def g2(a: np.ndarray) -> np.ndarray:
            return np.maximum(a, 0.0) ** 2

        denom = 2.0 * c1 * c2
        generic = np.where(denom > 1e-300, (
            g2(t) - g2(t - c1) - g2(t - c2) + g2(t - c1 - c2))
            / np.where(denom > 1e-300, denom, 1.0), 0.0)
        # Axis-aligned directions degenerate to a single uniform.
        width = np.maximum(c1, c2)
        linear = np.clip(t / width, 0.0, 1.0)
        return np.where(denom > 1e-300, np.clip(generic, 0.0, 1.0), linear)

    return cdf(r + h) - cdf(r - h)


def pi_importance_square(beta: float, samples: int, rng: RngStream,
                         rho_min_factor: float = 0.01) -> dict:
    """Importance-sampled pi and pi2 on the unit square.

    Draws X uniform and Y at a log-uniform radius around it, weights back to
    the uniform pair law, and multiplies by the exact conditional strip
    probability q (for pi) or q^2 (for pi2), where q is the chance a third
    uniform point closes a triangle of area <= beta.  Effective for beta far
    below direct indicator reach; the log-uniform radius floor at
    rho_min_factor * beta truncates a region whose contribution is
    O((rho_min_factor * beta)^2), negligible against pi2 ~ beta^2 log(1/beta)
    for small factors.

    Returns estimates and standard errors for both probabilities.
    """
    if beta <= 0 or samples < 2:
        raise ValueError("need positive beta and at least two samples")
    rho_min = rho_min_factor * beta
    rho_max = math.sqrt(2.0)
    log_ratio = math.log(rho_max / rho_min)
    sums = np.zeros(4)  # sum and sum of squares for pi and pi2 terms
    remaining = samples
    gen = rng.generator
    while remaining > 0:
        m = min(_QUINTUPLE_BLOCK, remaining)
        remaining -= m
        x = gen.random((m, 2))
        psi = gen.random(m) * (2.0 * math.pi)
        rho = rho_min * np.exp(gen.random(m) * log_ratio)
        y = x + np.column_stack([rho * np.cos(psi), rho * np.sin(psi)])
        inside = ((y[:, 0] >= 0.0) & (y[:, 0] <= 1.0)
                  & (y[:, 1] >= 0.0) & (y[:, 1] <= 1.0))
        weight = np.where(inside, 2.0 * math.pi * rho * rho * log_ratio, 0.0)
        theta = np.arctan2(y[:, 0] - x[:, 0], -(y[:, 1] - x[:, 1]))
        mid = 0.5 * (x + y)
        r = mid[:, 0] * np.cos(theta) + mid[:, 1] * np.sin(theta)
        h = 2.0 * beta / rho
        q = strip_area_unit_square(r, theta, h)
        term_pi = weight * q
        term_pi2 = weight * q * q
        sums += [term_pi.sum(), (term_pi ** 2).sum(),
                 term_pi2.sum(), (term_pi2 ** 2).sum()]
    mean_pi = sums[0] / samples
    var_pi = max(sums[1] / samples - mean_pi ** 2, 0.0)
    mean_pi2 = sums[2] / samples
    var_pi2 = max(sums[3] / samples - mean_pi2 ** 2, 0.0)
    return {
        "beta": beta,
        "samples": samples,
        "pi": mean_pi,
        "pi_se": math.sqrt(var_pi / samples),
        "pi2": mean_pi2,
        "pi2_se": math.sqrt(var_pi2 / samples),
    }
