"""Smallest triangles among random points: limit-law toolkit.

Among n independent points drawn from a planar density, the smallest
triangle area scaled by n^3 converges to an exponential law whose rate —
the limiting intensity — is an explicitly computable functional of the
density.  This package computes that intensity three independent ways
(closed forms, adaptive quadrature of the cubed-marginal line integral,
Monte Carlo pair sampling), evaluates the classical chord-power
integrals it connects to, runs exact replicated simulations of the
smallest-triangle order statistics, and verifies the limit theorems
against desk-scale acceptance criteria.
"""

from .catalog import MEASURES, REGIONS
from .errors import FormatError, NonConvergenceError, SamplingError
from .experiments import (BernoulliEstimate, PiEstimates, SimConfig,
                          SimResult, chen_stein_bound, estimate_pi,
                          ks_exponential, lambda_n, moment_check,
                          nu_estimate, run_simulation, spacings_check,
                          tail_bound_check, tv_to_poisson)
from .geometry import (ConvexPolygon, Disk, Point, Rectangle, Region,
                       SimplePolygon, region_from_dict, triangle_area)
from .kappa import (KappaEstimate, affine_invariant, crofton_integral,
                    crofton_monte_carlo, kappa_closed_form,
                    kappa_monte_carlo, kappa_quadrature, mean_chord_ratio,
                    plane_integral)
from .measures import (AffineImage, Gaussian, Measure, Mixture, RngStream,
                       UniformRegion, measure_from_dict)
from .triangles import (TriangleHit, all_areas_array, all_areas_brute,
                        count_below, min_area, smallest_and_count,
                        smallest_k, triangle_count)

__version__ = "0.1.0"

__all__ = [
    "AffineImage", "BernoulliEstimate", "ConvexPolygon", "Disk",
    "FormatError", "Gaussian", "KappaEstimate", "MEASURES", "Measure",
    "Mixture", "NonConvergenceError", "PiEstimates", "Point", "REGIONS",
    "Rectangle", "Region", "RngStream", "SamplingError", "SimConfig",
    "SimResult", "SimplePolygon", "TriangleHit", "UniformRegion",
    "affine_invariant", "all_areas_array", "all_areas_brute",
    "chen_stein_bound",
    "count_below", "crofton_integral", "crofton_monte_carlo",
    "estimate_pi", "kappa_closed_form", "kappa_monte_carlo",
    "kappa_quadrature", "ks_exponential", "lambda_n", "mean_chord_ratio",
    "measure_from_dict", "min_area", "moment_check", "nu_estimate",
    "plane_integral", "region_from_dict", "run_simulation",
    "smallest_and_count", "smallest_k", "spacings_check",
    "tail_bound_check", "triangle_area", "triangle_count",
    "tv_to_poisson", "__version__",
]
