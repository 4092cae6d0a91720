"""Adaptive panel integration: exactness, endpoint substitution, failure."""

import math

import numpy as np
import pytest

from tripois.errors import NonConvergenceError
from tripois.quadrature import (integrate_scalar_outer, integrate_segments,
                                sqrt_end_segments)


def test_polynomial_exact():
    value, err = integrate_segments([(lambda x: x ** 3, 0.0, 1.0)], 1e-12)
    assert value == pytest.approx(0.25, rel=1e-14)
    assert abs(value - 0.25) <= max(err, 1e-14)


def test_multiple_segments_sum():
    segs = [(np.cos, 0.0, 1.0), (np.cos, 1.0, 2.0)]
    value, _ = integrate_segments(segs, 1e-12)
    assert value == pytest.approx(math.sin(2.0), rel=1e-12)


def test_oscillatory_to_tight_tolerance():
    value, err = integrate_segments(
        [(lambda x: np.sin(10.0 * x) ** 2, 0.0, 2.0 * math.pi)], 1e-11)
    assert value == pytest.approx(math.pi, rel=1e-10)
    assert err <= 1e-8 * max(abs(value), 1.0)


def test_sqrt_endpoint_substitution():
    # 1/sqrt(x) integrates to 2 on [0, 1]; raw panels cannot reach 1e-10
    # against the inverse-sqrt blowup, the substituted form can.
    segs = sqrt_end_segments(lambda x: 1.0 / np.sqrt(x), [0.0, 1.0],
                             sqrt_left=True, sqrt_right=False)
    value, _ = integrate_segments(segs, 1e-12)
    assert value == pytest.approx(2.0, rel=1e-11)


def test_sqrt_both_ends():
    # arcsine density: integral of 1/(pi sqrt(x(1-x))) over [0,1] is 1.
    segs = sqrt_end_segments(
        lambda x: 1.0 / (math.pi * np.sqrt(x * (1.0 - x))),
        [0.0, 0.5, 1.0])
    value, _ = integrate_segments(segs, 1e-12)
    assert value == pytest.approx(1.0, rel=1e-10)


def test_interior_breaks_respected():
    # |x| has a kink at 0; a break there keeps every panel smooth.
    segs = sqrt_end_segments(np.abs, [-1.0, 0.0, 1.0],
                             sqrt_left=False, sqrt_right=False)
    value, _ = integrate_segments(segs, 1e-12)
    assert value == pytest.approx(1.0, rel=1e-13)


def test_non_convergence_carries_best_estimate():
    with pytest.raises(NonConvergenceError) as info:
        integrate_segments([(lambda x: np.sin(200.0 * x) ** 2, 0.0, 50.0)],
                           1e-13, max_panels=3)
    exc = info.value
    assert math.isfinite(exc.best)
    assert exc.achieved > exc.requested
    assert exc.requested == pytest.approx(1e-13)


def test_scalar_outer_integral():
    value, _ = integrate_scalar_outer(math.sin, [0.0, math.pi], 1e-10)
    assert value == pytest.approx(2.0, rel=1e-9)


def test_zero_length_segment_is_zero():
    value, err = integrate_segments([(np.exp, 1.0, 1.0)], 1e-10)
    assert value == 0.0
    assert err == 0.0
