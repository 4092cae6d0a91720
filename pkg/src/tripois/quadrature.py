"""Adaptive 1-D quadrature built from 32-node Gauss-Legendre panels.

Panels are bisected where a panel and its two halves disagree; the global
error estimate is the sum of those disagreements, accepted once it drops
below max(absolute floor, relative tolerance * |integral|).  Callers split
the axis at known kinks beforehand and may request a square-root change of
variables on the first/last piece, which removes the algebraic endpoint
behavior of vanishing chords.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergenceError

ABS_FLOOR = 1e-14
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(32)


def _gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    return half * float(np.dot(_WEIGHTS, f(x)))


class _Panel:
    __slots__ = ("f", "a", "b", "pair", "left", "right", "err")

    def __init__(self, f, a, b):
        self.f = f
        self.a = a
        self.b = b
        whole = _gl(f, a, b)
        mid = 0.5 * (a + b)
        self.left = _gl(f, a, mid)
        self.right = _gl(f, mid, b)
        self.pair = self.left + self.right
        self.err = abs(self.pair - whole)


def integrate_segments(
    segments: Sequence[tuple[Callable[[np.ndarray], np.ndarray], float, float]],
    rel_tol: float,
    abs_floor: float = ABS_FLOOR,
    max_panels: int = 4000,
) -> tuple[float, float]:
    """Integrate a list of (vectorized integrand, lo, hi) segments jointly.

    Returns (value, absolute error estimate).

    Raises:
        NonConvergenceError: when the panel budget runs out first; the
            exception carries the best value and the achieved tolerance.
    """
    heap: list[tuple[float, int, _Panel]] = []
    serial = 0
    total = 0.0
    total_err = 0.0
    for f, a, b in segments:
        if not b > a:
            continue
        p = _Panel(f, a, b)
        total += p.pair
        total_err += p.err
        heapq.heappush(heap, (-p.err, serial, p))
        serial += 1

    def goal() -> float:
        return max(abs_floor, rel_tol * abs(total))

    panels = len(heap)
    while total_err > goal() and heap:
        if panels >= max_panels:
            achieved = total_err / max(abs(total), abs_floor)
            raise NonConvergenceError(total, achieved, rel_tol)
        _, _, worst = heapq.heappop(heap)
        mid = 0.5 * (worst.a + worst.b)
        if mid <= worst.a or mid >= worst.b:
            # Interval at floating-point resolution; its disagreement can
            # shrink no further, so accept it as-is.
            continue
        for a, b in ((worst.a, mid), (mid, worst.b)):
            child = _Panel(worst.f, a, b)
            total += child.pair
            total_err += child.err
            heapq.heappush(heap, (-child.err, serial, child))
            serial += 1
            panels += 1
        total -= worst.pair
        total_err -= worst.err
    return total, total_err


def sqrt_end_segments(
    f: Callable[[np.ndarray], np.ndarray],
    breaks: Sequence[float],
    sqrt_left: bool = True,
    sqrt_right: bool = True,
) -> list[tuple[Callable[[np.ndarray], np.ndarray], float, float]]:
    """Split [breaks[0], breaks[-1]] at the interior breaks and substitute
    x = end -+ t^2 on the outermost pieces.

    The substitution maps an integrand behaving like (x - end)^p near the end
    to t^(2p+1), which a polynomial rule handles far better for fractional p.
    """
    pts = [float(p) for p in breaks]
    if len(pts) < 2:
        raise ValueError("need at least two breakpoints")
    if len(pts) == 2 and (sqrt_left and sqrt_right):
        pts = [pts[0], 0.5 * (pts[0] + pts[1]), pts[1]]
    segs: list[tuple[Callable, float, float]] = []
    last = len(pts) - 2
    for i, (a, b) in enumerate(zip(pts[:-1], pts[1:])):
        if not b > a:
            continue
        if i == 0 and sqrt_left:
            width = b - a

            def g_left(t, a=a):
                return f(a + t * t) * 2.0 * t

            segs.append((g_left, 0.0, math.sqrt(width)))
        elif i == last and sqrt_right:
            width = b - a

            def g_right(t, b=b):
                return f(b - t * t) * 2.0 * t

            segs.append((g_right, 0.0, math.sqrt(width)))
        else:
            segs.append((f, a, b))
    return segs


def integrate_scalar_outer(
    f: Callable[[float], float],
    breaks: Sequence[float],
    rel_tol: float,
    max_panels: int = 1200,
) -> tuple[float, float]:
    """Adaptive integral of a scalar-valued (non-vectorized) integrand.

    Used for the outer angle integral whose evaluations are themselves inner
    integrals.
    """

    def vec(xs: np.ndarray) -> np.ndarray:
        return np.array([f(float(x)) for x in xs])

    pts = sorted(set(float(p) for p in breaks))
    segs = [(vec, a, b) for a, b in zip(pts[:-1], pts[1:]) if b > a]
    return integrate_segments(segs, rel_tol, max_panels=max_panels)
