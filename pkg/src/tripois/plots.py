"""Hand-emitted SVG diagnostics for simulation output directories.

Three figure kinds, all built from replicates.csv + summary.json with no
plotting dependency: a histogram of the rescaled smallest areas with the
limiting exponential density overlaid, an exponential Q-Q plot, and
empirical count distributions against their matched Poisson laws.  Output
is deterministic — same inputs, same bytes — and each file carries its
numeric ingredients in a <desc> element so a figure can be audited without
re-running anything.
"""

from __future__ import annotations

import math
import os
from typing import Iterable

import numpy as np

from .io import fmt, read_result_dir

_WIDTH = 640
_HEIGHT = 420
_MARGIN_L = 64
_MARGIN_R = 20
_MARGIN_T = 42
_MARGIN_B = 48

PLOT_KINDS = ("hist", "qq", "counts")


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = math.ceil(lo / step) * step
    out = []
    value = first
    while value <= hi + 1e-9 * step:
        out.append(0.0 if abs(value) < 1e-12 * step else value)
        value += step
    return out


class _Frame:
    """Maps data coordinates onto the SVG plot rectangle."""

    def __init__(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi = float(xlo), float(xhi)
        self.ylo, self.yhi = float(ylo), float(yhi)
        self.px0 = _MARGIN_L
        self.px1 = _WIDTH - _MARGIN_R
        self.py0 = _HEIGHT - _MARGIN_B
        self.py1 = _MARGIN_T

    def x(self, v: float) -> float:
        span = self.xhi - self.xlo
        return self.px0 + (float(v) - self.xlo) / span * (self.px1 - self.px0)

    def y(self, v: float) -> float:
        span = self.yhi - self.ylo
        return self.py0 + (float(v) - self.ylo) / span * (self.py1 - self.py0)


def _svg_document(title: str, desc_lines: Iterable[str],
                  body: list[str]) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f"<title>{title}</title>",
        "<desc>" + "\n".join(desc_lines) + "</desc>",
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" '
        'fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _axes(frame: _Frame, xlabel: str, ylabel: str, title: str) -> list[str]:
    parts = [
        f'<rect x="{frame.px0}" y="{frame.py1}" '
        f'width="{frame.px1 - frame.px0}" height="{frame.py0 - frame.py1}" '
        'fill="none" stroke="#222" stroke-width="1"/>',
        f'<text x="{(frame.px0 + frame.px1) / 2:.1f}" y="24" '
        'text-anchor="middle" font-family="sans-serif" font-size="15" '
        f'fill="#111">{title}</text>',
        f'<text x="{(frame.px0 + frame.px1) / 2:.1f}" '
        f'y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" fill="#111">{xlabel}</text>',
        f'<text x="16" y="{(frame.py0 + frame.py1) / 2:.1f}" '
        'text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'fill="#111" transform="rotate(-90 16 '
        f'{(frame.py0 + frame.py1) / 2:.1f})">{ylabel}</text>',
    ]
    for tick in _ticks(frame.xlo, frame.xhi):
        px = frame.x(tick)
        parts.append(f'<line x1="{px:.2f}" y1="{frame.py0}" x2="{px:.2f}" '
                     f'y2="{frame.py0 + 5}" stroke="#222"/>')
        parts.append(f'<text x="{px:.2f}" y="{frame.py0 + 18}" '
                     'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11" fill="#111">{tick:.4g}</text>')
    for tick in _ticks(frame.ylo, frame.yhi):
        py = frame.y(tick)
        parts.append(f'<line x1="{frame.px0 - 5}" y1="{py:.2f}" '
                     f'x2="{frame.px0}" y2="{py:.2f}" stroke="#222"/>')
        parts.append(f'<text x="{frame.px0 - 8}" y="{py + 4:.2f}" '
                     'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11" fill="#111">{tick:.4g}</text>')
    return parts


def _reference_rate(summary: dict) -> float:
    rate = summary.get("kappa_reference")
    if rate is None:
        rate = summary.get("implied_kappa")
    if rate is None or rate <= 0:
        raise ValueError("summary supplies no positive reference rate")
    return float(rate)


def histogram_svg(summary: dict, replicates: dict) -> str:
    """Density histogram of rescaled minima with rate*exp(-rate*x) overlay."""
    minima = np.asarray(replicates["scaled_areas"], dtype=float)[:, 0]
    rate = _reference_rate(summary)
    m = len(minima)
    nbins = max(10, min(40, int(round(math.sqrt(m)))))
    xmax = float(minima.max()) * 1.02
    counts, edges = np.histogram(minima, bins=nbins, range=(0.0, xmax))
    width = edges[1] - edges[0]
    density = counts / (m * width)
    ymax = max(float(density.max()), rate) * 1.08
    frame = _Frame(0.0, xmax, 0.0, ymax)
    body = _axes(frame, "rescaled smallest area", "density",
                 f"smallest-area law vs Exp({rate:.4g})")
    for idx in range(nbins):
        if density[idx] <= 0:
            continue
        x0 = frame.x(edges[idx])
        x1 = frame.x(edges[idx + 1])
        y1 = frame.y(density[idx])
        body.append(f'<rect x="{fmt(x0)}" y="{fmt(y1)}" '
                    f'width="{fmt(x1 - x0)}" height="{fmt(frame.py0 - y1)}" '
                    'fill="#9ecbe8" stroke="#3a7ca8" stroke-width="0.8"/>')
    curve = []
    for step in range(201):
        x = xmax * step / 200.0
        y = rate * math.exp(-rate * x)
        curve.append(f"{fmt(frame.x(x))},{fmt(frame.y(min(y, ymax)))}")
    body.append(f'<polyline points="{" ".join(curve)}" fill="none" '
                'stroke="#c23b22" stroke-width="2"/>')
    desc = [
        "kind: histogram of rescaled smallest triangle areas",
        f"replicates: {m}",
        f"overlay rate: {fmt(rate)}",
        f"bins: {nbins}",
        f"sample mean: {fmt(float(minima.mean()))}",
    ]
    return _svg_document("smallest-area histogram", desc, body)


def qq_svg(summary: dict, replicates: dict) -> str:
    """Exponential Q-Q plot of the rescaled minima."""
    minima = np.sort(np.asarray(replicates["scaled_areas"], dtype=float)[:, 0])
    rate = _reference_rate(summary)
    m = len(minima)
    probs = (np.arange(1, m + 1) - 0.5) / m
    theory = -np.log1p(-probs) / rate
    hi = float(max(theory.max(), minima.max())) * 1.02
    frame = _Frame(0.0, hi, 0.0, hi)
    body = _axes(frame, f"Exp({rate:.4g}) quantiles", "sample quantiles",
                 "exponential Q-Q plot of rescaled smallest areas")
    body.append(f'<line x1="{fmt(frame.x(0.0))}" y1="{fmt(frame.y(0.0))}" '
                f'x2="{fmt(frame.x(hi))}" y2="{fmt(frame.y(hi))}" '
                'stroke="#888" stroke-dasharray="5,4"/>')
    pts = " ".join(f"{fmt(frame.x(t))},{fmt(frame.y(s))}"
                   for t, s in zip(theory, minima))
    body.append(f'<polyline points="{pts}" fill="none" stroke="#2c6e49" '
                'stroke-width="1.4"/>')
    desc = [
        "kind: exponential Q-Q plot of rescaled smallest triangle areas",
        f"replicates: {m}",
        f"rate: {fmt(rate)}",
        f"largest sample value: {fmt(float(minima[-1]))}",
    ]
    return _svg_document("exponential Q-Q plot", desc, body)


def counts_svg(summary: dict, replicates: dict, alpha_index: int) -> str:
    """Empirical count pmf vs the matched Poisson pmf, side-by-side bars."""
    counts = np.asarray(replicates["counts"], dtype=np.int64)[:, alpha_index]
    alphas = summary.get("alphas")
    alpha = float(alphas[alpha_index]) if alphas else float(alpha_index)
    m = len(counts)
    lam = float(counts.mean())
    jmax = int(counts.max()) + 2
    freq = np.bincount(counts, minlength=jmax + 1)[:jmax + 1] / m
    js = np.arange(jmax + 1)
    pmf = np.zeros(jmax + 1)
    if lam > 0:
        log_fact = np.concatenate(
            [[0.0], np.cumsum(np.log(np.arange(1, jmax + 1)))])
        pmf = np.exp(-lam + js * math.log(lam) - log_fact)
    else:
        pmf[0] = 1.0
    ymax = float(max(freq.max(), pmf.max())) * 1.15
    frame = _Frame(-0.6, jmax + 0.6, 0.0, ymax)
    body = _axes(frame, f"count at threshold {alpha:g} / n^3", "probability",
                 f"counts vs Poisson({lam:.3f})")
    for j in js:
        x0 = frame.x(j - 0.38)
        x1 = frame.x(j)
        if freq[j] > 0:
            y = frame.y(freq[j])
            body.append(f'<rect x="{fmt(x0)}" y="{fmt(y)}" '
                        f'width="{fmt(x1 - x0)}" '
                        f'height="{fmt(frame.py0 - y)}" fill="#9ecbe8" '
                        'stroke="#3a7ca8" stroke-width="0.8"/>')
        if pmf[j] > 0:
            y = frame.y(pmf[j])
            x2 = frame.x(j + 0.38)
            body.append(f'<rect x="{fmt(x1)}" y="{fmt(y)}" '
                        f'width="{fmt(x2 - x1)}" '
                        f'height="{fmt(frame.py0 - y)}" fill="none" '
                        'stroke="#c23b22" stroke-width="1.4"/>')
    body.append(f'<text x="{frame.px1 - 8}" y="{frame.py1 + 16}" '
                'text-anchor="end" font-family="sans-serif" font-size="11" '
                'fill="#3a7ca8">filled: empirical</text>')
    body.append(f'<text x="{frame.px1 - 8}" y="{frame.py1 + 30}" '
                'text-anchor="end" font-family="sans-serif" font-size="11" '
                'fill="#c23b22">outline: Poisson</text>')
    desc = [
        "kind: count distribution vs matched Poisson",
        f"threshold multiplier: {fmt(alpha)}",
        f"replicates: {m}",
        f"mean count: {fmt(lam)}",
    ]
    return _svg_document(f"count distribution (threshold {alpha:g})",
                         desc, body)


def write_plots(result_dir: str, kind: str) -> list[str]:
    """Render one plot kind from a result directory; returns written paths."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"kind must be one of {PLOT_KINDS}")
    summary, replicates = read_result_dir(result_dir)
    written = []
    if kind == "hist":
        path = os.path.join(result_dir, "hist.svg")
        _write(path, histogram_svg(summary, replicates))
        written.append(path)
    elif kind == "qq":
        path = os.path.join(result_dir, "qq.svg")
        _write(path, qq_svg(summary, replicates))
        written.append(path)
    else:
        n_alpha = np.asarray(replicates["counts"]).shape[1]
        alphas = summary.get("alphas") or list(range(n_alpha))
        for idx in range(n_alpha):
            path = os.path.join(result_dir, f"counts_alpha{alphas[idx]:g}.svg")
            _write(path, counts_svg(summary, replicates, idx))
            written.append(path)
    return written


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
