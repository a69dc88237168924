"""Dip / ramp / plateau diagnostics of an averaged G(t) curve on a log time grid.

Conventions (all configurable):

* plateau: mean of G over the last decade of the grid;
* dip: minimum of the 5-point running median of G before that window;
* dip_depth_ratio = max(1, plateau / dip value);
* a dip counts only if the ratio exceeds ``1 + dip_threshold``;
* the ramp ends at the first time after the dip where the smoothed curve
  reaches ``plateau_fraction * plateau``; ramp_span_decades is log10 of its
  length, 0 without a dip.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PLATEAU_DECADES = 1.0
SMOOTHING_POINTS = 5
DIP_THRESHOLD = 0.25
PLATEAU_FRACTION = 0.9
MIN_DECADES = 3.0


@dataclass(frozen=True)
class CurveDiagnostics:
    plateau_estimate: float
    dip_time: float
    dip_value: float
    dip_depth_ratio: float
    ramp_span_decades: float
    has_dip: bool


def running_median(y: np.ndarray, width: int = SMOOTHING_POINTS) -> np.ndarray:
    if width <= 1:
        return np.asarray(y, dtype=float).copy()
    half = width // 2
    padded = np.pad(np.asarray(y, dtype=float), half, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * half + 1)
    return np.median(windows, axis=-1)


def diagnose(times, G, plateau_decades: float = PLATEAU_DECADES, smoothing: int = SMOOTHING_POINTS,
             dip_threshold: float = DIP_THRESHOLD, plateau_fraction: float = PLATEAU_FRACTION,
             min_decades: float = MIN_DECADES) -> CurveDiagnostics:
    t = np.asarray(times, dtype=float)
    g = np.asarray(G, dtype=float)
    if t.shape != g.shape:
        raise ValueError("times and G differ in length")
    keep = t > 0
    t, g = t[keep], g[keep]
    if t.size < 2 or np.log10(t[-1] / t[0]) < min_decades:
        raise ValueError(f"time grid must span at least {min_decades:g} decades")
    window = t >= t[-1] / 10**plateau_decades
    if window.all():
        raise ValueError("no grid points before the plateau window")
    plateau = float(np.mean(g[window]))
    smooth = running_median(g, smoothing)
    pre = np.flatnonzero(~window)
    i = pre[np.argmin(smooth[pre])]
    dip_value = float(smooth[i])
    ratio = max(1.0, plateau / dip_value) if dip_value > 0 else np.inf
    has_dip = ratio > 1.0 + dip_threshold
    span = 0.0
    if has_dip:
        after = np.flatnonzero((np.arange(t.size) > i) & (smooth >= plateau_fraction * plateau))
        t_end = t[after[0]] if after.size else t[window][0]
        span = float(np.log10(t_end / t[i]))
    return CurveDiagnostics(plateau, float(t[i]), dip_value, float(ratio), span, bool(has_dip))


def diagnose_stats(stats, **kwargs) -> CurveDiagnostics:
    return diagnose(stats.times, stats.mean, **kwargs)
