"""Least-squares power-law fits in log2-log2 coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    residual_max: float
    samples: Tuple[Tuple[float, float], ...]  # (log2 parameter, log2 value)
    dropped: int = 0

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r_squared,
                "residual_max": self.residual_max, "dropped": self.dropped,
                "samples": [list(s) for s in self.samples]}


def fit_log2(points: Sequence[Tuple[float, float]]) -> FitResult:
    """OLS on ``(log2 x, log2 y)`` pairs given directly in log coordinates."""
    if len(points) < 3:
        raise FitError("need at least 3 samples")
    lx = np.array([p[0] for p in points], dtype=float)
    ly = np.array([p[1] for p in points], dtype=float)
    if np.unique(lx).size != lx.size:
        raise FitError("abscissae must be distinct")
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    # a perfectly flat sample set is fitted exactly
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(float(slope), float(intercept), r2, float(np.max(np.abs(resid))),
                     tuple((float(a), float(b)) for a, b in zip(lx, ly)))


def fit_exponent(samples: Sequence[Tuple[float, float]]) -> FitResult:
    """Fit ``y = C x^s`` from ``(x, y)`` samples with ``x, y > 0``."""
    xs = np.array([s[0] for s in samples], dtype=float)
    ys = np.array([s[1] for s in samples], dtype=float)
    if np.any(ys <= 0) or np.any(~np.isfinite(ys)):
        raise FitError("all values must be positive and finite")
    if np.any(xs <= 0):
        raise FitError("all parameters must be positive")
    return fit_log2(list(zip(np.log2(xs), np.log2(ys))))


def fit_with_retrench(points: List[Tuple[float, float]], r2_min: float = 0.98) -> FitResult:
    """Fit once; if ``r2 < r2_min`` drop the smallest-parameter point and refit, once only."""
    first = fit_log2(points)
    if first.r_squared >= r2_min or len(points) <= 3:
        return first
    trimmed = sorted(points)[1:]
    second = fit_log2(trimmed)
    return FitResult(second.slope, second.intercept, second.r_squared, second.residual_max,
                     second.samples, dropped=1)
