"""Correlation and one-slope linear regression with a Student-t slope test.

Small n is the norm here (cost study grids have a few dozen runs), so the
two sided p-value comes from the exact t distribution via the regularized
incomplete beta function rather than a normal approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

__all__ = ["StatsError", "RegressionResult", "pearson_r", "linreg_slope_test"]


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r: float
    t_stat: float
    p_value: float
    n: int

    @property
    def df(self) -> int:
        return self.n - 2

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r": self.r,
            "t_stat": self.t_stat,
            "p_value": self.p_value,
            "n": self.n,
            "df": self.df,
        }


def _columns(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.shape != y.shape:
        raise StatsError("xs and ys must have the same length")
    if len(x) < 3:
        raise StatsError(f"need at least 3 points, got {len(x)}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise StatsError("inputs must be finite")
    return x, y


def pearson_r(xs, ys) -> float:
    """Pearson correlation; rejects degenerate (constant) inputs."""
    x, y = _columns(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.sqrt(dx @ dx))
    sy = float(np.sqrt(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise StatsError("correlation undefined for constant input")
    r = float((dx @ dy) / (sx * sy))
    return max(-1.0, min(1.0, r))


def t_sf_two_sided(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t, via the regularized incomplete beta."""
    if df <= 0:
        raise StatsError(f"df must be positive, got {df}")
    if math.isinf(t):
        return 0.0
    return float(betainc(0.5 * df, 0.5, df / (df + t * t)))


def linreg_slope_test(xs, ys) -> RegressionResult:
    """Least squares line of ys on xs with a two sided test of zero slope."""
    x, y = _columns(xs, ys)
    r = pearson_r(x, y)
    slope = r * float(np.std(y)) / float(np.std(x))
    intercept = float(y.mean()) - slope * float(x.mean())
    df = len(x) - 2
    if abs(r) >= 1.0:
        t_stat = math.inf if r > 0 else -math.inf
        p = 0.0
    else:
        t_stat = r * math.sqrt(df / (1.0 - r * r))
        p = t_sf_two_sided(t_stat, df)
    return RegressionResult(
        slope=slope, intercept=intercept, r=r, t_stat=t_stat, p_value=p, n=len(x)
    )
