"""Six dimensional Hartmann test function, plus a tunable-accuracy variant.

The variant damps the first basin weight as accuracy s drops from 1 to 0,
which makes a cheap biased stand-in for the full function; at s = 1 both
functions run the same arithmetic and return the same bits.  Used to
exercise multi-source campaigns against a landscape with a known optimum
(about -3.32237 at full accuracy).
"""

from __future__ import annotations

import numpy as np

__all__ = ["hartmann6", "hartmann6_mf", "HARTMANN6_MIN_VALUE", "HARTMANN6_MINIMIZER"]

_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])

_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])

_P = 1e-4 * np.array([
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
])

HARTMANN6_MIN_VALUE = -3.322368011391339
HARTMANN6_MINIMIZER = np.array([0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573])


def _check_cube(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (6,):
        raise ValueError(f"expected 6 coordinates, got shape {x.shape}")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"point outside the unit cube: {x!r}")
    return x


def _hartmann(x: np.ndarray, alpha: np.ndarray) -> float:
    inner = np.sum(_A * (x[None, :] - _P) ** 2, axis=1)
    return float(-np.sum(alpha * np.exp(-inner)))


def hartmann6(x) -> float:
    """Hartmann function on [0, 1]^6 (minimization sense)."""
    return _hartmann(_check_cube(x), _ALPHA)


def hartmann6_mf(x, s: float) -> float:
    """Hartmann variant with accuracy s in [0, 1]; s = 1 is hartmann6 exactly."""
    if not 0.0 < s <= 1.0:
        raise ValueError(f"accuracy s={s!r} outside (0, 1]")
    alpha = _ALPHA.copy()
    alpha[0] = alpha[0] - 0.1 * (1.0 - s)
    return _hartmann(_check_cube(x), alpha)
