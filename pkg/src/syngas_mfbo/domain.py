"""Search domains: normalized coordinates, feasibility and space filling designs.

Campaign and acquisition code work in a normalized coordinate cube; a
domain maps those coordinates to whatever the objective consumes and
knows which normalized points are feasible (the syngas domain carries a
simplex constraint on the gas mole fractions).
"""

from __future__ import annotations

import numpy as np

from .reactor import OperatingPoint

__all__ = ["latin_hypercube", "UnitCubeDomain", "SyngasDomain"]


def latin_hypercube(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """One point per axis stratum, jittered uniformly inside its cell."""
    if n <= 0:
        return np.empty((0, dim))
    cells = np.empty((n, dim))
    for j in range(dim):
        cells[:, j] = rng.permutation(n)
    return (cells + rng.uniform(size=(n, dim))) / n


class UnitCubeDomain:
    """A plain box domain; normalized and physical coordinates coincide."""

    def __init__(self, dim: int = 6, name: str = "unit_cube"):
        self.dim = dim
        self.name = name
        self.axis_names = tuple(f"x{i}" for i in range(dim))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return latin_hypercube(rng, n, self.dim)

    def project(self, u: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(u, dtype=float), 0.0, 1.0)

    def is_feasible(self, u: np.ndarray) -> bool:
        u = np.asarray(u)
        return bool(np.all(u >= 0.0) and np.all(u <= 1.0))

    def to_physical(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(u, dtype=float)

    def physical_dict(self, u: np.ndarray) -> dict:
        return {"x": [float(v) for v in np.asarray(u, dtype=float)]}


class SyngasDomain:
    """Normalized reactor operating space.

    Coordinates: biomass, pressure, y_co, y_h2, bubble diameter, gas flow,
    each scaled to [0, 1].  The two mole fraction coordinates must stay in
    the triangle y_co + y_h2 <= 1; the CO2 fraction takes the remainder.
    """

    dim = 6
    name = "syngas"
    axis_names = ("c_x", "p", "y_co", "y_h2", "d_b", "n_gs")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = latin_hypercube(rng, n, self.dim)
        # Square root map sends the stratified unit square uniformly onto
        # the mole fraction triangle.
        radius = np.sqrt(u[:, 2])
        u[:, 2] = radius * (1.0 - u[:, 3])
        u[:, 3] = radius * u[:, 3]
        return u

    def project(self, u: np.ndarray) -> np.ndarray:
        v = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        excess = v[2] + v[3] - 1.0
        if excess > 0.0:
            # Euclidean projection onto the triangle edge, then back into
            # the nonnegative quadrant.
            v[2] -= 0.5 * excess
            v[3] -= 0.5 * excess
            if v[2] < 0.0:
                v[3] += v[2]
                v[2] = 0.0
            if v[3] < 0.0:
                v[2] += v[3]
                v[3] = 0.0
        return v

    def is_feasible(self, u: np.ndarray) -> bool:
        u = np.asarray(u)
        if np.any(u < 0.0) or np.any(u > 1.0):
            return False
        return bool(u[2] + u[3] <= 1.0 + 1e-12)

    def to_physical(self, u: np.ndarray) -> OperatingPoint:
        return OperatingPoint.from_unit(u)

    def physical_dict(self, u: np.ndarray) -> dict:
        return self.to_physical(u).as_dict()
