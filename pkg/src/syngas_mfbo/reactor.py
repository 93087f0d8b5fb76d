"""Steady-state ideal-mixing model of a syngas bubble column fermentor.

Dissolved CO, H2 and CO2 concentrations follow from a per-gas balance
between gas-liquid mass transfer and microbial uptake,

    kLa_i * (H_i * p * y_i - c_i) = q_i(c) * c_biomass

with kLa derived from the gas holdup and the Sauter mean bubble diameter.
CO uptake is substrate inhibited, H2 uptake is Monod in H2 and inhibited
by dissolved CO, and CO2 is reported at gas-liquid equilibrium.  All
concentrations are mol/m3, rates mol/(m3 s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "OperatingPoint",
    "ReactorConstants",
    "KineticParameters",
    "ReactorConfig",
    "ReactorSolution",
    "BOUNDS",
    "superficial_gas_velocity",
    "gas_holdup",
    "kla",
    "uptake_co",
    "uptake_h2",
    "solve_steady_state",
    "evaluate_low_fidelity",
    "evaluate_synthetic_high_fidelity",
]

# Operating envelope; bubble diameter has a small positive floor so the
# kLa expression stays finite.
BOUNDS = {
    "c_x": (0.0, 50.0),          # biomass concentration, g/L
    "p": (101325.0, 506625.0),   # headspace pressure, Pa (1 to 5 atm)
    "d_b": (1.0e-5, 1.0e-3),     # Sauter mean bubble diameter, m
    "n_gs": (0.0, 200.0),        # inlet gas flow, mol/s
}

MOLE_FRACTION_TOL = 1.0e-12


class DomainError(ValueError):
    """Raised for operating points outside the supported envelope."""


@dataclass(frozen=True)
class OperatingPoint:
    """A reactor operating point.

    Attributes
    ----------
    c_x : float
        Biomass concentration, g/L.
    p : float
        Headspace pressure, Pa.
    y_co, y_h2, y_co2 : float
        Inlet gas mole fractions; must be nonnegative and sum to one.
    d_b : float
        Sauter mean bubble diameter, m.
    n_gs : float
        Inlet gas molar flow, mol/s.
    """

    c_x: float
    p: float
    y_co: float
    y_h2: float
    y_co2: float
    d_b: float
    n_gs: float

    def __post_init__(self) -> None:
        for name in ("c_x", "p", "d_b", "n_gs"):
            lo, hi = BOUNDS[name]
            v = getattr(self, name)
            if not math.isfinite(v) or v < lo or v > hi:
                raise DomainError(f"{name}={v!r} outside [{lo}, {hi}]")
        fractions = (self.y_co, self.y_h2, self.y_co2)
        if any(not math.isfinite(y) or y < 0.0 for y in fractions):
            raise DomainError(f"mole fractions must be nonnegative, got {fractions}")
        total = self.y_co + self.y_h2 + self.y_co2
        if abs(total - 1.0) > MOLE_FRACTION_TOL:
            raise DomainError(f"mole fractions sum to {total!r}, expected 1")

    @classmethod
    def from_unit(cls, u) -> "OperatingPoint":
        """Map a point of the unit cube (with y_co + y_h2 <= 1) to physical units.

        Coordinate order: c_x, p, y_co, y_h2, d_b, n_gs.  The CO2 fraction
        is implied by the other two.
        """
        u = np.asarray(u, dtype=float)
        if u.shape != (6,):
            raise DomainError(f"expected 6 unit coordinates, got shape {u.shape}")
        if np.any(u < -1e-12) or np.any(u > 1.0 + 1e-12):
            raise DomainError(f"unit coordinates outside [0, 1]: {u!r}")
        u = np.clip(u, 0.0, 1.0)
        y_co, y_h2 = float(u[2]), float(u[3])
        return cls(
            c_x=_lerp(*BOUNDS["c_x"], u[0]),
            p=_lerp(*BOUNDS["p"], u[1]),
            y_co=y_co,
            y_h2=y_h2,
            y_co2=1.0 - y_co - y_h2,
            d_b=_lerp(*BOUNDS["d_b"], u[4]),
            n_gs=_lerp(*BOUNDS["n_gs"], u[5]),
        )

    def to_unit(self) -> np.ndarray:
        """Inverse of :meth:`from_unit`; y_co and y_h2 pass through unchanged."""
        return np.array(
            [
                _unlerp(*BOUNDS["c_x"], self.c_x),
                _unlerp(*BOUNDS["p"], self.p),
                self.y_co,
                self.y_h2,
                _unlerp(*BOUNDS["d_b"], self.d_b),
                _unlerp(*BOUNDS["n_gs"], self.n_gs),
            ]
        )

    def as_dict(self) -> dict:
        return {
            "c_x": self.c_x,
            "p": self.p,
            "y_co": self.y_co,
            "y_h2": self.y_h2,
            "y_co2": self.y_co2,
            "d_b": self.d_b,
            "n_gs": self.n_gs,
        }


def _lerp(lo: float, hi: float, t: float) -> float:
    return lo + (hi - lo) * float(t)


def _unlerp(lo: float, hi: float, v: float) -> float:
    return (v - lo) / (hi - lo)


@dataclass(frozen=True)
class ReactorConstants:
    """Vessel geometry, physics constants and transfer coefficients."""

    temperature: float = 273.15          # K
    gas_constant: float = 8.314          # J/(mol K)
    cross_section: float = 19.63         # column cross sectional area, m2
    holdup_velocity_scale: float = 0.25  # superficial velocity per unit holdup, m/s
    k_l_co: float = 3.98e-4              # liquid-side transfer coefficients, m/s
    k_l_h2: float = 5.93e-4
    k_l_co2: float = 3.87e-4


@dataclass(frozen=True)
class KineticParameters:
    """Uptake kinetics and solubilities.

    Defaults are representative values for acetogenic syngas fermentation,
    not a calibrated parameter set; studies that need a calibrated reactor
    should load their own config.
    """

    q_max_co: float = 3.5e-4       # mol CO/(mol biomass s)
    q_max_h2: float = 2.8e-4       # mol H2/(mol biomass s)
    k_s_co: float = 0.042          # CO half saturation, mol/m3
    k_s_h2: float = 0.025          # H2 half saturation, mol/m3
    k_i_co: float = 0.25           # CO substrate inhibition, mol/m3
    k_i_co_on_h2: float = 0.025    # CO inhibition of H2 uptake, mol/m3
    henry_co: float = 8.0e-6       # solubilities, mol/(m3 Pa)
    henry_h2: float = 7.2e-6
    henry_co2: float = 3.3e-4
    biomass_molar_mass: float = 24.6  # g/mol

    def __post_init__(self) -> None:
        for name in (
            "q_max_co", "q_max_h2", "k_s_co", "k_s_h2", "k_i_co",
            "k_i_co_on_h2", "henry_co", "henry_h2", "henry_co2",
            "biomass_molar_mass",
        ):
            v = getattr(self, name)
            if math.isnan(v) or v <= 0.0:
                raise DomainError(f"kinetic parameter {name}={v!r} must be positive")


@dataclass(frozen=True)
class ReactorConfig:
    """Everything needed to evaluate the reactor objective at a point."""

    constants: ReactorConstants = field(default_factory=ReactorConstants)
    kinetics: KineticParameters = field(default_factory=KineticParameters)
    weight_co: float = 1.0
    weight_h2: float = 1.0
    hf_amplitude: float = 0.1
    hf_phases: tuple = (0.4, 1.1, 2.3, 0.9, 1.7, 2.9)

    def __post_init__(self) -> None:
        if self.weight_co < 0.0 or self.weight_h2 < 0.0:
            raise DomainError("objective weights must be nonnegative")
        if len(self.hf_phases) != 6:
            raise DomainError("hf_phases needs one entry per unit coordinate")


@dataclass(frozen=True)
class ReactorSolution:
    """Steady state of the per-gas balances at one operating point."""

    c_co: float
    c_h2: float
    c_co2: float
    kla_co: float
    kla_h2: float
    kla_co2: float
    q_co: float
    q_h2: float
    rate_co: float
    rate_h2: float
    gas_holdup: float
    superficial_velocity: float


def superficial_gas_velocity(n_gs: float, pressure: float, constants: ReactorConstants) -> float:
    """Superficial gas velocity (m/s) of an ideal gas fed at n_gs mol/s."""
    if pressure <= 0.0:
        raise DomainError(f"pressure must be positive, got {pressure!r}")
    return n_gs * constants.gas_constant * constants.temperature / (
        constants.cross_section * pressure
    )


def gas_holdup(velocity: float, constants: ReactorConstants) -> float:
    """Gas holdup from the linear velocity-holdup correlation."""
    eps = velocity / constants.holdup_velocity_scale
    if eps >= 1.0:
        raise DomainError(f"gas holdup {eps!r} >= 1 is not physical")
    return eps


def kla(k_l: float, holdup: float, bubble_diameter: float) -> float:
    """Volumetric transfer coefficient (1/s) via the bubble specific area 6*eps/d_b."""
    if bubble_diameter <= 0.0:
        raise DomainError(f"bubble diameter must be positive, got {bubble_diameter!r}")
    return k_l * 6.0 * holdup / bubble_diameter


def uptake_co(c_co: float, kin: KineticParameters) -> float:
    """Specific CO uptake, substrate inhibited (mol CO per mol biomass per s)."""
    if c_co < 0.0:
        raise DomainError(f"concentration must be nonnegative, got {c_co!r}")
    if c_co == 0.0:
        return 0.0
    return kin.q_max_co * c_co / (kin.k_s_co + c_co + c_co * c_co / kin.k_i_co)


def uptake_h2(c_h2: float, c_co: float, kin: KineticParameters) -> float:
    """Specific H2 uptake, Monod in H2 and inhibited by dissolved CO."""
    if c_h2 < 0.0 or c_co < 0.0:
        raise DomainError(f"concentrations must be nonnegative, got {(c_h2, c_co)!r}")
    if c_h2 == 0.0:
        return 0.0
    monod = c_h2 / (kin.k_s_h2 + c_h2)
    inhibition = 1.0 / (1.0 + c_co / kin.k_i_co_on_h2)
    return kin.q_max_h2 * monod * inhibition


def _d_uptake_co(c: float, kin: KineticParameters) -> float:
    den = kin.k_s_co + c + c * c / kin.k_i_co
    return kin.q_max_co * (kin.k_s_co - c * c / kin.k_i_co) / (den * den)


def _d_uptake_h2(c: float, c_co: float, kin: KineticParameters) -> float:
    inhibition = 1.0 / (1.0 + max(c_co, 0.0) / kin.k_i_co_on_h2)
    den = kin.k_s_h2 + c
    return kin.q_max_h2 * kin.k_s_h2 * inhibition / (den * den)


# Bisection runs until the bracket is this fraction of the saturation
# concentration, then a few Newton steps polish the root.
_BISECT_REL_WIDTH = 1.0e-12
_MAX_BISECT_ITER = 200
_NEWTON_STEPS = 3


def _solve_gas_balance(kla_i, c_sat, c_x_molar, uptake, d_uptake) -> float:
    """Smallest root of kla*(c_sat - c) = uptake(c)*c_x_molar on [0, c_sat].

    The balance can have several steady states when uptake is substrate
    inhibited; the low-concentration branch is the one reached from a
    startup at c = 0, so the leftmost bracket wins.
    """
    if c_sat <= 0.0:
        return 0.0
    if kla_i <= 0.0 or c_x_molar <= 0.0:
        # No transfer: uptake drains the phase. No biomass: nothing drains.
        return 0.0 if c_x_molar > 0.0 else c_sat

    def g(c: float) -> float:
        return kla_i * (c_sat - c) - uptake(c) * c_x_molar

    # Scan from the left for the first sign change.  The log-spaced points
    # resolve a crossing close to zero that a uniform grid would step over.
    grid = np.union1d(
        np.linspace(0.0, c_sat, 65),
        c_sat * np.logspace(-9.0, 0.0, 28),
    )
    lo = 0.0
    hi = None
    for c in grid[1:]:
        if g(float(c)) <= 0.0:
            hi = float(c)
            break
        lo = float(c)
    if hi is None:
        return c_sat  # uptake never catches up with transfer

    tol = _BISECT_REL_WIDTH * c_sat
    for _ in range(_MAX_BISECT_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid

    root = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        slope = -kla_i - d_uptake(root) * c_x_molar
        if slope == 0.0:
            break
        step = g(root) / slope
        candidate = root - step
        if not (lo <= candidate <= hi):
            break
        root = candidate
    return root


def solve_steady_state(
    point: OperatingPoint,
    constants: ReactorConstants,
    kin: KineticParameters,
) -> ReactorSolution:
    """Solve the per-gas steady state balances at one operating point.

    CO is solved first because its balance is self contained; the H2
    balance then sees the dissolved CO through its inhibition term.  CO2
    is reported at saturation, it is a product and not taken up.
    """
    velocity = superficial_gas_velocity(point.n_gs, point.p, constants)
    holdup = gas_holdup(velocity, constants)
    kla_co = kla(constants.k_l_co, holdup, point.d_b)
    kla_h2 = kla(constants.k_l_h2, holdup, point.d_b)
    kla_co2 = kla(constants.k_l_co2, holdup, point.d_b)

    sat_co = kin.henry_co * point.p * point.y_co
    sat_h2 = kin.henry_h2 * point.p * point.y_h2
    sat_co2 = kin.henry_co2 * point.p * point.y_co2
    c_x_molar = point.c_x * 1000.0 / kin.biomass_molar_mass

    c_co = _solve_gas_balance(
        kla_co, sat_co, c_x_molar,
        lambda c: uptake_co(c, kin),
        lambda c: _d_uptake_co(c, kin),
    )
    c_h2 = _solve_gas_balance(
        kla_h2, sat_h2, c_x_molar,
        lambda c: uptake_h2(c, c_co, kin),
        lambda c: _d_uptake_h2(c, c_co, kin),
    )

    q_co = uptake_co(c_co, kin)
    q_h2 = uptake_h2(c_h2, c_co, kin)
    return ReactorSolution(
        c_co=c_co,
        c_h2=c_h2,
        c_co2=sat_co2,
        kla_co=kla_co,
        kla_h2=kla_h2,
        kla_co2=kla_co2,
        q_co=q_co,
        q_h2=q_h2,
        rate_co=q_co * c_x_molar,
        rate_h2=q_h2 * c_x_molar,
        gas_holdup=holdup,
        superficial_velocity=velocity,
    )


def evaluate_low_fidelity(point: OperatingPoint, config: ReactorConfig) -> float:
    """Weighted volumetric syngas consumption rate at steady state."""
    sol = solve_steady_state(point, config.constants, config.kinetics)
    return config.weight_co * sol.rate_co + config.weight_h2 * sol.rate_h2


def evaluate_synthetic_high_fidelity(point: OperatingPoint, config: ReactorConfig) -> float:
    """Low fidelity objective with a smooth multiplicative perturbation.

    Stands in for an expensive simulator when exercising multi-source
    campaigns end to end: same landscape, deterministic, and equal to the
    low fidelity objective when the amplitude is zero.
    """
    lf = evaluate_low_fidelity(point, config)
    u = point.to_unit()
    wiggle = 1.0
    for coord, phase in zip(u, config.hf_phases):
        wiggle *= math.sin(math.pi * coord + phase)
    return lf * (1.0 + config.hf_amplitude * wiggle)
