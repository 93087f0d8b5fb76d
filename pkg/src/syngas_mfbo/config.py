"""Reactor config files: strict JSON schema, shipped defaults.

A config file carries every number the objective evaluators need, so a
campaign journal plus its config replays bit for bit.  Unknown keys are
rejected rather than ignored; a typo in a parameter name should fail
loudly, not silently fall back to a default.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .reactor import KineticParameters, ReactorConfig, ReactorConstants

__all__ = ["ConfigError", "default_reactor_config", "load_reactor_config", "reactor_config_from_dict", "reactor_config_to_dict"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Raised for malformed or out-of-range config files."""


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _numbers(section: dict, where: str) -> dict:
    for key, value in section.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return {k: float(v) for k, v in section.items()}


def reactor_config_from_dict(raw: dict, where: str = "config") -> ReactorConfig:
    """Validate a parsed config document and build a ReactorConfig."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be a JSON object")
    _check_keys(
        raw,
        {"schema_version", "comment", "constants", "kinetics", "objective", "synthetic_high_fidelity"},
        where,
    )
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")

    constants_raw = raw.get("constants", {})
    _check_keys(constants_raw, {
        "temperature", "gas_constant", "cross_section", "holdup_velocity_scale",
        "k_l_co", "k_l_h2", "k_l_co2",
    }, f"{where}.constants")
    kinetics_raw = raw.get("kinetics", {})
    _check_keys(kinetics_raw, {
        "q_max_co", "q_max_h2", "k_s_co", "k_s_h2", "k_i_co", "k_i_co_on_h2",
        "henry_co", "henry_h2", "henry_co2", "biomass_molar_mass",
    }, f"{where}.kinetics")
    objective_raw = raw.get("objective", {})
    _check_keys(objective_raw, {"weight_co", "weight_h2"}, f"{where}.objective")
    hf_raw = raw.get("synthetic_high_fidelity", {})
    _check_keys(hf_raw, {"amplitude", "phases"}, f"{where}.synthetic_high_fidelity")

    phases = hf_raw.get("phases", list(ReactorConfig().hf_phases))
    if (
        not isinstance(phases, list)
        or len(phases) != 6
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in phases)
    ):
        raise ConfigError(f"{where}.synthetic_high_fidelity.phases must be a list of 6 numbers")
    amplitude = hf_raw.get("amplitude", 0.1)
    if isinstance(amplitude, bool) or not isinstance(amplitude, (int, float)):
        raise ConfigError(f"{where}.synthetic_high_fidelity.amplitude must be a number")

    try:
        return ReactorConfig(
            constants=ReactorConstants(**_numbers(constants_raw, f"{where}.constants")),
            kinetics=KineticParameters(**_numbers(kinetics_raw, f"{where}.kinetics")),
            hf_amplitude=float(amplitude),
            hf_phases=tuple(float(v) for v in phases),
            **{k: v for k, v in _numbers(objective_raw, f"{where}.objective").items()},
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def reactor_config_to_dict(config: ReactorConfig) -> dict:
    """Inverse of reactor_config_from_dict, suitable for json.dump."""
    return {
        "schema_version": SCHEMA_VERSION,
        "constants": {
            "temperature": config.constants.temperature,
            "gas_constant": config.constants.gas_constant,
            "cross_section": config.constants.cross_section,
            "holdup_velocity_scale": config.constants.holdup_velocity_scale,
            "k_l_co": config.constants.k_l_co,
            "k_l_h2": config.constants.k_l_h2,
            "k_l_co2": config.constants.k_l_co2,
        },
        "kinetics": {
            "q_max_co": config.kinetics.q_max_co,
            "q_max_h2": config.kinetics.q_max_h2,
            "k_s_co": config.kinetics.k_s_co,
            "k_s_h2": config.kinetics.k_s_h2,
            "k_i_co": config.kinetics.k_i_co,
            "k_i_co_on_h2": config.kinetics.k_i_co_on_h2,
            "henry_co": config.kinetics.henry_co,
            "henry_h2": config.kinetics.henry_h2,
            "henry_co2": config.kinetics.henry_co2,
            "biomass_molar_mass": config.kinetics.biomass_molar_mass,
        },
        "objective": {"weight_co": config.weight_co, "weight_h2": config.weight_h2},
        "synthetic_high_fidelity": {
            "amplitude": config.hf_amplitude,
            "phases": list(config.hf_phases),
        },
    }


def load_reactor_config(path: str | Path) -> ReactorConfig:
    """Load and validate a reactor config file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return reactor_config_from_dict(raw, where=str(path))


def default_reactor_config() -> ReactorConfig:
    """The config shipped with the package (representative kinetics)."""
    raw = json.loads(
        resources.files("syngas_mfbo").joinpath("data/reactor_defaults.json").read_text()
    )
    return reactor_config_from_dict(raw, where="reactor_defaults.json")
