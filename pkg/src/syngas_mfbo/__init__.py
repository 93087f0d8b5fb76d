"""Multi-fidelity Bayesian optimization for syngas fermentation reactors.

A steady-state bubble column model of gas-to-ethanol fermentation serves
as the cheap simulator; a multi-information-source Gaussian process plus
a cost-aware knowledge gradient decide, step by step, which simulator
(or external experiment) to query next.  Campaigns are journaled and can
be driven programmatically, from the command line, or over HTTP.
"""

from .acquisition import AcquisitionConfig, CostModel, Proposal, expected_max_affine, propose_next
from .benchmarks import HARTMANN6_MIN_VALUE, hartmann6, hartmann6_mf
from .campaign import (
    Campaign,
    CampaignConfig,
    CampaignError,
    SourceSpec,
    default_hartmann_config,
    default_syngas_config,
)
from .config import ConfigError, default_reactor_config, load_reactor_config
from .domain import SyngasDomain, UnitCubeDomain
from .gp import MisoGP, fit, posterior, update
from .reactor import (
    DomainError,
    OperatingPoint,
    ReactorConfig,
    evaluate_low_fidelity,
    evaluate_synthetic_high_fidelity,
    solve_steady_state,
)
from .stats import RegressionResult, linreg_slope_test, pearson_r
from .study import run_cost_study

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig",
    "Campaign",
    "CampaignConfig",
    "CampaignError",
    "ConfigError",
    "CostModel",
    "DomainError",
    "HARTMANN6_MIN_VALUE",
    "MisoGP",
    "OperatingPoint",
    "Proposal",
    "ReactorConfig",
    "RegressionResult",
    "SourceSpec",
    "SyngasDomain",
    "UnitCubeDomain",
    "__version__",
    "default_hartmann_config",
    "default_reactor_config",
    "default_syngas_config",
    "evaluate_low_fidelity",
    "evaluate_synthetic_high_fidelity",
    "expected_max_affine",
    "fit",
    "hartmann6",
    "hartmann6_mf",
    "linreg_slope_test",
    "load_reactor_config",
    "pearson_r",
    "posterior",
    "propose_next",
    "run_cost_study",
    "solve_steady_state",
    "update",
]
