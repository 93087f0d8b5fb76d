"""Replicated campaign grids over the benchmark objective.

The question the grid answers: as the low fidelity source gets more
expensive, how much total acquisition budget does a campaign burn, and
how good does the incumbent get?  One row per (cost, seed) pair; the
budget-versus-cost relation is summarized by a least squares slope with
its t test.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .benchmarks import hartmann6
from .campaign import Campaign, default_hartmann_config
from .stats import RegressionResult, linreg_slope_test

__all__ = ["StudyRow", "StudyResult", "run_cost_study", "random_search_best", "write_study_outputs"]

STUDY_CSV_FIELDS = ("cost", "seed", "budget_spent", "best_value", "n_high_fidelity", "n_low_fidelity")


@dataclass(frozen=True)
class StudyRow:
    cost: float
    seed: int
    budget_spent: float      # acquisition phase only; the design is the same in every run
    best_value: float        # best benchmark value observed at the truth source (lower is better)
    n_high_fidelity: int     # acquisition queries at source 0
    n_low_fidelity: int      # acquisition queries at source 1
    total_budget: float      # including the initial design

    def csv_dict(self) -> dict:
        return {
            "cost": self.cost,
            "seed": self.seed,
            "budget_spent": self.budget_spent,
            "best_value": self.best_value,
            "n_high_fidelity": self.n_high_fidelity,
            "n_low_fidelity": self.n_low_fidelity,
        }


@dataclass(frozen=True)
class StudyResult:
    rows: list
    regression: RegressionResult
    steps: int

    def to_json_dict(self) -> dict:
        out = self.regression.to_dict()
        out.update({
            "predictor": "low_fidelity_cost",
            "response": "budget_spent",
            "steps": self.steps,
            "costs": sorted({row.cost for row in self.rows}),
            "seeds": sorted({row.seed for row in self.rows}),
        })
        return out


def _one_run(cost: float, seed: int, steps: int) -> StudyRow:
    config = default_hartmann_config(low_cost=cost, seed=seed, max_steps=steps)
    campaign = Campaign.create(config, directory=None)
    campaign.run(steps)
    acq = [o for o in campaign.observations if o.phase == "step"]
    best = min(
        (-o.y for o in campaign.observations if o.source == 0),
        default=math.nan,
    )
    return StudyRow(
        cost=cost,
        seed=seed,
        budget_spent=float(sum(o.cost for o in acq)),
        best_value=float(best),
        n_high_fidelity=sum(1 for o in acq if o.source == 0),
        n_low_fidelity=sum(1 for o in acq if o.source == 1),
        total_budget=campaign.budget_spent,
    )


def run_cost_study(costs, n_seeds: int, steps: int, progress=None) -> StudyResult:
    """One campaign per (cost, seed); seeds are shared across costs."""
    rows = []
    for cost in costs:
        for seed in range(n_seeds):
            rows.append(_one_run(float(cost), seed, steps))
            if progress is not None:
                progress(rows[-1])
    regression = linreg_slope_test(
        [row.cost for row in rows], [row.budget_spent for row in rows]
    )
    return StudyResult(rows=rows, regression=regression, steps=steps)


def random_search_best(budget: float, seed: int) -> float:
    """Best benchmark value from uniform truth-source queries at unit cost."""
    n = int(budget // 1.0)
    if n <= 0:
        return math.inf
    rng = np.random.default_rng([seed, 101])
    points = rng.uniform(size=(n, 6))
    return float(min(hartmann6(p) for p in points))


def write_study_outputs(result: StudyResult, out_dir: Path) -> dict:
    """study.csv, regression.json and the regression figure, side by side."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "study.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=STUDY_CSV_FIELDS)
        writer.writeheader()
        for row in result.rows:
            writer.writerow(row.csv_dict())
    json_path = out_dir / "regression.json"
    json_path.write_text(json.dumps(result.to_json_dict(), indent=2) + "\n")
    from . import plots

    fig_path = out_dir / "study.png"
    plots.study_figure(result.rows, result.regression, fig_path)
    return {"csv": csv_path, "regression": json_path, "figure": fig_path}
