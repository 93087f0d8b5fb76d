"""Command line entry points: automated campaigns, cost studies, the HTTP service.

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from .acquisition import build_discretization, propose_next
from .campaign import (
    _RNG_STEP,
    Campaign,
    CampaignConfig,
    CampaignError,
    default_hartmann_config,
    default_syngas_config,
)
from .config import ConfigError
from .plots import campaign_figure
from .service import serve as _serve
from .study import run_cost_study, write_study_outputs

HISTORY_FIELDS = ("step", "source", "cost", "value", "incumbent", "budget")


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def write_history_csv(rows: list[dict], path: Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=HISTORY_FIELDS)
        writer.writeheader()
        for row in rows:
            out = dict(row)
            if out.get("incumbent") is None:
                out["incumbent"] = ""
            writer.writerow(out)


@click.group()
@click.version_option(package_name="syngas-mfbo")
def main():
    """Multi-fidelity Bayesian optimization for syngas fermentation reactors."""


@main.command("run-campaign")
@click.option("--objective", type=click.Choice(["syngas", "hartmann6mf"]),
              default="syngas", show_default=True)
@click.option("--low-cost", type=float, default=0.05, show_default=True,
              help="Relative cost of the cheap source (truth source costs 1).")
@click.option("--steps", type=int, default=20, show_default=True,
              help="Acquisition steps after the initial design.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=float, default=None,
              help="Stop once the next evaluation would exceed this total cost.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Campaign config JSON; replaces every flag above except --steps.")
@click.option("--out", "out_dir", type=click.Path(), default="campaign-out",
              show_default=True)
def run_campaign(objective, low_cost, steps, seed, budget, config_path, out_dir):
    """Run an automated campaign; write journal, history CSV, summary JSON, figure."""
    if steps < 0:
        _fail("--steps must be >= 0", 2)
    try:
        if config_path is not None:
            config = CampaignConfig.from_dict(json.loads(Path(config_path).read_text()))
        elif objective == "syngas":
            config = default_syngas_config(low_cost=low_cost, seed=seed, budget=budget)
        else:
            config = default_hartmann_config(low_cost=low_cost, seed=seed, budget=budget)
    except (OSError, json.JSONDecodeError, ConfigError, ValueError) as exc:
        _fail(f"invalid config: {exc}", 2)
    out = Path(out_dir)
    try:
        campaign = Campaign.create(config, directory=out)
        campaign.run(steps)
        rows = campaign.history_rows()
        write_history_csv(rows, out / "history.csv")
        summary = campaign.summary()
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
        campaign_figure(rows, out / "campaign.png")
    except (CampaignError, OSError) as exc:
        _fail(str(exc), 1)
    click.echo(
        f"{summary['objective']}: {summary['n_observations']} observations, "
        f"budget spent {summary['budget_spent']:.4f}"
        + (f" of {summary['budget']}" if summary["budget"] is not None else "")
    )
    if summary["best"] is not None:
        click.echo(f"incumbent {summary['best']['value']:.6f} (source 0)")
    click.echo(f"artifacts in {out}")


@main.command("cost-study")
@click.option("--costs", default="0.001,0.05,0.1", show_default=True,
              help="Comma separated low-fidelity costs.")
@click.option("--seeds", type=int, default=8, show_default=True,
              help="Seeds per cost (0..N-1, shared across costs).")
@click.option("--steps", type=int, default=50, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default="study-out",
              show_default=True)
def cost_study(costs, seeds, steps, out_dir):
    """Sweep the cheap-source cost on the benchmark; regress spend on cost."""
    try:
        cost_values = [float(tok) for tok in costs.split(",") if tok.strip()]
    except ValueError as exc:
        _fail(f"bad --costs value: {exc}", 2)
    if not cost_values or any(c <= 0.0 for c in cost_values):
        _fail("--costs needs at least one positive value", 2)
    if seeds < 1 or steps < 1:
        _fail("--seeds and --steps must be >= 1", 2)
    if len(cost_values) * seeds < 3:
        _fail("need at least 3 runs total for the regression", 2)

    def progress(row):
        click.echo(
            f"cost {row.cost:g} seed {row.seed}: spent {row.budget_spent:.3f}, "
            f"best {row.best_value:.4f}", err=True,
        )

    try:
        result = run_cost_study(cost_values, seeds, steps, progress=progress)
        paths = write_study_outputs(result, Path(out_dir))
    except (CampaignError, OSError) as exc:
        _fail(str(exc), 1)
    reg = result.regression
    click.echo(f"slope {reg.slope:.6g}  r {reg.r:.4f}  p {reg.p_value:.4f}  n {reg.n}")
    click.echo(f"artifacts in {Path(out_dir)} ({', '.join(p.name for p in paths.values())})")


@main.command()
@click.argument("campaign_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="CSV path [default: CAMPAIGN_DIR/diagnostics.csv].")
def diagnose(campaign_dir, out_path):
    """Score the next-step candidate pool of a saved campaign, one row per candidate."""
    try:
        campaign = Campaign.load(Path(campaign_dir))
    except (CampaignError, OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot load campaign: {exc}", 2)
    rng = np.random.default_rng([campaign.config.seed, _RNG_STEP, campaign.steps_taken])
    d_set = build_discretization(campaign.model, campaign.domain, rng,
                                 campaign.config.acquisition)
    proposal = propose_next(campaign.model, campaign.domain, campaign.costs, rng,
                            campaign.config.acquisition, d_set=d_set,
                            collect_diagnostics=True)
    path = Path(out_path) if out_path else Path(campaign_dir) / "diagnostics.csv"
    dim = campaign.domain.dim
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "mkg"] + [f"u{i}" for i in range(dim)])
        for entry in proposal.diagnostics:
            writer.writerow([entry["source"], repr(entry["mkg"])]
                            + [repr(v) for v in entry["u"]])
    click.echo(
        f"{len(proposal.diagnostics)} candidates -> {path}; "
        f"would pick source {proposal.source} (value {proposal.value:.3e})"
    )


@main.command()
@click.option("--port", type=int, default=None,
              help="Port [default: MFBO_PORT or 8765].")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Campaign storage [default: MFBO_DATA_DIR or ./mfbo-data].")
def serve(port, data_dir):
    """Serve the campaign HTTP API (blocking)."""
    try:
        _serve(port=port, data_dir=data_dir)
    except OSError as exc:
        _fail(str(exc), 1)


if __name__ == "__main__":
    main()
