"""Campaign loop: config, init design, ask-tell, journal replay, budgets."""

import dataclasses
import json
import math

import numpy as np
import pytest

from syngas_mfbo.acquisition import AcquisitionConfig
from syngas_mfbo.campaign import (
    JOURNAL_NAME,
    AlreadyObservedError,
    BudgetExhaustedError,
    Campaign,
    CampaignConfig,
    CampaignError,
    EmptyCampaignError,
    InvalidObservationError,
    InvalidRequestError,
    JournalError,
    SourceSpec,
    UnknownSuggestionError,
    default_hartmann_config,
    default_syngas_config,
)
from syngas_mfbo.config import ConfigError
from syngas_mfbo.gp import posterior

FAST_ACQ = AcquisitionConfig(n_candidates=16, refine_top=2, refine_steps=3,
                             fresh_discretization=32, discretization_cap=128)

FIXED_CLOCK = lambda: 1_700_000_000.0  # noqa: E731 - injectable wall clock


def fast_hartmann(**kw) -> CampaignConfig:
    return dataclasses.replace(default_hartmann_config(**kw), acquisition=FAST_ACQ)


def manual_only_config() -> CampaignConfig:
    return CampaignConfig(
        objective="syngas",
        seed=0,
        sources=(SourceSpec(index=0, kind="external-manual", cost=2.0),),
        init_design={},
        acquisition=FAST_ACQ,
    )


# -- config ---------------------------------------------------------------------


def test_config_round_trip():
    cfg = default_hartmann_config(low_cost=0.01, seed=3, budget=20.0)
    again = CampaignConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()


def test_syngas_config_round_trip_keeps_reactor():
    cfg = default_syngas_config(low_cost=0.1, seed=1)
    again = CampaignConfig.from_dict(cfg.to_dict())
    assert again.reactor is not None
    assert again.to_dict() == cfg.to_dict()


def test_config_validation():
    src = lambda **kw: SourceSpec(**{  # noqa: E731
        "index": 0, "kind": "hartmann6-accuracy", "cost": 1.0, "fidelity": 1.0, **kw})
    with pytest.raises(ConfigError):
        CampaignConfig(objective="nope", seed=0, sources=(src(),), init_design={0: 4})
    with pytest.raises(ConfigError):
        CampaignConfig(objective="hartmann6mf", seed=-1, sources=(src(),), init_design={0: 4})
    with pytest.raises(ConfigError):  # index gap
        CampaignConfig(objective="hartmann6mf", seed=0,
                       sources=(src(index=1),), init_design={1: 4})
    with pytest.raises(ConfigError):  # automated init too small
        CampaignConfig(objective="hartmann6mf", seed=0, sources=(src(),), init_design={0: 1})
    with pytest.raises(ConfigError):  # refit cadence
        CampaignConfig(objective="hartmann6mf", seed=0, sources=(src(),),
                       init_design={0: 4}, refit_every=0)
    with pytest.raises(ConfigError):  # budget sign
        CampaignConfig(objective="hartmann6mf", seed=0, sources=(src(),),
                       init_design={0: 4}, budget=-1.0)
    with pytest.raises(ConfigError):  # objective/kind mismatch
        CampaignConfig(objective="syngas", seed=0, sources=(src(),), init_design={0: 4})
    with pytest.raises(ConfigError):  # manual sources take no init design
        CampaignConfig(objective="syngas", seed=0,
                       sources=(SourceSpec(index=0, kind="external-manual", cost=1.0),),
                       init_design={0: 2})
    with pytest.raises(ConfigError):
        SourceSpec(index=0, kind="warp-drive", cost=1.0)
    with pytest.raises(ConfigError):
        SourceSpec(index=0, kind="hartmann6-accuracy", cost=0.0, fidelity=1.0)
    with pytest.raises(ConfigError):
        SourceSpec(index=0, kind="hartmann6-accuracy", cost=1.0, fidelity=1.5)


def test_config_from_dict_rejects_junk():
    raw = default_hartmann_config().to_dict()
    raw["surprise"] = 1
    with pytest.raises(ConfigError):
        CampaignConfig.from_dict(raw)
    raw = default_hartmann_config().to_dict()
    raw["schema_version"] = 2
    with pytest.raises(ConfigError):
        CampaignConfig.from_dict(raw)


# -- init design -------------------------------------------------------------------


def test_init_design_counts_and_budget():
    campaign = Campaign.create(fast_hartmann(low_cost=0.05))
    assert len(campaign.observations) == 12
    assert campaign.source_counts() == {0: 4, 1: 8}
    # exact equality with the same left-to-right cost accumulation
    assert campaign.budget_spent == sum([1.0] * 4 + [0.05] * 8)
    assert campaign.model is not None and campaign.model.n_obs == 12
    assert campaign.refit_count == 1
    assert campaign.steps_taken == 0


def test_same_seed_gives_byte_identical_journals(tmp_path):
    for name in ("a", "b"):
        campaign = Campaign.create(
            fast_hartmann(seed=7), directory=tmp_path / name, clock=FIXED_CLOCK)
        campaign.run(2)
    assert (tmp_path / "a" / JOURNAL_NAME).read_bytes() == \
        (tmp_path / "b" / JOURNAL_NAME).read_bytes()


def test_different_seeds_diverge(tmp_path):
    a = Campaign.create(fast_hartmann(seed=0), clock=FIXED_CLOCK)
    b = Campaign.create(fast_hartmann(seed=1), clock=FIXED_CLOCK)
    ya = [o.y for o in a.observations]
    yb = [o.y for o in b.observations]
    assert ya != yb


# -- ask/tell ------------------------------------------------------------------------


def test_suggest_is_idempotent_until_recorded():
    campaign = Campaign.create(fast_hartmann())
    first = campaign.suggest()
    again = campaign.suggest()
    assert first.id == 0 and again.id == 0
    assert np.array_equal(first.u, again.u)
    assert campaign.steps_taken == 1  # the repeat did not advance the loop
    campaign.record(first.id, 0.5)
    nxt = campaign.suggest()
    assert nxt.id == 1


def test_record_contract():
    campaign = Campaign.create(fast_hartmann())
    s = campaign.suggest()
    with pytest.raises(UnknownSuggestionError):
        campaign.record(99, 1.0)
    with pytest.raises(InvalidObservationError):
        campaign.record(s.id, math.nan)
    with pytest.raises(InvalidObservationError):
        campaign.record(s.id, math.inf)
    with pytest.raises(InvalidObservationError):
        campaign.record(s.id, 1.0, cost=0.0)
    with pytest.raises(InvalidObservationError):
        campaign.record(s.id, 1.0, cost=-2.0)
    result = campaign.record(s.id, 1.0, cost=0.25)
    assert result["suggestion_id"] == s.id
    assert result["value"] == 1.0 and result["cost"] == 0.25
    with pytest.raises(AlreadyObservedError) as err:
        campaign.record(s.id, 2.0)
    assert err.value.result == result


def test_record_then_posterior_reproduces_value():
    campaign = Campaign.create(fast_hartmann())
    s = campaign.suggest()
    # a zero-surprise value keeps the conditioning benign, which is what
    # the +-1e-6 interpolation claim is about
    mean, _ = posterior(campaign.model, [s.source], s.u[None, :])
    value = float(mean[0])
    campaign.record(s.id, value)
    mean_after, _ = posterior(campaign.model, [s.source], s.u[None, :])
    assert mean_after[0] == pytest.approx(value, abs=1e-6)


def test_step_appends_exactly_one_observation():
    campaign = Campaign.create(fast_hartmann())
    n = len(campaign.observations)
    campaign.step()
    assert len(campaign.observations) == n + 1
    assert campaign.steps_taken == 1


def test_run_refits_on_cadence():
    campaign = Campaign.create(fast_hartmann())
    assert campaign.refit_count == 1
    campaign.run(5)
    assert campaign.refit_count == 2
    assert campaign.steps_taken == 5
    assert len(campaign.observations) == 17


def test_incumbent_is_monotone():
    campaign = Campaign.create(fast_hartmann(seed=2))
    campaign.run(6)
    seen = [r["incumbent"] for r in campaign.history_rows() if r["incumbent"] is not None]
    assert seen, "no truth-source observations in history"
    assert all(b >= a for a, b in zip(seen, seen[1:]))
    best = campaign.best_so_far()
    assert best.kind == "observed"
    truth = [o.y for o in campaign.observations if o.source == 0]
    assert best.value == max(truth)


# -- manual sources --------------------------------------------------------------------


def test_manual_campaign_ask_tell_flow():
    campaign = Campaign.create(manual_only_config())
    with pytest.raises(EmptyCampaignError):
        campaign.best_so_far()
    s = campaign.suggest()
    assert s.source == 0
    assert set(s.physical) == {"c_x", "p", "y_co", "y_h2", "d_b", "n_gs", "y_co2"}
    with pytest.raises(CampaignError):
        campaign.step()  # no automated evaluator to call
    result = campaign.record(s.id, 0.135, cost=2.5)
    assert campaign.budget_spent == 2.5
    assert result["cost"] == 2.5
    best = campaign.best_so_far()
    assert best.kind == "observed" and best.value == 0.135


def test_manual_record_uses_source_cost_by_default():
    campaign = Campaign.create(manual_only_config())
    s = campaign.suggest()
    campaign.record(s.id, 0.1)
    assert campaign.budget_spent == 2.0


# -- budget -------------------------------------------------------------------------


def test_budget_exhaustion_at_suggest():
    campaign = Campaign.create(fast_hartmann(budget=4.41))
    assert campaign.budget_spent == pytest.approx(4.4)
    with pytest.raises(BudgetExhaustedError):
        campaign.suggest()
    assert campaign.status == "budget_exhausted"
    with pytest.raises(BudgetExhaustedError):
        campaign.suggest()
    assert campaign.summary()["status"] == "budget_exhausted"


def test_run_stops_gracefully_on_budget():
    campaign = Campaign.create(fast_hartmann(budget=4.41))
    status = campaign.run(5)
    assert status == "budget_exhausted"
    assert len(campaign.observations) == 12


def test_budget_allows_cheap_steps():
    campaign = Campaign.create(fast_hartmann(low_cost=0.05, budget=30.0))
    campaign.run(3)
    assert campaign.status == "running"
    assert campaign.budget_spent <= 30.0


# -- journal -----------------------------------------------------------------------


def test_replay_reconstructs_state_and_next_suggestion(tmp_path):
    campaign = Campaign.create(fast_hartmann(seed=3), directory=tmp_path / "c")
    campaign.run(6)
    loaded = Campaign.load(tmp_path / "c")
    assert loaded.summary() == campaign.summary()
    assert loaded.budget_spent == campaign.budget_spent
    a = campaign.suggest()
    b = loaded.suggest()
    assert a.id == b.id and a.source == b.source
    assert np.array_equal(a.u, b.u)
    assert a.mkg == b.mkg


def test_replay_preserves_pending_suggestion(tmp_path):
    campaign = Campaign.create(fast_hartmann(seed=4), directory=tmp_path / "c")
    campaign.run(2)
    s = campaign.suggest()
    loaded = Campaign.load(tmp_path / "c")
    assert loaded.pending_id == s.id
    again = loaded.suggest()
    assert again.id == s.id
    assert np.array_equal(again.u, s.u)
    result = loaded.record(s.id, -0.5)
    assert result["suggestion_id"] == s.id


def test_budget_equals_journal_cost_sum(tmp_path):
    campaign = Campaign.create(fast_hartmann(seed=5), directory=tmp_path / "c")
    campaign.run(4)
    costs = []
    with open(tmp_path / "c" / JOURNAL_NAME) as fh:
        for line in fh:
            event = json.loads(line)
            if event["kind"] == "observe":
                costs.append(event["payload"]["cost"])
    assert sum(costs) == campaign.budget_spent  # same left-to-right accumulation


def test_truncated_tail_is_discarded(tmp_path):
    campaign = Campaign.create(fast_hartmann(seed=6), directory=tmp_path / "c")
    campaign.run(2)
    path = tmp_path / "c" / JOURNAL_NAME
    clean = path.read_bytes()
    path.write_bytes(clean + b'{"schema_version": 1, "seq": 99, "kind": "obse')
    loaded = Campaign.load(tmp_path / "c")
    assert path.read_bytes() == clean  # tail dropped on disk too
    assert loaded.summary() == campaign.summary()


def test_corrupt_committed_line_is_an_error(tmp_path):
    campaign = Campaign.create(fast_hartmann(seed=6), directory=tmp_path / "c")
    campaign.run(1)
    path = tmp_path / "c" / JOURNAL_NAME
    path.write_bytes(path.read_bytes() + b"not json at all\n")
    with pytest.raises(JournalError):
        Campaign.load(tmp_path / "c")


def test_load_requires_config(tmp_path):
    with pytest.raises(CampaignError):
        Campaign.load(tmp_path / "missing")


# -- read side ----------------------------------------------------------------------


def test_summary_shape():
    campaign = Campaign.create(fast_hartmann())
    summary = campaign.summary()
    assert summary["objective"] == "hartmann6mf"
    assert summary["status"] == "running"
    assert summary["hours_per_cost"] == 24.0
    assert summary["n_observations"] == 12
    assert summary["source_counts"] == {"0": 4, "1": 8}
    assert summary["pending_suggestion"] is None
    assert summary["best"]["kind"] == "observed"
    s = campaign.suggest()
    assert campaign.summary()["pending_suggestion"]["id"] == s.id
    campaign.record(s.id, 0.0)
    assert campaign.summary()["pending_suggestion"] is None


def test_history_rows_shape():
    campaign = Campaign.create(fast_hartmann())
    rows = campaign.history_rows()
    assert len(rows) == 12
    assert rows[0]["step"] == 0
    assert rows[-1]["budget"] == pytest.approx(campaign.budget_spent)
    for row in rows:
        assert set(row) == {"step", "source", "cost", "value", "incumbent", "budget"}


def test_posterior_slice_shapes_and_validation():
    campaign = Campaign.create(fast_hartmann())
    one = campaign.posterior_slice([2], n=5)
    assert one["axes"] == [2] and one["n"] == 5
    assert len(one["ticks"]) == 5 and len(one["mean"]) == 5 and len(one["std"]) == 5
    assert len(one["anchor"]) == 6
    assert all(s >= 0.0 for s in one["std"])
    two = campaign.posterior_slice([0, 3], n=4)
    assert len(two["mean"]) == 16
    for bad in ([], [0, 1, 2]):
        with pytest.raises(InvalidRequestError):
            campaign.posterior_slice(bad, n=5)
    with pytest.raises(InvalidRequestError):
        campaign.posterior_slice([6], n=5)
    for bad_n in (1, 202):
        with pytest.raises(InvalidRequestError):
            campaign.posterior_slice([0], n=bad_n)


def test_syngas_campaign_smoke():
    cfg = dataclasses.replace(default_syngas_config(), acquisition=FAST_ACQ)
    campaign = Campaign.create(cfg)
    assert len(campaign.observations) == 12
    campaign.step()
    best = campaign.best_so_far()
    assert best.value > 0.0  # uptake rates and biomass are positive
    assert set(best.physical) == {"c_x", "p", "y_co", "y_h2", "d_b", "n_gs", "y_co2"}
