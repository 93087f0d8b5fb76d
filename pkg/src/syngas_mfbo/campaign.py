"""Ask-tell optimization campaigns with a crash safe NDJSON journal.

A campaign owns a multi-source GP, a cost model and a journal.  Typical
flow: create() runs a space filling initial design on the automated
sources and fits the model, then suggest()/record() alternate (step()
does both when every source is automated).  Every state transition is
appended to the journal before it takes effect elsewhere, so load()
rebuilds an identical campaign, including the random stream positions:
all randomness is drawn from streams keyed by (seed, purpose, counter),
never from a shared mutable generator.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import gp as gpmod
from .acquisition import (
    AcquisitionConfig,
    CostModel,
    build_discretization,
    propose_next,
)
from .benchmarks import hartmann6_mf
from .config import ConfigError, default_reactor_config, reactor_config_from_dict, reactor_config_to_dict
from .domain import SyngasDomain, UnitCubeDomain
from .reactor import (
    OperatingPoint,
    ReactorConfig,
    evaluate_low_fidelity,
    evaluate_synthetic_high_fidelity,
)

__all__ = [
    "CampaignError",
    "PendingSuggestionError",
    "UnknownSuggestionError",
    "AlreadyObservedError",
    "InvalidObservationError",
    "InvalidRequestError",
    "BudgetExhaustedError",
    "EmptyCampaignError",
    "JournalError",
    "SourceSpec",
    "CampaignConfig",
    "Suggestion",
    "Observation",
    "Incumbent",
    "Campaign",
    "build_evaluators",
    "domain_for",
]

JOURNAL_SCHEMA_VERSION = 1
CONFIG_SCHEMA_VERSION = 1
JOURNAL_NAME = "journal.ndjson"
CONFIG_NAME = "campaign.json"

# Stream tags for per-purpose random generators.
_RNG_INIT = 11
_RNG_STEP = 13
_RNG_REFIT = 17

OBJECTIVES = ("syngas", "hartmann6mf")
SOURCE_KINDS = (
    "low-fidelity-sim",
    "synthetic-high-fidelity",
    "external-manual",
    "hartmann6-accuracy",
)


class CampaignError(RuntimeError):
    pass


class PendingSuggestionError(CampaignError):
    """An action conflicts with the currently pending suggestion."""

    def __init__(self, pending_id, message=None):
        super().__init__(message or f"pending suggestion {pending_id} must be observed first")
        self.pending_id = pending_id


class UnknownSuggestionError(CampaignError):
    pass


class AlreadyObservedError(CampaignError):
    def __init__(self, result: dict):
        super().__init__(f"suggestion {result['suggestion_id']} was already observed")
        self.result = result


class InvalidObservationError(CampaignError):
    pass


class InvalidRequestError(CampaignError):
    pass


class BudgetExhaustedError(CampaignError):
    pass


class EmptyCampaignError(CampaignError):
    pass


class JournalError(CampaignError):
    pass


@dataclass(frozen=True)
class SourceSpec:
    """One information source: how it is evaluated and what it costs."""

    index: int
    kind: str
    cost: float
    noise: float = 1e-6
    label: str = ""
    fidelity: float | None = None  # accuracy knob for hartmann6-accuracy

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ConfigError(f"unknown source kind {self.kind!r}")
        if not (math.isfinite(self.cost) and self.cost > 0.0):
            raise ConfigError(f"source {self.index} cost must be positive")
        if not (math.isfinite(self.noise) and self.noise >= 0.0):
            raise ConfigError(f"source {self.index} noise must be nonnegative")
        if self.kind == "hartmann6-accuracy":
            if self.fidelity is None or not 0.0 < self.fidelity <= 1.0:
                raise ConfigError(f"source {self.index} needs a fidelity in (0, 1]")

    @property
    def automated(self) -> bool:
        return self.kind != "external-manual"

    def to_dict(self) -> dict:
        out = {
            "index": self.index, "kind": self.kind, "cost": self.cost,
            "noise": self.noise, "label": self.label,
        }
        if self.fidelity is not None:
            out["fidelity"] = self.fidelity
        return out


@dataclass(frozen=True)
class CampaignConfig:
    objective: str
    seed: int
    sources: tuple
    init_design: dict
    max_steps: int | None = None
    budget: float | None = None
    refit_every: int = 5
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    reactor: ReactorConfig | None = None
    hours_per_cost: float = 24.0  # display scale for budget bars, no math on it

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        indices = sorted(s.index for s in self.sources)
        if indices != list(range(len(self.sources))):
            raise ConfigError("source indices must be 0..n-1 with no gaps")
        if self.refit_every < 1:
            raise ConfigError("refit_every must be >= 1")
        if self.budget is not None and not (math.isfinite(self.budget) and self.budget > 0):
            raise ConfigError("budget must be positive when set")
        for spec in self.sources:
            count = self.init_design.get(spec.index, 0)
            if count < 0:
                raise ConfigError("initial design counts must be nonnegative")
            if spec.automated and count < 2:
                raise ConfigError(
                    f"automated source {spec.index} needs an initial design of at least 2"
                )
            if not spec.automated and count != 0:
                raise ConfigError(f"manual source {spec.index} cannot have an initial design")
        if self.objective == "syngas":
            for spec in self.sources:
                if spec.kind == "hartmann6-accuracy":
                    raise ConfigError("hartmann6-accuracy sources need the hartmann6mf objective")
        else:
            for spec in self.sources:
                if spec.kind not in ("hartmann6-accuracy", "external-manual"):
                    raise ConfigError(f"objective hartmann6mf cannot use source kind {spec.kind!r}")

    def source(self, index: int) -> SourceSpec:
        for spec in self.sources:
            if spec.index == index:
                return spec
        raise KeyError(index)

    def cost_model(self) -> CostModel:
        ordered = sorted(self.sources, key=lambda s: s.index)
        return CostModel(costs=tuple(s.cost for s in ordered))

    def to_dict(self) -> dict:
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "objective": self.objective,
            "seed": self.seed,
            "sources": [s.to_dict() for s in sorted(self.sources, key=lambda s: s.index)],
            "init_design": {str(k): v for k, v in sorted(self.init_design.items())},
            "max_steps": self.max_steps,
            "budget": self.budget,
            "refit_every": self.refit_every,
            "acquisition": self.acquisition.to_dict(),
            "reactor": None if self.reactor is None else reactor_config_to_dict(self.reactor),
            "hours_per_cost": self.hours_per_cost,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "CampaignConfig":
        if not isinstance(raw, dict):
            raise ConfigError("campaign config must be a JSON object")
        allowed = {
            "schema_version", "objective", "seed", "sources", "init_design",
            "max_steps", "budget", "refit_every", "acquisition", "reactor",
            "hours_per_cost",
        }
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigError(f"unknown keys in campaign config: {sorted(unknown)}")
        if raw.get("schema_version") != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"unsupported campaign schema_version {raw.get('schema_version')!r}")
        try:
            sources = tuple(SourceSpec(**s) for s in raw["sources"])
            init_design = {int(k): int(v) for k, v in raw.get("init_design", {}).items()}
            acq = AcquisitionConfig.from_dict(raw["acquisition"]) if "acquisition" in raw else AcquisitionConfig()
            reactor = None
            if raw.get("reactor") is not None:
                reactor = reactor_config_from_dict(raw["reactor"], where="campaign.reactor")
            return cls(
                objective=raw["objective"],
                seed=raw["seed"],
                sources=sources,
                init_design=init_design,
                max_steps=raw.get("max_steps"),
                budget=raw.get("budget"),
                refit_every=raw.get("refit_every", 5),
                acquisition=acq,
                reactor=reactor,
                hours_per_cost=raw.get("hours_per_cost", 24.0),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed campaign config: {exc}") from exc


def default_syngas_config(
    low_cost: float = 0.05, seed: int = 0, budget: float | None = None,
    max_steps: int | None = None, reactor: ReactorConfig | None = None,
    manual_high: bool = False,
) -> CampaignConfig:
    high_kind = "external-manual" if manual_high else "synthetic-high-fidelity"
    return CampaignConfig(
        objective="syngas",
        seed=seed,
        sources=(
            SourceSpec(index=0, kind=high_kind, cost=1.0, label="high fidelity"),
            SourceSpec(index=1, kind="low-fidelity-sim", cost=low_cost, label="ideal mixing model"),
        ),
        init_design={0: 0 if manual_high else 4, 1: 8},
        max_steps=max_steps,
        budget=budget,
        reactor=reactor if reactor is not None else default_reactor_config(),
    )


def default_hartmann_config(
    low_cost: float = 0.05, seed: int = 0, budget: float | None = None,
    max_steps: int | None = None,
) -> CampaignConfig:
    return CampaignConfig(
        objective="hartmann6mf",
        seed=seed,
        sources=(
            SourceSpec(index=0, kind="hartmann6-accuracy", cost=1.0, fidelity=1.0, label="full"),
            SourceSpec(index=1, kind="hartmann6-accuracy", cost=low_cost, fidelity=0.5, label="reduced"),
        ),
        init_design={0: 4, 1: 8},
        max_steps=max_steps,
        budget=budget,
    )


def domain_for(config: CampaignConfig):
    if config.objective == "syngas":
        return SyngasDomain()
    return UnitCubeDomain(6, name="hartmann6")


def build_evaluators(config: CampaignConfig) -> dict:
    """Normalized-point callables per source; None for manual sources."""
    out: dict = {}
    for spec in config.sources:
        if spec.kind == "external-manual":
            out[spec.index] = None
        elif spec.kind == "low-fidelity-sim":
            rc = config.reactor or default_reactor_config()
            out[spec.index] = lambda u, rc=rc: evaluate_low_fidelity(OperatingPoint.from_unit(u), rc)
        elif spec.kind == "synthetic-high-fidelity":
            rc = config.reactor or default_reactor_config()
            out[spec.index] = lambda u, rc=rc: evaluate_synthetic_high_fidelity(OperatingPoint.from_unit(u), rc)
        elif spec.kind == "hartmann6-accuracy":
            s = float(spec.fidelity)
            # Negated: campaigns maximize, the benchmark is a minimization task.
            out[spec.index] = lambda u, s=s: -hartmann6_mf(u, s)
    return out


@dataclass(frozen=True)
class Suggestion:
    id: int
    step: int
    source: int
    u: np.ndarray
    physical: dict
    mkg: float
    pred_mean: float
    pred_var: float
    fallback: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "step": self.step,
            "source": self.source,
            "u": [float(v) for v in self.u],
            "x": self.physical,
            "mkg": self.mkg,
            "pred_mean": self.pred_mean,
            "pred_var": self.pred_var,
            "fallback": self.fallback,
        }


@dataclass(frozen=True)
class Observation:
    ordinal: int
    source: int
    u: np.ndarray
    y: float
    cost: float
    phase: str                      # "init" or "step"
    suggestion_id: int | None = None
    step: int | None = None

    def to_dict(self, physical: dict | None = None) -> dict:
        out = {
            "ordinal": self.ordinal,
            "source": self.source,
            "u": [float(v) for v in self.u],
            "y": self.y,
            "cost": self.cost,
            "phase": self.phase,
            "suggestion_id": self.suggestion_id,
            "step": self.step,
        }
        if physical is not None:
            out["x"] = physical
        return out


@dataclass(frozen=True)
class Incumbent:
    kind: str        # "observed" or "posterior"
    u: np.ndarray
    physical: dict
    value: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "u": [float(v) for v in self.u],
            "x": self.physical,
            "value": self.value,
        }


def _iso(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


class Journal:
    """Append-only NDJSON event log.

    A record only counts once its newline hits the file, so a crash mid
    write leaves a recognizable partial tail: load() drops it and truncates
    the file back to the last complete record.
    """

    def __init__(self, path: Path):
        self.path = Path(path)

    def append(self, event: dict) -> None:
        line = json.dumps(event, separators=(",", ":")) + "\n"
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def load(self) -> list[dict]:
        if not self.path.exists():
            return []
        raw = self.path.read_bytes()
        if not raw:
            return []
        complete = raw.endswith(b"\n")
        lines = raw.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()
        events = []
        for i, line in enumerate(lines):
            last = i == len(lines) - 1
            try:
                event = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                if last and not complete:
                    self._truncate_to(lines[:i])
                    break
                raise JournalError(f"corrupt journal entry at line {i}: {exc}") from exc
            if last and not complete:
                # Entry parsed but its commit newline never made it to disk.
                self._truncate_to(lines[:i])
                break
            if event.get("seq") != i:
                raise JournalError(f"journal sequence gap at line {i}: {event.get('seq')!r}")
            if event.get("schema_version") != JOURNAL_SCHEMA_VERSION:
                raise JournalError(f"unsupported journal schema at line {i}")
            events.append(event)
        return events

    def _truncate_to(self, lines: list[bytes]) -> None:
        keep = b"\n".join(lines) + (b"\n" if lines else b"")
        with open(self.path, "r+b") as fh:
            fh.seek(0)
            fh.write(keep)
            fh.truncate()


class Campaign:
    """One optimization campaign; all mutation passes through its lock."""

    def __init__(self, config: CampaignConfig, directory: Path | None, clock=None):
        self.config = config
        self.directory = Path(directory) if directory is not None else None
        self.clock = clock if clock is not None else time.time
        self.domain = domain_for(config)
        self.costs = config.cost_model()
        self.journal = Journal(self.directory / JOURNAL_NAME) if self.directory else None
        self.model: gpmod.MisoGP | None = None
        self.observations: list[Observation] = []
        self.suggestions: dict[int, Suggestion] = {}
        self.results: dict[int, dict] = {}
        self.pending_id: int | None = None
        self.budget_spent: float = 0.0
        self.steps_taken: int = 0
        self.refit_count: int = 0
        self.obs_since_refit: int = 0
        self.status: str = "running"
        self.seq: int = 0
        self._lock = threading.RLock()

    # -- construction ---------------------------------------------------

    @classmethod
    def create(cls, config: CampaignConfig, directory: Path | None = None, clock=None) -> "Campaign":
        campaign = cls(config, directory, clock)
        if campaign.directory is not None:
            campaign.directory.mkdir(parents=True, exist_ok=True)
            config_path = campaign.directory / CONFIG_NAME
            config_path.write_text(json.dumps(config.to_dict(), indent=2) + "\n")
        evaluators = build_evaluators(config)
        rng = np.random.default_rng([config.seed, _RNG_INIT])
        for spec in sorted(config.sources, key=lambda s: s.index):
            count = config.init_design.get(spec.index, 0)
            if count == 0 or not spec.automated:
                continue
            points = campaign.domain.sample(rng, count)
            for u in points:
                y = float(evaluators[spec.index](u))
                campaign._append_observation(
                    Observation(
                        ordinal=len(campaign.observations), source=spec.index,
                        u=u.copy(), y=y, cost=spec.cost, phase="init",
                    )
                )
        campaign._refit()
        return campaign

    @classmethod
    def load(cls, directory: Path, clock=None) -> "Campaign":
        directory = Path(directory)
        config_path = directory / CONFIG_NAME
        if not config_path.exists():
            raise CampaignError(f"no campaign at {directory}")
        config = CampaignConfig.from_dict(json.loads(config_path.read_text()))
        campaign = cls(config, directory, clock)
        events = campaign.journal.load()
        for event in events:
            campaign._replay(event)
        campaign.seq = len(events)
        return campaign

    def _replay(self, event: dict) -> None:
        kind = event["kind"]
        payload = event["payload"]
        if kind == "observe":
            obs = Observation(
                ordinal=payload["ordinal"], source=payload["source"],
                u=np.asarray(payload["u"], dtype=float), y=payload["y"],
                cost=payload["cost"], phase=payload["phase"],
                suggestion_id=payload.get("suggestion_id"), step=payload.get("step"),
            )
            if obs.ordinal != len(self.observations):
                raise JournalError(f"observation ordinal {obs.ordinal} out of order")
            self._ingest(obs, emit=False)
            if obs.suggestion_id is not None:
                if self.pending_id != obs.suggestion_id:
                    raise JournalError(f"observe event for non pending {obs.suggestion_id}")
                self.pending_id = None
                self.results[obs.suggestion_id] = self._result_for(obs)
        elif kind == "suggest":
            suggestion = Suggestion(
                id=payload["id"], step=payload["step"], source=payload["source"],
                u=np.asarray(payload["u"], dtype=float), physical=payload["x"],
                mkg=payload["mkg"], pred_mean=payload["pred_mean"],
                pred_var=payload["pred_var"], fallback=payload["fallback"],
            )
            if self.pending_id is not None:
                raise JournalError("suggest event while another suggestion is pending")
            if suggestion.id != len(self.suggestions):
                raise JournalError(f"suggestion id {suggestion.id} out of order")
            self.suggestions[suggestion.id] = suggestion
            self.pending_id = suggestion.id
            self.steps_taken += 1
        elif kind == "refit":
            expected = payload["index"]
            if expected == self.refit_count:
                self._refit(journal=False)
            elif expected != self.refit_count - 1:
                raise JournalError(
                    f"refit event {expected} does not match replayed count {self.refit_count}"
                )
            hyper = payload.get("hyperparameters")
            if hyper is not None and self.model is not None and self.model.n_obs:
                want = np.asarray(hyper["lengthscales"], dtype=float)
                got = self.model.params.lengthscales
                if want.shape != got.shape or not np.allclose(want, got, rtol=1e-6, atol=1e-9):
                    raise JournalError("replayed hyperparameters diverge from journal")
        else:
            raise JournalError(f"unknown journal event kind {kind!r}")

    # -- journal helpers -------------------------------------------------

    def _emit(self, kind: str, payload: dict) -> None:
        if self.journal is None:
            return
        event = {
            "schema_version": JOURNAL_SCHEMA_VERSION,
            "seq": self.seq,
            "kind": kind,
            "timestamp": _iso(self.clock()),
            "payload": payload,
        }
        self.journal.append(event)
        self.seq += 1

    # -- model bookkeeping ------------------------------------------------

    def _append_observation(self, obs: Observation, journal: bool = True) -> None:
        if journal:
            self._emit("observe", obs.to_dict(physical=self.domain.physical_dict(obs.u)))
        self._ingest(obs, incremental=False)

    def _ingest(self, obs: Observation, incremental: bool | None = None, emit: bool = True) -> None:
        """Account one observation; update or refit the model as due.

        incremental=False defers model work (initial design observations;
        the fit comes with the following refit event).  emit=False is the
        replay path, which must not write to the journal.
        """
        self.observations.append(obs)
        self.budget_spent += obs.cost
        if incremental is None:
            incremental = obs.phase == "step"
        if incremental:
            self.obs_since_refit += 1
            if self.obs_since_refit >= self.config.refit_every:
                self._refit(journal=emit)
            else:
                self.model = gpmod.update(self.model, obs.source, obs.u, obs.y)

    def _refit(self, journal: bool = True) -> None:
        noise = tuple(s.noise for s in sorted(self.config.sources, key=lambda s: s.index))
        sources = np.array([o.source for o in self.observations], dtype=int)
        x = (
            np.array([o.u for o in self.observations])
            if self.observations else np.empty((0, self.domain.dim))
        )
        y = np.array([o.y for o in self.observations])
        rng = np.random.default_rng([self.config.seed, _RNG_REFIT, self.refit_count])
        self.model = gpmod.fit(sources, x, y, noise, rng=rng, dim=self.domain.dim)
        index = self.refit_count
        self.refit_count += 1
        self.obs_since_refit = 0
        if journal:
            self._emit("refit", {
                "index": index,
                "n_obs": len(self.observations),
                "log_marginal": None if self.model.fit_info is None else self.model.fit_info["log_marginal"],
                "hyperparameters": {
                    "lengthscales": self.model.params.lengthscales.tolist(),
                    "variances": self.model.params.variances.tolist(),
                },
            })

    # -- ask/tell ----------------------------------------------------------

    def suggest(self) -> Suggestion:
        """Propose the next evaluation; repeated calls return the pending one."""
        with self._lock:
            if self.pending_id is not None:
                return self.suggestions[self.pending_id]
            if self.status == "budget_exhausted":
                raise BudgetExhaustedError(f"budget {self.config.budget} is spent")
            if self.model is None:
                raise CampaignError("campaign has no fitted model (corrupt journal?)")
            rng = np.random.default_rng([self.config.seed, _RNG_STEP, self.steps_taken])
            d_set = build_discretization(self.model, self.domain, rng, self.config.acquisition)
            proposal = propose_next(
                self.model, self.domain, self.costs, rng, self.config.acquisition, d_set=d_set
            )
            cost = self.costs.cost_of(proposal.source)
            if self.config.budget is not None and self.budget_spent + cost > self.config.budget:
                self.status = "budget_exhausted"
                raise BudgetExhaustedError(
                    f"next evaluation at source {proposal.source} (cost {cost}) "
                    f"would exceed the budget {self.config.budget}"
                )
            suggestion = Suggestion(
                id=len(self.suggestions), step=self.steps_taken, source=proposal.source,
                u=proposal.u, physical=self.domain.physical_dict(proposal.u),
                mkg=proposal.value, pred_mean=proposal.pred_mean,
                pred_var=proposal.pred_var, fallback=proposal.fallback,
            )
            self._emit("suggest", suggestion.to_dict())
            self.suggestions[suggestion.id] = suggestion
            self.pending_id = suggestion.id
            self.steps_taken += 1
            return suggestion

    def record(self, suggestion_id: int, value: float, cost: float | None = None) -> dict:
        """Attach an observed value to the pending suggestion."""
        with self._lock:
            if suggestion_id in self.results:
                raise AlreadyObservedError(self.results[suggestion_id])
            if suggestion_id not in self.suggestions:
                raise UnknownSuggestionError(f"no suggestion with id {suggestion_id}")
            if self.pending_id != suggestion_id:
                raise PendingSuggestionError(
                    self.pending_id,
                    f"suggestion {suggestion_id} is not the pending one",
                )
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidObservationError(f"observed value must be finite, got {value!r}")
            suggestion = self.suggestions[suggestion_id]
            actual_cost = self.costs.cost_of(suggestion.source) if cost is None else float(cost)
            if not (math.isfinite(actual_cost) and actual_cost > 0.0):
                raise InvalidObservationError(f"cost must be positive, got {cost!r}")
            obs = Observation(
                ordinal=len(self.observations), source=suggestion.source,
                u=suggestion.u.copy(), y=float(value), cost=actual_cost,
                phase="step", suggestion_id=suggestion_id, step=suggestion.step,
            )
            self._emit("observe", obs.to_dict(physical=self.domain.physical_dict(obs.u)))
            self._ingest(obs)
            self.pending_id = None
            result = self._result_for(obs)
            self.results[suggestion_id] = result
            return result

    def _result_for(self, obs: Observation) -> dict:
        return {
            "suggestion_id": obs.suggestion_id,
            "ordinal": obs.ordinal,
            "source": obs.source,
            "u": [float(v) for v in obs.u],
            "x": self.domain.physical_dict(obs.u),
            "value": obs.y,
            "cost": obs.cost,
            "step": obs.step,
        }

    def step(self, evaluators: dict | None = None) -> tuple[Suggestion, dict]:
        """suggest() plus an automated evaluation of the chosen source."""
        with self._lock:
            if evaluators is None:
                evaluators = build_evaluators(self.config)
            suggestion = self.suggest()
            evaluator = evaluators.get(suggestion.source)
            if evaluator is None:
                raise CampaignError(
                    f"source {suggestion.source} is manual; step() needs an automated evaluator"
                )
            y = float(evaluator(suggestion.u))
            return suggestion, self.record(suggestion.id, y)

    def run(self, n_steps: int, evaluators: dict | None = None) -> str:
        """Up to n_steps automated steps; stops early on budget exhaustion."""
        if evaluators is None:
            evaluators = build_evaluators(self.config)
        for _ in range(n_steps):
            try:
                self.step(evaluators)
            except BudgetExhaustedError:
                break
        return self.status

    # -- read side ----------------------------------------------------------

    def best_so_far(self) -> Incumbent:
        """Best observed truth-source value; posterior incumbent as fallback."""
        if not self.observations:
            raise EmptyCampaignError("campaign has no observations")
        best = None
        for obs in self.observations:
            if obs.source == 0 and (best is None or obs.y > best.y):
                best = obs
        if best is not None:
            return Incumbent(
                kind="observed", u=best.u.copy(),
                physical=self.domain.physical_dict(best.u), value=best.y,
            )
        return self.posterior_incumbent()

    def posterior_incumbent(self) -> Incumbent:
        if not self.observations:
            raise EmptyCampaignError("campaign has no observations")
        points = np.array([o.u for o in self.observations])
        mean, _ = gpmod.posterior(self.model, np.zeros(len(points), dtype=int), points)
        pick = int(np.argmax(mean))
        return Incumbent(
            kind="posterior", u=points[pick].copy(),
            physical=self.domain.physical_dict(points[pick]), value=float(mean[pick]),
        )

    def source_counts(self) -> dict:
        counts = {s.index: 0 for s in self.config.sources}
        for obs in self.observations:
            counts[obs.source] += 1
        return counts

    def summary(self) -> dict:
        with self._lock:
            try:
                best = self.best_so_far().to_dict()
            except EmptyCampaignError:
                best = None
            pending = (
                self.suggestions[self.pending_id].to_dict()
                if self.pending_id is not None else None
            )
            return {
                "objective": self.config.objective,
                "status": self.status,
                "seed": self.config.seed,
                "budget_spent": self.budget_spent,
                "budget": self.config.budget,
                "hours_per_cost": self.config.hours_per_cost,
                "steps_taken": self.steps_taken,
                "n_observations": len(self.observations),
                "source_counts": {str(k): v for k, v in self.source_counts().items()},
                "sources": [s.to_dict() for s in sorted(self.config.sources, key=lambda s: s.index)],
                "pending_suggestion": pending,
                "best": best,
            }

    def history_rows(self) -> list[dict]:
        """One row per evaluation: the history CSV content."""
        rows = []
        budget = 0.0
        incumbent: float | None = None
        for i, obs in enumerate(self.observations):
            budget += obs.cost
            if obs.source == 0 and (incumbent is None or obs.y > incumbent):
                incumbent = obs.y
            rows.append({
                "step": i,
                "source": obs.source,
                "cost": obs.cost,
                "value": obs.y,
                "incumbent": incumbent,
                "budget": budget,
            })
        return rows

    def history(self) -> list[dict]:
        with self._lock:
            return [
                obs.to_dict(physical=self.domain.physical_dict(obs.u))
                for obs in self.observations
            ]

    def posterior_slice(self, axes: list[int], n: int = 33) -> dict:
        """Posterior mean/std of the truth source on a 1D or 2D axis grid.

        Off-grid coordinates are pinned at the incumbent (or the domain
        center before any truth observation exists).
        """
        with self._lock:
            if not 1 <= len(axes) <= 2:
                raise InvalidRequestError("posterior slices are 1D or 2D")
            for axis in axes:
                if not 0 <= axis < self.domain.dim:
                    raise InvalidRequestError(f"axis {axis} outside the domain")
            if not 2 <= n <= 201:
                raise InvalidRequestError("grid size must be in [2, 201]")
            try:
                anchor = self.best_so_far().u
            except EmptyCampaignError:
                anchor = self.domain.project(np.full(self.domain.dim, 0.5))
            ticks = np.linspace(0.0, 1.0, n)
            if len(axes) == 1:
                grid = np.tile(anchor, (n, 1))
                grid[:, axes[0]] = ticks
            else:
                aa, bb = np.meshgrid(ticks, ticks, indexing="ij")
                grid = np.tile(anchor, (n * n, 1))
                grid[:, axes[0]] = aa.ravel()
                grid[:, axes[1]] = bb.ravel()
            grid = np.array([self.domain.project(u) for u in grid])
            mean, var = gpmod.posterior(self.model, np.zeros(len(grid), dtype=int), grid)
            return {
                "axes": axes,
                "n": n,
                "ticks": [float(t) for t in ticks],
                "anchor": [float(v) for v in anchor],
                "mean": [float(v) for v in mean],
                "std": [float(math.sqrt(max(v, 0.0))) for v in var],
            }
