"""Cost sensitive knowledge gradient over discrete information sources.

One evaluation at (source l, point x) moves the posterior mean at source 0
along a known direction: over a discretization D of the design space the
one step mean is mu(d_j) + b_j Z with Z standard normal.  The expected
gain of the best mean over D, divided by the evaluation cost c_l(x), is
the score maximized by propose_next.  The expectation of a maximum of
affine functions of Z has a closed form via the upper envelope of the
lines, no sampling involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.linalg import solve_triangular

from . import gp as gpmod
from .gp import MisoGP, kernel_cross, kernel_diag

__all__ = [
    "AcquisitionError",
    "CostModel",
    "AcquisitionConfig",
    "DiscretizationSet",
    "Proposal",
    "expected_max_affine",
    "predictive_weights",
    "mkg",
    "build_discretization",
    "propose_next",
]

SLOPE_TOL = 1e-12
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_2 = math.sqrt(2.0)


class AcquisitionError(RuntimeError):
    pass


@dataclass(frozen=True)
class CostModel:
    """Per-source evaluation costs, constant over the design space."""

    costs: tuple

    def __post_init__(self):
        if len(self.costs) == 0:
            raise AcquisitionError("cost model needs at least one source")
        for c in self.costs:
            if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0.0):
                raise AcquisitionError(f"costs must be finite and positive, got {c!r}")

    @property
    def n_sources(self) -> int:
        return len(self.costs)

    def cost_of(self, source: int, x=None) -> float:
        return float(self.costs[source])


@dataclass(frozen=True)
class AcquisitionConfig:
    """Candidate generation and refinement knobs."""

    n_candidates: int = 100
    refine_top: int = 5
    refine_steps: int = 20
    refine_step0: float = 0.1
    refine_shrink: float = 0.8
    fresh_discretization: int = 256
    discretization_cap: int = 2048
    tie_rel: float = 1e-9
    variance_floor: float = 1e-14

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "AcquisitionConfig":
        return cls(**raw)


@dataclass(frozen=True)
class DiscretizationSet:
    """Source-0 locations over which the one step posterior max is tracked."""

    points: np.ndarray  # (m, dim)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Proposal:
    source: int
    u: np.ndarray          # normalized coordinates
    value: float           # cost scaled knowledge gradient at selection
    fallback: bool         # True when every candidate scored <= 0
    pred_mean: float       # posterior mean of the source-0 objective at u
    pred_var: float
    diagnostics: list = field(default_factory=list, repr=False)


def _phi(z: float) -> float:
    return math.exp(-0.5 * z * z) / _SQRT_2PI


def _cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT_2)


def expected_max_affine(intercepts, slopes) -> float:
    """E[max_j (a_j + b_j Z)] - max_j a_j for standard normal Z, exactly.

    Lines are sorted by slope; slope groups separated by less than the
    tolerance collapse to their best intercept; lines that never attain
    the upper envelope are dropped; the expectation accumulates between
    consecutive envelope breakpoints.  Always >= 0 up to roundoff.
    """
    a = np.asarray(intercepts, dtype=float).ravel()
    b = np.asarray(slopes, dtype=float).ravel()
    if a.size == 0 or a.shape != b.shape:
        raise AcquisitionError("need equally many intercepts and slopes, at least one")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise AcquisitionError("intercepts and slopes must be finite")

    a_max = float(np.max(a))
    order = np.lexsort((a, b))
    a = a[order]
    b = b[order]

    if a.size > 1:
        group_start = np.empty(len(b), dtype=bool)
        group_start[0] = True
        np.greater(np.diff(b), SLOPE_TOL, out=group_start[1:])
        starts = np.flatnonzero(group_start)
        a = np.maximum.reduceat(a, starts)
        b = b[starts]

    # Plain float lists: this runs a few hundred thousand times per
    # campaign and numpy scalar indexing is an order of magnitude slower.
    ka = a.tolist()
    kb = b.tolist()
    m = len(ka)
    if m == 1:
        return float(ka[0] - a_max)  # constant in Z; zero unless roundoff

    # Upper envelope: pop lines whose winning interval collapses.
    idx = [0]
    zs: list[float] = []
    for j in range(1, m):
        aj = ka[j]
        bj = kb[j]
        while True:
            t = idx[-1]
            z = (ka[t] - aj) / (bj - kb[t])
            if zs and z <= zs[-1]:
                idx.pop()
                zs.pop()
            else:
                idx.append(j)
                zs.append(z)
                break

    # E[max] = a_last + sum over breakpoints of db * (phi(z) + z Phi(z)).
    e = ka[idx[-1]]
    for t, z in enumerate(zs):
        db = kb[idx[t + 1]] - kb[idx[t]]
        if z > 40.0:
            e += db * z
        elif z >= -40.0:
            e += db * (_phi(z) + z * _cdf(z))
    return float(e - a_max)


class _KgContext:
    """Shared per-proposal quantities: posterior means over D and the
    triangular solves reused by every candidate."""

    def __init__(self, model: MisoGP, d_set: DiscretizationSet, variance_floor: float = 1e-14):
        self.model = model
        self.variance_floor = variance_floor
        self.d_points = np.atleast_2d(np.asarray(d_set.points, dtype=float))
        m = len(self.d_points)
        d_sources = np.zeros(m, dtype=int)
        mean, _ = gpmod.posterior(model, d_sources, self.d_points)
        self.a = mean
        self._prior_d = None
        if model.n_obs:
            k_train_d = kernel_cross(
                model.params, model.sources, model.x, d_sources, self.d_points
            )
            self.v_d = solve_triangular(model.chol, k_train_d, lower=True)
        else:
            self.v_d = None

    def weights(self, source: int, x: np.ndarray):
        """Slope vectors b (|D| x m_cand) and candidate variances, objective units."""
        model = self.model
        x = np.atleast_2d(np.asarray(x, dtype=float))
        mc = len(x)
        lc = np.full(mc, source, dtype=int)
        d_sources = np.zeros(len(self.d_points), dtype=int)
        cross = kernel_cross(model.params, d_sources, self.d_points, lc, x)
        var = kernel_diag(model.params, lc).copy()
        if model.n_obs:
            k_train_c = kernel_cross(model.params, model.sources, model.x, lc, x)
            w = solve_triangular(model.chol, k_train_c, lower=True)
            cross = cross - self.v_d.T @ w
            var = var - np.einsum("ij,ij->j", w, w)
        var = np.clip(var, 0.0, None)
        denom = np.sqrt(var + model.noise[source])
        b = model.y_scale * cross / denom
        b[:, var < self.variance_floor] = 0.0
        return b, var * model.y_scale**2

    def kg_batch(self, source: int, x: np.ndarray) -> np.ndarray:
        b, _ = self.weights(source, x)
        return np.array([expected_max_affine(self.a, b[:, j]) for j in range(b.shape[1])])


def predictive_weights(model: MisoGP, d_set: DiscretizationSet, source: int, x):
    """Intercepts a (current posterior means over D) and slopes b of the one
    step posterior mean at source 0 after observing (source, x)."""
    ctx = _KgContext(model, d_set)
    b, _ = ctx.weights(source, np.asarray(x, dtype=float).reshape(1, -1))
    return ctx.a.copy(), b[:, 0]


def mkg(model: MisoGP, source: int, x, d_set: DiscretizationSet, costs: CostModel) -> float:
    """Cost scaled knowledge gradient of one evaluation at (source, x)."""
    a, b = predictive_weights(model, d_set, source, x)
    return expected_max_affine(a, b) / costs.cost_of(source, x)


def build_discretization(
    model: MisoGP, domain, rng: np.random.Generator, config: AcquisitionConfig
) -> DiscretizationSet:
    """Previously sampled locations plus a fresh space filling batch."""
    fresh = domain.sample(rng, config.fresh_discretization)
    if model.n_obs:
        _, first = np.unique(model.x, axis=0, return_index=True)
        sampled = model.x[np.sort(first)]
    else:
        sampled = np.empty((0, domain.dim))
    room = max(config.discretization_cap - len(sampled), 0)
    points = np.vstack([sampled, fresh[:room]])
    if len(points) == 0:
        raise AcquisitionError("empty discretization")
    return DiscretizationSet(points=points)


def propose_next(
    model: MisoGP,
    domain,
    costs: CostModel,
    rng: np.random.Generator,
    config: AcquisitionConfig = AcquisitionConfig(),
    d_set: DiscretizationSet | None = None,
    collect_diagnostics: bool = False,
) -> Proposal:
    """Pick the (source, point) with the best cost scaled knowledge gradient.

    Per source: score a space filling candidate pool, then polish the best
    few by coordinate moves with a shrinking step.  The best score across
    sources wins; scores within a relative tolerance tie break toward the
    cheaper-to-disambiguate lower source index, then toward the earlier
    candidate.  If nothing scores positive the proposal falls back to the
    highest posterior variance candidate at source 0 and says so.
    """
    if d_set is None:
        d_set = build_discretization(model, domain, rng, config)
    ctx = _KgContext(model, d_set, config.variance_floor)

    per_source: list[tuple[int, np.ndarray, np.ndarray]] = []
    diagnostics: list = []
    source0_pool = None
    for source in range(costs.n_sources):
        pool = domain.sample(rng, config.n_candidates)
        cost = costs.cost_of(source)
        values = ctx.kg_batch(source, pool) / cost
        if source == 0:
            source0_pool = pool

        n_top = min(config.refine_top, len(pool))
        top_order = np.argsort(-values, kind="stable")[:n_top]
        tops = pool[top_order].copy()
        top_values = values[top_order].copy()
        step = config.refine_step0
        for _ in range(config.refine_steps):
            moves = []
            for t in range(n_top):
                for coord in range(domain.dim):
                    for sign in (1.0, -1.0):
                        u = tops[t].copy()
                        u[coord] += sign * step
                        moves.append((t, domain.project(u)))
            batch = np.asarray([u for _, u in moves])
            move_values = ctx.kg_batch(source, batch) / cost
            best_move = {}
            for (t, u), v in zip(moves, move_values):
                if t not in best_move or v > best_move[t][0]:
                    best_move[t] = (v, u)
            for t, (v, u) in best_move.items():
                if v > top_values[t]:
                    top_values[t] = v
                    tops[t] = u
            step *= config.refine_shrink

        cand = np.vstack([pool, tops])
        vals = np.concatenate([values, top_values])
        per_source.append((source, cand, vals))
        if collect_diagnostics:
            for j in range(len(cand)):
                diagnostics.append(
                    {"source": source, "u": [float(v) for v in cand[j]], "mkg": float(vals[j])}
                )

    best = max(float(np.max(vals)) for _, _, vals in per_source)
    if best <= 0.0:
        _, var0 = gpmod.posterior(model, np.zeros(len(source0_pool), dtype=int), source0_pool)
        pick = int(np.argmax(var0))
        mean, var = gpmod.posterior(model, [0], source0_pool[pick][None, :])
        return Proposal(
            source=0, u=source0_pool[pick].copy(), value=best, fallback=True,
            pred_mean=float(mean[0]), pred_var=float(var[0]), diagnostics=diagnostics,
        )

    threshold = best - config.tie_rel * abs(best)
    for source, cand, vals in per_source:
        hits = np.flatnonzero(vals >= threshold)
        if hits.size:
            pick = int(hits[0])
            u = cand[pick].copy()
            mean, var = gpmod.posterior(model, [0], u[None, :])
            return Proposal(
                source=source, u=u, value=float(vals[pick]), fallback=False,
                pred_mean=float(mean[0]), pred_var=float(var[0]), diagnostics=diagnostics,
            )
    raise AcquisitionError("selection failed despite a positive best value")
