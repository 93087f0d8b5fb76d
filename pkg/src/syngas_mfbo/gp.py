"""Gaussian process over (source, x) pairs for multi-source campaigns.

One squared exponential kernel is shared by every information source and
each source above index zero adds its own squared exponential discrepancy
term, so source zero is the quantity the campaign actually optimizes and
the others are cheap but biased views of it:

    cov((l, x), (l', x')) = k_shared(x, x') + [l == l' and l >= 1] k_l(x, x')

Inference is exact via Cholesky factorization.  Targets are standardized
internally; every public mean and covariance is in objective units.
Observation noise is a fixed per-source variance in standardized units
(1e-6 suits deterministic simulators).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

__all__ = [
    "GPError",
    "InformationSource",
    "KernelParams",
    "MisoGP",
    "log_marginal_likelihood",
    "fit",
    "posterior",
    "update",
    "model_to_dict",
    "model_from_dict",
]

JITTER_LADDER = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)
DEFAULT_NOISE = 1e-6
LENGTHSCALE_BOUNDS = (1e-2, 10.0)
VARIANCE_BOUNDS = (1e-4, 1e4)
SERIAL_VERSION = 1


class GPError(RuntimeError):
    """Raised when inference fails (for example a non PSD Gram matrix)."""


@dataclass(frozen=True)
class InformationSource:
    """Descriptor of one information source."""

    index: int
    label: str = ""
    noise: float = DEFAULT_NOISE  # observation noise variance, standardized units


@dataclass(frozen=True)
class KernelParams:
    """Hyperparameters: row 0 is the shared kernel, row q the discrepancy
    kernel of source q."""

    lengthscales: np.ndarray  # (n_components, dim)
    variances: np.ndarray     # (n_components,)

    @property
    def n_components(self) -> int:
        return len(self.variances)

    @property
    def dim(self) -> int:
        return self.lengthscales.shape[1]


def _se_cross(x1: np.ndarray, x2: np.ndarray, lengthscales: np.ndarray, variance: float) -> np.ndarray:
    diff = (x1[:, None, :] - x2[None, :, :]) / lengthscales
    return variance * np.exp(-0.5 * np.einsum("ijk,ijk->ij", diff, diff))


def kernel_cross(params: KernelParams, l1, x1, l2, x2) -> np.ndarray:
    """Cross covariance between two batches of (source, x) pairs."""
    k = _se_cross(x1, x2, params.lengthscales[0], params.variances[0])
    for q in range(1, params.n_components):
        rows = np.flatnonzero(l1 == q)
        cols = np.flatnonzero(l2 == q)
        if rows.size and cols.size:
            k[np.ix_(rows, cols)] += _se_cross(
                x1[rows], x2[cols], params.lengthscales[q], params.variances[q]
            )
    return k


def kernel_diag(params: KernelParams, l: np.ndarray) -> np.ndarray:
    """Prior variances of a batch of (source, x) pairs."""
    d = np.full(len(l), params.variances[0])
    for q in range(1, params.n_components):
        d[l == q] += params.variances[q]
    return d


def _pack(params: KernelParams) -> np.ndarray:
    parts = []
    for q in range(params.n_components):
        parts.append(np.log(params.lengthscales[q]))
        parts.append([math.log(params.variances[q])])
    return np.concatenate(parts)


def _unpack(theta: np.ndarray, n_components: int, dim: int) -> KernelParams:
    theta = np.asarray(theta, dtype=float)
    lengthscales = np.empty((n_components, dim))
    variances = np.empty(n_components)
    for q in range(n_components):
        base = q * (dim + 1)
        lengthscales[q] = np.exp(theta[base:base + dim])
        variances[q] = math.exp(theta[base + dim])
    return KernelParams(lengthscales=lengthscales, variances=variances)


def _gram(params: KernelParams, l, x, noise, jitter: float) -> np.ndarray:
    k = kernel_cross(params, l, x, l, x)
    k[np.diag_indices_from(k)] += np.asarray(noise, dtype=float)[l] + jitter
    return k


def _chol_with_ladder(gram_builder) -> tuple[np.ndarray, float]:
    """Factor with escalating diagonal jitter; raise after the last rung."""
    last = None
    for jitter in JITTER_LADDER:
        try:
            return cholesky(gram_builder(jitter), lower=True), jitter
        except np.linalg.LinAlgError as exc:
            last = exc
    raise GPError(f"Gram matrix is not positive definite: {last}")


def log_marginal_likelihood(
    params: KernelParams,
    sources: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    noise,
    jitter: float = JITTER_LADDER[0],
    with_grad: bool = False,
):
    """Gaussian log marginal likelihood of standardized targets y.

    With ``with_grad`` also returns the gradient with respect to the packed
    log hyperparameters (log lengthscales and log variance per component,
    components in order).
    """
    sources = np.asarray(sources)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    gram = _gram(params, sources, x, noise, jitter)
    chol = cholesky(gram, lower=True)
    alpha = cho_solve((chol, True), y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.sum(np.log(np.diag(chol))))
        - 0.5 * n * math.log(2.0 * math.pi)
    )
    if not with_grad:
        return lml

    inv = cho_solve((chol, True), np.eye(n))
    m = np.outer(alpha, alpha) - inv
    grad = np.zeros(params.n_components * (params.dim + 1))
    for q in range(params.n_components):
        if q == 0:
            rows = np.arange(n)
        else:
            rows = np.flatnonzero(sources == q)
        if rows.size == 0:
            continue
        xq = x[rows]
        kq = _se_cross(xq, xq, params.lengthscales[q], params.variances[q])
        mq = m[np.ix_(rows, rows)]
        base = q * (params.dim + 1)
        for d in range(params.dim):
            sq = (xq[:, d, None] - xq[None, :, d]) ** 2 / params.lengthscales[q, d] ** 2
            grad[base + d] = 0.5 * float(np.sum(mq * kq * sq))
        grad[base + params.dim] = 0.5 * float(np.sum(mq * kq))
    return lml, grad


@dataclass
class MisoGP:
    """A fitted multi-source GP.  Treat as immutable; update() returns a copy."""

    params: KernelParams
    noise: tuple            # per-source observation noise variance (standardized)
    sources: np.ndarray     # (n,) int source index per observation
    x: np.ndarray           # (n, dim)
    y: np.ndarray           # (n,) raw targets, objective units
    y_center: float
    y_scale: float
    jitter: float
    chol: np.ndarray | None
    alpha: np.ndarray | None
    prior_mean: float = 0.0
    fit_info: dict | None = field(default=None, repr=False, compare=False)

    @property
    def n_obs(self) -> int:
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def n_sources(self) -> int:
        return len(self.noise)

    def y_standardized(self) -> np.ndarray:
        return (self.y - self.y_center) / self.y_scale


def _standardization(y: np.ndarray, prior_mean: float) -> tuple[float, float]:
    if len(y) == 0:
        return float(prior_mean), 1.0
    center = float(np.mean(y))
    scale = float(np.std(y))
    if scale < 1e-12:
        scale = 1.0
    return center, scale


def _default_start(n_components: int, dim: int) -> KernelParams:
    lengthscales = np.full((n_components, dim), 0.5)
    variances = np.array([1.0] + [0.05] * (n_components - 1))
    return KernelParams(lengthscales=lengthscales, variances=variances)


def _random_start(rng: np.random.Generator, n_components: int, dim: int) -> KernelParams:
    lengthscales = np.exp(rng.uniform(math.log(0.05), math.log(2.0), size=(n_components, dim)))
    variances = np.empty(n_components)
    variances[0] = math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
    for q in range(1, n_components):
        variances[q] = math.exp(rng.uniform(math.log(1e-3), math.log(1.0)))
    return KernelParams(lengthscales=lengthscales, variances=variances)


def _finalize(params, noise, sources, x, y, center, scale, prior_mean, fit_info=None) -> MisoGP:
    y_std = (y - center) / scale
    chol, jitter = _chol_with_ladder(lambda j: _gram(params, sources, x, noise, j))
    alpha = cho_solve((chol, True), y_std)
    return MisoGP(
        params=params,
        noise=tuple(float(v) for v in noise),
        sources=sources,
        x=x,
        y=y,
        y_center=center,
        y_scale=scale,
        jitter=jitter,
        chol=chol,
        alpha=alpha,
        prior_mean=prior_mean,
        fit_info=fit_info,
    )


def fit(
    sources: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    noise,
    *,
    n_restarts: int = 8,
    rng: np.random.Generator | None = None,
    prior_mean: float = 0.0,
    dim: int | None = None,
) -> MisoGP:
    """Fit kernel hyperparameters by multi-start likelihood maximization.

    ``noise`` lists the per-source observation noise variance; its length
    sets how many sources the model covers.  Restart 0 starts from fixed
    moderate hyperparameters, the rest from draws of ``rng``; the restart
    with the best final log marginal likelihood wins, earlier restarts win
    ties, so a fixed rng makes the whole fit deterministic.
    """
    sources = np.asarray(sources, dtype=int)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    if rng is None:
        rng = np.random.default_rng(0)
    n_components = len(noise)
    if len(y) == 0:
        if dim is None:
            raise GPError("fitting an empty model needs an explicit dim")
        params = _default_start(n_components, dim)
        return MisoGP(
            params=params, noise=tuple(float(v) for v in noise),
            sources=sources.reshape(0), x=np.empty((0, dim)), y=y.reshape(0),
            y_center=float(prior_mean), y_scale=1.0, jitter=JITTER_LADDER[0],
            chol=None, alpha=None, prior_mean=float(prior_mean),
        )
    dim = x.shape[1]
    if np.any(sources < 0) or np.any(sources >= n_components):
        raise GPError("observation source index outside configured sources")
    if not np.all(np.isfinite(y)):
        raise GPError("targets must be finite")

    center, scale = _standardization(y, prior_mean)
    y_std = (y - center) / scale

    lo = [math.log(LENGTHSCALE_BOUNDS[0])] * dim + [math.log(VARIANCE_BOUNDS[0])]
    hi = [math.log(LENGTHSCALE_BOUNDS[1])] * dim + [math.log(VARIANCE_BOUNDS[1])]
    bounds = list(zip(lo * n_components, hi * n_components))

    def objective(theta):
        params = _unpack(theta, n_components, dim)
        try:
            lml, grad = log_marginal_likelihood(
                params, sources, x, y_std, noise, with_grad=True
            )
        except np.linalg.LinAlgError:
            return 1e25, np.zeros_like(theta)
        return -lml, -grad

    starts = [_default_start(n_components, dim)]
    starts += [_random_start(rng, n_components, dim) for _ in range(max(0, n_restarts - 1))]

    best_theta = None
    best_lml = -math.inf
    initial_lmls, final_lmls = [], []
    for start in starts:
        theta0 = np.clip(_pack(start), [b[0] for b in bounds], [b[1] for b in bounds])
        f0, _ = objective(theta0)
        initial_lmls.append(-f0)
        result = minimize(
            objective, theta0, jac=True, method="L-BFGS-B", bounds=bounds,
            options={"maxiter": 200},
        )
        f_final, _ = objective(result.x)
        final_lmls.append(-f_final)
        if -f_final > best_lml:
            best_lml = -f_final
            best_theta = result.x
    if best_theta is None or not math.isfinite(best_lml):
        raise GPError("every restart failed to produce a finite likelihood")

    params = _unpack(best_theta, n_components, dim)
    info = {
        "log_marginal": best_lml,
        "initial_lmls": initial_lmls,
        "final_lmls": final_lmls,
    }
    return _finalize(params, noise, sources, x, y, center, scale, float(prior_mean), info)


def posterior(model: MisoGP, sources, x, full_cov: bool = False):
    """Posterior mean and variance (or covariance) at (source, x) queries.

    Means and (co)variances are de-standardized to objective units.  The
    full covariance is symmetrized but no jitter is added; variances are
    clipped at zero.
    """
    sources = np.asarray(sources, dtype=int)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    prior_var = kernel_diag(model.params, sources)
    if model.n_obs == 0:
        mean = np.full(len(sources), model.y_center)
        if full_cov:
            cov = kernel_cross(model.params, sources, x, sources, x) * model.y_scale**2
            return mean, 0.5 * (cov + cov.T)
        return mean, prior_var * model.y_scale**2

    k_cross = kernel_cross(model.params, model.sources, model.x, sources, x)
    mean_std = k_cross.T @ model.alpha
    mean = model.y_center + model.y_scale * mean_std
    v = solve_triangular(model.chol, k_cross, lower=True)
    if full_cov:
        prior = kernel_cross(model.params, sources, x, sources, x)
        cov = (prior - v.T @ v) * model.y_scale**2
        return mean, 0.5 * (cov + cov.T)
    var = np.clip(prior_var - np.einsum("ij,ij->j", v, v), 0.0, None)
    return mean, var * model.y_scale**2


def update(model: MisoGP, source: int, x_new, y_new: float) -> MisoGP:
    """Condition on one more observation without re-estimating hyperparameters.

    Appends a row to the stored Cholesky factor; if the appended pivot is
    not positive the factorization is rebuilt with the next jitter rung.
    Matches a from-scratch refactorization to tight tolerance.
    """
    x_new = np.asarray(x_new, dtype=float).reshape(1, -1)
    if not (0 <= source < model.n_sources):
        raise GPError(f"source {source} outside configured sources")
    if not math.isfinite(y_new):
        raise GPError("observation value must be finite")

    sources = np.concatenate([model.sources, [source]])
    x = np.vstack([model.x, x_new]) if model.n_obs else x_new
    y = np.concatenate([model.y, [float(y_new)]])
    if model.n_obs == 0:
        return _finalize(
            model.params, model.noise, sources, x, y,
            model.y_center, model.y_scale, model.prior_mean,
        )

    src_arr = np.asarray([source])
    k_vec = kernel_cross(model.params, model.sources, model.x, src_arr, x_new)[:, 0]
    kappa = float(kernel_diag(model.params, src_arr)[0]) + model.noise[source] + model.jitter
    m = solve_triangular(model.chol, k_vec, lower=True)
    pivot = kappa - float(m @ m)
    if pivot <= 0.0:
        chol, jitter = _chol_with_ladder(
            lambda j: _gram(model.params, sources, x, model.noise, j)
        )
    else:
        n = model.n_obs
        chol = np.zeros((n + 1, n + 1))
        chol[:n, :n] = model.chol
        chol[n, :n] = m
        chol[n, n] = math.sqrt(pivot)
        jitter = model.jitter
    y_std = (y - model.y_center) / model.y_scale
    alpha = cho_solve((chol, True), y_std)
    return replace(
        model, sources=sources, x=x, y=y, chol=chol, alpha=alpha,
        jitter=jitter, fit_info=None,
    )


def model_to_dict(model: MisoGP) -> dict:
    """JSON-compatible snapshot; floats survive the round trip exactly."""
    return {
        "serial_version": SERIAL_VERSION,
        "kernel": {
            "lengthscales": model.params.lengthscales.tolist(),
            "variances": model.params.variances.tolist(),
        },
        "noise": list(model.noise),
        "jitter": model.jitter,
        "y_center": model.y_center,
        "y_scale": model.y_scale,
        "prior_mean": model.prior_mean,
        "train": {
            "sources": model.sources.tolist(),
            "x": model.x.tolist(),
            "y": model.y.tolist(),
        },
    }


def model_from_dict(raw: dict) -> MisoGP:
    if raw.get("serial_version") != SERIAL_VERSION:
        raise GPError(f"unsupported model serial_version {raw.get('serial_version')!r}")
    params = KernelParams(
        lengthscales=np.asarray(raw["kernel"]["lengthscales"], dtype=float),
        variances=np.asarray(raw["kernel"]["variances"], dtype=float),
    )
    sources = np.asarray(raw["train"]["sources"], dtype=int)
    x = np.asarray(raw["train"]["x"], dtype=float)
    y = np.asarray(raw["train"]["y"], dtype=float)
    if len(y) == 0:
        return MisoGP(
            params=params, noise=tuple(raw["noise"]), sources=sources,
            x=x.reshape(0, params.dim), y=y, y_center=raw["y_center"],
            y_scale=raw["y_scale"], jitter=raw["jitter"], chol=None, alpha=None,
            prior_mean=raw["prior_mean"],
        )
    gram = _gram(params, sources, x, raw["noise"], raw["jitter"])
    chol = cholesky(gram, lower=True)
    y_std = (y - raw["y_center"]) / raw["y_scale"]
    alpha = cho_solve((chol, True), y_std)
    return MisoGP(
        params=params, noise=tuple(raw["noise"]), sources=sources, x=x, y=y,
        y_center=raw["y_center"], y_scale=raw["y_scale"], jitter=raw["jitter"],
        chol=chol, alpha=alpha, prior_mean=raw["prior_mean"],
    )


def roundtrip_json(model: MisoGP) -> MisoGP:
    """Serialize to a JSON string and back (exactness check helper)."""
    return model_from_dict(json.loads(json.dumps(model_to_dict(model))))
