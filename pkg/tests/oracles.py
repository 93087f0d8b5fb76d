"""Reference computations the test suite checks the package against.

Everything here is recomputed from first principles with plain numpy and
scipy building blocks; no solver or algorithm code is shared with the
package.  Slow and simple on purpose.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate


# -- reactor: dense scan plus long bisection -------------------------------


def _co_uptake(c, kin):
    return kin.q_max_co * c / (kin.k_s_co + c + c * c / kin.k_i_co)


def _h2_uptake(c, c_co, kin):
    return (
        kin.q_max_h2
        * (c / (kin.k_s_h2 + c))
        / (1.0 + c_co / kin.k_i_co_on_h2)
    )


def _first_root(kla, sat, cx, uptake, grid_n=4001, iters=200):
    """Leftmost root of kla*(sat - c) = uptake(c)*cx per row, on [0, sat].

    kla, sat, cx: 1-D arrays, kla > 0 required.  uptake broadcasts over a
    (rows, columns) concentration matrix.
    """
    kla2 = kla[:, None]
    sat2 = sat[:, None]
    cx2 = cx[:, None]

    def balance(c):
        return kla2 * (sat2 - c) - uptake(c) * cx2

    t = np.linspace(0.0, 1.0, grid_n)
    crossed = balance(sat2 * t[None, :]) <= 0.0
    crossed[:, 0] = False  # balance(0) >= 0 by construction
    has_root = crossed.any(axis=1)
    first = np.maximum(np.argmax(crossed, axis=1), 1)
    lo = sat * t[first - 1]
    hi = sat * t[first]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        positive = balance(mid[:, None])[:, 0] > 0.0
        lo = np.where(positive, mid, lo)
        hi = np.where(positive, hi, mid)
    root = np.where(has_root, 0.5 * (lo + hi), sat)
    return np.where(sat > 0.0, root, 0.0)


def steady_concentrations(points, constants, kinetics, grid_n=4001):
    """Dissolved (c_co, c_h2) arrays for a list of operating points."""
    p = np.array([pt.p for pt in points])
    n_gs = np.array([pt.n_gs for pt in points])
    d_b = np.array([pt.d_b for pt in points])
    y_co = np.array([pt.y_co for pt in points])
    y_h2 = np.array([pt.y_h2 for pt in points])
    cx = np.array([pt.c_x for pt in points]) * 1000.0 / kinetics.biomass_molar_mass

    holdup = (
        n_gs * constants.gas_constant * constants.temperature
        / (constants.cross_section * p)
    ) / constants.holdup_velocity_scale
    area = 6.0 * holdup / d_b
    c_co = _first_root(
        constants.k_l_co * area,
        kinetics.henry_co * p * y_co,
        cx,
        lambda c: _co_uptake(c, kinetics),
        grid_n,
    )
    c_h2 = _first_root(
        constants.k_l_h2 * area,
        kinetics.henry_h2 * p * y_h2,
        cx,
        lambda c: _h2_uptake(c, c_co[:, None], kinetics),
        grid_n,
    )
    return c_co, c_h2


# -- acquisition: Monte Carlo expectation of a max of lines ----------------


def expected_max_mc(intercepts, slopes, n_draws=2_000_000, seed=0, chunk=200_000):
    """(estimate, standard error) of E[max_j(a_j + b_j Z)] - max_j a_j."""
    a = np.asarray(intercepts, dtype=float)
    b = np.asarray(slopes, dtype=float)
    rng = np.random.default_rng(seed)
    base = float(np.max(a))
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_draws:
        m = min(chunk, n_draws - done)
        z = rng.standard_normal(m)
        v = np.max(a[:, None] + b[:, None] * z[None, :], axis=0) - base
        total += float(v.sum())
        total_sq += float((v * v).sum())
        done += m
    mean = total / n_draws
    var = max(total_sq / n_draws - mean * mean, 0.0)
    return mean, math.sqrt(var / n_draws)


# -- statistics: Student-t tail by quadrature -------------------------------


def t_two_sided_p(t_stat, df):
    """Two-sided p-value by numerical integration of the t density."""
    if not math.isfinite(t_stat):
        return 0.0
    norm = math.gamma((df + 1) / 2.0) / (
        math.sqrt(df * math.pi) * math.gamma(df / 2.0)
    )

    def density(x):
        return norm * (1.0 + x * x / df) ** (-(df + 1) / 2.0)

    tail, _ = integrate.quad(density, abs(t_stat), np.inf)
    return min(2.0 * tail, 1.0)


# -- calculus: central finite differences -----------------------------------


def fd_gradient(fun, theta, eps=1e-6):
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        up = theta.copy()
        dn = theta.copy()
        up[i] += eps
        dn[i] -= eps
        grad[i] = (fun(up) - fun(dn)) / (2.0 * eps)
    return grad
