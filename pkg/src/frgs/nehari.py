"""Nehari manifold: ray function, projection scale and its derivative.

For ``I(u) = [u]^2 / 2 - int g(u)`` the ray ``h(t) = I(t u)`` has
``h'(t) = t [u]^2 - int g'(t u) u`` and ``h''(t) = [u]^2 - int g''(t u) u^2``.
The projection scale t(u) is the unique positive root of h'.

Every function takes an optional ``energy`` object providing ``seminorm_sq``,
``inner`` and ``integrate`` on raw arrays; by default the periodic torus
energy of :mod:`frgs.fracop` is used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HypothesisError, NumericalError
from .field import Grid, GridField
from .fracop import FracParams, PeriodicEnergy
from .nonlinearity import Nonlinearity

__all__ = [
    "RayScan",
    "NehariScale",
    "default_energy",
    "functional_I",
    "J_residual",
    "ray_root",
    "nehari_scale",
    "ray_scan",
    "nehari_scale_derivative",
    "tangency",
    "random_bumps",
    "manifold_gap_probe",
]

T_START = 1e-6
T_LIMIT = 1e12


@dataclass(frozen=True)
class RayScan:
    t_values: np.ndarray
    h: np.ndarray
    hp: np.ndarray
    hpp: np.ndarray
    psi: np.ndarray
    sign_changes: int


@dataclass(frozen=True)
class NehariScale:
    t_star: float
    iterations: int
    residual: float
    hpp: float


def default_energy(grid: Grid, nl: Nonlinearity) -> PeriodicEnergy:
    return PeriodicEnergy(grid, FracParams(nl.exps.s, grid.N))


def _setup(u: GridField, nl, energy):
    return energy if energy is not None else default_energy(u.grid, nl)


def functional_I(u: GridField, nl: Nonlinearity, energy=None) -> float:
    E = _setup(u, nl, energy)
    return 0.5 * E.seminorm_sq(u.values) - E.integrate(nl.g(u.values))


def J_residual(u: GridField, nl: Nonlinearity, energy=None) -> float:
    """``[u]^2 - int g'(u) u``; vanishes on the Nehari manifold (and at u = 0)."""
    E = _setup(u, nl, energy)
    return E.seminorm_sq(u.values) - E.integrate(nl.gp(u.values) * u.values)


def _check_nonzero(u: np.ndarray, nl: Nonlinearity):
    if not np.any(u):
        raise DomainError("the zero field has no Nehari projection")
    if nl.sign_mode == "positive_part" and not np.any(u > 0.0):
        raise DomainError("u+ = 0: g vanishes along the whole ray")


def ray_root(u: np.ndarray, seminorm: float, nl: Nonlinearity, integrate) -> NehariScale:
    """Positive root of ``t S - int g'(t u) u`` for a given ``S = [u]^2``."""
    _check_nonzero(u, nl)
    S = float(seminorm)
    if not S > 0.0:
        raise DomainError("nonpositive seminorm")

    def hp(t):
        return t * S - integrate(nl.gp(t * u) * u)

    def hpp(t):
        return S - integrate(nl.gpp(t * u) * u * u)

    lo = T_START
    while hp(lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise NumericalError("h' is not positive near t = 0")
    hi = lo
    while True:
        hi *= 2.0
        if hi > T_LIMIT:
            raise NumericalError(f"no sign change of h' below t = {T_LIMIT:g}")
        if hp(hi) < 0.0:
            break
        lo = hi
    t = hi
    its = 0
    for its in range(1, 500):
        f = hp(t)
        if abs(f) <= 1e-12 * max(1.0, t * S):
            break
        if f > 0.0:
            lo = t
        else:
            hi = t
        d = hpp(t)
        nt = t - f / d if d < 0.0 else 0.5 * (lo + hi)
        if not lo < nt < hi:
            nt = 0.5 * (lo + hi)
        if nt == t:
            break
        t = nt
    else:
        raise NumericalError("Nehari root iteration did not converge")
    curv = hpp(t)
    if not curv < 0.0:
        raise HypothesisError(f"h''(t*) = {curv!r} >= 0: the root is not a ray maximum")
    return NehariScale(t_star=t, iterations=its, residual=abs(hp(t)) / (t * S), hpp=curv)


def nehari_scale(u: GridField, nl: Nonlinearity, energy=None,
                 seminorm: float | None = None) -> NehariScale:
    """Unique t > 0 with t u on the Nehari manifold (the maximizer of I along the ray)."""
    E = _setup(u, nl, energy)
    _check_nonzero(u.values, nl)
    S = E.seminorm_sq(u.values) if seminorm is None else seminorm
    return ray_root(u.values, S, nl, E.integrate)


def ray_scan(u: GridField, nl: Nonlinearity, t_max: float, samples: int = 200,
             energy=None) -> RayScan:
    """Tabulate h, h', h'' and ``psi(t) = int (g'(tu) tu / 2 - g(tu))`` on (0, t_max]."""
    if samples < 2 or not t_max > 0.0:
        raise ValueError("need samples >= 2 and t_max > 0")
    E = _setup(u, nl, energy)
    _check_nonzero(u.values, nl)
    S = E.seminorm_sq(u.values)
    x = u.values
    ts = np.linspace(t_max / samples, t_max, samples)
    h, hp, hpp, psi = (np.empty(samples) for _ in range(4))
    for i, t in enumerate(ts):
        G = E.integrate(nl.g(t * x))
        Gp = E.integrate(nl.gp(t * x) * x)
        h[i] = 0.5 * t * t * S - G
        hp[i] = t * S - Gp
        hpp[i] = S - E.integrate(nl.gpp(t * x) * x * x)
        psi[i] = 0.5 * t * Gp - G
    # an exact zero sample is the root itself, not an extra crossing
    sg = np.sign(hp)
    sg = sg[sg != 0.0]
    changes = int(np.count_nonzero(np.diff(sg) != 0))
    if changes == 0:
        raise DomainError("t_max lies below the ray maximum")
    if changes > 1:
        raise NumericalError(f"h' changes sign {changes} times along the ray")
    return RayScan(ts, h, hp, hpp, psi, changes)


def nehari_scale_derivative(u0: GridField, v: GridField, nl: Nonlinearity,
                            energy=None) -> float:
    """<t'(u0), v> by implicit differentiation of ``t [u]^2 - int g'(t u) u = 0``."""
    E = _setup(u0, nl, energy)
    S = E.seminorm_sq(u0.values)
    t0 = nehari_scale(u0, nl, E, seminorm=S).t_star
    x, y = u0.values, v.values
    dt = S - E.integrate(nl.gpp(t0 * x) * x * x)
    if not dt < 0.0:
        raise HypothesisError(f"dL/dt = {dt!r} >= 0")
    du = 2.0 * t0 * E.inner(x, y) - E.integrate(nl.gp(t0 * x) * y + nl.gpp(t0 * x) * t0 * x * y)
    return -du / dt


def tangency(u: GridField, nl: Nonlinearity, energy=None) -> float:
    """``2[u]^2 - int (g'(u) u + g''(u) u^2)``; negative on the Nehari manifold."""
    E = _setup(u, nl, energy)
    x = u.values
    return 2.0 * E.seminorm_sq(x) - E.integrate(nl.gp(x) * x + nl.gpp(x) * x * x)


def random_bumps(grid: Grid, rng: np.random.Generator, count: int) -> list[GridField]:
    """Positive Gaussian bumps with random centers, widths and amplitudes."""
    X = grid.coords()
    out = []
    for _ in range(count):
        c = rng.uniform(0.25 * grid.L, 0.75 * grid.L, grid.N)
        w = rng.uniform(0.05, 0.2) * grid.L
        a = rng.uniform(0.1, 3.0)
        r2 = sum((x - ci) ** 2 for x, ci in zip(X, c))
        out.append(GridField(grid, a * np.exp(-r2 / (w * w))))
    return out


def manifold_gap_probe(seed: int, trials: int, nl: Nonlinearity, grid: Grid,
                       energy=None) -> float:
    """Smallest ``[t(u) u]^2`` over ``trials`` random bumps projected onto the manifold."""
    if trials < 10:
        raise ValueError("need trials >= 10")
    E = energy if energy is not None else default_energy(grid, nl)
    rng = np.random.default_rng(seed)
    best = np.inf
    for u in random_bumps(grid, rng, trials):
        S = E.seminorm_sq(u.values)
        t = ray_root(u.values, S, nl, E.integrate).t_star
        best = min(best, t * t * S)
    return float(best)
