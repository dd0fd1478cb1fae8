"""Norms on L^p + L^q and the mapping properties of g' and g''.

Two equivalent norms are computed: the inf-decomposition norm
``inf{|u1|_p + |u2|_q : u = u1 + u2}`` and the Luxemburg norm of the
N-function ``A(t) = max(|t|^p, |t|^q)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from .field import GridField, _sum, integrate
from .nonlinearity import Nonlinearity

__all__ = [
    "OrliczReport",
    "orlicz_norm",
    "inf_decomposition",
    "luxemburg_norm",
    "dual_pair_norms",
    "gpp_dual_norms",
    "H_and_derivatives",
]


@dataclass(frozen=True)
class OrliczReport:
    gamma_measure: float
    r: float
    luxemburg: float
    inf_decomp: float
    lower_bound: float
    upper_bound: float
    q_norm_outside: float
    p_norm_inside: float
    upper_bound_sum: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_pq(p, q):
    if not 1.0 <= p < q:
        raise ValueError(f"need 1 <= p < q, got p={p}, q={q}")


def _split_fraction(a: np.ndarray, rho: float, p: float, q: float) -> np.ndarray:
    """Per-point minimizer y in (0,1) of ``y^p a^p + rho' (1-y)^q a^q`` (a > 0).

    Stationarity is ``(p-1) ln y - (q-1) ln(1-y) = ln(rho' a^(q-p))`` in the
    logit variable z, where the left side is increasing and convex; Newton
    started to the right of the root decreases monotonically onto it.
    """
    c = math.log(rho) + (q - p) * np.log(a)
    shift = c + (p - 1.0) * math.log(2.0)
    z = np.where(shift >= 0.0, shift / (q - 1.0), shift / (p - 1.0))
    for _ in range(200):
        phi = -(p - 1.0) * np.logaddexp(0.0, -z) + (q - 1.0) * np.logaddexp(0.0, z) - c
        y = 0.5 * (1.0 + np.tanh(0.5 * z))
        dz = phi / ((p - 1.0) * (1.0 - y) + (q - 1.0) * y)
        z = z - dz
        if np.max(np.abs(dz)) <= 1e-13 * max(1.0, float(np.max(np.abs(z)))):
            break
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def inf_decomposition(values: np.ndarray, dv: float, p: float, q: float) -> float:
    """inf over aligned splits u1 = y u, u2 = (1-y) u of |u1|_p + |u2|_q.

    The optimal splits trace the Pareto frontier of (int |u1|^p, int |u2|^q),
    which is swept by one weight rho'; the norm is then a 1-D minimization.
    """
    _check_pq(p, q)
    a = np.abs(np.ravel(values))
    a = a[a > 0.0]
    if a.size == 0:
        return 0.0
    np_full = (dv * _sum(a ** p)) ** (1.0 / p)
    nq_full = (dv * _sum(a ** q)) ** (1.0 / q)

    def cost(lr):
        y = _split_fraction(a, math.exp(lr), p, q)
        return (dv * _sum((y * a) ** p)) ** (1.0 / p) + (dv * _sum(((1.0 - y) * a) ** q)) ** (1.0 / q)

    # log rho' spans all per-point transitions with a wide margin
    la = np.log(a)
    lo = -(q - p) * float(la.max()) - 60.0
    hi = -(q - p) * float(la.min()) + 60.0
    grid = np.linspace(lo, hi, 61)
    vals = [cost(x) for x in grid]
    i = int(np.argmin(vals))
    left, right = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best = vals[i]
    if right > left:
        res = optimize.minimize_scalar(cost, bounds=(left, right), method="bounded",
                                       options={"xatol": 1e-10, "maxiter": 500})
        best = min(best, float(res.fun))
    return min(best, np_full, nq_full)


def luxemburg_norm(values: np.ndarray, dv: float, p: float, q: float) -> float:
    """inf{lam > 0 : int max(|u/lam|^p, |u/lam|^q) <= 1}."""
    _check_pq(p, q)
    a = np.abs(np.ravel(values))
    a = a[a > 0.0]
    if a.size == 0:
        return 0.0
    top = float(a.max())
    meas = dv * a.size

    def excess(loglam):
        t = a / math.exp(loglam)
        return dv * _sum(np.maximum(t ** p, t ** q)) - 1.0

    lo = math.log(top) - 40.0 * math.log(2.0)
    hi = math.log(top * max(1.0, meas ** (1.0 / p)))
    if excess(hi) >= 0.0:
        return math.exp(hi)
    return math.exp(optimize.brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                    maxiter=200))


def orlicz_norm(u: GridField, p: float, q: float) -> OrliczReport:
    _check_pq(p, q)
    dv = u.grid.cell_volume
    a = np.abs(u.values)
    r = p * q / (q - p)
    gamma = a > 1.0
    gmeas = dv * int(np.count_nonzero(gamma))
    qn = (dv * _sum(np.where(gamma, 0.0, a) ** q)) ** (1.0 / q)
    pn = (dv * _sum(np.where(gamma, a, 0.0) ** p)) ** (1.0 / p)
    lower = max(qn - 1.0, pn / (1.0 + gmeas ** (1.0 / r)))
    if not np.any(a):
        lower = 0.0
    return OrliczReport(
        gamma_measure=gmeas,
        r=r,
        luxemburg=luxemburg_norm(a, dv, p, q),
        inf_decomp=inf_decomposition(a, dv, p, q),
        lower_bound=lower,
        upper_bound=max(qn, pn),
        q_norm_outside=qn,
        p_norm_inside=pn,
        upper_bound_sum=qn + pn,
    )


def _norm(f: GridField, vals: np.ndarray, t: float) -> float:
    return (f.grid.cell_volume * _sum(np.abs(vals) ** t)) ** (1.0 / t)


def dual_pair_norms(u: GridField, nl: Nonlinearity) -> tuple[float, float]:
    """(|g'(u)|_{p'}, |g'(u)|_{q'}) with conjugate exponents p', q'."""
    p, q = nl.exps.p, nl.exps.q
    gp = nl.gp(u.values)
    return _norm(u, gp, p / (p - 1.0)), _norm(u, gp, q / (q - 1.0))


def gpp_dual_norms(u: GridField, nl: Nonlinearity) -> tuple[float, float]:
    """(|g''(u)|_{p/(p-2)}, |g''(u)|_{q/(q-2)})."""
    p, q = nl.exps.p, nl.exps.q
    gpp = nl.gpp(u.values)
    return _norm(u, gpp, p / (p - 2.0)), _norm(u, gpp, q / (q - 2.0))


def H_and_derivatives(u: GridField, v: GridField, w: GridField,
                      nl: Nonlinearity) -> tuple[float, float, float]:
    """H(u) = int g(u), <H'(u), v> and <H''(u) v, w>."""
    return (
        integrate(u.like(nl.g(u.values))),
        integrate(u.like(nl.gp(u.values) * v.values)),
        integrate(u.like(nl.gpp(u.values) * v.values * w.values)),
    )
