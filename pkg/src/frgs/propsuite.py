"""Seeded one-shot run of every module's invariant checks.

Each check prints one line ``<module> <property> <value> PASS|FAIL`` (or
``RECORD`` for measured quantities that are reported, not asserted).  The
run stops at the first failure.  Output depends only on the seed.
"""
from __future__ import annotations

import warnings

import numpy as np

from .field import Grid, GridField, fft, ifft, integrate, lp_norm
from .fracop import (FracParams, frac_laplacian, frac_power, seminorm_sq_direct,
                     seminorm_sq_fourier)
from .nehari import (functional_I, nehari_scale, nehari_scale_derivative, random_bumps,
                     manifold_gap_probe, ray_scan, tangency)
from .nonlinearity import Exponents, Nonlinearity, check_hypotheses, matching_coefficients
from .orlicz import orlicz_norm
from .rearrange import polya_szego_check, symm_decr_rearrange, truncate
from .solver import SolverConfig, minimize

__all__ = ["run", "PropertyFailure"]


class PropertyFailure(AssertionError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


class _Log:
    def __init__(self, out):
        self.out = out

    def check(self, module, name, value, ok):
        self.out(f"{module} {name} {_fmt(value)} {'PASS' if ok else 'FAIL'}")
        if not ok:
            raise PropertyFailure(f"{module} {name}")

    def record(self, module, name, value):
        self.out(f"{module} {name} {_fmt(value)} RECORD")


def _model(N, s, p, q):
    ex = Exponents(N, s, p, q)
    return Nonlinearity(ex, *matching_coefficients(p, q), "odd")


def _nonlinearity(log, rng):
    for k in range(5):
        sv = rng.uniform(0.2, 0.9)
        ts = 6.0 / (3.0 - 2.0 * sv)
        p = rng.uniform(2.05, ts - 0.05)
        q = rng.uniform(ts + 0.05, ts + 4.0)
        nl = _model(3, sv, p, q)
        e = 1e-7
        worst = 0.0
        for fn in (nl.g, nl.gp, nl.gpp):
            left = fn(1.0 - e)
            right = fn(1.0 + e)
            worst = max(worst, abs(right - left) / abs(fn(1.0)))
        log.check("nonlinearity", f"c2_jump_{k}", worst, worst <= 1e-5)
    rep = check_hypotheses(_model(2, 0.5, 2.5, 4.0), samples=10**5)
    log.check("nonlinearity", "mu_hat_2d", rep.mu_hat, rep.mu_hat > 2.0 and rep.ok)


def _field(log, rng):
    grid = Grid(2, 2 * np.pi, 32)
    worst = 0.0
    pars = 0.0
    for _ in range(20):
        f = GridField(grid, rng.normal(size=grid.shape))
        back = ifft(fft(f))
        worst = max(worst, np.abs(back.values - f.values).max() / np.abs(f.values).max())
        F = fft(f)
        lhs = integrate(f.like(f.values ** 2))
        rhs = F.parseval_weight * float(np.sum(np.abs(F.coeffs) ** 2))
        pars = max(pars, abs(lhs - rhs) / lhs)
    log.check("field", "fft_roundtrip", worst, worst <= 1e-12)
    log.check("field", "parseval", pars, pars <= 1e-10)
    a, b = (GridField(grid, rng.normal(size=grid.shape)) for _ in range(2))
    al = rng.normal()
    lin = abs(integrate(a * al + b) - al * integrate(a) - integrate(b))
    log.check("field", "integrate_linear", lin, lin <= 1e-10)
    lo = a.like(np.minimum(a.values, b.values))
    log.check("field", "integrate_monotone", integrate(a) - integrate(lo),
              integrate(lo) <= integrate(a))
    tri = lp_norm(a + b, 3.0) - lp_norm(a, 3.0) - lp_norm(b, 3.0)
    log.check("field", "lp_triangle", tri, tri <= 1e-12)


def _fracop(log, rng):
    grid = Grid(2, 2 * np.pi, 32)
    worst = [0.0, 0.0, 0.0]
    for _ in range(20):
        s = rng.uniform(0.1, 0.9)
        fp = FracParams(s, 2)
        u, v = (GridField(grid, rng.normal(size=grid.shape)) for _ in range(2))
        Lu, Lv = frac_laplacian(u, fp), frac_laplacian(v, fp)
        a, b = integrate(v.like(v.values * Lu.values)), integrate(u.like(u.values * Lv.values))
        worst[0] = max(worst[0], abs(a - b) / (abs(a) + abs(b)))
        S = seminorm_sq_fourier(u, fp)
        worst[1] = max(worst[1], abs(integrate(u.like(u.values * Lu.values)) - S) / S)
        half = frac_power(frac_power(u, s / 2), s / 2)
        worst[2] = max(worst[2], np.abs(half.values - Lu.values).max() / np.abs(Lu.values).max())
    log.check("fracop", "self_adjoint", worst[0], worst[0] <= 1e-10)
    log.check("fracop", "energy_identity", worst[1], worst[1] <= 1e-10)
    log.check("fracop", "half_composition", worst[2], worst[2] <= 1e-10)
    fp = FracParams(0.5, 2)
    errs = []
    for n in (16, 32):
        g = Grid(2, 16.0, n)
        u = GridField(g, np.exp(-g.radius() ** 2))
        errs.append(abs(seminorm_sq_direct(u, fp) / seminorm_sq_fourier(u, fp) - 1.0))
    log.check("fracop", "direct_vs_fourier_n32", errs[1], errs[1] < errs[0])


def _orlicz(log, rng):
    grid = Grid(2, 4.0, 16)
    p, q = 2.5, 4.0
    lower_ok = True
    sum_ok = True
    max_viol = 0
    ratios = []
    for _ in range(50):
        amp = np.exp(rng.uniform(-3.0, 3.0))
        u = GridField(grid, amp * rng.normal(size=grid.shape) * (rng.random(grid.shape) < 0.5))
        r = orlicz_norm(u, p, q)
        lower_ok &= r.lower_bound <= r.inf_decomp * (1 + 1e-8)
        sum_ok &= r.inf_decomp <= r.upper_bound_sum * (1 + 1e-8)
        max_viol += r.inf_decomp > r.upper_bound * (1 + 1e-8)
        if r.inf_decomp > 0:
            ratios.append(r.luxemburg / r.inf_decomp)
    log.check("orlicz", "sandwich_lower", lower_ok, lower_ok)
    log.check("orlicz", "upper_sum_bound", sum_ok, sum_ok)
    log.record("orlicz", "upper_max_bound_violations", max_viol)
    lo, hi = min(ratios), max(ratios)
    log.check("orlicz", "luxemburg_ratio_min", lo, lo >= 0.5)
    log.check("orlicz", "luxemburg_ratio_max", hi, hi <= 2.0)
    u = GridField(grid, rng.normal(size=grid.shape))
    v = GridField(grid, rng.normal(size=grid.shape))
    a = rng.uniform(0.1, 5.0)
    nu, nv = orlicz_norm(u, p, q).inf_decomp, orlicz_norm(v, p, q).inf_decomp
    hom = abs(orlicz_norm(u * a, p, q).inf_decomp - a * nu) / (a * nu)
    log.check("orlicz", "homogeneity", hom, hom <= 1e-6)
    tri = orlicz_norm(u + v, p, q).inf_decomp - nu - nv
    log.check("orlicz", "triangle", tri, tri <= 1e-6 * (nu + nv))


def _rearrange(log, rng):
    grid = Grid(2, 8.0, 32)
    worst = -np.inf
    for s in (0.3, 0.5, 0.8):
        fp = FracParams(s, 2)
        for _ in range(10):
            u = GridField(grid, rng.normal(size=grid.shape))
            a, b = polya_szego_check(u, fp)
            worst = max(worst, a / b - 1.0)
    log.check("rearrange", "polya_szego", worst, worst <= 1e-10)
    u = GridField(grid, rng.normal(size=grid.shape))
    us = symm_decr_rearrange(u)
    same = bool(np.array_equal(np.sort(us.values.ravel()), np.sort(np.abs(u.values).ravel())))
    log.check("rearrange", "equimeasurable", same, same)
    idem = bool(np.array_equal(symm_decr_rearrange(us).values, us.values))
    log.check("rearrange", "idempotent", idem, idem)
    v = u.like(np.abs(u.values) + rng.random(grid.shape))
    mono = bool(np.all(symm_decr_rearrange(v).values >= us.values))
    log.check("rearrange", "order_preserving", mono, mono)
    fp = FracParams(0.5, 2)
    S = seminorm_sq_fourier(u, fp)
    Sc = [seminorm_sq_fourier(truncate(u, c), fp) for c in (0.2, 0.1, 0.05)]
    ok = all(x <= S for x in Sc) and Sc[0] <= Sc[1] <= Sc[2]
    log.check("rearrange", "truncation_monotone", Sc[2] / S, ok)


def _nehari(log, rng):
    grid = Grid(2, 16.0, 64)
    nl = _model(2, 0.5, 2.5, 4.0)
    mu = check_hypotheses(nl, samples=10**5).mu_hat
    worst_tan = -np.inf
    worst_bound = np.inf
    worst_fd = 0.0
    for u in random_bumps(grid, rng, 10):
        sc = nehari_scale(u, nl)
        log.check("nehari", "hpp_at_root", sc.hpp, sc.hpp < 0.0)
        ray_scan(u, nl, 3.0 * sc.t_star, 150)
        w = u * sc.t_star
        worst_tan = max(worst_tan, tangency(w, nl))
        S = seminorm_sq_fourier(w, FracParams(0.5, 2))
        worst_bound = min(worst_bound, functional_I(w, nl) - (0.5 - 1.0 / mu) * S)
        v = GridField(grid, rng.normal(size=grid.shape))
        d = nehari_scale_derivative(u, v, nl)
        e = 1e-5
        fd = (nehari_scale(u + e * v, nl).t_star - nehari_scale(u - e * v, nl).t_star) / (2 * e)
        worst_fd = max(worst_fd, abs(d - fd) / abs(fd))
    log.check("nehari", "tangency_max", worst_tan, worst_tan < 0.0)
    log.check("nehari", "energy_bound_slack", worst_bound, worst_bound >= 0.0)
    log.check("nehari", "derivative_vs_fd", worst_fd, worst_fd <= 1e-4)
    gap = manifold_gap_probe(int(rng.integers(2**31)), 10, nl, grid)
    log.check("nehari", "gap_probe", gap, gap > 0.0)


def _solver(log, rng):
    cfg = SolverConfig(N=2, s=0.5, p=2.5, q=4.0, L=16.0, n=64, max_iters=25,
                       seed=int(rng.integers(2**31)))
    rep = minimize(cfg)
    trace = np.asarray(rep.energy_trace)
    log.check("solver", "energy_non_increasing", float(np.max(np.diff(trace), initial=0.0)),
              bool(np.all(np.diff(trace) <= 0.0)))
    log.check("solver", "nehari_residual", rep.nehari_residual, rep.nehari_residual <= 1e-10)
    log.check("solver", "min_value", rep.min_value, rep.min_value >= 0.0)
    log.check("solver", "monotone", rep.monotone, rep.monotone)
    log.record("solver", "energy_after_25", rep.energy)


MODULES = (_nonlinearity, _field, _fracop, _orlicz, _rearrange, _nehari, _solver)


def run(seed: int, out=print) -> bool:
    """Run every suite with generators derived from ``seed``; False on first failure."""
    log = _Log(out)
    children = np.random.SeedSequence(seed).spawn(len(MODULES))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            for fn, ss in zip(MODULES, children):
                fn(log, np.random.default_rng(ss))
        except PropertyFailure:
            return False
    out("propsuite OK")
    return True
