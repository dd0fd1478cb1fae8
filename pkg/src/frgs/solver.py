"""Ground-state search: descend, symmetrize, reproject onto the Nehari manifold.

The unknown is a nonnegative radial non-increasing field on the grid points
of the inscribed ball.  Energies use the exact R^N quadratic form of
:class:`frgs.riesz.BallEnergy`, so the computed u together with its
minimal-energy extension ``K f`` is an R^N field whose strong-form residual
``|f - g'(K f)| / |g'(K f)|`` is measured on the whole box.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisError, StagnationError
from .field import Grid, GridField
from .fracop import FracParams
from .nehari import ray_root
from .nonlinearity import Exponents, Nonlinearity, check_hypotheses, matching_coefficients
from .rearrange import decay_bound_check, is_radially_monotone, rearrange_order, shells
from .riesz import BallEnergy

__all__ = [
    "SolverConfig",
    "SolutionReport",
    "initial_guess",
    "minimize",
    "pohozaev_defect",
    "radial_profile",
    "resample",
    "multi_start",
    "ground_state_gap",
]

log = logging.getLogger(__name__)

MAX_BACKTRACKS = 50
_EPS = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    N: int
    s: float
    p: float
    q: float
    L: float
    n: int
    max_iters: int = 2000
    tol_residual: float = 1e-3
    tol_nehari: float = 1e-10
    step0: float = 0.5
    backtrack: float = 0.5
    seed: int = 0
    init_width: float = 1.0

    REQUIRED = ("N", "s", "p", "q", "L", "n")

    def __post_init__(self):
        for name in ("tol_residual", "tol_nehari"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack must lie in (0, 1)")
        if not 0.0 < self.step0 <= 1.0:
            raise ValueError("step0 must lie in (0, 1]")
        if not self.init_width > 0.0:
            raise ValueError("init_width must be positive")
        # constructing these validates them
        self.exps
        self.grid

    @property
    def exps(self) -> Exponents:
        return Exponents(self.N, self.s, self.p, self.q)

    @property
    def grid(self) -> Grid:
        return Grid(self.N, self.L, self.n)

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        names = [f.name for f in dataclasses.fields(cls)]
        unknown = sorted(set(d) - set(names))
        if unknown:
            raise KeyError(f"unknown config field(s): {', '.join(unknown)}")
        missing = [k for k in cls.REQUIRED if k not in d]
        if missing:
            raise KeyError(f"missing config field(s): {', '.join(missing)}")
        kw = dict(d)
        for k in ("N", "n", "max_iters", "seed"):
            if k in kw:
                if isinstance(kw[k], bool) or float(kw[k]) != int(kw[k]):
                    raise ValueError(f"{k} must be an integer")
                kw[k] = int(kw[k])
        for k in names:
            if k in kw and k not in ("N", "n", "max_iters", "seed"):
                kw[k] = float(kw[k])
        return cls(**kw)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def replace(self, **kw) -> "SolverConfig":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class SolutionReport:
    u: GridField
    u_extended: GridField
    energy: float
    m_estimate: float
    nehari_residual: float
    pde_residual: float
    pohozaev_defect: float
    lambda_estimate: float
    min_value: float
    monotone: bool
    decay_margin: float
    iterations: int
    energy_trace: tuple[float, ...]
    converged: bool
    seminorm_sq: float = 0.0
    cg_iterations: int = 0
    decay_margins: dict = field(default_factory=dict)
    # largest relative rise of I caused by clipping and rearranging in one step
    symmetrization_increase: float = 0.0

    SCALARS = ("energy", "m_estimate", "nehari_residual", "pde_residual", "pohozaev_defect",
               "lambda_estimate", "min_value", "monotone", "decay_margin", "iterations",
               "converged", "seminorm_sq", "symmetrization_increase")

    def summary(self) -> dict:
        out = {k: getattr(self, k) for k in self.SCALARS}
        out["decay_margins"] = {str(k): v for k, v in self.decay_margins.items()}
        out["energy_trace_length"] = len(self.energy_trace)
        return out


class _Problem:
    """Per-config operators shared by the loop and the diagnostics."""

    def __init__(self, cfg: SolverConfig):
        self.cfg = cfg
        self.grid = cfg.grid
        a, b, c = matching_coefficients(cfg.p, cfg.q)
        self.nl = Nonlinearity(cfg.exps, a, b, c, "odd")
        hyp = check_hypotheses(self.nl, samples=10**5)
        if not hyp.ok:
            raise HypothesisError("; ".join(hyp.violations))
        self.E = BallEnergy(self.grid, cfg.s, rtol=1e-12)
        self.mask = self.E.mask
        self.order = rearrange_order(self.grid, ball=True)

    def rearrange(self, w: np.ndarray) -> np.ndarray:
        flat = w.ravel()
        out = np.zeros(self.grid.size)
        out[self.order] = np.sort(np.abs(flat[self.order]))[::-1]
        return out.reshape(self.grid.shape)

    def energy(self, u, f) -> float:
        return 0.5 * self.E.integrate(u * f) - self.E.integrate(self.nl.g(u))

    def project(self, u, f):
        ts = ray_root(u, self.E.integrate(u * f), self.nl, self.E.integrate)
        return u * ts.t_star, f * ts.t_star

    def residual(self, f) -> tuple[float, np.ndarray]:
        uext = self.E.potential(f)
        gp = self.nl.gp(uext)
        den = max(math.sqrt(float(np.sum(gp * gp))), _EPS)
        return math.sqrt(float(np.sum((f - gp) ** 2))) / den, uext


def initial_guess(cfg: SolverConfig, _prob: _Problem | None = None) -> GridField:
    """Centered Gaussian of width ``init_width`` on the ball, projected onto the manifold."""
    prob = _prob or _Problem(cfg)
    r = prob.grid.radius()
    u = prob.rearrange(np.where(prob.mask, np.exp(-(r / cfg.init_width) ** 2), 0.0))
    f = prob.E.source(u)
    u, _ = prob.project(u, f)
    return GridField(prob.grid, u)


def pohozaev_defect(u: GridField, fp: FracParams, nl: Nonlinearity, energy=None) -> float:
    """``|(N-2s)/2 [u]^2 - N int g(u)| / ((N-2s)/2 [u]^2)``."""
    from .nehari import default_energy
    E = energy if energy is not None else default_energy(u.grid, nl)
    S = E.seminorm_sq(u.values)
    if not S > 0.0:
        raise DomainError("Pohozaev defect undefined for [u] = 0")
    lhs = (fp.N - 2.0 * fp.s) / 2.0 * S
    return abs(lhs - fp.N * E.integrate(nl.g(u.values))) / lhs


def _report(prob: _Problem, u, f, iters, trace, converged, sym_up=0.0) -> SolutionReport:
    cfg, E, nl = prob.cfg, prob.E, prob.nl
    res, uext = prob.residual(f)
    S = E.integrate(u * f)
    Gp = E.integrate(nl.gp(u) * u)
    J = S - Gp
    dJ = 2.0 * S - E.integrate(nl.gp(u) * u + nl.gpp(u) * u * u)
    G = E.integrate(nl.g(u))
    lhs = (cfg.N - 2.0 * cfg.s) / 2.0 * S
    ufield = GridField(prob.grid, u)
    monotone = is_radially_monotone(ufield)
    margins = {}
    if monotone:
        for t in (2.0, cfg.exps.two_star):
            margins[t] = decay_bound_check(ufield, t)
    energy = 0.5 * S - G
    return SolutionReport(
        u=ufield,
        u_extended=GridField(prob.grid, uext),
        energy=energy,
        m_estimate=energy,
        nehari_residual=abs(J) / S,
        pde_residual=res,
        pohozaev_defect=abs(lhs - cfg.N * G) / lhs,
        lambda_estimate=J / dJ,
        min_value=float(u.min()),
        monotone=monotone,
        decay_margin=max(margins.values()) if margins else math.inf,
        iterations=iters,
        energy_trace=tuple(trace),
        converged=converged,
        seminorm_sq=S,
        cg_iterations=E.cg_iterations,
        decay_margins=margins,
        symmetrization_increase=sym_up,
    )


def minimize(cfg: SolverConfig, u0: GridField | None = None) -> SolutionReport:
    """Run the descend / clip / rearrange / reproject iteration.

    Each step moves along the D^{s,2} gradient ``u - K g'(u)`` with step
    eta, keeps the trial field only if I does not increase, and stops once
    the strong-form residual reaches ``tol_residual``.  Raises
    :class:`StagnationError` (carrying a partial report) after 50
    consecutive rejected steps.
    """
    prob = _Problem(cfg)
    E, nl, mask = prob.E, prob.nl, prob.mask
    if u0 is None:
        u = initial_guess(cfg, prob).values
    else:
        if u0.grid != prob.grid:
            raise DomainError("starting field lives on a different grid")
        u = prob.rearrange(np.where(mask, np.maximum(u0.values, 0.0), 0.0))
    u = np.array(u)
    f = E.source(u)
    u, f = prob.project(u, f)
    Eu = prob.energy(u, f)
    trace = [Eu]
    eta = cfg.step0
    rejected = 0
    sym_up = 0.0
    res, _ = prob.residual(f)
    it = 0
    converged = res <= cfg.tol_residual
    while not converged and it < cfg.max_iters:
        it += 1
        G = np.where(mask, nl.gp(u), 0.0)
        w = np.where(mask, (1.0 - eta) * u + eta * E.potential(G), 0.0)
        fw = (1.0 - eta) * f + eta * G
        wr = prob.rearrange(np.maximum(w, 0.0))
        if np.any(wr != w):
            # w = K fw on the ball, so I(w) is available before the re-solve
            before = prob.energy(w, fw)
            fw = E.source(wr, x0=fw)
            sym_up = max(sym_up, (prob.energy(wr, fw) - before) / abs(before))
        w, fw = prob.project(wr, fw)
        Ew = prob.energy(w, fw)
        if Ew < Eu:
            u, f, Eu = w, fw, Ew
            trace.append(Eu)
            eta = min(eta / cfg.backtrack, 1.0)
            rejected = 0
            res, _ = prob.residual(f)
            converged = res <= cfg.tol_residual
        else:
            eta *= cfg.backtrack
            rejected += 1
            if rejected >= MAX_BACKTRACKS:
                rep = _report(prob, u, f, it, trace, False, sym_up)
                raise StagnationError(
                    f"{MAX_BACKTRACKS} consecutive rejected steps at iteration {it}", rep)
        if it % 100 == 0:
            log.info("iter %d energy %.12g residual %.3e eta %.3g", it, Eu, res, eta)
    return _report(prob, u, f, it, trace, converged, sym_up)


def radial_profile(u: GridField) -> tuple[np.ndarray, np.ndarray]:
    """(r, u) with one row per distance shell about the center point."""
    r, first = shells(u.grid)
    return r, u.values.ravel()[first]


def resample(u: GridField, grid: Grid) -> GridField:
    """Interpolate a radial field onto another grid by its shell profile."""
    r, prof = radial_profile(u)
    return GridField(grid, np.interp(grid.radius(), r, prof, right=0.0))


def multi_start(cfg: SolverConfig, restarts: int) -> list[SolutionReport]:
    """Solve from ``restarts`` initial widths; the first is ``cfg.init_width``.

    Further widths are drawn from ``[0.5, 1.5] * init_width`` by a generator
    seeded with ``cfg.seed``.
    """
    if restarts < 1:
        raise ValueError("need restarts >= 1")
    rng = np.random.default_rng(cfg.seed)
    widths = [cfg.init_width] + list(cfg.init_width * rng.uniform(0.5, 1.5, restarts - 1))
    return [minimize(cfg.replace(init_width=float(w))) for w in widths]


def ground_state_gap(cfg: SolverConfig, restarts: int) -> float:
    """Spread max - min of the energy estimates over independent restarts."""
    if restarts < 2:
        raise ValueError("need restarts >= 2")
    ms = [r.m_estimate for r in multi_start(cfg, restarts)]
    if not all(m > 0.0 for m in ms):
        raise DomainError(f"nonpositive energy estimate among {ms}")
    return max(ms) - min(ms)
