"""Model nonlinearity g with power-q behaviour near zero and power-p growth.

The profile is ``t**q`` on ``[0, 1]`` and ``a + b*t + c*t**p`` above 1, with
``(a, b, c)`` fixed so that g, g' and g'' are continuous at ``t = 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisError

__all__ = [
    "Exponents",
    "Nonlinearity",
    "HypothesisReport",
    "make_nonlinearity",
    "matching_coefficients",
    "g_eval",
    "g_prime",
    "g_second",
    "check_hypotheses",
]

SIGN_MODES = ("odd", "positive_part")

# q == 2*_s within this tolerance is treated as the borderline critical case
_CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class Exponents:
    """Dimension, fractional order and the two growth exponents."""

    N: int
    s: float
    p: float
    q: float

    def __post_init__(self):
        for name in ("s", "p", "q"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.p >= self.q:
            raise ValueError(f"need p < q, got p={self.p}, q={self.q}")
        if self.p <= 2.0:
            raise ValueError(f"need p > 2, got p={self.p}")
        ts = self.two_star
        if self.p >= ts:
            raise ValueError(f"need p < 2*_s = {ts:.12g}, got p={self.p}")
        if self.q < ts * (1.0 - _CRITICAL_TOL):
            raise ValueError(f"need q >= 2*_s = {ts:.12g}, got q={self.q}")

    @property
    def two_star(self) -> float:
        return 2.0 * self.N / (self.N - 2.0 * self.s)

    @property
    def critical(self) -> bool:
        """True when q sits exactly on the critical exponent 2*_s."""
        return abs(self.q - self.two_star) <= _CRITICAL_TOL * self.two_star


def matching_coefficients(p: float, q: float) -> tuple[float, float, float]:
    """Closed-form (a, b, c) making ``a + b t + c t**p`` meet ``t**q`` in C^2 at t=1."""
    c = q * (q - 1.0) / (p * (p - 1.0))
    b = q - p * c
    a = 1.0 - b - c
    return a, b, c


@dataclass(frozen=True)
class Nonlinearity:
    exps: Exponents
    a: float
    b: float
    c: float
    sign_mode: str = "odd"

    def __post_init__(self):
        if self.sign_mode not in SIGN_MODES:
            raise ValueError(f"sign_mode must be one of {SIGN_MODES}")

    # -- radial profile on t >= 0 -------------------------------------------
    def _profile(self, t, order):
        p, q = self.exps.p, self.exps.q
        low = t <= 1.0
        tl = np.where(low, t, 0.0)
        th = np.where(low, 1.0, t)
        if order == 0:
            lo = tl ** q
            hi = self.a + self.b * th + self.c * th ** p
        elif order == 1:
            lo = q * tl ** (q - 1.0)
            hi = self.b + self.c * p * th ** (p - 1.0)
        else:
            lo = q * (q - 1.0) * tl ** (q - 2.0)
            hi = self.c * p * (p - 1.0) * th ** (p - 2.0)
        return np.where(low, lo, hi)

    def _eval(self, t, order):
        t = np.asarray(t, dtype=float)
        if self.sign_mode == "positive_part":
            out = self._profile(np.maximum(t, 0.0), order)
            out = np.where(t > 0.0, out, 0.0)
        else:
            out = self._profile(np.abs(t), order)
            if order == 1:
                out = np.sign(t) * out
        return out if out.ndim else float(out)

    def g(self, t):
        return self._eval(t, 0)

    def gp(self, t):
        return self._eval(t, 1)

    def gpp(self, t):
        return self._eval(t, 2)


def make_nonlinearity(exps: Exponents, sign_mode: str = "odd") -> Nonlinearity:
    if exps.critical:
        warnings.warn(
            f"q = {exps.q} equals the critical exponent 2*_s; "
            "the strict condition p < 2*_s < q is only met at the boundary",
            stacklevel=2,
        )
    a, b, c = matching_coefficients(exps.p, exps.q)
    return Nonlinearity(exps, a, b, c, sign_mode)


def g_eval(nl: Nonlinearity, t):
    return nl.g(t)


def g_prime(nl: Nonlinearity, t):
    return nl.gp(t)


def g_second(nl: Nonlinearity, t):
    return nl.gpp(t)


@dataclass(frozen=True)
class HypothesisReport:
    mu_hat: float
    ratio2_min: float
    c0_hat: float
    c1_hat: float
    c2_hat: float
    c3_hat: float
    sample_range: tuple[float, float]
    sample_count: int
    critical: bool = False
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "mu_hat": self.mu_hat,
            "ratio2_min": self.ratio2_min,
            "c0_hat": self.c0_hat,
            "c1_hat": self.c1_hat,
            "c2_hat": self.c2_hat,
            "c3_hat": self.c3_hat,
            "sample_range": list(self.sample_range),
            "sample_count": self.sample_count,
            "critical": self.critical,
            "violations": list(self.violations),
        }


def check_hypotheses(nl: Nonlinearity, t_min: float = 1e-3, t_max: float = 1e3,
                     samples: int = 10**6) -> HypothesisReport:
    """Sample the growth hypotheses on a log-spaced grid of |t| values.

    Ratios are formed on ``t > 0``; in ``odd`` mode the negative half-line
    gives identical ratios by symmetry. Returns the empirical infima of
    ``g'(t)t / g(t)`` and ``g''(t)t^2 / (g'(t)t)`` together with the tightest
    growth constants of the two-regime power bounds.
    """
    if not 0.0 < t_min < 1.0 < t_max:
        raise ValueError("need 0 < t_min < 1 < t_max")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    p, q = nl.exps.p, nl.exps.q
    t = np.geomspace(t_min, t_max, samples)
    # the matching point is always sampled
    t = np.union1d(t, [1.0])
    prof = Nonlinearity(nl.exps, nl.a, nl.b, nl.c, "odd")
    g, gp, gpp = prof.g(t), prof.gp(t), prof.gpp(t)
    if np.any(g <= 0.0) or np.any(gp <= 0.0):
        raise HypothesisError("g or g' vanishes at a nonzero sample; ratios undefined")
    ratio1 = gp * t / g
    ratio2 = gpp * t * t / (gp * t)
    if not (np.all(np.isfinite(ratio1)) and np.all(np.isfinite(ratio2))):
        raise HypothesisError("non-finite hypothesis ratio")

    hi = t >= 1.0
    lo = t <= 1.0

    def _ext(fn, vals, exps_hi, exps_lo):
        return fn(fn(vals[hi] / t[hi] ** exps_hi), fn(vals[lo] / t[lo] ** exps_lo))

    c0 = _ext(min, g, p, q)
    c3 = _ext(max, g, p, q)
    c1 = _ext(max, np.abs(gp), p - 1.0, q - 1.0)
    c2 = _ext(max, np.abs(gpp), p - 2.0, q - 2.0)

    mu_hat = float(ratio1.min())
    r2 = float(ratio2.min())
    violations = []
    if not mu_hat > 2.0:
        violations.append(f"ambrosetti-rabinowitz: mu_hat={mu_hat!r} <= 2")
    # pure-power identities produce ratio2 = 1 only up to rounding
    if r2 < 1.0 - 1e-12:
        violations.append(f"convexity ratio: g''t^2 < g't somewhere (min ratio {r2!r})")
    if not (np.all(gpp[t > 0] > 0.0)):
        violations.append("convexity: g'' <= 0 at a positive sample")
    for name, val in (("c0", c0), ("c1", c1), ("c2", c2), ("c3", c3)):
        if not (math.isfinite(val) and val > 0.0):
            violations.append(f"growth bound: {name}_hat={val!r} not finite and positive")
    return HypothesisReport(
        mu_hat=mu_hat,
        ratio2_min=r2,
        c0_hat=float(c0),
        c1_hat=float(c1),
        c2_hat=float(c2),
        c3_hat=float(c3),
        sample_range=(float(t_min), float(t_max)),
        sample_count=int(t.size),
        critical=nl.exps.critical,
        violations=tuple(violations),
    )
