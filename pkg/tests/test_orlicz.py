import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from frgs.field import Grid, GridField
from frgs.orlicz import (H_and_derivatives, dual_pair_norms, gpp_dual_norms,
                         inf_decomposition, luxemburg_norm, orlicz_norm)

from conftest import cosine_field, model

P, Q = 2.5, 4.0
GRID = Grid(2, 4.0, 16)          # cell volume 1/16


def _patch(value, cells=16):
    v = np.zeros(GRID.shape)
    v.ravel()[:cells] = value
    return GridField(GRID, v)


def test_zero_field_report():
    r = orlicz_norm(GridField(GRID, np.zeros(GRID.shape)), P, Q)
    assert r.luxemburg == r.inf_decomp == r.lower_bound == r.upper_bound == 0.0
    assert r.gamma_measure == 0.0
    assert r.r == pytest.approx(P * Q / (Q - P))


def test_constant_on_unit_measure():
    r = orlicz_norm(_patch(2.0), P, Q)
    assert r.gamma_measure == pytest.approx(1.0)
    assert r.luxemburg == pytest.approx(2.0, rel=1e-12)
    assert r.inf_decomp == pytest.approx(2.0, rel=1e-8)
    assert r.lower_bound == pytest.approx(1.0)
    assert r.upper_bound == pytest.approx(2.0)
    assert r.upper_bound_sum == pytest.approx(2.0)


def test_invalid_exponents():
    with pytest.raises(ValueError):
        orlicz_norm(_patch(1.0), 4.0, 2.5)


def _brute(values, dv, p, q):
    a = np.abs(values.ravel())

    def cost(z):
        y = 0.5 * (1 + np.tanh(0.5 * z))
        return (dv * np.sum((y * a) ** p)) ** (1 / p) + (dv * np.sum(((1 - y) * a) ** q)) ** (1 / q)

    best = np.inf
    for z0 in (-8.0, 0.0, 8.0):
        res = optimize.minimize(cost, np.full(a.size, z0), method="L-BFGS-B")
        best = min(best, res.fun)
    return best


def test_inf_decomposition_beats_brute_force(rng):
    g = Grid(2, 2.0, 8)
    for _ in range(5):
        amp = math.exp(rng.uniform(-2, 2))
        vals = amp * rng.normal(size=g.shape)
        ours = inf_decomposition(vals, g.cell_volume, P, Q)
        assert ours <= _brute(vals, g.cell_volume, P, Q) * (1 + 1e-7)


def test_inf_decomposition_endpoints():
    # constant fields split uniformly, so the norm is linear in the split and
    # lands on an endpoint: L^p for small support, L^q for large support
    g = Grid(2, 16.0, 16)
    one = np.zeros(g.shape)
    one[3, 5] = 7.0
    assert inf_decomposition(one, g.cell_volume, P, Q) == pytest.approx(7.0, rel=1e-10)
    flat = np.full(g.shape, 3.0)
    assert inf_decomposition(flat, g.cell_volume, P, Q) == pytest.approx(3.0 * 256 ** (1 / Q),
                                                                         rel=1e-10)
    tiny = np.zeros(GRID.shape)
    tiny[0, 0] = 7.0
    assert inf_decomposition(tiny, GRID.cell_volume, P, Q) == pytest.approx(
        7.0 * GRID.cell_volume ** (1 / P), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(0.01, 100.0))
def test_norm_axioms(seed, a):
    rng = np.random.default_rng(seed)
    dv = GRID.cell_volume
    u = rng.normal(size=GRID.shape)
    v = rng.normal(size=GRID.shape)
    for f in (inf_decomposition, luxemburg_norm):
        nu = f(u, dv, P, Q)
        assert f(a * u, dv, P, Q) == pytest.approx(a * nu, rel=1e-6)
        assert f(u + v, dv, P, Q) <= (nu + f(v, dv, P, Q)) * (1 + 1e-7)


def test_equivalence_constants(rng):
    dv = GRID.cell_volume
    for _ in range(30):
        u = math.exp(rng.uniform(-4, 4)) * rng.normal(size=GRID.shape)
        ratio = luxemburg_norm(u, dv, P, Q) / inf_decomposition(u, dv, P, Q)
        assert 0.5 <= ratio <= 2.0


def test_sandwich_valid_parts(rng):
    for _ in range(50):
        u = GridField(GRID, math.exp(rng.uniform(-3, 3)) * rng.normal(size=GRID.shape))
        r = orlicz_norm(u, P, Q)
        assert r.lower_bound <= r.inf_decomp * (1 + 1e-8)
        assert r.inf_decomp <= r.upper_bound_sum * (1 + 1e-8)


def test_max_upper_bound_counterexample():
    """A field with mass on both sides of |u| = 1 exceeds max(q-norm outside, p-norm inside)."""
    v = np.zeros(GRID.shape)
    v.ravel()[:16] = 2.0
    v.ravel()[16:32] = 0.5
    r = orlicz_norm(GridField(GRID, v), P, Q)
    assert r.inf_decomp > r.upper_bound
    assert r.inf_decomp <= r.upper_bound_sum


def test_norm_continuity_under_perturbation(rng):
    u = rng.normal(size=GRID.shape)
    v = rng.normal(size=GRID.shape)
    dv = GRID.cell_volume
    base = inf_decomposition(u, dv, P, Q)
    prev = None
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        d = abs(inf_decomposition(u + eps * v, dv, P, Q) - base)
        assert d <= inf_decomposition(eps * v, dv, P, Q) * (1 + 1e-6)
        if prev is not None:
            assert d < prev
        prev = d


def test_dual_norm_examples():
    nl = model(2, 0.5, P, Q)
    assert dual_pair_norms(GridField(GRID, np.zeros(GRID.shape)), nl) == (0.0, 0.0)
    assert gpp_dual_norms(GridField(GRID, np.zeros(GRID.shape)), nl) == (0.0, 0.0)
    a, b = dual_pair_norms(_patch(0.5), nl)
    assert a == pytest.approx(0.5) and b == pytest.approx(0.5)
    a, b = gpp_dual_norms(_patch(0.5), nl)
    assert a == pytest.approx(3.0) and b == pytest.approx(3.0)


def test_dual_norms_bounded_on_bounded_sets(rng):
    # g' maps norm-bounded sets into bounded sets of the dual pair
    nl = model(2, 0.5, P, Q)
    dv = GRID.cell_volume
    worst = 0.0
    for _ in range(30):
        u = rng.normal(size=GRID.shape)
        u /= inf_decomposition(u, dv, P, Q)
        worst = max(worst, max(dual_pair_norms(GridField(GRID, u), nl)))
    assert np.isfinite(worst) and worst < 50.0


def test_H_example(torus2pi):
    nl = model(2, 0.5, P, Q)
    ZERO_T = GridField(torus2pi, np.zeros(torus2pi.shape))
    assert H_and_derivatives(ZERO_T, ZERO_T, ZERO_T, nl) == (0, 0, 0)
    u = cosine_field(torus2pi, 0.1)
    H, dH, _ = H_and_derivatives(u, u, u, nl)
    assert H == pytest.approx(1e-4 * 1.5 * math.pi ** 2, rel=1e-12)
    assert dH == pytest.approx(4 * H, rel=1e-12)


@pytest.mark.parametrize("amp", [0.3, 1.0, 2.5])
def test_H_finite_differences(rng, amp):
    nl = model(2, 0.5, P, Q)
    g = Grid(2, 8.0, 32)
    u = GridField(g, amp * rng.normal(size=g.shape))
    v = GridField(g, rng.normal(size=g.shape))
    w = GridField(g, rng.normal(size=g.shape))
    eps = 1e-4
    H, dH, d2H = H_and_derivatives(u, v, w, nl)
    Hp = H_and_derivatives(u + v * eps, v, w, nl)
    Hm = H_and_derivatives(u - v * eps, v, w, nl)
    assert (Hp[0] - Hm[0]) / (2 * eps) == pytest.approx(dH, rel=1e-5)
    Wp = H_and_derivatives(u + w * eps, v, w, nl)[1]
    Wm = H_and_derivatives(u - w * eps, v, w, nl)[1]
    assert (Wp - Wm) / (2 * eps) == pytest.approx(d2H, rel=1e-5)
