import math

import numpy as np
import pytest

import mfi


def grid(cells=8):
    return mfi.Grid(1, 1, 1.0, 1.0, cells, cells)


def exponents(alpha=0.5, beta=0.5):
    return mfi.Exponents(1, 1, alpha, beta, 2.0, theta=3.0)


def test_grid_shape_and_centers():
    g = mfi.Grid(2, 1, 1.0, 2.0, 4, 8)
    assert g.shape == (16, 8)
    assert g.size == 128
    assert g.steps == (0.5, 0.5)
    c = g.centers(0)
    assert c.shape == (16, 2)
    assert c[0].tolist() == [-0.75, -0.75]


def test_separable_matches_direct():
    g = grid()
    f = np.random.default_rng(3).uniform(0.0, 1.0, g.shape)
    fast = mfi.strong_fractional_integral(g, f, exponents())
    slow = mfi.strong_fractional_integral(g, f, exponents(), direct=True)
    assert np.linalg.norm(fast - slow) <= 1e-12 * np.linalg.norm(slow)


def test_zero_input_and_linearity():
    g = grid()
    ex = exponents()
    assert not mfi.strong_fractional_integral(g, np.zeros(g.shape), ex).any()
    rng = np.random.default_rng(4)
    f, h = rng.uniform(size=g.shape), rng.uniform(size=g.shape)
    lhs = mfi.strong_fractional_integral(g, 2.0 * f - h, ex)
    rhs = 2.0 * mfi.strong_fractional_integral(g, f, ex) - mfi.strong_fractional_integral(g, h, ex)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_cone_sum_reconstructs_operator():
    g = grid()
    ex = exponents()
    f = np.random.default_rng(5).uniform(size=g.shape)
    lo, hi = mfi.achievable_cone_range(g)
    assert (lo, hi) == (-2, 3)
    parts = mfi.cone_sum(g, f, ex, -10, 10)
    assert parts["ell_range_used"] == (lo, hi)
    full = mfi.strong_fractional_integral(g, f, ex)
    assert np.allclose(parts["result"] + parts["excluded"], full, rtol=1e-12, atol=1e-14)
    assert not parts["residual"].any()


def test_guard_and_shape_errors():
    g = mfi.Grid(1, 1, 1.0, 1.0, 64, 64)
    with pytest.raises(mfi.GuardExceeded):
        mfi.strong_fractional_integral(g, np.ones(g.shape), exponents(), direct=True)
    with pytest.raises(mfi.InvalidArgument):
        mfi.strong_fractional_integral(grid(), np.ones((3, 3)), exponents())
    with pytest.raises(mfi.InvalidArgument):
        mfi.Exponents(1, 1, 1.5, 0.5, 2.0, theta=3.0)


def test_unit_weight_characteristic():
    g = grid()
    rep = mfi.bump_characteristic(mfi.Weights.unit(g), exponents(), 2.0)
    # Full box: |Q|^{a-1/t}|P|^{b-1/t} |R|^{1/pt} |R|^{(p-1)/pt} = 2^0 * 2^0 * 4^{1/2}.
    assert rep["value"] == pytest.approx(2.0, rel=1e-12)
    assert rep["family_size"] == 15 * 15
    ecc = mfi.bump_characteristic(mfi.Weights.unit(g), exponents(), 2.0, ell=1)
    # Side pairs (1,2), (2,4), (4,8) on 8 cells: 8*4 + 4*2 + 2*1.
    assert ecc["family_size"] == 42
    with pytest.raises(mfi.EmptyFamily):
        mfi.bump_characteristic(mfi.Weights.unit(g), exponents(), 2.0, ell=10)


def test_trivial_weight():
    g = grid()
    sigma = np.ones(g.shape)
    sigma[0, 0] = 0.0
    w = mfi.Weights(g, np.ones(g.shape), sigma)
    with pytest.raises(mfi.TrivialWeight):
        mfi.bump_characteristic(w, exponents(), 2.0)


def test_weighted_norm():
    g = grid()
    # Unit function on [-1,1]^2 has L^2 norm 2.
    assert mfi.weighted_norm(g, np.ones(g.shape), np.ones(g.shape), 2.0) == pytest.approx(2.0)


def test_fit_recovers_rate():
    ells = list(range(-4, 5))
    rep = mfi.fit_decay_rate(ells, [3.0 * 2.0 ** (-0.7 * abs(e)) for e in ells])
    assert rep["fitted_epsilon"] == pytest.approx(0.7, abs=1e-12)
    assert rep["fit_residual"] == pytest.approx(0.0, abs=1e-12)


def test_decay_profile_power_weights():
    g = mfi.Grid(1, 1, 1.0, 1.0, 16, 16)
    w = mfi.Weights.power(g, 0.25, 0.25, 0.25, 0.25, 0.125)
    rep = mfi.characteristic_decay_profile(w, exponents(0.6, 0.6), 2.0, -3, 3)
    assert rep["kind"] == "CHARACTERISTIC"
    assert rep["ell_values"] == list(range(-3, 4))
    assert all(q > 0 for q in rep["quantities"])
    assert math.isfinite(rep["fitted_epsilon"])


def test_check_inventory_and_run():
    inv = mfi.check_inventory()
    assert [c[0] for c in inv] == list(range(1, 10))
    r = mfi.run_check(3)
    assert r["passed"], r["detail"]
