import numpy as np
import pytest
from hypothesis import given, settings, assume, strategies as st

from oialab.channel import draw_channel
from oialab.errors import InvalidSpecError, NumericalError
from oialab.primary import (primary_transceiver, waterfill, waterfill_batch,
                            transmit_opportunities, used_dimensions, primary_rate,
                            primary_rate_det)

from _oracles import bisection_waterfill

eig_lists = st.lists(st.floats(1e-4, 1e3), min_size=1, max_size=12)


@pytest.mark.parametrize("shape", [(4, 3), (3, 4), (5, 5)])
def test_transceiver_diagonalises(rng, shape):
    H = draw_channel(rng, *shape)
    tr = primary_transceiver(H)
    D = tr.D1 @ H @ tr.V1
    off = D - tr.diagonal_gain()
    assert np.linalg.norm(off) <= 1e-12 * np.linalg.norm(H) * 10
    np.testing.assert_allclose(np.abs(np.diag(D)), tr.lam, atol=1e-12)
    assert tr.lam_sq.shape == (shape[1],)
    assert np.all(tr.lam_sq[min(shape):] == 0)


def test_two_mode_example_both_active():
    beta_o, p_o = bisection_waterfill([2.0, 0.5], 1.0, 2.0)
    sol = waterfill([2.0, 0.5], 1.0, 2.0)
    assert sol.beta == pytest.approx(beta_o, rel=1e-12)
    assert sol.beta == pytest.approx(2.25, rel=1e-12)
    np.testing.assert_allclose(sol.powers, [1.75, 0.25], rtol=1e-12)
    assert sol.m1 == 2 == used_dimensions(sol)


def test_two_mode_example_weak_mode_off():
    beta_o, p_o = bisection_waterfill([2.0, 0.5], 1.0, 0.1)
    sol = waterfill([2.0, 0.5], 1.0, 0.1)
    assert sol.beta == pytest.approx(beta_o, rel=1e-12)
    np.testing.assert_allclose(sol.powers, [0.1, 0.0], atol=1e-15)
    assert sol.m1 == 1


def test_waterfill_keeps_input_order():
    sol = waterfill([0.5, 2.0], 1.0, 2.0)
    np.testing.assert_allclose(sol.powers, [0.25, 1.75], rtol=1e-12)


def test_zero_modes_get_no_power():
    sol = waterfill([3.0, 0.0, 0.0], 1.0, 30.0)
    assert sol.powers[1] == 0 and sol.powers[2] == 0
    assert sol.m1 == 1
    assert sol.powers.sum() == pytest.approx(30.0)


def test_all_zero_gains_fail():
    with pytest.raises(NumericalError):
        waterfill([0.0, 0.0], 1.0, 1.0)


@pytest.mark.parametrize("args", [([1.0], 0.0, 1.0), ([1.0], 1.0, -1.0), ([-1.0], 1.0, 1.0)])
def test_waterfill_rejects_bad_inputs(args):
    with pytest.raises(InvalidSpecError):
        waterfill(*args)


@given(eigs=eig_lists, noise=st.floats(1e-3, 10), budget=st.floats(1e-3, 1e4))
@settings(max_examples=200, deadline=None)
def test_waterfill_matches_bisection(eigs, noise, budget):
    sol = waterfill(eigs, noise, budget)
    beta_o, p_o = bisection_waterfill(eigs, noise, budget)
    assert sol.beta == pytest.approx(beta_o, rel=1e-9)
    # the oracle forms beta - level directly, so it only resolves powers to
    # a few ulps of beta
    np.testing.assert_allclose(sol.powers, p_o, rtol=1e-9, atol=1e-9 * budget + 8e-16 * beta_o)
    assert sol.powers.sum() == pytest.approx(budget, rel=1e-9)


@given(eigs=eig_lists, noise=st.floats(1e-3, 10), budget=st.floats(1e-3, 1e4))
@settings(max_examples=100, deadline=None)
def test_waterfill_kkt(eigs, noise, budget):
    sol = waterfill(eigs, noise, budget)
    lev = noise / np.asarray(eigs)
    on = sol.powers > 0
    np.testing.assert_allclose(sol.powers[on] + lev[on], sol.beta, rtol=1e-10)
    assert np.all(lev[~on] >= sol.beta * (1 - 1e-10))


@given(eigs=eig_lists, noise=st.floats(1e-3, 10), b1=st.floats(1e-3, 1e3), b2=st.floats(1e-3, 1e3))
@settings(max_examples=100, deadline=None)
def test_more_budget_never_fewer_modes(eigs, noise, b1, b2):
    lo, hi = sorted((b1, b2))
    assert waterfill(eigs, noise, lo).m1 <= waterfill(eigs, noise, hi).m1


@given(eigs=eig_lists, noise=st.floats(1e-2, 10), budget=st.floats(1e-2, 1e3), c=st.floats(0.01, 100))
@settings(max_examples=100, deadline=None)
def test_scaling_gains_and_noise_together(eigs, noise, budget, c):
    a = waterfill(eigs, noise, budget)
    b = waterfill(np.asarray(eigs) * c, noise * c, budget)
    # the levels noise/lambda are unchanged, so the active set must be too
    # (modulo exact ties at the activation threshold)
    assume(np.all(np.abs(noise / np.asarray(eigs) - a.beta) > 1e-9 * a.beta))
    assert a.m1 == b.m1


def test_batch_matches_single(rng):
    eigs = rng.exponential(size=(50, 6))
    budgets = rng.uniform(0.1, 20, size=50)
    beta, powers = waterfill_batch(eigs, 1.0, budgets)
    for i in range(50):
        sol = waterfill(eigs[i], 1.0, budgets[i])
        assert beta[i] == sol.beta
        np.testing.assert_array_equal(powers[i], sol.powers)


def test_transmit_opportunities_and_bounds(rng):
    assert transmit_opportunities(4, 1) == 3
    with pytest.raises(InvalidSpecError):
        transmit_opportunities(4, 0)
    for n1, m1 in [(4, 3), (3, 4), (6, 6)]:
        for snr in (0.1, 10.0, 1e4):
            tr = primary_transceiver(draw_channel(rng, n1, m1))
            sol = waterfill(tr.lam_sq, 1.0, m1 * snr)
            S = transmit_opportunities(n1, sol.m1)
            assert n1 - min(n1, m1) <= S <= n1 - 1


def test_rate_forms_agree(rng):
    tr = primary_transceiver(draw_channel(rng, 4, 3))
    sol = waterfill(tr.lam_sq, 0.5, 3 * 10.0)
    r = primary_rate(tr, sol, 0.5)
    assert r == pytest.approx(primary_rate_det(tr, sol, 0.5), rel=1e-12)
    assert r == pytest.approx(primary_rate(tr, sol, 0.5, 0.5 * np.eye(4)), rel=1e-12)


def test_interference_lowers_rate(rng):
    tr = primary_transceiver(draw_channel(rng, 3, 3))
    sol = waterfill(tr.lam_sq, 1.0, 30.0)
    A = draw_channel(rng, 3, 3)
    R = np.eye(3) + A @ A.conj().T
    assert primary_rate(tr, sol, 1.0, R) < primary_rate(tr, sol, 1.0)
    with pytest.raises(InvalidSpecError):
        primary_rate(tr, sol, 1.0, np.eye(2))
