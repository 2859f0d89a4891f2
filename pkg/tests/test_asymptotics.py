import math

import numpy as np
import pytest

from oialab.asymptotics import (MpLaw, mp_expectation, asymptotic_waterlevel, asymptotic_m1,
                                asymptotic_S, asymptotic_L2, asymptotic_model,
                                primary_power_distribution, upa_power_distribution,
                                point_mass, stieltjes_g_h, solve_GM1, solve_GM,
                                asymptotic_rate, asymptotic_rate_details,
                                asymptotic_primary_rate, LimitingPowerDistribution)
from oialab.channel import draw_channel, trial_rng, db_to_linear
from oialab.errors import InvalidSpecError
from oialab.primary import primary_transceiver, waterfill

from _oracles import empirical_stieltjes, sampled_power_profile

SNRS_DB = (0.0, 10.0, 20.0)


def _model(alpha11=1.0, alpha12=1.0, snr_db=10.0, alpha21=1.0, alpha22=1.0):
    p = float(db_to_linear(snr_db))
    return asymptotic_model(alpha11, alpha12, alpha21, alpha22, p, 1.0, p, 1.0)


@pytest.mark.parametrize("ratio", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_mp_total_mass(ratio):
    law = MpLaw(ratio)
    assert mp_expectation(law, lambda x: 1.0) == pytest.approx(1.0, abs=1e-8)
    assert np.all(law.density(np.linspace(law.a, law.b, 101)) >= 0)


def test_mp_atom_split():
    law = MpLaw(0.5)
    assert law.atom == 0.5
    assert mp_expectation(law, lambda x: 1.0, lower_cut=1e-300) == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize("ratio", [0.5, 1.0, 2.0])
def test_mp_first_moment_matches_wishart_samples(ratio):
    m = 64
    n = int(ratio * m)
    rng = np.random.default_rng(7)
    means = []
    for _ in range(200):
        H = draw_channel(rng, n, m)
        means.append(np.linalg.eigvalsh(H.conj().T @ H).mean())
    emp = float(np.mean(means))
    assert mp_expectation(MpLaw(ratio), lambda x: x) == pytest.approx(ratio, rel=1e-9)
    assert emp == pytest.approx(ratio, rel=0.02)


def test_mp_rejects_bad_ratio():
    with pytest.raises(InvalidSpecError):
        MpLaw(0.0)


def test_waterlevel_increases_with_power():
    betas = [asymptotic_waterlevel(1.0, p, 1.0) for p in np.logspace(-1, 3, 10)]
    assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))
    with pytest.raises(InvalidSpecError):
        asymptotic_waterlevel(1.0, -1.0, 1.0)


def test_waterlevel_saturates_budget():
    beta = asymptotic_waterlevel(0.5, 3.0, 1.0)
    law = MpLaw(2.0)
    spent = mp_expectation(law, lambda x: beta - 1.0 / x, lower_cut=1.0 / beta)
    assert spent == pytest.approx(3.0, rel=1e-9)


@pytest.mark.parametrize("snr_db", SNRS_DB)
def test_finite_size_matches_limit(snr_db):
    p = float(db_to_linear(snr_db))
    beta_inf = asymptotic_waterlevel(1.0, p, 1.0)
    m1_inf = asymptotic_m1(1.0, beta_inf, 1.0)
    betas, fracs = [], []
    for t in range(4):
        tr = primary_transceiver(draw_channel(trial_rng(3, t), 256, 256))
        sol = waterfill(tr.lam_sq, 1.0, 256 * p)
        betas.append(sol.beta)
        fracs.append(sol.m1 / 256)
    assert np.mean(betas) == pytest.approx(beta_inf, rel=0.02)
    assert abs(np.mean(fracs) - m1_inf) <= 0.03


def test_high_snr_limits():
    for alpha11, m1_lim, s_lim in [(2.0, 0.5, 0.0), (0.5, 1.0, 1.0), (1.0, 1.0, 0.0)]:
        m = _model(alpha11=alpha11, snr_db=80.0)
        assert m.m1_inf == pytest.approx(m1_lim, abs=0.02)
        assert m.S_inf == pytest.approx(s_lim, abs=0.02)


def test_low_power_limits():
    m = asymptotic_model(1.5, 1.0, 1.0, 1.0, 1e-8, 1.0, 1.0, 1.0)
    assert m.m1_inf == pytest.approx(0.0, abs=1e-3)
    assert m.S_inf == pytest.approx(1 / 1.5, abs=1e-3)
    assert m.L2_inf == pytest.approx(1.0, abs=1e-3)


def test_fraction_formulas():
    assert asymptotic_S(2.0, 0.3) == pytest.approx(0.2)
    assert asymptotic_L2(1.0, 2.0, 0.5) == pytest.approx(0.75)
    assert asymptotic_L2(2.0, 1.0, 0.9) == 0.0


@pytest.mark.parametrize("alpha11", [0.5, 1.0, 2.0])
def test_bound_chain_and_monotonicity(alpha11):
    s = []
    for snr_db in range(0, 41, 4):
        m = _model(alpha11=alpha11, alpha12=alpha11, snr_db=snr_db)
        lo, hi = m.s_bounds()
        assert lo - 1e-9 <= m.S_inf <= hi + 1e-9
        assert 0 <= m.m1_inf <= min(1.0, 1 / alpha11) + 1e-9
        assert 0 <= m.L2_inf <= 1
        s.append(m.S_inf)
    assert all(b <= a + 1e-12 for a, b in zip(s, s[1:]))


@pytest.mark.parametrize("alpha11", [0.5, 2.0])
def test_fluctuations_shrink_with_size(alpha11):
    for snr_db in SNRS_DB:
        p = float(db_to_linear(snr_db))
        s_inf = _model(alpha11=alpha11, snr_db=snr_db).S_inf
        err = {}
        for n1 in (64, 256):
            m1 = int(alpha11 * n1)
            dev = []
            for t in range(10):
                tr = primary_transceiver(draw_channel(trial_rng(9, n1, t), n1, m1))
                sol = waterfill(tr.lam_sq, 1.0, m1 * p)
                dev.append(abs((n1 - sol.m1) / m1 - s_inf))
            err[n1] = np.mean(dev)
        # exact agreement at both sizes happens once every mode is active
        assert err[256] < err[64] or err[64] <= 1e-12


def test_primary_distribution_mass_and_mean():
    for alpha11 in (0.5, 1.0, 2.0):
        m = _model(alpha11=alpha11, snr_db=10.0)
        d = primary_power_distribution(m)
        assert d.total_mass() == pytest.approx(1.0, abs=1e-10)
        assert d.mean() == pytest.approx(m.p1_max, rel=1e-8)
        assert d.node_masses.sum() == pytest.approx(m.m1_inf, abs=1e-8)


def test_upa_distribution():
    m = _model(snr_db=10.0)
    d = upa_power_distribution(m)
    assert d.total_mass() == pytest.approx(1.0)
    assert d.mean() == pytest.approx(m.p2_max)
    m0 = _model(alpha11=2.0, alpha12=1.0, snr_db=60.0)
    assert upa_power_distribution(m0).mean() == 0.0


def test_g_at_zero_is_mean():
    d = LimitingPowerDistribution(np.array([0.0, 2.0]), np.array([0.25, 0.75]))
    assert stieltjes_g_h(d, 0.0, 1.3) == pytest.approx(d.mean())


def test_g_point_mass_closed_form():
    c, a = 3.0, 0.7
    for u in (0.0, 0.5, 4.0):
        assert stieltjes_g_h(point_mass(c), u, a) == pytest.approx(c / (1 + c * u / a))


def test_h_matches_finite_spectrum():
    m = _model(alpha11=1.0, snr_db=10.0)
    d = upa_power_distribution(m)
    m2 = 256
    l2 = round(m.L2_inf * m2)
    rng = np.random.default_rng(0)
    V2 = np.linalg.qr(draw_channel(rng, m2, l2))[0]
    gamma = m2 * m.p2_max / l2
    spec = np.linalg.eigvalsh((V2 * gamma) @ V2.conj().T)
    for u in (0.1, 1.0, 5.0):
        emp = np.mean(spec / (1 + spec * u / 1.0))
        assert stieltjes_g_h(d, u, 1.0) == pytest.approx(emp, rel=0.01)


def test_zero_power_gives_free_resolvent():
    z = np.linspace(-10, -0.1, 20)
    assert np.array_equal(solve_GM1(z, point_mass(0.0), 1.0), -1.0 / z)
    d1 = point_mass(2.0)
    np.testing.assert_array_equal(solve_GM(z, d1, point_mass(0.0), 1.0, 1.0), solve_GM1(z, d1, 1.0))


def test_fixed_point_rejects_positive_z():
    with pytest.raises(InvalidSpecError):
        solve_GM1(0.5, point_mass(1.0), 1.0)


def test_fixed_point_matches_sampled_resolvent():
    rng = np.random.default_rng(4)
    n, alpha21 = 512, 0.75
    vals, masses = np.array([0.0, 1.0, 4.0]), np.array([0.2, 0.5, 0.3])
    m1 = int(alpha21 * n)
    p = sampled_power_profile(vals, masses, m1)
    H = draw_channel(rng, n, m1)
    eigs = np.linalg.eigvalsh((H * p) @ H.conj().T)
    z = np.array([-5.0, -1.0, -0.2])
    G = solve_GM1(z, LimitingPowerDistribution(vals, masses), alpha21)
    np.testing.assert_allclose(G, empirical_stieltjes(eigs, z), rtol=0.01)
    assert np.all((G > 0) & (G <= -1 / z))


def test_rate_zero_without_secondary_power():
    m = _model()
    assert asymptotic_rate(m, primary_power_distribution(m), point_mass(0.0)) == 0.0


def test_rate_integrand_non_negative_and_converged():
    m = _model(snr_db=10.0)
    det = asymptotic_rate_details(m, primary_power_distribution(m), upa_power_distribution(m))
    assert det.value > 0
    assert det.min_integrand >= -1e-12
    assert det.error_estimate <= 1e-6


def test_rate_without_primary_is_single_user_limit():
    # with P1 = 0 the secondary sees white noise; the rate per receive
    # antenna is the known closed form for an i.i.d. channel at equal
    # ratios: E[log2(1 + snr * lambda)] under the unit-ratio MP law
    m = _model(snr_db=10.0)
    snr = 10.0
    rate = asymptotic_rate(m, point_mass(0.0), point_mass(snr))
    ref = mp_expectation(MpLaw(1.0), lambda x: math.log2(1 + snr * x))
    assert rate == pytest.approx(ref, rel=1e-5)


def test_primary_rate_limit_matches_finite_size():
    m = _model(snr_db=10.0)
    rates = []
    for t in range(5):
        tr = primary_transceiver(draw_channel(trial_rng(5, t), 128, 128))
        sol = waterfill(tr.lam_sq, 1.0, 128 * m.p1_max)
        rates.append(np.sum(np.log2(1 + tr.lam_sq * sol.powers)) / 128)
    assert np.mean(rates) == pytest.approx(asymptotic_primary_rate(m), rel=0.01)
