import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from rmt_lab.profile import band_profile, custom_profile, identity_profile, mean_field_profile, mixture_profile
from rmt_lab.sc import edge_params, m_sc
from rmt_lab.stability import (
    domain_condition,
    domain_grid,
    eta_grid,
    eta_thresholds,
    gamma_norms,
    l1_distance_to_constants,
    restricted_norm_lower_estimate,
    spectral_gaps,
    stability_rows,
)


def random_profile(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 1, (n, n)) ** 3
    return custom_profile(a + a.T + 0.05)


def restricted_norm_oracle(b):
    """max_i min_c sum_j |b_ij - c| by generic 2-d minimization."""
    best = 0.0
    for row in b:
        f = lambda c: np.abs(row - complex(c[0], c[1])).sum()
        starts = [(row.real.mean(), row.imag.mean()), (np.median(row.real), np.median(row.imag))]
        val = min(optimize.minimize(f, x0, method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20_000}).fun
                  for x0 in starts)
        best = max(best, val)
    return best


@pytest.mark.parametrize("n", [1, 8, 64])
@pytest.mark.parametrize("z", [0.3 + 0.05j, -1.99 + 0.001j, 2.5 + 0.2j])
def test_mean_field_closed_forms(n, z):
    p = gamma_norms(mean_field_profile(n), z)
    m = m_sc(z)
    c = m * m / (1 - m * m)
    assert p.gamma == pytest.approx(abs(1 + c / n) + (n - 1) * abs(c) / n, rel=1e-10)
    if n > 1:
        assert p.gamma_tilde == pytest.approx(1.0, abs=1e-10)
        assert p.gamma_tilde_surrogate == pytest.approx(2 * (n - 1) / n, rel=1e-10)
    # S = [1] when n = 1, whose only eigenvalue sits at distance 2 from -1
    assert p.delta_minus == pytest.approx(1.0 if n > 1 else 2.0, abs=1e-10)


@pytest.mark.parametrize("profile", [band_profile(1, 30, 4), random_profile(25, 1),
                                     mixture_profile(band_profile(1, 30, 2), mean_field_profile(30), 0.3)],
                         ids=["band", "random", "mixture"])
def test_b_fixes_constant_vector(profile):
    z = 0.4 + 0.03j
    b = stability_rows(profile, z, "lu")
    m2 = m_sc(z) ** 2
    rows = b.shape[0]
    np.testing.assert_allclose(b.sum(axis=1), np.full(rows, 1 / (1 - m2)), atol=1e-10)


def test_eig_and_lu_agree():
    for prof in (random_profile(30, 2), band_profile(1, 40, 5)):
        for z in (0.1 + 0.01j, 1.95 + 0.002j, -2.3 + 0.1j):
            a = gamma_norms(prof, z, "eig")
            b = gamma_norms(prof, z, "lu")
            assert a.gamma == pytest.approx(b.gamma, rel=1e-9)
            assert a.gamma_tilde == pytest.approx(b.gamma_tilde, rel=1e-8)


def test_translation_invariant_shortcut_matches_full_rows():
    prof = band_profile(1, 40, 5)
    full = custom_profile(prof.s)  # same matrix, not flagged invariant
    for z in (0.5 + 0.05j, 2.1 + 0.01j):
        a, b = gamma_norms(prof, z), gamma_norms(full, z)
        assert a.gamma == pytest.approx(b.gamma, rel=1e-9)
        assert a.gamma_tilde == pytest.approx(b.gamma_tilde, rel=1e-7)


@pytest.mark.parametrize("seed", range(8))
def test_exact_restricted_norm_against_generic_minimizer(seed):
    prof = random_profile(12, seed)
    z = complex(np.random.default_rng(seed).uniform(-2.5, 2.5), 0.02)
    b = stability_rows(prof, z, "lu")
    got = float(l1_distance_to_constants(b).max())
    assert got == pytest.approx(restricted_norm_oracle(b), rel=1e-6)


def test_restricted_norm_brackets():
    for prof in (band_profile(1, 64, 4), random_profile(40, 3)):
        for z in (0.0 + 0.05j, 1.9 + 0.01j, -2.2 + 0.05j):
            p = gamma_norms(prof, z)
            lower = restricted_norm_lower_estimate(prof, z, 100)
            assert lower <= p.gamma_tilde * (1 + 1e-9)
            assert p.gamma_tilde <= p.gamma_tilde_surrogate * (1 + 1e-12)
            assert p.gamma_tilde_surrogate <= 2 * p.gamma_tilde * (1 + 1e-9)
            assert lower <= p.gamma_tilde_surrogate
            assert p.gamma_tilde <= p.gamma * (1 + 1e-12)


def test_l1_distance_majority_row():
    rows = np.array([[1.0, 1.0, 1.0, 5.0, -3.0]])
    assert l1_distance_to_constants(rows)[0] == pytest.approx(8.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(1e-3, 5))
def test_norm_invariants(seed, e, eta):
    prof = random_profile(10, seed)
    p = gamma_norms(prof, complex(e, eta))
    ref = edge_params(complex(e, eta))
    assert p.gamma_tilde <= p.gamma * (1 + 1e-12)
    assert p.gamma_tilde > 0.5
    # lower bound with C = 10
    assert p.gamma >= 1 / (10 * math.sqrt(ref.kappa + eta))


def test_spectral_gap_examples():
    dm, dp = spectral_gaps(mean_field_profile(50))
    assert dm == pytest.approx(1) and dp == pytest.approx(1)
    for seed in range(5):
        prof = random_profile(20, seed)
        a = prof.n * prof.s.min()
        dm, dp = spectral_gaps(prof)
        assert dm >= a - 1e-12 and dp >= a - 1e-12


def test_band_upper_gap_scaling():
    ratios = []
    for l in (32, 64, 128):
        for w in (2, 4, 8):
            _, dp = spectral_gaps(band_profile(1, l, w))
            ratios.append(dp / (w / l) ** 2)
    assert min(ratios) > 0.5


def test_eta_grid():
    g = eta_grid(100.0)
    assert g[0] == 10 and g[-1] == pytest.approx(0.01)
    np.testing.assert_allclose(g[1:-1] / g[:-2], 1 / 1.02)


@pytest.mark.parametrize("profile", [mean_field_profile(200), band_profile(1, 128, 8),
                                     mixture_profile(band_profile(1, 128, 4), mean_field_profile(128), 0.2)],
                         ids=["mean_field", "band", "mixture"])
@pytest.mark.parametrize("e", [0.0, 1.9, -2.5])
def test_eta_threshold_defining_property(profile, e):
    gexp = 0.05
    thr = eta_thresholds(profile, e, gexp)
    big_m = profile.m_param
    assert thr.eta_tilde >= 1 / big_m * (1 - 1e-12)
    assert thr.eta_tilde <= thr.eta_lower
    for eta, key in ((thr.eta_tilde, "gamma_tilde"), (thr.eta_lower, "gamma")):
        z = complex(e, eta)
        g = getattr(gamma_norms(profile, z), key)
        assert domain_condition(big_m, g, m_sc(z).imag, eta, gexp)
    if not thr.clamped_tilde:
        z = complex(e, thr.eta_tilde / 1.02)
        g = gamma_norms(profile, z).gamma_tilde
        assert not domain_condition(big_m, g, m_sc(z).imag, z.imag, gexp)


def test_mean_field_threshold_closed_form():
    # Gamma-tilde = 1 for mean field, so the boundary solves 1/(M eta) = min(M^-g, M^-2g / Im m)
    n, gexp = 400, 0.1
    f = lambda eta: 1 / (n * eta) - min(n ** -gexp, n ** (-2 * gexp) / m_sc(1j * eta).imag)
    root = optimize.brentq(f, 1 / n, 10, xtol=1e-15)
    thr = eta_thresholds(mean_field_profile(n), 0.0, gexp)
    assert root <= thr.eta_tilde <= 1.02 * root


def test_identity_profile_clamps_at_one_over_m():
    thr = eta_thresholds(identity_profile(3), 0.0, 0.2)
    assert thr.eta_tilde == 1.0 and thr.clamped_tilde and not thr.empty


def test_empty_domain_flag(monkeypatch):
    import rmt_lab.stability as stab

    monkeypatch.setattr(stab, "domain_condition", lambda *a: False)
    thr = stab.eta_thresholds(mean_field_profile(10), 0.0, 0.2)
    assert thr.empty and math.isinf(thr.eta_tilde) and math.isinf(thr.eta_lower)
    assert stab.domain_grid(mean_field_profile(10), 0.2, 2, 2) == []


def test_domain_grid():
    prof = band_profile(1, 64, 4)
    pts = domain_grid(prof, 0.05, 5, 6)
    assert pts
    cache = {}
    for p in pts:
        assert p.eta >= 1 / prof.m_param
        thr = cache.setdefault(p.e, eta_thresholds(prof, p.e, 0.05))
        assert p.eta >= thr.eta_tilde
    with pytest.raises(ValueError):
        domain_grid(prof, 0.05, 1, 6)


@pytest.mark.parametrize("z", [2.5 + 0.0588j, -2.25 + 0.0588j, 2.5 + 0.104j])
def test_restricted_norm_never_exceeds_row_sum_norm_outside_spectrum(z):
    # rows of B decay to a cluster of near-zero entries here, where Weiszfeld crawls
    p = gamma_norms(band_profile(1, 256, 8), z)
    assert p.gamma_tilde <= p.gamma
