import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmt_lab.errors import PivotDegeneracyError, WeightConditionError
from rmt_lab.profile import (
    EnsembleSpec,
    band_profile,
    draw_real,
    draw_zeta,
    identity_profile,
    mean_field_profile,
    mixture_profile,
    sample,
)
from rmt_lab.resolvent import (
    check_weights,
    control,
    fluct_avg,
    green,
    minor,
    resampled_diagonal,
    schur_terms,
    schur_terms_all,
    stieltjes,
)
from rmt_lab.sc import edge_params, m_sc, pi_bound


def direct_minor(h, z, t):
    keep = [k for k in range(h.shape[0]) if k not in set(t)]
    sub = h[np.ix_(keep, keep)]
    return np.linalg.inv(sub - z * np.eye(len(keep)))


def goe(n, seed, symmetry="real_symmetric"):
    return sample(EnsembleSpec(mean_field_profile(n), symmetry=symmetry, seed=seed), 0)


def test_zero_matrix_resolvent():
    b = green(np.zeros((3, 3)), 1j)
    np.testing.assert_allclose(b.g, 1j * np.eye(3), atol=1e-15)
    assert b.m_n == pytest.approx(1j)


def test_diagonal_resolvent():
    d = np.array([-1.0, 0.3, 2.0])
    b = green(np.diag(d), 0.1 + 0.2j)
    np.testing.assert_allclose(b.g, np.diag(1 / (d - (0.1 + 0.2j))), atol=1e-15)


@pytest.mark.parametrize("symmetry", ["real_symmetric", "complex_hermitian"])
def test_resolvent_residual(symmetry):
    h = goe(50, 1, symmetry)
    b = green(h, 0.2 + 0.01j)
    assert np.abs((h.h - b.z * np.eye(50)) @ b.g - np.eye(50)).max() <= 1e-9
    assert b.m_n == np.trace(b.g) / 50
    np.testing.assert_allclose(stieltjes(b.eigenvalues, b.z), b.m_n, atol=1e-13)
    other = b.at(0.5 + 0.1j)
    np.testing.assert_allclose(other.g, np.linalg.inv(h.h - (0.5 + 0.1j) * np.eye(50)), atol=1e-10)


def test_green_rejects_real_z():
    with pytest.raises(ValueError):
        green(np.zeros((2, 2)), 0.5)


def test_minor_small_examples():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3))
    h = (a + a.T) / 2
    z = 0.3 + 0.4j
    b = green(h, z)
    np.testing.assert_allclose(minor(b, [1]), direct_minor(h, z, [1]), atol=1e-10)
    for i in range(3):
        rest = [k for k in range(3) if k != i]
        assert minor(b, rest)[0, 0] == pytest.approx(1 / (h[i, i] - z), abs=1e-10)
    np.testing.assert_allclose(minor(b, [0, 2]), minor(b, [2, 0]), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 100), st.integers(0, 2**32 - 1), st.data())
def test_minor_matches_reinversion(n, seed, data):
    t = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=3, unique=True))
    h = goe(n, seed).h
    z = complex(data.draw(st.floats(-2.5, 2.5)), data.draw(st.floats(0.01, 2)))
    got = minor(green(h, z), t)
    assert np.abs(got - direct_minor(h, z, t)).max() <= 1e-9
    np.testing.assert_allclose(minor(green(h, z), t[::-1]), got, atol=1e-10)


def test_minor_pivot_degeneracy():
    g = np.array([[0.0, 1.0], [1.0, 2.0]], dtype=complex)
    with pytest.raises(PivotDegeneracyError):
        minor(g, [0])
    with pytest.raises(ValueError):
        minor(g, [0, 1])


def test_control_zero_matrix():
    z = 0.4 + 0.2j
    ref = edge_params(z, 3)
    c = control(green(np.zeros((3, 3)), z), ref)
    assert c.lambda_o == 0
    assert c.lambda_d == pytest.approx(abs(-1 / z - m_sc(z)), abs=1e-14)
    assert c.lambda_ == max(c.lambda_o, c.lambda_d)
    assert c.pi_bound == pytest.approx(pi_bound(z, 3))


def test_control_identities():
    h = goe(64, 3)
    z = 0.1 + 0.05j
    b = green(h, z)
    c = control(b, edge_params(z, 64))
    assert c.theta_param == pytest.approx(abs(b.m_n - m_sc(z)), abs=1e-14)
    assert c.theta_param == abs(c.v_avg)
    with pytest.raises(ValueError):
        control(b, edge_params(z + 0.1, 64))


def test_theta_goe_monte_carlo():
    n, z = 1024, 0.1j
    spec = EnsembleSpec(mean_field_profile(n), seed=77)
    m = m_sc(z)
    hits = sum(abs(stieltjes(np.linalg.eigvalsh(sample(spec, k).h), z) - m) <= 10 / (n * 0.1) for k in range(100))
    assert hits >= 95


def mixed_samples():
    profiles = [mean_field_profile(16), band_profile(1, 64, 4),
                mixture_profile(band_profile(1, 256, 8), mean_field_profile(256), 0.3)]
    out = []
    for p in profiles:
        for sym in ("real_symmetric", "complex_hermitian"):
            for k in range(2):
                out.append(sample(EnsembleSpec(p, "rademacher" if k else "gaussian", sym, seed=11), k))
    return out


@pytest.mark.parametrize("h", mixed_samples(), ids=lambda h: f"n{h.n}-{h.spec.symmetry}-{h.sample_index}")
def test_schur_identities(h):
    z = 0.3 + 0.02j
    ref = edge_params(z, h.spec.profile.m_param)
    b = green(h, z)
    arr = schur_terms_all(h, b, ref)
    assert np.abs(arr.residual).max() <= 1e-9
    np.testing.assert_allclose(arr.upsilon, arr.a + np.diag(h.h).real - arr.z, atol=0)
    np.testing.assert_allclose(1 / np.diag(b.g), np.diag(h.h) - z - arr.quad_form, atol=1e-9)
    for i in (0, h.n // 2, h.n - 1):
        t = schur_terms(h, b, ref, i)
        assert abs(t.residual) <= 1e-9
        assert abs(t.schur_residual) <= 1e-9
        assert t.upsilon_i == t.a_i + h.h[i, i] - t.z_i
        assert t.upsilon_i == pytest.approx(arr.upsilon[i], abs=1e-10)
        assert t.quad_form == pytest.approx(arr.quad_form[i], abs=1e-10)


def test_schur_diagonal_matrix():
    spec = EnsembleSpec(identity_profile(6), seed=4)
    h = sample(spec, 0)
    assert np.count_nonzero(h.h - np.diag(np.diag(h.h))) == 0
    z = 0.2 + 0.3j
    ref = edge_params(z, 1)
    b = green(h, z)
    for i in range(6):
        t = schur_terms(h, b, ref, i)
        # the quadratic form is empty; A_i keeps its k = i term s_ii G_ii
        assert t.z_i == 0 and t.quad_form == 0
        assert t.a_i == pytest.approx(b.g[i, i], abs=1e-15)
        assert t.upsilon_i == pytest.approx(h.h[i, i] + b.g[i, i], abs=1e-15)
        assert abs(t.residual) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 100), st.integers(0, 2**32 - 1), st.floats(-2.5, 2.5), st.floats(0.005, 1))
def test_resolvent_expansion_identity(n, seed, e, eta):
    # G_ij + G_ii sum_k h_ik G^(i)_kj = 0 for i != j
    h = goe(n, seed).h
    g = green(h, complex(e, eta)).g
    i = seed % n
    gi = minor(g, [i])
    others = [k for k in range(n) if k != i]
    lhs = g[i, others] + g[i, i] * (h[i, others] @ gi)
    assert np.abs(lhs).max() <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 100), st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(1e-3, 5))
def test_ward_identity(n, seed, e, eta):
    g = green(goe(n, seed, "complex_hermitian"), complex(e, eta)).g
    np.testing.assert_allclose((np.abs(g) ** 2).sum(axis=1), np.diag(g).imag / eta, rtol=1e-8, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 80), st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_y_im_m_monotone(n, seed, x):
    lam = np.linalg.eigvalsh(goe(n, seed).h)
    y = np.geomspace(1e-4, 10, 200)
    vals = y * stieltjes(lam, x + 1j * y).imag
    assert np.all(np.diff(vals) >= -1e-12)


def test_fluct_avg_diagonal_closed_form():
    h = sample(EnsembleSpec(identity_profile(20), seed=2), 0)
    z = 0.1 + 0.5j
    b = green(h, z)
    # M = 1 here, so t = 1/N satisfies the weight conditions
    fa = fluct_avg(h, b, np.full((20, 20), 1 / 20), resamples=0, ref=edge_params(z, 1))
    np.testing.assert_allclose(fa.sum_q_inv, np.mean(np.diag(h.h)), atol=1e-12)
    np.testing.assert_allclose(fa.q_inv, np.diag(h.h), atol=1e-12)
    assert fa.sum_q_g is None


def test_fluct_avg_single_term_weight():
    h = goe(40, 5)
    z = 0.2 + 0.1j
    ref = edge_params(z, 40)
    b = green(h, z)
    fa = fluct_avg(h, b, np.eye(40) / 40, resamples=0, ref=ref)
    arr = schur_terms_all(h, b, ref)
    np.testing.assert_allclose(fa.sum_q_inv, (np.diag(h.h) - arr.z) / 40, atol=1e-14)
    np.testing.assert_allclose(fa.sum_v, (np.diag(b.g) - ref.m) / 40, atol=1e-14)


def test_weight_conditions():
    with pytest.raises(WeightConditionError):
        check_weights(np.full((4, 4), 0.5), 4)
    with pytest.raises(WeightConditionError):
        check_weights(np.full((4, 4), 0.3), 2)
    check_weights(band_profile(1, 20, 3).s, band_profile(1, 20, 3).m_param)
    with pytest.raises(WeightConditionError):
        fluct_avg(goe(10, 0), green(goe(10, 0), 1j), np.eye(10), resamples=0)


def test_resampled_diagonal_against_explicit_replacement():
    h = sample(EnsembleSpec(band_profile(1, 30, 6), symmetry="complex_hermitian", seed=8), 0)
    z, k = 0.3 + 0.05j, 7
    b = green(h, z)
    rng = np.random.default_rng(123)
    got = resampled_diagonal(h, b, k, 3, rng)
    rng = np.random.default_rng(123)
    zeta = draw_zeta(h.spec, rng, (3, 30))
    diag = draw_real(h.spec.entry_law, rng, 3)
    s = h.spec.profile.s
    for r in range(3):
        hh = h.h.copy()
        row = zeta[r] * np.sqrt(s[k])
        row[k] = diag[r] * np.sqrt(s[k, k])
        hh[k, :] = row
        hh[:, k] = row.conj()
        hh[k, k] = row[k].real
        assert got[r] == pytest.approx(np.linalg.inv(hh - z * np.eye(30))[k, k], abs=1e-10)


def test_fluct_avg_q_g_resampling():
    h = goe(60, 9)
    z = 0.1 + 0.2j
    fa = fluct_avg(h, green(h, z), np.full((60, 60), 1 / 60), resamples=32, ref=edge_params(z, 60), seed=1)
    assert fa.q_g.shape == (60,) and np.all(np.isfinite(fa.q_g_stderr))
    np.testing.assert_allclose(fa.sum_q_g, fa.q_g.mean(), atol=1e-14)
    # the conditional fluctuation is small compared with |G_kk|
    assert np.median(np.abs(fa.q_g)) < 0.5


def test_fluctuation_averaging_quadratic_gain():
    n = 512
    z = complex(0, n ** -0.5)
    ref = edge_params(z, n)
    spec = EnsembleSpec(mean_field_profile(n), seed=31)
    avg, single = [], []
    for k in range(100):
        h = sample(spec, k)
        q = schur_terms_all(h, green(h, z), ref).q_inv
        avg.append(abs(q.mean()))
        single.append(np.abs(q).max())
    pi = ref.pi_bound
    assert np.median(avg) <= 10 * pi ** 2
    assert np.median(single) >= pi / 10


def test_schur_requires_sample_matrix():
    h = goe(5, 0)
    b = green(h, 1j)
    with pytest.raises(TypeError):
        schur_terms_all(h.h, b, edge_params(1j))
