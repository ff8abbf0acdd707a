import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from rmt_lab.sc import (
    SpectralPoint,
    classical_locations,
    edge_params,
    gamma_alpha,
    kappa,
    m_sc,
    n_sc,
    pi_bound,
    rho,
    theta,
)


def density(x):
    return math.sqrt(max(4 - x * x, 0.0)) / (2 * math.pi)


def quad_stieltjes(z):
    re = integrate.quad(lambda x: density(x) * ((x - z) / abs(x - z) ** 2).real, -2, 2, limit=400)[0]
    im = integrate.quad(lambda x: density(x) * ((x - z).conjugate() / abs(x - z) ** 2).imag, -2, 2, limit=400)[0]
    return complex(re, im)


def test_rho_values():
    assert rho(0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert rho(2) == 0 and rho(-2) == 0
    assert rho(1) == pytest.approx(math.sqrt(3) / (2 * math.pi), abs=1e-15)
    assert rho(3) == 0


def test_m_sc_examples():
    assert m_sc(2j) == pytest.approx((math.sqrt(2) - 1) * 1j, abs=1e-15)
    assert abs(m_sc(100j) - (-1 / 100j)) <= 2e-4


@pytest.mark.parametrize("z", [0.5 + 0.3j, -1.9 + 0.05j, 2.5 + 0.01j, -3 + 1j, 0.1j])
def test_m_sc_matches_quadrature(z):
    assert abs(m_sc(z) - quad_stieltjes(z)) <= 1e-7


def test_m_fixed_point_on_grid():
    e = np.linspace(-10, 10, 100)
    eta = np.geomspace(1e-4, 10, 100)
    z = (e[:, None] + 1j * eta[None, :]).ravel()
    m = m_sc(z)
    assert z.size == 10_000
    assert np.max(np.abs(m + 1 / m + z)) <= 1e-12
    assert np.all(m.imag > 0)
    assert np.all(np.abs(m) <= 1 + 1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(1e-8, 10))
def test_m_sc_invariants(e, eta):
    m = m_sc(complex(e, eta))
    assert abs(m + 1 / m + complex(e, eta)) <= 1e-12
    assert m.imag > 0
    assert abs(m) <= 1


def test_n_sc_examples():
    assert n_sc(-2) == 0 and n_sc(2) == 1
    assert n_sc(0) == pytest.approx(0.5, abs=1e-15)
    oracle = integrate.quad(density, -2, -0.808)[0]
    assert n_sc(-0.808) == pytest.approx(oracle, abs=1e-10)
    assert abs(n_sc(-0.808) - 0.25) <= 1e-3


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2))
def test_n_sc_matches_quadrature(e):
    assert n_sc(e) == pytest.approx(integrate.quad(density, -2, e)[0], abs=1e-9)


def test_gamma_alpha_examples():
    assert gamma_alpha(1000, 500) == pytest.approx(0, abs=1e-11)
    assert gamma_alpha(1000, 1000) == 2
    oracle = optimize.brentq(lambda x: integrate.quad(density, -2, x)[0] - 0.25, -2, 2, xtol=1e-14)
    assert gamma_alpha(1000, 250) == pytest.approx(oracle, abs=1e-10)
    assert gamma_alpha(1000, 250) == pytest.approx(-0.808, abs=1e-3)


def test_classical_locations_sorted_and_symmetric():
    g = classical_locations(101)
    assert np.all(np.diff(g) > 0)
    # n(gamma_a) = a/N and n(-x) = 1 - n(x) give gamma_a = -gamma_{N-a}
    np.testing.assert_allclose(g[:-1], -g[-2::-1], atol=1e-11)
    np.testing.assert_allclose(n_sc(g), np.arange(1, 102) / 101, atol=1e-11)


def test_edge_params_examples():
    assert edge_params(complex(0, 0.3)).kappa == 2
    for eta in (1e-2, 1e-4, 1e-6):
        assert edge_params(complex(2, eta)).theta == pytest.approx(math.sqrt(eta), rel=1e-12)
    ref = edge_params(0.01j)
    assert abs(ref.im_m - m_sc(0.01j).imag) <= 1e-6
    assert 1 / 10 <= ref.im_m / math.sqrt(ref.kappa + 0.01) <= 10


def test_theta_branches():
    assert theta(0.0, 0.1) == pytest.approx(2 + 0.1 / math.sqrt(2.1))
    assert theta(3.0, 0.1) == pytest.approx(math.sqrt(1.1))
    assert kappa(-2.5) == pytest.approx(0.5)


def test_pi_bound():
    z, big_m = 0.3 + 0.02j, 500.0
    m = m_sc(z)
    expected = math.sqrt(m.imag / (big_m * 0.02)) + 1 / (big_m * 0.02)
    assert pi_bound(z, big_m) == pytest.approx(expected, rel=1e-14)
    assert edge_params(z, big_m).pi_bound == pytest.approx(expected, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(1e-6, 10))
def test_im_m_comparable_to_sqrt_kappa_eta(e, eta):
    # comparability constants are uniform on |E| <= 10, eta <= 10 but not small there
    ref = edge_params(complex(e, eta))
    scale = math.sqrt(ref.kappa + eta) if abs(e) <= 2 else eta / math.sqrt(ref.kappa + eta)
    assert 1 / 50 <= ref.im_m / scale <= 50


def test_spectral_point():
    p = SpectralPoint(0.5, 0.1)
    assert p.z == 0.5 + 0.1j and complex(p) == p.z
    assert p.in_domain(100) and not p.in_domain(5)
    with pytest.raises(ValueError):
        SpectralPoint(0.0, 0.0)
