"""Stability of the self-consistent equation: Gamma, Gamma-tilde, spectral gaps of S and the
lower boundary of the spectral domain.

Gamma(z) is the l^inf -> l^inf norm of B = (1 - m(z)^2 S)^{-1}. Gamma-tilde is the norm of B
restricted to the complement of the constant vector. For a row b of B the restricted row norm
is, by duality of l^inf on {v : sum v = 0} with l^1 modulo constants,

    sup_{v perp e, |v|_inf <= 1} |b . v| = min_c sum_j |b_j - c|,

a planar geometric-median problem that we solve per row. The cheaper surrogate |B P|_inf
(c = row mean) is reported alongside; it is an upper bound within a factor 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericallySingularError
from .profile import VarianceProfile
from .sc import SpectralPoint, as_z, m_sc

ETA_GRID_RATIO = 1.02
ETA_MAX = 10.0


@dataclass(frozen=True)
class StabilityParams:
    z: complex
    gamma: float
    gamma_tilde: float
    gamma_tilde_surrogate: float
    delta_minus: float
    delta_plus: float


@dataclass(frozen=True)
class DomainThresholds:
    e: float
    gamma_exponent: float
    eta_tilde: float
    eta_lower: float
    clamped_tilde: bool = False
    clamped_lower: bool = False
    empty: bool = False


def spectral_gaps(profile: VarianceProfile) -> tuple[float, float]:
    """(delta_minus, delta_plus): distance of spec(S) from -1, and of spec(S|e^perp) from +1."""
    w, _ = profile.eigh
    delta_minus = 1.0 + w[0]
    delta_plus = 1.0 - w[-2] if len(w) > 1 else 1.0
    return float(np.clip(delta_minus, 0.0, 2.0)), float(np.clip(delta_plus, 0.0, 2.0))


def stability_rows(profile: VarianceProfile, z, method: str = "auto") -> np.ndarray:
    """Rows of B = (1 - m^2 S)^{-1} that determine its row-sum norms.

    For translation-invariant profiles all rows are permutations of row 0, so only that
    row is returned. ``method`` is ``"eig"`` (cached eigendecomposition of S), ``"lu"``
    (dense solve) or ``"auto"``.
    """
    m2 = complex(m_sc(as_z(z))) ** 2
    if method == "lu":
        a = np.eye(profile.n) - m2 * profile.s
        try:
            b = np.linalg.solve(a, np.eye(profile.n, dtype=complex))
        except np.linalg.LinAlgError as exc:
            raise NumericallySingularError(f"1 - m^2 S is singular at z={z}") from exc
        return b[:1] if profile.translation_invariant else b
    w, v = profile.eigh
    denom = 1.0 - m2 * w
    if np.min(np.abs(denom)) < 1e-14:
        raise NumericallySingularError(f"1 - m^2 S is singular at z={z}")
    scaled = v / denom
    if profile.translation_invariant:
        return (scaled[:1] @ v.T)
    return scaled @ v.T


def l1_distance_to_constants(rows: np.ndarray, max_iter: int = 500, rtol: float = 1e-13,
                             n_vertex: int = 4) -> np.ndarray:
    """min_c sum_j |rows[i, j] - c| per row, over complex c (Weiszfeld iteration).

    Every candidate c gives an upper bound, so the best value seen is returned. The
    coordinatewise median seeds the iteration and already hits the optimum when a
    majority of entries coincide. Weiszfeld stalls when the optimum is one of the
    entries, so the entries nearest the final iterate are scored as well.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    c = np.median(rows.real, axis=1) + 1j * np.median(rows.imag, axis=1)
    # c = 0 keeps the result below the plain row-sum norm
    best = np.minimum(np.abs(rows - c[:, None]).sum(axis=1), np.abs(rows).sum(axis=1))
    scale = np.abs(rows).max(axis=1) + 1e-300
    for _ in range(max_iter):
        d = np.abs(rows - c[:, None])
        d = np.maximum(d, 1e-15 * scale[:, None])
        wts = 1.0 / d
        c_new = (rows * wts).sum(axis=1) / wts.sum(axis=1)
        val = np.abs(rows - c_new[:, None]).sum(axis=1)
        best = np.minimum(best, val)
        step = np.max(np.abs(c_new - c) / scale)
        c = c_new
        if step < rtol:
            break
    k = min(n_vertex, rows.shape[1])
    near = np.argpartition(np.abs(rows - c[:, None]), k - 1, axis=1)[:, :k]
    for j in range(k):
        cand = np.take_along_axis(rows, near[:, j:j + 1], axis=1)
        best = np.minimum(best, np.abs(rows - cand).sum(axis=1))
    return best


def gamma_norms(profile: VarianceProfile, z, method: str = "auto") -> StabilityParams:
    zc = complex(as_z(z))
    b = stability_rows(profile, zc, method)
    gamma = float(np.abs(b).sum(axis=1).max())
    centred = b - b.mean(axis=1, keepdims=True)
    surrogate = float(np.abs(centred).sum(axis=1).max())
    tilde = float(l1_distance_to_constants(b).max())
    dm, dp = spectral_gaps(profile)
    return StabilityParams(zc, gamma, min(tilde, surrogate), surrogate, dm, dp)


def restricted_norm_lower_estimate(profile: VarianceProfile, z, n_vectors: int = 100, seed: int = 0) -> float:
    """max over random v perp e of |B v|_inf / |v|_inf, a lower bound for Gamma-tilde."""
    m2 = complex(m_sc(as_z(z))) ** 2
    w, v = profile.eigh
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((profile.n, n_vectors)) + 1j * rng.standard_normal((profile.n, n_vectors))
    x = np.exp(1j * np.angle(x))
    x -= x.mean(axis=0)
    bx = v @ ((v.T @ x) / (1.0 - m2 * w)[:, None])
    return float(np.max(np.abs(bx).max(axis=0) / np.abs(x).max(axis=0)))


def eta_grid(m_param: float, ratio: float = ETA_GRID_RATIO, eta_max: float = ETA_MAX) -> np.ndarray:
    """Decreasing geometric grid from eta_max down to 1/M (1/M appended as the last point)."""
    eta_min = 1.0 / m_param
    if eta_min >= eta_max:
        return np.array([eta_max])
    k = int(math.floor(math.log(eta_max / eta_min) / math.log(ratio)))
    grid = eta_max / ratio ** np.arange(k + 1)
    if grid[-1] > eta_min:
        grid = np.append(grid, eta_min)
    return grid


def domain_condition(m_param: float, gamma_value, im_m, eta, gamma_exponent: float):
    """1/(M eta) <= min(M^-g / G^3, M^-2g / (G^4 Im m))."""
    rhs = np.minimum(m_param ** -gamma_exponent / gamma_value ** 3,
                     m_param ** (-2 * gamma_exponent) / (gamma_value ** 4 * im_m))
    return 1.0 / (m_param * eta) <= rhs


def eta_thresholds(profile: VarianceProfile, e: float, gamma_exponent: float,
                   ratio: float = ETA_GRID_RATIO) -> DomainThresholds:
    """Lower boundaries eta-tilde_E (from Gamma-tilde) and eta_E (from Gamma).

    Scans the grid downward from eta = 10; each boundary is the last grid point before
    the condition first fails.
    """
    if abs(e) > 10:
        raise ValueError("|e| must be at most 10")
    if not 0 < gamma_exponent < 0.5:
        raise ValueError("gamma_exponent must lie in (0, 1/2)")
    big_m = profile.m_param
    grid = eta_grid(big_m, ratio)
    last = {"tilde": None, "lower": None}
    alive = {"tilde": True, "lower": True}
    for eta in grid:
        params = gamma_norms(profile, complex(e, eta))
        im_m = complex(m_sc(complex(e, eta))).imag
        for key, g in (("tilde", params.gamma_tilde), ("lower", params.gamma)):
            if alive[key]:
                if domain_condition(big_m, g, im_m, eta, gamma_exponent):
                    last[key] = eta
                else:
                    alive[key] = False
        if not any(alive.values()):
            break
    empty = last["tilde"] is None
    eta_t = math.inf if last["tilde"] is None else float(last["tilde"])
    eta_l = math.inf if last["lower"] is None else float(last["lower"])
    return DomainThresholds(
        e=float(e),
        gamma_exponent=gamma_exponent,
        eta_tilde=eta_t,
        eta_lower=eta_l,
        clamped_tilde=alive["tilde"],
        clamped_lower=alive["lower"],
        empty=empty,
    )


def domain_grid(profile: VarianceProfile, gamma_exponent: float, n_e: int, n_eta: int,
                e_range=(-10.0, 10.0), eta_range=None) -> list[SpectralPoint]:
    """Uniform-E by geometric-eta grid, keeping points with eta-tilde_E <= eta <= 10."""
    if n_e < 2 or n_eta < 2:
        raise ValueError("grid sizes must be at least 2")
    lo, hi = eta_range if eta_range is not None else (1.0 / profile.m_param, ETA_MAX)
    lo = max(lo, 1.0 / profile.m_param)
    hi = min(hi, ETA_MAX)
    etas = np.geomspace(lo, hi, n_eta)
    points = []
    for e in np.linspace(e_range[0], e_range[1], n_e):
        thr = eta_thresholds(profile, float(e), gamma_exponent)
        points.extend(SpectralPoint(float(e), float(eta)) for eta in etas if eta >= thr.eta_tilde)
    return points
