"""Semicircle law reference quantities.

All functions broadcast over numpy arrays of energies or spectral parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class SpectralPoint:
    e: float
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")

    @property
    def z(self) -> complex:
        return complex(self.e, self.eta)

    def __complex__(self):
        return self.z

    def in_domain(self, m_param: float) -> bool:
        """Membership in {|E| <= 10, 1/M <= eta <= 10}."""
        return abs(self.e) <= 10 and 1.0 / m_param <= self.eta <= 10


def as_z(z):
    if isinstance(z, SpectralPoint):
        return z.z
    return np.asarray(z, dtype=complex)


def rho(e):
    e = np.asarray(e, dtype=float)
    return np.sqrt(np.clip(4.0 - e * e, 0.0, None)) / (2 * np.pi)


def m_sc(z):
    """Stieltjes transform of the semicircle law, the root of m^2 + z m + 1 = 0 with Im m > 0."""
    z = as_z(z)
    sq = np.sqrt(z * z - 4.0 + 0j)
    # larger-magnitude root first, the other is its reciprocal (roots multiply to 1)
    r1 = (-z + sq) / 2
    r2 = (-z - sq) / 2
    big = np.where(np.abs(r1) >= np.abs(r2), r1, r2)
    small = 1.0 / big
    m = np.where(small.imag > 0, small, big)
    return m[()] if np.ndim(m) == 0 else m


def n_sc(e):
    """Semicircle distribution function, integral of rho over (-inf, e]."""
    e = np.asarray(e, dtype=float)
    x = np.clip(e, -2.0, 2.0)
    val = 0.5 + x * np.sqrt(4.0 - x * x) / (4 * np.pi) + np.arcsin(x / 2) / np.pi
    val = np.clip(val, 0.0, 1.0)
    val = np.where(e <= -2.0, 0.0, np.where(e >= 2.0, 1.0, val))
    return val[()] if np.ndim(val) == 0 else val


def gamma_alpha(n: int, alpha):
    """Classical location: the solution of n_sc(gamma) = alpha / n, by bisection on [-2, 2]."""
    alpha = np.asarray(alpha)
    if np.any(alpha < 1) or np.any(alpha > n):
        raise ValueError(f"alpha must lie in [1, {n}]")
    target = alpha / n
    lo = np.full(target.shape, -2.0)
    hi = np.full(target.shape, 2.0)
    while np.max(hi - lo) > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        below = n_sc(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(target >= 1.0, 2.0, out)
    return out[()] if np.ndim(out) == 0 else out


def classical_locations(n: int) -> np.ndarray:
    return gamma_alpha(n, np.arange(1, n + 1))


def kappa(e):
    return np.abs(np.abs(np.asarray(e, dtype=float)) - 2.0)


def theta(e, eta):
    e = np.asarray(e, dtype=float)
    k = kappa(e)
    inside = k + eta / np.sqrt(k + eta)
    outside = np.sqrt(k + eta)
    return np.where(np.abs(e) <= 2.0, inside, outside)


def pi_bound(z, m_param: float):
    """Deterministic entrywise control sqrt(Im m / (M eta)) + 1 / (M eta)."""
    z = as_z(z)
    eta = np.imag(z)
    return np.sqrt(np.imag(m_sc(z)) / (m_param * eta)) + 1.0 / (m_param * eta)


@dataclass(frozen=True)
class ScReference:
    z: complex
    m: complex
    rho: float
    kappa: float
    theta: float
    im_m: float
    pi_bound: Optional[float] = None


def edge_params(z, m_param: Optional[float] = None) -> ScReference:
    zc = complex(as_z(z))
    e, eta = zc.real, zc.imag
    if not eta > 0:
        raise ValueError("eta must be positive")
    m = complex(m_sc(zc))
    return ScReference(
        z=zc,
        m=m,
        rho=float(rho(e)),
        kappa=float(kappa(e)),
        theta=float(theta(e, eta)),
        im_m=m.imag,
        pi_bound=None if m_param is None else float(pi_bound(zc, m_param)),
    )
