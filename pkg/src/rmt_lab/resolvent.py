"""Green functions, minors, control parameters and Schur-complement error terms.

One Hermitian eigendecomposition per sample is reused for every spectral parameter.
Index sets are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import NumericallySingularError, PivotDegeneracyError, WeightConditionError
from .profile import SampleMatrix, draw_real, draw_zeta
from .sc import ScReference, as_z, edge_params

PIVOT_TOL = 1e-14


def _matrix(h) -> np.ndarray:
    return h.h if isinstance(h, SampleMatrix) else np.asarray(h)


@dataclass(frozen=True, eq=False)
class Eigen:
    values: np.ndarray
    vectors: np.ndarray

    @classmethod
    def of(cls, h) -> "Eigen":
        try:
            w, v = np.linalg.eigh(_matrix(h))
        except np.linalg.LinAlgError as exc:
            raise NumericallySingularError(f"eigensolver failed: {exc}") from exc
        return cls(w, v)


def stieltjes(eigenvalues: np.ndarray, z) -> np.ndarray:
    """m_N(z) = (1/N) sum_k 1/(lambda_k - z), broadcast over an array of z."""
    z = np.asarray(as_z(z))
    lam = np.asarray(eigenvalues)
    out = np.mean(1.0 / (lam[None, :] - z.reshape(-1, 1)), axis=1)
    return out.reshape(z.shape)[()] if z.ndim == 0 else out.reshape(z.shape)


@dataclass(frozen=True, eq=False)
class ResolventBundle:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    z: complex
    g: np.ndarray
    m_n: complex

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def at(self, z) -> "ResolventBundle":
        """Resolvent of the same matrix at another spectral parameter."""
        return green(Eigen(self.eigenvalues, self.eigenvectors), z)


def green(h, z, eig: Optional[Eigen] = None) -> ResolventBundle:
    """G(z) = (H - z)^{-1} via the spectral decomposition of H.

    ``h`` may be a :class:`SampleMatrix`, an array, or a precomputed :class:`Eigen`.
    """
    zc = complex(as_z(z))
    if zc.imag <= 0:
        raise ValueError("eta must be positive")
    if isinstance(h, Eigen):
        eig = h
    elif eig is None:
        eig = Eigen.of(h)
    u = eig.vectors
    g = (u * (1.0 / (eig.values - zc))) @ u.conj().T
    return ResolventBundle(eig.values, u, zc, g, complex(np.trace(g) / g.shape[0]))


def minor(bundle_or_g, t: Iterable[int]) -> np.ndarray:
    """G^(T): resolvent of H with rows and columns in ``t`` removed.

    Computed by removing one index at a time with
    G^(Tk)_ij = G^(T)_ij - G^(T)_ik G^(T)_kj / G^(T)_kk. The result is indexed by the
    sorted complement of ``t``.
    """
    g = bundle_or_g.g if isinstance(bundle_or_g, ResolventBundle) else np.asarray(bundle_or_g)
    n = g.shape[0]
    t = list(dict.fromkeys(int(k) for k in t))
    if len(t) > n - 1:
        raise ValueError("cannot remove all indices")
    if any(k < 0 or k >= n for k in t):
        raise IndexError("minor index out of range")
    keep = list(range(n))
    cur = g.copy()
    for k in t:
        pos = keep.index(k)
        pivot = cur[pos, pos]
        if abs(pivot) < PIVOT_TOL:
            raise PivotDegeneracyError(f"|G_kk| = {abs(pivot):.3e} below {PIVOT_TOL} at k={k}")
        cur = cur - np.outer(cur[:, pos], cur[pos, :]) / pivot
        cur = np.delete(np.delete(cur, pos, axis=0), pos, axis=1)
        keep.pop(pos)
    return cur


@dataclass(frozen=True, eq=False)
class ControlParams:
    lambda_o: float
    lambda_d: float
    lambda_: float
    theta_param: float
    v: np.ndarray
    v_avg: complex
    pi_bound: Optional[float] = None


def control(bundle: ResolventBundle, ref: ScReference) -> ControlParams:
    if abs(bundle.z - ref.z) > 1e-12 * max(1.0, abs(ref.z)):
        raise ValueError("bundle and reference are at different spectral parameters")
    g = bundle.g
    d = np.diag(g)
    v = d - ref.m
    off = np.abs(g)
    np.fill_diagonal(off, 0.0)
    lam_o = float(off.max()) if g.shape[0] > 1 else 0.0
    lam_d = float(np.abs(v).max())
    v_avg = complex(v.mean())
    return ControlParams(lam_o, lam_d, max(lam_o, lam_d), abs(v_avg), v, v_avg, ref.pi_bound)


@dataclass(frozen=True)
class SchurTerms:
    i: int
    a_i: complex
    z_i: complex
    upsilon_i: complex
    residual: complex
    quad_form: complex
    schur_residual: complex


def _profile_s(h) -> np.ndarray:
    if not isinstance(h, SampleMatrix):
        raise TypeError("a SampleMatrix (carrying its variance profile) is required")
    return h.spec.profile.s


def schur_terms(h: SampleMatrix, bundle: ResolventBundle, ref: ScReference, i: int) -> SchurTerms:
    """Error terms of the self-consistent equation at index ``i``, computed from G^(i)."""
    hm = h.h
    s = _profile_s(h)
    g = bundle.g
    n = g.shape[0]
    gi = minor(g, [i])
    others = [k for k in range(n) if k != i]
    row = hm[i, others]
    col = hm[others, i]
    quad = complex(row @ gi @ col)
    p_part = complex(np.sum(s[i, others] * np.diag(gi)))
    z_i = quad - p_part
    a_i = complex(np.sum(s[i] * g[i, :] * g[:, i]) / g[i, i])
    ups = a_i + hm[i, i] - z_i
    v = np.diag(g) - ref.m
    lhs = -np.sum(s[i] * v) + ups
    rhs = 1.0 / (ref.m + v[i]) - 1.0 / ref.m
    schur_res = 1.0 / g[i, i] - (hm[i, i] - bundle.z - quad)
    return SchurTerms(i, a_i, z_i, complex(ups), complex(lhs - rhs), quad, complex(schur_res))


@dataclass(frozen=True, eq=False)
class SchurArrays:
    a: np.ndarray
    z: np.ndarray
    upsilon: np.ndarray
    quad_form: np.ndarray
    q_inv: np.ndarray
    residual: np.ndarray


def schur_terms_all(h: SampleMatrix, bundle: ResolventBundle, ref: ScReference) -> SchurArrays:
    """Vectorized :func:`schur_terms` over every index (two dense matrix products).

    Uses G^(i)_kl = G_kl - G_ki G_il / G_ii, so that with H0 = H minus its diagonal
    sum_{k,l != i} h_ik G^(i)_kl h_li = (H0 G H0)_ii - (H0 G)_ii (G H0)_ii / G_ii.
    """
    s = _profile_s(h)
    hm = h.h
    g = bundle.g
    d = np.diag(g)
    h0 = hm.copy()
    np.fill_diagonal(h0, 0.0)
    hg = h0 @ g
    quad = np.einsum("ij,ji->i", hg, h0) - np.diag(hg) * np.einsum("ij,ji->i", g, h0) / d
    s0 = s.copy()
    np.fill_diagonal(s0, 0.0)
    cross = g.T * g  # [i, k] -> G_ki G_ik
    p_part = s0 @ d - np.sum(s0 * cross, axis=1) / d
    z = quad - p_part
    a = np.sum(s * cross, axis=1) / d
    hd = np.diag(hm).real
    ups = a + hd - z
    v = d - ref.m
    residual = (-(s @ v) + ups) - (1.0 / (ref.m + v) - 1.0 / ref.m)
    return SchurArrays(a, z, ups, quad, hd - z, residual)


@dataclass(frozen=True, eq=False)
class FluctAverages:
    sum_q_inv: np.ndarray
    sum_q_g: Optional[np.ndarray]
    sum_v: np.ndarray
    q_inv: np.ndarray
    q_g: Optional[np.ndarray] = None
    q_g_stderr: Optional[np.ndarray] = None


def check_weights(weights: np.ndarray, m_param: float, tol: float = 1e-12) -> np.ndarray:
    t = np.asarray(weights)
    if t.ndim != 2:
        raise WeightConditionError("weights must be a matrix")
    if np.abs(t).max() > (1.0 + tol) / m_param:
        raise WeightConditionError(f"max |t_ik| = {np.abs(t).max():.4g} exceeds 1/M = {1 / m_param:.4g}")
    if np.abs(t).sum(axis=1).max() > 1.0 + tol:
        raise WeightConditionError("row sums of |t_ik| exceed 1")
    return t


def resampled_diagonal(h: SampleMatrix, bundle: ResolventBundle, k: int, resamples: int,
                       rng: np.random.Generator) -> np.ndarray:
    """G_kk with row/column k of H redrawn ``resamples`` times, H^(k) held fixed."""
    spec = h.spec
    s = spec.profile.s
    g = bundle.g
    n = g.shape[0]
    zeta = draw_zeta(spec, rng, (resamples, n))
    x = zeta * np.sqrt(s[k])[None, :]
    x[:, k] = 0.0
    diag = draw_real(spec.entry_law, rng, resamples) * np.sqrt(s[k, k])
    # rows x are h_k.; the column is conj(x); G^(k) applied via the one-step minor identity
    xg = x @ g
    quad = np.sum(xg * x.conj(), axis=1) - (x @ g[:, k]) * (g[k, :] @ x.conj().T) / g[k, k]
    return 1.0 / (diag - bundle.z - quad)


def fluct_avg(h: SampleMatrix, bundle: ResolventBundle, weights, resamples: int = 64,
              ref: Optional[ScReference] = None, seed: int = 0) -> FluctAverages:
    """Weighted sums sum_k t_ik Q_k(1/G_kk), sum_k t_ik Q_k G_kk and sum_k t_ik v_k.

    Q_k(1/G_kk) = h_kk - Z_k exactly. Q_k G_kk = G_kk - P_k G_kk with the partial
    expectation estimated by redrawing row k ``resamples`` times (0 skips this term).
    """
    t = check_weights(weights, h.spec.profile.m_param)
    ref = ref if ref is not None else edge_params(bundle.z)
    arr = schur_terms_all(h, bundle, ref)
    v = np.diag(bundle.g) - ref.m
    sum_q_inv = t @ arr.q_inv
    sum_v = t @ v
    if resamples <= 0:
        return FluctAverages(sum_q_inv, None, sum_v, arr.q_inv)
    rng = np.random.default_rng(np.random.SeedSequence([seed % 2**64, h.sample_index % 2**64]))
    n = bundle.n
    q_g = np.empty(n, dtype=complex)
    err = np.empty(n)
    for k in range(n):
        draws = resampled_diagonal(h, bundle, k, resamples, rng)
        q_g[k] = bundle.g[k, k] - draws.mean()
        err[k] = draws.std(ddof=1) / np.sqrt(resamples) if resamples > 1 else np.nan
    return FluctAverages(sum_q_inv, t @ q_g, sum_v, arr.q_inv, q_g, err)
