"""Variance profiles S and Hermitian samples H with E|h_ij|^2 = s_ij.

A profile is a symmetric doubly stochastic matrix. Samples are built as
h_ij = sqrt(s_ij) * zeta_ij from a fixed menu of centred unit-variance
entry laws, and are fully determined by ``(seed, sample_index)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    ConvergenceError,
    DegenerateProfileError,
    InvalidBandError,
    InvalidDimensionError,
    NonNormalizableError,
    InvalidParameterError,
)

ROW_SUM_TOL = 1e-12
SINKHORN_MAX_ITER = 100_000

ENTRY_LAWS = ("gaussian", "rademacher", "uniform_pm_sqrt3")
SYMMETRY_CLASSES = ("real_symmetric", "complex_hermitian")


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Symmetric doubly stochastic variance matrix with metadata.

    ``geometry`` is a plain dict with a ``kind`` key (``mean_field``,
    ``band``, ``mixture`` or ``custom``) plus kind-specific entries.
    """

    s: np.ndarray
    geometry: dict = field(default_factory=lambda: {"kind": "custom"})
    translation_invariant: bool = False

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] == 0:
            raise InvalidDimensionError(f"profile must be a nonempty square matrix, got shape {s.shape}")
        if not np.array_equal(s, s.T):
            raise InvalidParameterError("profile is not symmetric")
        if np.any(s < 0):
            raise InvalidParameterError("profile has negative entries")
        dev = np.max(np.abs(s.sum(axis=1) - 1.0))
        if dev > ROW_SUM_TOL:
            raise InvalidParameterError(f"profile rows do not sum to 1 (max deviation {dev:.3e})")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @cached_property
    def m_param(self) -> float:
        return 1.0 / float(self.s.max())

    @cached_property
    def eigh(self):
        """Cached symmetric eigendecomposition ``(values, vectors)`` of S, ascending."""
        w, v = np.linalg.eigh(self.s)
        w.setflags(write=False)
        v.setflags(write=False)
        return w, v

    def header(self) -> dict:
        return {"n": self.n, "geometry": self.geometry, "m_param": self.m_param,
                "translation_invariant": self.translation_invariant}

    def __repr__(self):
        return f"VarianceProfile(n={self.n}, M={self.m_param:.6g}, geometry={self.geometry})"


def mean_field_profile(n: int) -> VarianceProfile:
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    return VarianceProfile(np.full((n, n), 1.0 / n), {"kind": "mean_field"}, translation_invariant=True)


def identity_profile(n: int) -> VarianceProfile:
    """Degenerate S = I (independent diagonal entries); M = 1."""
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    return VarianceProfile(np.eye(n), {"kind": "custom", "name": "identity"}, translation_invariant=True)


def box(x):
    return (np.max(np.abs(x), axis=-1) <= 1.0).astype(float)


def gaussian_bump(x):
    return np.exp(-0.5 * np.sum(x * x, axis=-1))


def exponential_bump(x):
    return np.exp(-np.sqrt(np.sum(x * x, axis=-1)))


PROFILE_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "box": box,
    "gaussian": gaussian_bump,
    "exponential": exponential_bump,
}


def torus_offsets(d: int, l: int) -> np.ndarray:
    """Lattice points of [-L/2, L/2)^d, row-major over the site index."""
    coords = np.indices((l,) * d).reshape(d, -1).T
    return (coords + l // 2) % l - l // 2


def band_profile(d: int, l: int, w: int, f: Union[str, Callable] = "box") -> VarianceProfile:
    """d-dimensional band profile s_ij = f([i - j]_L / W) / Z_L on the torus of side L.

    ``f`` maps an array of shape ``(k, d)`` to ``k`` nonnegative values; a
    string selects one of :data:`PROFILE_FUNCTIONS`.
    """
    if d < 1 or l < 1 or w < 1:
        raise InvalidDimensionError(f"need d, l, w >= 1, got d={d}, l={l}, w={w}")
    if w > l:
        raise InvalidBandError(f"band width {w} exceeds torus side {l}")
    name = f if isinstance(f, str) else getattr(f, "__name__", "custom")
    fn = PROFILE_FUNCTIONS[f] if isinstance(f, str) else f

    # site i has coordinates coords[i]; the row of site 0 determines everything
    coords = np.indices((l,) * d).reshape(d, -1).T
    canon = torus_offsets(d, l)
    row = np.asarray(fn(canon / w), dtype=float).reshape(-1)
    mirror = np.asarray(fn(-canon / w), dtype=float).reshape(-1)
    if np.any(row < 0) or not np.all(np.isfinite(row)):
        raise DegenerateProfileError("profile function must be finite and nonnegative")
    if not np.allclose(row, mirror, rtol=1e-14, atol=0):
        raise DegenerateProfileError("profile function is not symmetric on the lattice")
    z = row.sum()
    if z <= 0:
        raise DegenerateProfileError("profile function vanishes on the lattice")
    row = row / z

    # s_ij = row[index of (coords[i] - coords[j]) mod L]
    diff = (coords[:, None, :] - coords[None, :, :]) % l
    idx = np.ravel_multi_index(tuple(np.moveaxis(diff, -1, 0)), (l,) * d)
    s = row[idx]
    s = 0.5 * (s + s.T)
    return VarianceProfile(s, {"kind": "band", "d": d, "l": l, "w": w, "profile_name": name},
                           translation_invariant=True)


def mixture_profile(band: VarianceProfile, full: VarianceProfile, nu: float) -> VarianceProfile:
    """Variances of sqrt(1 - nu) H_B + sqrt(nu) H_W for independent H_B, H_W."""
    if band.n != full.n:
        raise InvalidDimensionError(f"dimension mismatch: {band.n} vs {full.n}")
    if not 0.0 <= nu <= 1.0:
        raise InvalidParameterError(f"nu must lie in [0, 1], got {nu}")
    if nu == 0.0:
        return band
    if nu == 1.0:
        return full
    s = (1.0 - nu) * band.s + nu * full.s
    # both parts are translation invariant under the same group only for band + mean-field
    invariant = band.translation_invariant and full.geometry.get("kind") == "mean_field"
    geometry = {"kind": "mixture", "nu": nu, "band": band.geometry, "full": full.geometry}
    return VarianceProfile(s, geometry, translation_invariant=invariant)


def sinkhorn_symmetric(raw: np.ndarray, tol: float = ROW_SUM_TOL, max_iter: int = SINKHORN_MAX_ITER):
    """Positive vector x with diag(x) raw diag(x) doubly stochastic.

    Uses the damped symmetric iteration x <- sqrt(x / (raw x)).
    Returns ``(x, iterations)``.
    """
    a = np.asarray(raw, dtype=float)
    x = np.ones(a.shape[0])
    for it in range(1, max_iter + 1):
        ax = a @ x
        x = np.sqrt(x / ax)
        ax = a @ x
        if np.max(np.abs(x * ax - 1.0)) <= tol:
            return x, it
    raise ConvergenceError(f"symmetric Sinkhorn did not reach tolerance {tol} in {max_iter} iterations")


def custom_profile(raw, tol: float = ROW_SUM_TOL, max_iter: int = SINKHORN_MAX_ITER) -> VarianceProfile:
    """Normalize a nonnegative symmetric irreducible matrix to be doubly stochastic."""
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidDimensionError(f"raw profile must be a nonempty square matrix, got {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max())):
        raise NonNormalizableError("raw profile is not symmetric")
    if np.any(a < 0):
        raise NonNormalizableError("raw profile has negative entries")
    a = 0.5 * (a + a.T)
    if np.any(a.sum(axis=1) == 0):
        raise NonNormalizableError("raw profile has a zero row")
    n_comp, _ = connected_components(a > 0, directed=False)
    if n_comp > 1:
        raise NonNormalizableError(f"raw profile is reducible ({n_comp} components)")
    x, _ = sinkhorn_symmetric(a, tol=tol / 4, max_iter=max_iter)
    s = x[:, None] * a * x[None, :]
    s = 0.5 * (s + s.T)
    # final row rescaling would break symmetry; the iteration already met tol/4
    return VarianceProfile(s, {"kind": "custom"})


def entry_moment(law: str, p: float) -> float:
    """E|xi|^p for the real unit-variance law ``law``."""
    if law == "gaussian":
        return 2.0 ** (p / 2) * math.gamma((p + 1) / 2) / math.sqrt(math.pi)
    if law == "rademacher":
        return 1.0
    if law == "uniform_pm_sqrt3":
        return math.sqrt(3.0) ** p / (p + 1)
    raise ValueError(f"unknown entry law {law!r}")


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    profile: VarianceProfile
    entry_law: str = "gaussian"
    symmetry: str = "real_symmetric"
    complex_second_moment: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.entry_law not in ENTRY_LAWS:
            raise InvalidParameterError(f"unknown entry law {self.entry_law!r}; choose from {ENTRY_LAWS}")
        if self.symmetry not in SYMMETRY_CLASSES:
            raise InvalidParameterError(f"unknown symmetry {self.symmetry!r}; choose from {SYMMETRY_CLASSES}")
        if not 0.0 <= self.complex_second_moment <= 1.0:
            raise InvalidParameterError("complex_second_moment must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.profile.n

    def rng(self, sample_index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed % 2**64, sample_index % 2**64]))


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    h: np.ndarray
    spec: EnsembleSpec
    sample_index: int

    @property
    def n(self) -> int:
        return self.h.shape[0]


def draw_real(law: str, rng: np.random.Generator, size) -> np.ndarray:
    if law == "gaussian":
        return rng.standard_normal(size)
    if law == "rademacher":
        return 2.0 * rng.integers(0, 2, size=size) - 1.0
    if law == "uniform_pm_sqrt3":
        r3 = math.sqrt(3.0)
        return rng.uniform(-r3, r3, size=size)
    raise ValueError(f"unknown entry law {law!r}")


def draw_zeta(spec: EnsembleSpec, rng: np.random.Generator, size) -> np.ndarray:
    """Off-diagonal normalized entries with E zeta = 0, E|zeta|^2 = 1."""
    xi1 = draw_real(spec.entry_law, rng, size)
    if spec.symmetry == "real_symmetric":
        return xi1
    rho = spec.complex_second_moment
    xi2 = draw_real(spec.entry_law, rng, size)
    if rho:
        # E zeta^2 = i rho
        xi2 = rho * xi1 + math.sqrt(1.0 - rho * rho) * xi2
    return (xi1 + 1j * xi2) / math.sqrt(2.0)


def sample(spec: EnsembleSpec, sample_index: int) -> SampleMatrix:
    """Draw H with h_ij = sqrt(s_ij) zeta_ij, upper triangle independent."""
    n = spec.n
    rng = spec.rng(sample_index)
    zeta = draw_zeta(spec, rng, (n, n))
    diag = draw_real(spec.entry_law, rng, n)
    h = np.triu(zeta, 1) * np.sqrt(spec.profile.s)
    h = h + h.conj().T
    h[np.diag_indices(n)] = diag * np.sqrt(np.diag(spec.profile.s))
    h.setflags(write=False)
    return SampleMatrix(h, spec, sample_index)


# --- import / export -------------------------------------------------------

SCHEMA_VERSION = 1


def save_profile(profile: VarianceProfile, path, fmt: str = "binary") -> Path:
    """Write ``<path>`` (JSON header) next to a row-major dump of S.

    ``fmt`` is ``"binary"`` (little-endian float64) or ``"csv"``.
    """
    path = Path(path)
    if fmt == "binary":
        data = path.with_suffix(".f8le")
        profile.s.astype("<f8").tofile(data)
    elif fmt == "csv":
        data = path.with_suffix(".csv")
        np.savetxt(data, profile.s, delimiter=",", fmt="%.17g")
    else:
        raise ValueError(f"unknown profile format {fmt!r}")
    header = {"schema_version": SCHEMA_VERSION, **profile.header(), "format": fmt, "data": data.name}
    path.write_text(json.dumps(header, indent=2, sort_keys=True))
    return path


def load_profile(path) -> VarianceProfile:
    """Read a profile header written by :func:`save_profile`, or a raw CSV/NPY matrix.

    Raw matrices go through :func:`custom_profile` normalization.
    """
    path = Path(path)
    if path.suffix == ".json":
        header = json.loads(path.read_text())
        n = int(header["n"])
        data = path.parent / header["data"]
        if header["format"] == "binary":
            s = np.fromfile(data, dtype="<f8")
        elif header["format"] == "csv":
            s = np.loadtxt(data, delimiter=",", ndmin=2)
        else:
            raise InvalidParameterError(f"unknown profile format {header['format']!r}")
        if s.size != n * n:
            raise InvalidDimensionError(f"profile data has {s.size} entries, header says n={n}")
        prof = VarianceProfile(s.reshape(n, n), header.get("geometry", {"kind": "custom"}),
                               translation_invariant=bool(header.get("translation_invariant", False)))
        if "m_param" in header and not math.isclose(prof.m_param, header["m_param"], rel_tol=1e-12):
            raise InvalidParameterError("profile header M does not match data")
        return prof
    if path.suffix == ".npy":
        return custom_profile(np.load(path))
    return custom_profile(np.loadtxt(path, delimiter=",", ndmin=2))
