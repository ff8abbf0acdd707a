"""Experiment configuration: ensemble recipes, spectral grids and validation."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigError
from ..profile import (
    ENTRY_LAWS,
    SYMMETRY_CLASSES,
    EnsembleSpec,
    VarianceProfile,
    band_profile,
    identity_profile,
    load_profile,
    mean_field_profile,
    mixture_profile,
)

EXPERIMENT_TAGS = (
    "local_law", "counting", "rigidity", "extremes", "fluct_avg", "universality", "domination", "lde",
)


def build_profile(recipe: dict, n: int) -> VarianceProfile:
    """Instantiate a profile recipe at dimension ``n``.

    Recipes: ``{"kind": "mean_field"}``, ``{"kind": "identity"}``,
    ``{"kind": "band", "d": 1, "w": 32, "f": "box"}`` (or ``"w_exponent"`` for
    W = round(L^a)), ``{"kind": "mixture", "band": {...}, "full": {...}, "nu": 0.1}``,
    ``{"kind": "file", "path": "..."}``.
    """
    kind = recipe.get("kind")
    if kind == "mean_field":
        return mean_field_profile(n)
    if kind == "identity":
        return identity_profile(n)
    if kind == "band":
        d = int(recipe.get("d", 1))
        l = round(n ** (1.0 / d))
        if l ** d != n:
            raise ConfigError(f"n={n} is not a perfect {d}-th power", "n_values")
        if "w" in recipe:
            w = int(recipe["w"])
        elif "w_exponent" in recipe:
            w = max(1, round(l ** float(recipe["w_exponent"])))
        else:
            raise ConfigError("band recipe needs 'w' or 'w_exponent'", "ensemble.profile")
        return band_profile(d, l, w, recipe.get("f", "box"))
    if kind == "mixture":
        band = build_profile(recipe["band"], n)
        full = build_profile(recipe.get("full", {"kind": "mean_field"}), n)
        return mixture_profile(band, full, float(recipe["nu"]))
    if kind == "file":
        prof = load_profile(recipe["path"])
        if prof.n != n:
            raise ConfigError(f"profile file has n={prof.n}, requested {n}", "n_values")
        return prof
    raise ConfigError(f"unknown profile kind {kind!r}", "ensemble.profile")


@dataclass
class EnsembleRecipe:
    profile: dict = field(default_factory=lambda: {"kind": "mean_field"})
    entry_law: str = "gaussian"
    symmetry: str = "real_symmetric"
    complex_second_moment: float = 0.0

    def spec(self, n: int, seed: int) -> EnsembleSpec:
        return EnsembleSpec(build_profile(self.profile, n), self.entry_law, self.symmetry,
                            self.complex_second_moment, seed)


@dataclass
class ZGrid:
    """Energies times a grid of eta values.

    With ``eta_exponents`` set, ``eta_min``/``eta_max`` are exponents a in eta = N^a.
    """

    e: list = field(default_factory=lambda: [0.0])
    eta_min: float = 0.01
    eta_max: float = 1.0
    eta_num: int = 8
    eta_scale: str = "log"
    eta_exponents: bool = False

    def etas(self, n: int) -> np.ndarray:
        lo, hi = self.eta_min, self.eta_max
        if self.eta_exponents:
            lo, hi = float(n) ** lo, float(n) ** hi
        if self.eta_num == 1:
            return np.array([lo])
        if self.eta_scale == "log":
            return np.geomspace(lo, hi, self.eta_num)
        return np.linspace(lo, hi, self.eta_num)


@dataclass
class ExperimentConfig:
    experiment: str
    ensemble: EnsembleRecipe = field(default_factory=EnsembleRecipe)
    n_values: list = field(default_factory=lambda: [256])
    z_grid: ZGrid = field(default_factory=ZGrid)
    samples: int = 10
    gamma_exponent: float = 0.05
    seed: int = 0
    name: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_TAGS:
            raise ConfigError(f"unknown experiment {self.experiment!r}", "experiment")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples must be a positive integer", "samples")
        if not self.n_values or any(int(n) < 1 for n in self.n_values):
            raise ConfigError("n_values must be a nonempty list of positive integers", "n_values")
        if not self.z_grid.e or self.z_grid.eta_num < 1:
            raise ConfigError("z_grid must be nonempty", "z_grid")
        if self.z_grid.eta_scale not in ("log", "linear"):
            raise ConfigError("eta_scale must be 'log' or 'linear'", "z_grid.eta_scale")
        if not 0.0 < self.gamma_exponent < 0.5:
            raise ConfigError("gamma_exponent must lie in (0, 1/2)", "gamma_exponent")
        if self.ensemble.entry_law not in ENTRY_LAWS:
            raise ConfigError(f"entry_law must be one of {ENTRY_LAWS}", "ensemble.entry_law")
        if self.ensemble.symmetry not in SYMMETRY_CLASSES:
            raise ConfigError(f"symmetry must be one of {SYMMETRY_CLASSES}", "ensemble.symmetry")
        self.n_values = [int(n) for n in self.n_values]
        if self.name is None:
            self.name = self.experiment

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {"experiment", "ensemble", "n_values", "z_grid", "samples", "gamma_exponent",
                 "seed", "name", "params"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", ",".join(sorted(unknown)))
        if "experiment" not in d:
            raise ConfigError("missing required key", "experiment")
        try:
            ens = EnsembleRecipe(**d.pop("ensemble", {}))
            grid = ZGrid(**d.pop("z_grid", {}))
        except TypeError as exc:
            raise ConfigError(str(exc), "ensemble/z_grid") from exc
        return cls(ensemble=ens, z_grid=grid, **d)

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def ensemble_seed(master_seed: int, n: int) -> int:
    """64-bit ensemble seed derived from (master seed, N)."""
    state = np.random.SeedSequence([master_seed % 2**64, n]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None
