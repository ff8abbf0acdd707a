"""Numerical laboratory for the local semicircle law of generalized Wigner matrices."""

__version__ = "0.1.0"

from . import experiments, profile, resolvent, sc, stability
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateProfileError,
    EmptyDomainError,
    InvalidBandError,
    InvalidDimensionError,
    InvalidParameterError,
    NonNormalizableError,
    NumericallySingularError,
    PivotDegeneracyError,
    RmtLabError,
    WeightConditionError,
)
from .profile import (
    EnsembleSpec,
    SampleMatrix,
    VarianceProfile,
    band_profile,
    custom_profile,
    identity_profile,
    load_profile,
    mean_field_profile,
    mixture_profile,
    sample,
    save_profile,
)
from .resolvent import control, fluct_avg, green, minor, schur_terms
from .sc import SpectralPoint, edge_params, gamma_alpha, m_sc, n_sc, rho
from .stability import eta_thresholds, gamma_norms, spectral_gaps

__all__ = [
    "__version__", "experiments", "profile", "resolvent", "sc", "stability",
    "ConfigError", "ConvergenceError", "DegenerateProfileError", "EmptyDomainError", "InvalidBandError",
    "InvalidDimensionError", "InvalidParameterError", "NonNormalizableError", "NumericallySingularError", "PivotDegeneracyError",
    "RmtLabError", "WeightConditionError",
    "EnsembleSpec", "SampleMatrix", "VarianceProfile", "band_profile", "custom_profile", "identity_profile",
    "load_profile", "mean_field_profile", "mixture_profile", "sample", "save_profile",
    "control", "fluct_avg", "green", "minor", "schur_terms",
    "SpectralPoint", "edge_params", "gamma_alpha", "m_sc", "n_sc", "rho",
    "eta_thresholds", "gamma_norms", "spectral_gaps",
]
