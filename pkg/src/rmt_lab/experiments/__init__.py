"""Monte Carlo experiments checking the local law and its consequences at desk scale."""

from .config import EXPERIMENT_TAGS, EnsembleRecipe, ExperimentConfig, ZGrid, build_profile, ensemble_seed
from .fluct import fluct_avg_experiment
from .harness import ExperimentReport, fit_slope, set_workers
from .local_law import local_law_sweep
from .probes import DOMINATION_MENU, domination_probe, lde_probe
from .spectrum import (
    control_x,
    control_y,
    counting_experiment,
    counting_function,
    extremes_experiment,
    norm_excess,
    rigidity_experiment,
    sup_counting_error,
)
from .universality import gap_ratios, universality_experiment


def _domination(cfg):
    p = cfg.params
    return domination_probe(cfg, p.get("x", "h_entry"), p.get("y", "sqrt_s"), float(p.get("epsilon", 0.2)),
                            float(p.get("d", 1.0)))


# tag -> (runner, required config fields, description)
EXPERIMENTS = {
    "local_law": (local_law_sweep, "n_values, z_grid, samples, gamma_exponent",
                  "Theta = |m_N - m| vs 1/(M eta) and Lambda vs Pi on the spectral domain [local law]"),
    "counting": (counting_experiment, "n_values, samples",
                 "sup_E |n_N(E) - n(E)| against Y [eigenvalue counting]"),
    "rigidity": (rigidity_experiment, "n_values, samples, params.epsilon",
                 "|lambda_alpha - gamma_alpha| against Y (N/alpha)^(1/3) and X [rigidity]"),
    "extremes": (extremes_experiment, "n_values (>= 2), samples",
                 "||H|| - 2 scaling in N against X [extreme eigenvalues]"),
    "fluct_avg": (fluct_avg_experiment, "n_values, z_grid, samples, params.resamples",
                  "averages of Q_k(1/G_kk) vs single terms [fluctuation averaging]"),
    "universality": (universality_experiment, "n_values (>= 64), samples, params.reference_samples",
                     "bulk gap-ratio mean vs in-harness GOE/GUE reference [bulk universality]"),
    "domination": (_domination, "n_values, samples, params.x, params.y, params.epsilon",
                   "empirical P(X > N^eps Y) trend in N [stochastic domination]"),
    "lde": (lde_probe, "n_values, params.trials, params.b",
            "quantiles of normalized linear/bilinear/quadratic forms [large deviation bounds]"),
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return EXPERIMENTS[cfg.experiment][0](cfg)


__all__ = [
    "EXPERIMENTS", "EXPERIMENT_TAGS", "DOMINATION_MENU", "EnsembleRecipe", "ExperimentConfig", "ExperimentReport",
    "ZGrid", "build_profile", "control_x", "control_y", "counting_experiment", "counting_function",
    "domination_probe", "ensemble_seed", "extremes_experiment", "fit_slope", "fluct_avg_experiment",
    "gap_ratios", "lde_probe", "local_law_sweep", "norm_excess", "rigidity_experiment", "run_experiment",
    "set_workers", "sup_counting_error", "universality_experiment",
]
