"""Eigenvalue rigidity, the extreme eigenvalues and bulk gap-ratio statistics."""

import numpy as np

from rmt_lab.experiments import EnsembleRecipe, ExperimentConfig, gap_ratios
from rmt_lab.experiments import counting_experiment, extremes_experiment, rigidity_experiment
from rmt_lab.profile import EnsembleSpec, identity_profile, mean_field_profile, sample

goe = EnsembleRecipe()

# %% counting function and eigenvalue locations
rep = counting_experiment(ExperimentConfig("counting", goe, [128, 256, 512], samples=20, seed=2))
for row in rep.points:
    print(f"N={row['n']}: median sup|n_N - n| = {row['sup_error_median']:.4f}")
rep = rigidity_experiment(ExperimentConfig("rigidity", goe, [512], samples=20, seed=2))
row = rep.points[0]
print(f"N=512: median bulk max|lambda - gamma| = {row['bulk_max_median']:.4f}, "
      f"median max_alpha ratio to the rigidity bound = {row['bound_ratio_median']:.2f}")

# %% the norm approaches 2 at a rate close to N^(-2/3)
rep = extremes_experiment(ExperimentConfig("extremes", goe, [128, 256, 512], samples=40, seed=3))
fit = rep.fitted_exponents[0]
print(f"{fit['name']}: {fit['value']:.3f} +- {fit['stderr']:.3f}")

# %% gap ratios: GOE level repulsion against independent (Poisson) eigenvalues
for name, prof in (("GOE", mean_field_profile(400)), ("diagonal", identity_profile(400))):
    spec = EnsembleSpec(prof, seed=4)
    r = np.mean([gap_ratios(np.linalg.eigvalsh(sample(spec, k).h), 100, 300).mean() for k in range(20)])
    print(f"{name}: mean gap ratio {r:.4f}")
print("Poisson value 2 log 2 - 1 =", 2 * np.log(2) - 1)
