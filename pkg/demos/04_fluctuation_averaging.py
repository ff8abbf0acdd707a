"""Schur complement error terms and the gain from averaging them."""

import numpy as np

from rmt_lab.experiments import ExperimentConfig, ZGrid, fluct_avg_experiment
from rmt_lab.profile import EnsembleSpec, band_profile, mean_field_profile, mixture_profile, sample
from rmt_lab.resolvent import green, schur_terms, schur_terms_all
from rmt_lab.sc import edge_params

# %% the self-consistent equation holds exactly once its error terms are included
prof = mixture_profile(band_profile(1, 200, 10), mean_field_profile(200), 0.2)
h = sample(EnsembleSpec(prof, "rademacher", "complex_hermitian", seed=3), 0)
z = 0.7 + 0.02j
ref = edge_params(z, prof.m_param)
b = green(h, z)
arr = schur_terms_all(h, b, ref)
t = schur_terms(h, b, ref, 17)
print("max residual over all indices:", np.abs(arr.residual).max())
print("index 17: A =", t.a_i, " Z =", t.z_i, " Upsilon =", t.upsilon_i)

# %% averages of Q_k(1/G_kk) scale like the square of the single terms
rep = fluct_avg_experiment(ExperimentConfig("fluct_avg", n_values=[256],
                                            z_grid=ZGrid([0.0], -0.6, -0.15, 5, eta_exponents=True),
                                            samples=10, seed=1))
for row in rep.points:
    print(f"eta={row['eta']:.4f}  mean|[Q 1/G]|={row['avg_q_inv_mean']:.2e}  "
          f"mean max_k|Q_k 1/G_kk|={row['max_q_inv_mean']:.2e}")
for fit in rep.fitted_exponents[:2]:
    print(f"{fit['name']}: {fit['value']:.3f} +- {fit['stderr']:.3f}")
