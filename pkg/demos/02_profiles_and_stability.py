"""Variance profiles and the stability of the self-consistent equation."""

import numpy as np

from rmt_lab.profile import band_profile, custom_profile, mean_field_profile, mixture_profile
from rmt_lab.stability import eta_thresholds, gamma_norms, spectral_gaps

profiles = {
    "mean field": mean_field_profile(256),
    "band W=8": band_profile(1, 256, 8),
    "band W=32": band_profile(1, 256, 32),
    "mixture nu=0.1": mixture_profile(band_profile(1, 256, 8), mean_field_profile(256), 0.1),
}
rng = np.random.default_rng(0)
raw = rng.uniform(0, 1, (256, 256)) ** 4
profiles["Sinkhorn custom"] = custom_profile(raw + raw.T)

# %% M and the spectral gaps of S
for name, p in profiles.items():
    dm, dp = spectral_gaps(p)
    print(f"{name:16s} M={p.m_param:8.1f}  delta_-={dm:.4f}  delta_+={dp:.5f}")

# %% Gamma grows near the edge; Gamma-tilde discards the constant direction and stays near 1 when delta_+ is large
print("\nGamma / Gamma-tilde at eta = 0.01")
for e in (0.0, 1.0, 1.9, 2.0, 2.5):
    z = complex(e, 0.01)
    norms = [gamma_norms(p, z) for p in profiles.values()]
    row = "  ".join(f"{g.gamma:7.2f}/{g.gamma_tilde:5.2f}" for g in norms)
    print(f"E={e:4.1f}  {row}")

# %% where the spectral domain starts
for name, p in profiles.items():
    thr = eta_thresholds(p, 0.0, 0.05)
    print(f"{name:16s} eta-tilde(0)={thr.eta_tilde:.4f}  eta(0)={thr.eta_lower:.4f}  1/M={1 / p.m_param:.4f}")
