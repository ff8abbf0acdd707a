"""Semicircle reference quantities next to the spectrum of one GOE matrix."""

import numpy as np

from rmt_lab.profile import EnsembleSpec, mean_field_profile, sample
from rmt_lab.resolvent import stieltjes
from rmt_lab.sc import classical_locations, edge_params, m_sc, n_sc, rho

n = 1000
h = sample(EnsembleSpec(mean_field_profile(n), seed=1), 0)
lam = np.linalg.eigvalsh(h.h)

# %% density: histogram of eigenvalues against rho
edges = np.linspace(-2.2, 2.2, 12)
counts, _ = np.histogram(lam, bins=edges)
mid = 0.5 * (edges[1:] + edges[:-1])
width = edges[1] - edges[0]
print("   E     empirical   rho(E)")
for x, c in zip(mid, counts):
    print(f"{x:6.2f}   {c / (n * width):8.4f}   {rho(x):8.4f}")

# %% Stieltjes transform: m_N(z) converges to m(z) once eta >> 1/N
for eta in (1.0, 0.1, 0.01, 0.001):
    z = 0.5 + 1j * eta
    print(f"eta={eta:<6} |m_N - m| = {abs(stieltjes(lam, z) - m_sc(z)):.2e}   1/(N eta) = {1 / (n * eta):.2e}")

# %% counting function and classical locations
gam = classical_locations(n)
print("max |lambda - gamma| in the bulk:", np.abs(lam - gam)[n // 4:3 * n // 4].max())
print("n(0) =", n_sc(0.0), " fraction of eigenvalues below 0:", np.mean(lam <= 0))

# %% edge parameters
for e in (0.0, 1.9, 2.0, 2.5):
    ref = edge_params(complex(e, 0.01), n)
    print(f"E={e}: kappa={ref.kappa:.3f} theta={ref.theta:.4f} Im m={ref.im_m:.4f} Pi={ref.pi_bound:.4f}")
