"""Local law: |m_N - m| tracks 1/(M eta) and the entrywise error tracks Pi down to small scales."""

import numpy as np

from rmt_lab.profile import EnsembleSpec, band_profile, mean_field_profile, sample
from rmt_lab.resolvent import Eigen, control, green
from rmt_lab.sc import edge_params

for name, prof in (("GOE N=1024", mean_field_profile(1024)), ("band L=1024 W=32", band_profile(1, 1024, 32))):
    h = sample(EnsembleSpec(prof, seed=5), 0)
    eig = Eigen.of(h)
    big_m = prof.m_param
    print(f"\n{name}, M={big_m:.0f}, E=0.5")
    print("   eta     Theta*M*eta   Lambda/Pi   Lambda_o   Lambda_d")
    for eta in np.geomspace(10 / big_m, 1, 6):
        z = complex(0.5, eta)
        cp = control(green(eig, z), edge_params(z, big_m))
        print(f"{eta:8.4f}   {cp.theta_param * big_m * eta:9.3f}   {cp.lambda_ / cp.pi_bound:9.3f}   "
              f"{cp.lambda_o:8.4f}   {cp.lambda_d:8.4f}")
