"""Fluctuation averaging: averages of Q_k(1/G_kk) against the single terms."""

from __future__ import annotations

import numpy as np

from ..resolvent import Eigen, check_weights, fluct_avg, green, schur_terms_all
from ..sc import edge_params
from .config import ExperimentConfig
from .harness import ExperimentReport, map_samples, spec_for


def fluct_avg_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport.for_config(cfg)
    ratio_tol = float(cfg.params.get("ratio_tol", 0.3))
    resamples = int(cfg.params.get("resamples", 0))
    qg_samples = int(cfg.params.get("qg_samples", 2))
    e = float(cfg.params.get("e", cfg.z_grid.e[0]))

    for n in cfg.n_values:
        spec = spec_for(cfg, n)
        prof = spec.profile
        uniform = check_weights(np.full((n, n), 1.0 / n), prof.m_param)
        s_weights = check_weights(prof.s, prof.m_param)
        etas = cfg.z_grid.etas(n)
        refs = [edge_params(complex(e, eta), prof.m_param) for eta in etas]

        def one(h):
            eig = Eigen.of(h)
            rows = []
            for eta, ref in zip(etas, refs):
                bundle = green(eig, complex(e, eta))
                arr = schur_terms_all(h, bundle, ref)
                q = arr.q_inv
                row = [
                    abs(q.mean()),                       # t = 1/N
                    np.mean(np.abs(s_weights @ q)),      # t = S
                    abs(arr.upsilon.mean()),
                    np.max(np.abs(q)),
                    np.mean(np.abs(q)),
                    abs((np.diag(bundle.g) - ref.m).mean()),
                    np.max(np.abs(arr.residual)),
                ]
                if resamples > 0 and h.sample_index < qg_samples:
                    fa = fluct_avg(h, bundle, uniform, resamples=resamples, ref=ref, seed=cfg.seed)
                    row += [abs(fa.sum_q_g[0]), np.max(np.abs(fa.q_g)), np.max(fa.q_g_stderr)]
                else:
                    row += [np.nan, np.nan, np.nan]
                rows.append(row)
            return rows

        res = np.array(map_samples(spec, cfg.samples, one), dtype=float)  # samples x eta x stat
        mean = res.mean(axis=0)
        med = np.median(res, axis=0)
        for j, eta in enumerate(etas):
            ref = refs[j]
            row = {"n": n, "e": e, "eta": eta, "pi": ref.pi_bound,
                   "avg_q_inv_mean": mean[j, 0], "avg_q_inv_S_mean": mean[j, 1], "avg_upsilon_mean": mean[j, 2],
                   "max_q_inv_mean": mean[j, 3], "typical_q_inv_mean": mean[j, 4], "theta_mean": mean[j, 5],
                   "avg_q_inv_median": med[j, 0], "avg_q_inv_S_median": med[j, 1],
                   "max_q_inv_median": med[j, 3], "self_consistent_residual_max": res[:, j, 6].max()}
            if np.isfinite(res[:, j, 7]).any():
                row["avg_q_g_mean"] = np.nanmean(res[:, j, 7])
                row["max_q_g_mean"] = np.nanmean(res[:, j, 8])
                row["q_g_resampling_stderr_max"] = np.nanmax(res[:, j, 9])
            rep.points.append(row)

        tag = f"N={n}"
        s_avg = rep.fit(f"{tag}: slope of mean |[Q 1/G]| vs eta", etas, mean[:, 0])
        s_single = rep.fit(f"{tag}: slope of mean max_k |Q_k 1/G_kk| vs eta", etas, mean[:, 3])
        rep.fit(f"{tag}: slope of mean |[Upsilon]| vs eta", etas, mean[:, 2])
        rep.fit(f"{tag}: slope of mean_k |Q_k 1/G_kk| vs eta", etas, mean[:, 4])
        rep.check(f"{tag}: |slope(avg) - 2 slope(single)|", abs(s_avg - 2 * s_single), ratio_tol)
        rep.check(f"{tag}: slope(avg) near -1", s_avg, (-1.3, -0.7), "in")
        rep.check(f"{tag}: slope(single) near -1/2", s_single, (-0.7, -0.3), "in")
        weight_ratio = np.median(med[:, 1] / med[:, 0])
        rep.check(f"{tag}: median ratio t=S vs t=1/N", weight_ratio, (0.1, 10.0), "in")
        rep.check(f"{tag}: max self-consistent residual", res[:, :, 6].max(), 1e-9)
        rep.statistics[tag] = {"slope_avg": s_avg, "slope_single": s_single, "weight_ratio": weight_ratio}
    return rep
