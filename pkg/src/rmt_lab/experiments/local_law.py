"""Local semicircle law sweeps: |m_N - m| against 1/(M eta) and Lambda against Pi."""

from __future__ import annotations

import math

import numpy as np

from ..errors import EmptyDomainError
from ..resolvent import Eigen, control, green, stieltjes
from ..sc import edge_params, kappa, m_sc, pi_bound
from ..stability import eta_thresholds
from .config import ExperimentConfig
from .harness import ExperimentReport, map_samples, spec_for


def spectral_points(cfg: ExperimentConfig, profile, n: int, filter_domain: bool = True):
    """Grid points (E, eta) of the config that lie in the spectral domain of ``profile``."""
    etas = cfg.z_grid.etas(n)
    pts = []
    for e in cfg.z_grid.e:
        lo = 1.0 / profile.m_param
        if filter_domain:
            thr = eta_thresholds(profile, float(e), cfg.gamma_exponent)
            lo = max(lo, thr.eta_tilde)
        pts.extend((float(e), float(eta)) for eta in etas if lo <= eta <= 10.0)
    return pts


def outside_bound(e, eta, m_param):
    k = kappa(e)
    return 1.0 / (m_param * (k + eta)) + 1.0 / ((m_param * eta) ** 2 * math.sqrt(k + eta))


def local_law_sweep(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport.for_config(cfg)
    slack = float(cfg.params.get("slack", 10.0))
    slope_tol = float(cfg.params.get("slope_tol", 0.2))
    lambda_samples = int(cfg.params.get("lambda_samples", cfg.samples))
    lambda_points = cfg.params.get("lambda_points", "all")
    filter_domain = bool(cfg.params.get("filter_domain", True))

    for n in cfg.n_values:
        spec = spec_for(cfg, n)
        big_m = spec.profile.m_param
        pts = spectral_points(cfg, spec.profile, n, filter_domain)
        if not pts:
            raise EmptyDomainError(f"no grid point of the configuration lies in the spectral domain at N={n}")
        z = np.array([complex(e, eta) for e, eta in pts])
        m = m_sc(z)
        pis = pi_bound(z, big_m)
        if lambda_points == "all":
            lam_idx = list(range(len(pts)))
        else:
            k = int(lambda_points)
            lam_idx = sorted(set(np.linspace(0, len(pts) - 1, k).round().astype(int).tolist())) if k > 0 else []
        refs = {j: edge_params(z[j], big_m) for j in lam_idx}

        def one(h):
            need_g = lam_idx and h.sample_index < lambda_samples
            if need_g:
                eig = Eigen.of(h)
                lam = eig.values
            else:
                lam = np.linalg.eigvalsh(h.h)
            theta = np.abs(stieltjes(lam, z) - m)
            lam_ratio = np.full(len(pts), np.nan)
            lam_o = np.full(len(pts), np.nan)
            if need_g:
                for j in lam_idx:
                    cp = control(green(eig, z[j]), refs[j])
                    lam_ratio[j] = cp.lambda_ / pis[j]
                    lam_o[j] = cp.lambda_o
            return theta, lam_ratio, lam_o

        results = map_samples(spec, cfg.samples, one)
        theta = np.array([r[0] for r in results])
        lam_ratio = np.array([r[1] for r in results])
        lam_o = np.array([r[2] for r in results])

        med_theta = np.median(theta, axis=0)
        for j, (e, eta) in enumerate(pts):
            scaled = theta[:, j] * big_m * eta
            row = {
                "n": n, "e": e, "eta": eta, "m_param": big_m, "pi": pis[j],
                "theta_median": med_theta[j], "theta_q90": np.quantile(theta[:, j], 0.9),
                "theta_max": theta[:, j].max(),
                "theta_scaled_median": np.median(scaled), "theta_scaled_max": scaled.max(),
            }
            col = lam_ratio[:, j]
            col = col[np.isfinite(col)]
            if col.size:
                row["lambda_over_pi_median"] = np.median(col)
                row["lambda_over_pi_max"] = col.max()
                row["lambda_o_median"] = np.nanmedian(lam_o[:, j])
            if abs(e) >= 2:
                k = kappa(e)
                if big_m * eta * math.sqrt(k + eta) >= big_m ** cfg.gamma_exponent:
                    row["outside_ratio_median"] = np.median(theta[:, j]) / outside_bound(e, eta, big_m)
            rep.points.append(row)

        tag = f"N={n}"
        rows = [r for r in rep.points if r["n"] == n]
        rep.check(f"{tag}: max_z median Theta*M*eta", max(r["theta_scaled_median"] for r in rows), slack)
        lam_rows = [r["lambda_over_pi_median"] for r in rows if "lambda_over_pi_median" in r]
        if lam_rows:
            rep.check(f"{tag}: max_z median Lambda/Pi", max(lam_rows), slack)
        out_rows = [r["outside_ratio_median"] for r in rows if "outside_ratio_median" in r]
        if out_rows:
            rep.check(f"{tag}: max_z median outside-spectrum ratio", max(out_rows), slack)
        for e in cfg.z_grid.e:
            if abs(e) >= 2:
                continue
            sub = [r for r in rows if r["e"] == float(e)]
            if len(sub) < 3:
                continue
            slope = rep.fit(f"{tag}, E={e}: slope of median Theta vs eta",
                            [r["eta"] for r in sub], [r["theta_median"] for r in sub])
            rep.check(f"{tag}, E={e}: bulk Theta slope", slope, (-1 - slope_tol, -1 + slope_tol), "in")
        rep.statistics[tag] = {"m_param": big_m, "grid_points": len(pts),
                               "eta_min": min(p[1] for p in pts), "eta_max": max(p[1] for p in pts)}
    return rep
