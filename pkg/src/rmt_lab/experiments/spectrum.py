"""Eigenvalue counting function, rigidity and extreme eigenvalues."""

from __future__ import annotations

import math

import numpy as np

from ..sc import classical_locations, n_sc
from ..stability import spectral_gaps
from .config import ExperimentConfig
from .harness import ExperimentReport, map_samples, spec_for


def control_x(n: int, m_param: float, delta_plus: float) -> float:
    """Extreme-eigenvalue control N^2/M^(8/3) + (N/M^2)^2 [delta_+ + (N/M^2)^(1/7)]^(-12)."""
    r = n / m_param ** 2
    return n ** 2 / m_param ** (8 / 3) + r ** 2 * (delta_plus + r ** (1 / 7)) ** -12


def control_y(m_param: float, delta_plus: float) -> float:
    """Counting-function control (1/M) (delta_+ + M^(-1/5))^(-7/2)."""
    return (delta_plus + m_param ** -0.2) ** -3.5 / m_param


def counting_function(eigenvalues: np.ndarray, e) -> np.ndarray:
    """Fraction of eigenvalues <= e."""
    lam = np.sort(np.asarray(eigenvalues))
    return np.searchsorted(lam, e, side="right") / lam.size


def sup_counting_error(eigenvalues: np.ndarray) -> float:
    """sup_E |n_N(E) - n(E)|; the supremum sits at an eigenvalue or just below it."""
    lam = np.sort(np.asarray(eigenvalues))
    n = lam.size
    ns = n_sc(lam)
    alpha = np.arange(1, n + 1)
    return float(max(np.max(np.abs(alpha / n - ns)), np.max(np.abs((alpha - 1) / n - ns))))


def alpha_hat(n: int) -> np.ndarray:
    alpha = np.arange(1, n + 1)
    return np.minimum(alpha, n + 1 - alpha)


def rigidity_bound(n: int, m_param: float, x: float, y: float, epsilon: float) -> np.ndarray:
    """Per-index bound: Y (N/alpha_hat)^(1/3) in the bulk, X + (M^eps Y)^(2/3) at the edges."""
    ah = alpha_hat(n)
    bulk = y * (n / ah) ** (1 / 3)
    edge = x + (m_param ** epsilon * y) ** (2 / 3)
    return np.where(ah >= m_param ** epsilon * n * y, bulk, edge)


def norm_excess(eigenvalues: np.ndarray) -> tuple[float, float]:
    """(||H|| - 2, max(||H|| - 2, 0)) from sorted eigenvalues."""
    lam = np.asarray(eigenvalues)
    raw = max(lam[-1] - 2.0, -2.0 - lam[0])
    return float(raw), float(max(raw, 0.0))


def _gaps(spec):
    return spectral_gaps(spec.profile)


def counting_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport.for_config(cfg)
    slack = float(cfg.params.get("slack", 10.0))
    medians = {}
    for n in cfg.n_values:
        spec = spec_for(cfg, n)
        big_m = spec.profile.m_param
        _, dp = _gaps(spec)
        y = control_y(big_m, dp)
        errs = np.array(map_samples(spec, cfg.samples, lambda h: sup_counting_error(np.linalg.eigvalsh(h.h))))
        med = float(np.median(errs))
        medians[n] = med
        tag = f"N={n}"
        rep.points.append({"n": n, "m_param": big_m, "delta_plus": dp, "Y": y, "sup_error_median": med,
                           "sup_error_q90": np.quantile(errs, 0.9), "sup_error_max": errs.max()})
        rep.statistics[tag] = {"Y": y, "delta_plus": dp, "sup_error_median": med}
        rep.check(f"{tag}: median sup|n_N - n| <= C Y log N", med, slack * y * math.log(n))
        rep.check(f"{tag}: median sup|n_N - n| <= C log N / N", med, slack * math.log(n) / n)
    ns = sorted(medians)
    if len(ns) >= 2:
        rep.fit("slope of median sup-error vs N", ns, [medians[n] for n in ns])
    return rep


def rigidity_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport.for_config(cfg)
    slack = float(cfg.params.get("slack", 10.0))
    epsilon = float(cfg.params.get("epsilon", 0.1))
    fraction = float(cfg.params.get("fraction", 0.95))
    for n in cfg.n_values:
        spec = spec_for(cfg, n)
        big_m = spec.profile.m_param
        _, dp = _gaps(spec)
        x, y = control_x(n, big_m, dp), control_y(big_m, dp)
        gam = classical_locations(n)
        bound = rigidity_bound(n, big_m, x, y, epsilon)
        lo, hi = n // 4, (3 * n) // 4

        def one(h):
            dev = np.abs(np.linalg.eigvalsh(h.h) - gam)
            return dev[lo:hi].max(), np.max(dev / bound), float(np.mean(dev ** 2))

        res = np.array(map_samples(spec, cfg.samples, one))
        bulk_max, ratio, msq = res[:, 0], res[:, 1], res[:, 2]
        bulk_tol = slack * math.log(n) / n
        frac_ok = float(np.mean(bulk_max <= bulk_tol))
        msq_bound = y * (y + x * x)
        tag = f"N={n}"
        rep.points.append({"n": n, "X": x, "Y": y, "bulk_max_median": np.median(bulk_max),
                           "bulk_max_q95": np.quantile(bulk_max, 0.95), "bound_ratio_median": np.median(ratio),
                           "mean_sq_dev_median": np.median(msq), "mean_sq_bound": msq_bound})
        rep.statistics[tag] = {"X": x, "Y": y, "delta_plus": dp, "bulk_fraction_within": frac_ok}
        rep.check(f"{tag}: fraction of samples with bulk max|lambda-gamma| <= C log N / N", frac_ok, fraction, ">=")
        # stochastic domination tolerates an N^eps factor on top of the constant
        rep.check(f"{tag}: median max_alpha |lambda-gamma| / bound", np.median(ratio), slack * n ** epsilon)
        rep.statistics[tag]["mean_sq_over_mean_sq_bound"] = float(np.median(msq) / msq_bound)
        rep.statistics[tag]["mean_sq_over_mean_sq_bound_n01"] = float(np.median(msq) / (msq_bound * n ** 0.1))
    return rep


def extremes_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport.for_config(cfg)
    slope_range = tuple(cfg.params.get("slope_range", (-0.8, -0.55)))
    ceiling = float(cfg.params.get("ceiling", 1.0))
    ns, edge_means, capped_means = [], [], []
    for n in cfg.n_values:
        spec = spec_for(cfg, n)
        big_m = spec.profile.m_param
        _, dp = _gaps(spec)

        def one(h):
            lam = np.linalg.eigvalsh(h.h)
            return lam[-1] - 2.0, -2.0 - lam[0]

        res = np.array(map_samples(spec, cfg.samples, one))
        edges = res.ravel()
        raw = res.max(axis=1)
        capped = np.maximum(raw, 0.0)
        ns.append(n)
        edge_means.append(abs(edges.mean()))
        capped_means.append(capped.mean())
        tag = f"N={n}"
        rep.points.append({"n": n, "X": control_x(n, big_m, dp), "mean_top_edge": res[:, 0].mean(),
                           "mean_bottom_edge": res[:, 1].mean(), "abs_mean_edge": edge_means[-1],
                           "mean_capped_norm_excess": capped.mean(), "max_norm_excess": raw.max(),
                           "fraction_outside": float(np.mean(raw > 0))})
        rep.check(f"{tag}: max lambda_N - 2 <= ceiling", res[:, 0].max(), ceiling)
    if len(ns) >= 2:
        slope = rep.fit("slope of |mean(lambda_N - 2)| vs N (both edges pooled)", ns, edge_means)
        if all(c > 0 for c in capped_means):
            rep.fit("slope of mean max(||H|| - 2, 0) vs N", ns, capped_means)
        rep.check("extreme-eigenvalue slope", slope, slope_range, "in")
    return rep
