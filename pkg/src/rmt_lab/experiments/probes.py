"""Empirical probes of stochastic domination and of large deviation bounds."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..profile import draw_real
from ..resolvent import Eigen, control, green, stieltjes
from ..sc import edge_params, m_sc, pi_bound
from .config import ExperimentConfig, ensemble_seed
from .harness import ExperimentReport, map_ordered, map_samples, spec_for

DOMINATION_MENU = {
    ("h_entry", "sqrt_s"): "|h_ij| against (s_ij)^(1/2)",
    ("theta", "inv_m_eta"): "|m_N - m| against 1/(M eta)",
    ("lambda", "pi"): "max_ij |G_ij - delta_ij m| against Pi(z)",
}


def _exceedances(cfg: ExperimentConfig, n: int, x_name: str, epsilon: float) -> tuple[int, int]:
    """(number of exceedances X > N^eps Y, number of trials) over samples and the index/z family."""
    spec = spec_for(cfg, n)
    big_m = spec.profile.m_param
    factor = float(n) ** epsilon
    if x_name == "h_entry":
        s = spec.profile.s
        iu = np.triu_indices(n)
        mask = s[iu] > 0
        scale = np.sqrt(s[iu][mask])

        def one(h):
            ratio = np.abs(h.h[iu][mask]) / scale
            return int(np.sum(ratio > factor)), int(ratio.size)
    else:
        z = np.array([complex(e, eta) for e in cfg.z_grid.e for eta in cfg.z_grid.etas(n)])
        if x_name == "theta":
            m = m_sc(z)
            y = 1.0 / (big_m * z.imag)

            def one(h):
                theta = np.abs(stieltjes(np.linalg.eigvalsh(h.h), z) - m)
                return int(np.sum(theta > factor * y)), int(z.size)
        elif x_name == "lambda":
            refs = [edge_params(zz, big_m) for zz in z]
            pis = pi_bound(z, big_m)

            def one(h):
                eig = Eigen.of(h)
                lam = np.array([control(green(eig, zz), ref).lambda_ for zz, ref in zip(z, refs)])
                return int(np.sum(lam > factor * pis)), int(z.size)
        else:
            raise ValueError(f"unknown statistic {x_name!r}")
    res = map_samples(spec, cfg.samples, one)
    return sum(r[0] for r in res), sum(r[1] for r in res)


def domination_probe(cfg: ExperimentConfig, x_name: str, y_name: str, epsilon: float, d: float = 1.0) -> ExperimentReport:
    """Empirical P(X > N^eps Y) across ``cfg.n_values``; passes if nonincreasing in N."""
    if (x_name, y_name) not in DOMINATION_MENU:
        raise ValueError(f"unsupported pair {(x_name, y_name)}; choose from {sorted(DOMINATION_MENU)}")
    rep = ExperimentReport.for_config(cfg)
    probs = []
    for n in cfg.n_values:
        hits, trials = _exceedances(cfg, n, x_name, epsilon)
        p = hits / trials
        probs.append(p)
        # with zero hits the data only resolve p < 1/trials
        d_eff = -math.log(p) / math.log(n) if p > 0 else math.log(trials) / math.log(n)
        rep.points.append({"n": n, "x": x_name, "y": y_name, "epsilon": epsilon, "exceedances": hits,
                           "trials": trials, "probability": p, "d_eff": d_eff,
                           "below_n_minus_d": p <= float(n) ** -d})
    increases = [probs[k + 1] - probs[k] for k in range(len(probs) - 1)]
    rep.statistics = {"pair": f"{x_name} vs {y_name}", "epsilon": epsilon, "d": d, "probabilities": probs}
    rep.check("max increase of exceedance probability in N", max(increases, default=0.0), 0.0)
    return rep


def lde_statistics(law: str, rng: np.random.Generator, n: int, trials: int, b: np.ndarray,
                   a_const: float = 1.0, chunk: int = 2000) -> dict:
    """Normalized linear, bilinear and off-diagonal quadratic forms of i.i.d. unit-variance variables.

    The bilinear and quadratic forms use the constant off-diagonal matrix a_ij = a_const.
    """
    b = np.asarray(b, dtype=float)
    bnorm = math.sqrt(float(b @ b))
    lin, bil, quad = [], [], []
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        x = draw_real(law, rng, (k, n))
        y = draw_real(law, rng, (k, n))
        lin.append(x @ b / bnorm)
        sx, sy, sxx = x.sum(axis=1), y.sum(axis=1), (x * x).sum(axis=1)
        bil.append(a_const * sx * sy / (abs(a_const) * n))
        if n > 1:
            quad.append(a_const * (sx * sx - sxx) / (abs(a_const) * math.sqrt(n * (n - 1))))
        done += k
    out = {"linear": np.concatenate(lin), "bilinear": np.concatenate(bil)}
    if quad:
        out["quadratic"] = np.concatenate(quad)
    return out


def lde_probe(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport.for_config(cfg)
    trials = int(cfg.params.get("trials", 10_000))
    b_kind = cfg.params.get("b", "uniform")
    growth = float(cfg.params.get("growth_exponent", 0.1))
    q = float(cfg.params.get("quantile", 0.99))
    law = cfg.ensemble.entry_law

    def run(n):
        rng = np.random.default_rng(np.random.SeedSequence([ensemble_seed(cfg.seed, n)]))
        if b_kind == "uniform":
            b = np.full(n, 1.0 / math.sqrt(n))
        elif b_kind == "single":
            b = np.zeros(n)
            b[0] = 1.0
        elif b_kind == "random":
            b = np.random.default_rng(cfg.seed).standard_normal(n)
        else:
            raise ValueError(f"unknown b kind {b_kind!r}")
        return lde_statistics(law, rng, n, trials, b)

    results = map_ordered(run, cfg.n_values)
    q_abs = {}
    for n, st in zip(cfg.n_values, results):
        row = {"n": n, "trials": trials}
        for key, vals in st.items():
            row[f"{key}_q{q}_signed"] = np.quantile(vals, q)
            row[f"{key}_q{q}_abs"] = np.quantile(np.abs(vals), q)
            row[f"{key}_median_abs"] = np.median(np.abs(vals))
            q_abs.setdefault(key, []).append(row[f"{key}_q{q}_abs"])
        rep.points.append(row)
        if law == "gaussian" and b_kind == "uniform":
            exact = float(stats.norm.ppf(q))
            rep.check(f"N={n}: gaussian linear form {q}-quantile", row[f"linear_q{q}_signed"],
                      (exact - 0.15, exact + 0.15), "in")
    if len(cfg.n_values) >= 2:
        for key, vals in q_abs.items():
            slope = rep.fit(f"slope of {q}-quantile of |{key}| vs N", cfg.n_values[:len(vals)], vals)
            rep.check(f"{key}: quantile growth exponent", slope, growth)
    return rep
