"""Sample scheduling, slope fits and the report container shared by all experiments."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from ..profile import EnsembleSpec, SampleMatrix, sample
from .config import ExperimentConfig, ensemble_seed

_workers: Optional[int] = None


def set_workers(n: Optional[int]) -> None:
    """Cap the worker pool; ``None`` means one worker per logical core."""
    global _workers
    _workers = n


def workers() -> int:
    return _workers or os.cpu_count() or 1


def map_ordered(fn: Callable, items: Sequence) -> list:
    """``[fn(x) for x in items]`` on a bounded thread pool; output order follows input order."""
    items = list(items)
    nw = min(workers(), len(items))
    if nw <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        return list(pool.map(fn, items))


def spec_for(cfg: ExperimentConfig, n: int, ensemble=None) -> EnsembleSpec:
    recipe = ensemble if ensemble is not None else cfg.ensemble
    return recipe.spec(n, ensemble_seed(cfg.seed, n))


def map_samples(spec: EnsembleSpec, count: int, fn: Callable[[SampleMatrix], object], offset: int = 0) -> list:
    """Apply ``fn`` to samples ``offset .. offset+count-1``; each draw depends only on its index."""
    return map_ordered(lambda idx: fn(sample(spec, idx)), range(offset, offset + count))


def fit_slope(x, y) -> tuple[float, float]:
    """Least-squares slope of log y against log x, with its standard error."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    if len(lx) < 2:
        return math.nan, math.nan
    if len(lx) == 2:
        return float((ly[1] - ly[0]) / (lx[1] - lx[0])), math.nan
    res = stats.linregress(lx, ly)
    return float(res.slope), float(res.stderr)


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _clean(x.real), "im": _clean(x.imag)}
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


@dataclass
class ExperimentReport:
    experiment: str
    name: str
    statistics: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    fitted_exponents: list = field(default_factory=list)
    pass_flags: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    plot_data: dict = field(default_factory=dict)

    @classmethod
    def for_config(cls, cfg: ExperimentConfig) -> "ExperimentReport":
        seeds = {str(n): ensemble_seed(cfg.seed, n) for n in cfg.n_values}
        prov = {"config_hash": cfg.config_hash(), "master_seed": cfg.seed, "ensemble_seeds": seeds,
                "samples": cfg.samples}
        return cls(cfg.experiment, cfg.name, provenance=prov)

    def fit(self, name: str, x, y) -> float:
        slope, err = fit_slope(x, y)
        self.fitted_exponents.append({"name": name, "value": slope, "stderr": err})
        return slope

    def check(self, name: str, value: float, threshold, op: str = "<=") -> bool:
        """Record a pass flag with its margin (positive means passing with room)."""
        value = float(value)
        if op == "<=":
            ok, margin = value <= threshold, threshold - value
        elif op == ">=":
            ok, margin = value >= threshold, value - threshold
        elif op == "in":
            lo, hi = threshold
            ok, margin = lo <= value <= hi, min(value - lo, hi - value)
        else:
            raise ValueError(f"unknown comparison {op!r}")
        ok = bool(ok) and math.isfinite(value)
        self.pass_flags[name] = {"passed": ok, "value": value, "op": op, "threshold": threshold,
                                 "margin": float(margin)}
        return ok

    @property
    def passed(self) -> bool:
        return all(f["passed"] for f in self.pass_flags.values())

    def to_dict(self) -> dict:
        return _clean({
            "experiment": self.experiment,
            "name": self.name,
            "passed": self.passed,
            "statistics": self.statistics,
            "fitted_exponents": self.fitted_exponents,
            "pass_flags": self.pass_flags,
            "provenance": self.provenance,
            "n_points": len(self.points),
            "points": self.points,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, output_dir) -> tuple[Path, Path]:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        jpath = out / f"{self.name}.json"
        cpath = out / f"{self.name}.csv"
        jpath.write_text(self.to_json())
        rows = [_clean(r) for r in self.points]
        cols = sorted({k for r in rows for k in r})
        with cpath.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            writer.writerows(rows)
        for key, table in self.plot_data.items():
            ppath = out / f"{self.name}.{key}.csv"
            rows = [_clean(r) for r in table]
            cols = sorted({k for r in rows for k in r})
            with ppath.open("w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=cols)
                writer.writeheader()
                writer.writerows(rows)
        return jpath, cpath
