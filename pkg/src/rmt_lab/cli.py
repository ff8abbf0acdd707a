"""Command line entry point: ``rmt-lab {run,list,sc,stability,resolvent}``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import ConfigError, RmtLabError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment, set_workers
from .profile import EnsembleSpec, load_profile, mean_field_profile, sample
from .resolvent import Eigen, control, green, schur_terms_all
from .sc import edge_params
from .stability import eta_thresholds, gamma_norms, spectral_gaps

CONFIG_SCHEMA_VERSION = 1
SEED_ENV = "RMT_LAB_SEED"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def load_config(path) -> tuple[int, list[ExperimentConfig]]:
    """Parse a YAML run file into ``(master_seed, configs)``.

    Layout::

        schema_version: 1
        seed: 1234
        experiments:
          - experiment: local_law
            n_values: [256]
            ...
    """
    text = Path(path).read_text()
    try:
        root = yaml.compose(text)
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping")
    version = doc.get("schema_version", CONFIG_SCHEMA_VERSION)
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version}", "schema_version")
    unknown = set(doc) - {"schema_version", "seed", "experiments"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", ",".join(sorted(unknown)))
    master = int(doc.get("seed", 0))
    if os.environ.get(SEED_ENV):
        master = int(os.environ[SEED_ENV])
    items = doc.get("experiments")
    if not isinstance(items, list) or not items:
        raise ConfigError("'experiments' must be a nonempty list", "experiments")
    lines = {}
    for key_node, value_node in root.value:
        if key_node.value == "experiments":
            lines = {k: node.start_mark.line + 1 for k, node in enumerate(value_node.value)}
    configs, names = [], set()
    for k, item in enumerate(items):
        where = f"experiments[{k}] (line {lines.get(k, '?')})"
        if not isinstance(item, dict):
            raise ConfigError("each experiment must be a mapping", where)
        item = dict(item)
        item.setdefault("seed", master)
        try:
            cfg = ExperimentConfig.from_dict(item)
        except ConfigError as exc:
            raise ConfigError(str(exc), where) from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), where) from exc
        if cfg.name in names:
            cfg.name = f"{cfg.name}_{k}"
        names.add(cfg.name)
        configs.append(cfg)
    return master, configs


def run(config_path, output_dir) -> int:
    """Run every experiment of a config file; exit status 0 iff all pass flags hold."""
    try:
        master, configs = load_config(config_path)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"filesystem error: {exc}", file=sys.stderr)
        return 3
    manifest = {
        "config_path": str(config_path),
        "config_sha256_16": [c.config_hash() for c in configs],
        "configs": [c.to_dict() for c in configs],
        "output_dir": str(out),
        "tool_version": __version__,
        "master_seed": master,
        "started": _now(),
        "finished": None,
        "results": {},
    }
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str))
    all_ok = True
    for cfg in configs:
        report = run_experiment(cfg)
        report.write(out)
        manifest["results"][cfg.name] = report.passed
        all_ok &= report.passed
        status = "PASS" if report.passed else "FAIL"
        print(f"[{status}] {cfg.name}")
        for flag, info in report.pass_flags.items():
            print(f"    {'ok ' if info['passed'] else 'BAD'} {flag}: {info['value']:.4g} "
                  f"{info['op']} {info['threshold']} (margin {info['margin']:.3g})")
    manifest["finished"] = _now()
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str))
    return 0 if all_ok else 1


def list_experiments() -> str:
    lines = []
    for tag, (_, fields, desc) in EXPERIMENTS.items():
        lines.append(f"{tag:<13} {desc}\n{'':<13} fields: {fields}")
    return "\n".join(lines)


def _complex_json(c: complex) -> dict:
    return {"re": c.real, "im": c.imag}


def sc_eval(e: float, eta: float, m_param=None) -> dict:
    ref = edge_params(complex(e, eta), m_param)
    out = {"e": e, "eta": eta, "m": _complex_json(ref.m), "rho": ref.rho, "kappa": ref.kappa,
           "theta": ref.theta, "im_m": ref.im_m}
    if m_param is not None:
        out["pi"] = ref.pi_bound
    return out


def stability_map(profile, gamma_exponent: float, out, e_values, n_eta: int = 12) -> Path:
    dm, dp = spectral_gaps(profile)
    etas = np.geomspace(1.0 / profile.m_param, 10.0, n_eta)
    out = Path(out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["E", "eta", "Gamma", "Gamma_tilde", "eta_tilde_E", "eta_E", "delta_minus", "delta_plus"])
        for e in e_values:
            thr = eta_thresholds(profile, float(e), gamma_exponent)
            for eta in etas:
                p = gamma_norms(profile, complex(e, eta))
                writer.writerow([repr(float(e)), repr(float(eta)), repr(p.gamma), repr(p.gamma_tilde),
                                 repr(thr.eta_tilde), repr(thr.eta_lower), repr(dm), repr(dp)])
    return out


def resolvent_probe(n: int, seed: int, e: float, eta: float, profile=None) -> dict:
    prof = profile if profile is not None else mean_field_profile(n)
    h = sample(EnsembleSpec(prof, seed=seed), 0)
    ref = edge_params(complex(e, eta), prof.m_param)
    bundle = green(Eigen.of(h), ref.z)
    cp = control(bundle, ref)
    arr = schur_terms_all(h, bundle, ref)
    return {"n": prof.n, "seed": seed, "e": e, "eta": eta, "m_param": prof.m_param,
            "lambda": cp.lambda_, "lambda_o": cp.lambda_o, "lambda_d": cp.lambda_d, "theta": cp.theta_param,
            "pi": ref.pi_bound, "max_self_consistent_residual": float(np.abs(arr.residual).max())}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rmt-lab", description="Local semicircle law laboratory")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=None, help="worker pool size (default: logical cores)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the experiments of a YAML config")
    r.add_argument("config")
    r.add_argument("-o", "--output-dir", default="rmt_lab_out")

    sub.add_parser("list", help="list experiment tags")

    sc = sub.add_parser("sc", help="semicircle reference quantities").add_subparsers(dest="sc_cmd", required=True)
    ev = sc.add_parser("eval")
    ev.add_argument("--e", type=float, required=True)
    ev.add_argument("--eta", type=float, required=True)
    ev.add_argument("--m", type=float, default=None, help="M, to also print Pi(z)")

    st = sub.add_parser("stability", help="stability maps").add_subparsers(dest="st_cmd", required=True)
    mp = st.add_parser("map")
    mp.add_argument("--profile", required=True, help="profile header (.json) or raw matrix (.csv/.npy)")
    mp.add_argument("--gamma", type=float, required=True)
    mp.add_argument("--out", required=True)
    mp.add_argument("--e", type=float, nargs="+", default=[-2.5, -2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 2.5])
    mp.add_argument("--n-eta", type=int, default=12)

    rs = sub.add_parser("resolvent", help="resolvent diagnostics").add_subparsers(dest="rs_cmd", required=True)
    pr = rs.add_parser("probe")
    pr.add_argument("--n", type=int, default=256)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--e", type=float, default=0.0)
    pr.add_argument("--eta", type=float, default=0.1)
    pr.add_argument("--profile", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    set_workers(args.threads)
    try:
        if args.command == "run":
            return run(args.config, args.output_dir)
        if args.command == "list":
            print(list_experiments())
            return 0
        if args.command == "sc":
            print(json.dumps(sc_eval(args.e, args.eta, args.m), indent=2))
            return 0
        if args.command == "stability":
            path = stability_map(load_profile(args.profile), args.gamma, args.out, args.e, args.n_eta)
            print(path)
            return 0
        if args.command == "resolvent":
            prof = load_profile(args.profile) if args.profile else None
            print(json.dumps(resolvent_probe(args.n, args.seed, args.e, args.eta, prof), indent=2))
            return 0
    except (RmtLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
