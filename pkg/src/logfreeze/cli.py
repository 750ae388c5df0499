"""Command-line entry point.

Subcommands:

* ``logfreeze theory <curve-name>`` tabulates a closed-form prediction
  into a delimited text file;
* ``logfreeze run <experiment>`` runs a Monte Carlo experiment (freezing,
  max-dist, sojourn, counting, box-counting, roughness, zeta-max,
  zeta-freezing, zeta-measure, diag-corr) from a config file and/or flags;
* ``logfreeze selfcheck`` runs the fast invariant suite.

Flags override config-file values; the effective configuration is echoed
into every output file.  LOGFREEZE_WORKERS sets the default worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from . import experiments as ex
from . import io as lfio
from . import selfcheck, theory

_EXPERIMENTS = (
    "freezing",
    "max-dist",
    "sojourn",
    "counting",
    "box-counting",
    "roughness",
    "zeta-max",
    "zeta-freezing",
    "zeta-measure",
    "diag-corr",
)

_DEFAULTS = {
    "freezing": {"ensemble": "cue", "size": 50, "n_samples": 10000,
                 "beta_grid": (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0)},
    "max-dist": {"ensemble": "cue", "size": 50, "n_samples": 100000},
    "sojourn": {"ensemble": "cue", "size": 64, "n_samples": 100000, "x_grid": (0.5,)},
    "counting": {"ensemble": "rem", "size": 4096, "n_samples": 10000, "x_grid": (1.0,)},
    "box-counting": {"ensemble": "cue", "size": 1024, "n_samples": 200,
                     "q_grid": (2.0, 3.0)},
    "roughness": {"ensemble": "fourier", "size": 512, "n_samples": 100000},
}

_ZETA_DEFAULTS = {
    "zeta-max": {"T": 3.6e7, "n_windows": 5000},
    "zeta-freezing": {"T": 1.0e6, "n_windows": 1000, "beta_grid": (0.5, 0.75, 2.0)},
    "zeta-measure": {"T": 1.0e6, "n_windows": 1000, "x_grid": (0.4,)},
}


def _parse_grid(text):
    return tuple(float(v) for v in str(text).split(",") if v != "")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logfreeze")
    sub = parser.add_subparsers(dest="command", required=True)

    p_theory = sub.add_parser("theory", help="tabulate a closed-form curve")
    p_theory.add_argument("curve", choices=theory.CURVE_NAMES)
    p_theory.add_argument("--out", default="out")
    p_theory.add_argument("--x", type=float)
    p_theory.add_argument("--beta", type=float)
    p_theory.add_argument("--M", type=int)
    p_theory.add_argument("--lo", type=float)
    p_theory.add_argument("--hi", type=float)
    p_theory.add_argument("--n", type=int)

    p_run = sub.add_parser("run", help="run an experiment")
    p_run.add_argument("experiment", choices=_EXPERIMENTS)
    p_run.add_argument("--config", help="YAML config file; flags override its keys")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--workers", type=int)
    p_run.add_argument("--n-samples", type=int)
    p_run.add_argument("--N", type=int, help="matrix dimension (cue)")
    p_run.add_argument("--M", type=int, help="lattice size (rem)")
    p_run.add_argument("--K", type=int, help="harmonic cutoff (fourier)")
    p_run.add_argument("--L", type=float, help="arc or window length")
    p_run.add_argument("--ensemble", choices=("cue", "rem", "fourier"))
    p_run.add_argument("--beta", type=float)
    p_run.add_argument("--beta-grid", type=_parse_grid)
    p_run.add_argument("--x", type=float)
    p_run.add_argument("--x-grid", type=_parse_grid)
    p_run.add_argument("--q-grid", type=_parse_grid)
    p_run.add_argument("--T", type=float)
    p_run.add_argument("--windows", type=int)
    p_run.add_argument("--points-per-unit", type=int)
    p_run.add_argument("--prime-limit", type=int)
    p_run.add_argument("--n-grid", type=int)
    p_run.add_argument("--emit-samples", action="store_true", default=None)

    sub.add_parser("selfcheck", help="run the fast invariant suite")
    return parser


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise ex.ConfigError("config file must hold a mapping")
    return data


def _effective(args, defaults: dict) -> dict:
    cfg = dict(defaults)
    cfg.update(_load_config_file(args.config))
    overrides = {
        "seed": args.seed,
        "workers": args.workers,
        "n_samples": args.n_samples,
        "ensemble": args.ensemble,
        "L": args.L,
        "emit_samples": args.emit_samples,
        "n_grid": args.n_grid,
        "T": args.T,
        "windows": args.windows,
        "points_per_unit": args.points_per_unit,
        "prime_limit": args.prime_limit,
    }
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    for flag, key in ((args.N, "size"), (args.M, "size"), (args.K, "size")):
        if flag is not None:
            cfg[key] = flag
    if args.beta_grid is not None:
        cfg["beta_grid"] = args.beta_grid
    elif args.beta is not None:
        cfg["beta_grid"] = (args.beta,)
    if args.x_grid is not None:
        cfg["x_grid"] = args.x_grid
    elif args.x is not None:
        cfg["x_grid"] = (args.x,)
    if args.q_grid is not None:
        cfg["q_grid"] = args.q_grid
    return cfg


def _mc_config(cfg: dict) -> ex.ExperimentConfig:
    return ex.ExperimentConfig(
        ensemble=cfg.get("ensemble", "cue"),
        size=int(cfg.get("size", cfg.get("N", cfg.get("M", cfg.get("K", 64))))),
        arc_length=float(cfg.get("L", ex.TWO_PI)),
        beta_grid=tuple(cfg.get("beta_grid", ())),
        x_grid=tuple(cfg.get("x_grid", ())),
        q_grid=tuple(cfg.get("q_grid", ())),
        n_samples=int(cfg.get("n_samples", 1024)),
        n_grid=cfg.get("n_grid"),
        master_seed=int(cfg.get("seed", 1)),
        n_workers=int(cfg.get("workers", ex.default_workers())),
        emit_samples=bool(cfg.get("emit_samples", False)),
    )


def _zeta_config(cfg: dict) -> ex.ZetaConfig:
    return ex.ZetaConfig(
        T=float(cfg.get("T", 1.0e6)),
        n_windows=int(cfg.get("windows", cfg.get("n_windows", 100))),
        window_length=float(cfg.get("L", ex.TWO_PI)),
        beta_grid=tuple(cfg.get("beta_grid", ())),
        x_grid=tuple(cfg.get("x_grid", ())),
        points_per_unit=cfg.get("points_per_unit"),
        n_workers=int(cfg.get("workers", ex.default_workers())),
        master_seed=int(cfg.get("seed", 1)),
        emit_samples=bool(cfg.get("emit_samples", False)),
    )


def _cmd_theory(args) -> int:
    params = {k: v for k, v in (("x", args.x), ("beta", args.beta), ("M", args.M),
                                ("lo", args.lo), ("hi", args.hi), ("n", args.n))
              if v is not None}
    curve = theory.tabulate_curve(args.curve, **params)
    out = Path(args.out) / f"theory_{args.curve}.tsv"
    lfio.write_curve(out, curve, {"curve": args.curve, **params})
    print(f"wrote {out}")
    return 0


def _cmd_run(args) -> int:
    name = args.experiment
    out_dir = Path(args.out)
    samples: dict = {}
    if name in _DEFAULTS:
        cfg = _mc_config(_effective(args, _DEFAULTS[name]))
        if name == "freezing":
            summary = ex.run_freezing(cfg)
        elif name == "max-dist":
            summary, samples = ex.run_max_distribution(cfg)
        elif name == "sojourn":
            summary, samples = ex.run_sojourn(cfg)
        elif name == "counting":
            summary = ex.run_counting(cfg)
        elif name == "box-counting":
            summary = ex.run_box_counting(cfg)
        else:
            summary, samples = ex.run_roughness(cfg)
    elif name in _ZETA_DEFAULTS:
        zcfg = _zeta_config(_effective(args, _ZETA_DEFAULTS[name]))
        if name == "zeta-max":
            summary, samples = ex.run_zeta_max(zcfg)
        elif name == "zeta-freezing":
            summary = ex.run_zeta_freezing(zcfg)
        else:
            summary = ex.run_zeta_measure(zcfg)
    else:  # diag-corr
        cfg = _effective(args, {"x_grid": (0.01, 0.1), "prime_limit": 100000})
        summary = ex.run_diag_correlation(cfg["x_grid"], int(cfg["prime_limit"]))

    out = lfio.write_summary(out_dir / f"{name}_summary.yaml", summary)
    print(f"wrote {out}")
    if samples:
        if name == "zeta-max":
            records = samples["window_records"]
            table = {
                "T": records[:, 0], "L": records[:, 1], "zeta_max": records[:, 2],
                "argmax_t": records[:, 3], "sigma": records[:, 4],
            }
        else:
            table = {k: np.asarray(v) for k, v in samples.items()}
        tab = lfio.write_table(out_dir / f"{name}_samples.tsv", table,
                               summary.config, summary.master_seed)
        print(f"wrote {tab}")
    return 0


def _cmd_selfcheck() -> int:
    results = selfcheck.run_all()
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'ok  ' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "theory":
            return _cmd_theory(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_selfcheck()
    except (ex.ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
