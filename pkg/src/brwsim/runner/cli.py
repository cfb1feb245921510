"""Command line interface: ``brwsim {simulate,run,validate-regression,oracle,report}``.

Failures print one line ``error: {json}`` to stderr and exit nonzero
(2 for configuration/usage errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from brwsim.runner.config import PAPER_SCALE, ConfigError, config_from_dict


class UsageError(Exception):
    pass


def _base_raw(args) -> dict:
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    elif getattr(args, "model", None) is not None:
        raw = {"model": args.model}
    else:
        raise ConfigError("model", "give --model N or --config FILE")
    if getattr(args, "paper_scale", False):
        raw.update(PAPER_SCALE)
    for flag, key in (("seed", "master_seed"), ("workers", "workers"), ("m", "M"), ("m1", "M1"), ("tmax", "T_max"), ("out", "output_dir")):
        v = getattr(args, flag, None)
        if v is not None:
            raw[key] = v
    if getattr(args, "tmax", None) is not None and "snapshot_times" in raw:
        raw["snapshot_times"] = [t for t in raw["snapshot_times"] if t <= args.tmax]
    return raw


def _config(args):
    return config_from_dict(_base_raw(args))


def cmd_run(args) -> dict:
    from brwsim.runner.experiment import run_experiment

    cfg = _config(args)
    res = run_experiment(cfg)
    return {
        "model": cfg.label,
        "output_dir": str(cfg.output_dir),
        "annealed_m1": res.m1_at(cfg.t_max),
        "trimmed_m1": res.trimmed_m1_at(cfg.t_max),
        "R": res.ratio_at(cfg.t_max),
        "boundary_exits": res.manifest["boundary_exits"],
    }


def cmd_simulate(args) -> dict:
    from brwsim.runner.experiment import replay

    cfg = _config(args)
    k, i = args.replay
    traj = replay(cfg, k, i)
    out = Path(args.out or "trajectory.csv")
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / f"trajectory_k{k}_i{i}.csv"
    traj.to_csv(out)
    return {
        "status": traj.status.name,
        "events": traj.n_events,
        "t_stop": traj.t_stop,
        "t_100": traj.t_100,
        "replicate_seed": traj.replicate_seed,
        "file": str(out),
    }


def cmd_validate_regression(args) -> dict:
    from brwsim.engine import EngineParams
    from brwsim.extrapolate import validate_regression
    from brwsim.lattice import LatticeWindow
    from brwsim.medium import Constant, MediumSpec, SourceConfiguration, sample_medium
    from brwsim.runner.report import write_csv
    from brwsim.runner.seeds import replicate_seed

    window = LatticeWindow(1, 100)
    spec = MediumSpec(SourceConfiguration.every_point(), Constant(2.0), Constant(1.0))
    medium = sample_medium(spec, 0, window)
    params = EngineParams(t_max=args.tmax if args.tmax is not None else 10.0)
    seed = args.seed or 0
    rep = validate_regression(medium, args.n, params, window, lambda i: replicate_seed(seed, 0, i), args.grid_dt)
    out = Path(args.out or "validation.csv")
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "validation.csv"
    row = rep.as_row()
    write_csv(out, list(row), [list(row.values())])
    return {**row, "file": str(out)}


def cmd_oracle(args) -> dict:
    from brwsim.runner.experiment import oracle_comparison
    from brwsim.runner.report import write_csv

    cfg = _config(args)
    if any(t < 0 for t in args.times):
        raise UsageError("--times must be nonnegative")
    # requested times past the horizon are dropped; T_max itself is always reported
    times = sorted({t for t in args.times if t <= cfg.t_max} | {cfg.t_max})
    cmp = oracle_comparison(cfg, args.medium, times)
    max_z = float(np.nanmax(cmp["z"]))
    out = Path(args.out or "oracle.csv")
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "oracle.csv"
    write_csv(
        out,
        ["t", "oracle_m1", "engine_mean", "engine_se", "abs_dev_over_se", "max_abs_dev_over_se"],
        [(*row, max_z) for row in zip(cmp["t"], cmp["oracle"], cmp["mean"], cmp["se"], cmp["z"])],
    )
    return {"file": str(out), "max_abs_dev_over_se": max_z, "replicates": cmp["replicates"]}


def cmd_report(args) -> dict:
    from brwsim.runner.report import render_report

    if not args.out:
        raise UsageError("report needs --out DIR pointing at an existing run")
    files = render_report(args.out)
    return {"files": [str(f) for f in files]}


def _add_common(p, model=True):
    if model:
        p.add_argument("--model", type=int, help="registry model id 1..10")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--workers", type=int)
        p.add_argument("--m", type=int, help="replicates per medium (M)")
        p.add_argument("--m1", type=int, help="number of media (M1)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--tmax", type=float, help="time horizon T_max")
    p.add_argument("--out", help="output file or directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brwsim", description="Branching random walks in random media")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full experiment for one model")
    _add_common(p)
    p.add_argument("--paper-scale", action="store_true", help="M=1000, M1=250")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate", help="one trajectory, exported as CSV")
    _add_common(p)
    p.add_argument("--replay", type=lambda s: tuple(int(v) for v in s.split(",")), default=(0, 0),
                   metavar="K,I", help="medium index and replicate index (default 0,0)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate-regression", help="score the growth regression on the (2,1) homogeneous medium")
    _add_common(p, model=False)
    p.add_argument("--n", type=int, default=5000, help="number of trajectories")
    p.add_argument("--grid-dt", type=float, default=0.05)
    p.set_defaults(func=cmd_validate_regression)

    p = sub.add_parser("oracle", help="compare engine means with the first-moment ODE")
    _add_common(p)
    p.add_argument("--medium", type=int, default=0, help="medium index k")
    p.add_argument("--times", type=lambda s: [float(v) for v in s.split(",")], default=[1.0, 2.0, 5.0])
    p.set_defaults(func=cmd_oracle, m=None)
    p = sub.add_parser("report", help="re-render SVG figures from an output directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def _fail(kind: str, message: str, code: int, **extra) -> int:
    print("error: " + json.dumps({"kind": kind, "message": message, **extra}, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _fail("usage", "invalid command line", 2)
    if args.func is cmd_oracle and args.m is None:
        args.m = 1000
    try:
        result = args.func(args)
    except ConfigError as exc:
        return _fail("config", exc.message, 2, key=exc.key)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail("io", str(exc), 1)
    except ValueError as exc:
        return _fail("value", str(exc), 1)
    print(json.dumps(result, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
