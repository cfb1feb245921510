"""Run one model: media x replicates -> quenched, annealed and diagnostic outputs."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

import brwsim
from brwsim.engine import Status, simulate
from brwsim.extrapolate import fit_growth_adaptive, mu_path
from brwsim.medium import sample_medium
from brwsim.runner.config import ExperimentConfig
from brwsim.runner.seeds import SEED_RULE, medium_seed, replicate_seed
from brwsim.stats import (
    AnnealedSummary,
    MomentCurve,
    annealed_moment,
    grid_index,
    intermittency_curve,
    log_moment_gap_curve,
    lyapunov_ratio_estimate,
    shapiro_wilk,
)


def time_grid(t_max: float, dt: float, extra=()) -> np.ndarray:
    n = int(math.floor(t_max / dt + 1e-9))
    g = np.round(dt * np.arange(n + 1), 10)
    g = np.concatenate([g, np.round(np.asarray(extra, dtype=float), 10), [t_max]])
    return np.unique(g)


@dataclass
class MediumResult:
    k: int
    medium_seed: int
    m1: np.ndarray
    m2: np.ndarray
    n_valid: int
    status_counts: dict
    n_events: int
    fit_refined: int


def simulate_medium(cfg: ExperimentConfig, grid: np.ndarray, k: int) -> MediumResult:
    """All M replicates in medium k, reduced to the first two quenched moments."""
    mseed = medium_seed(cfg.master_seed, k)
    medium = sample_medium(cfg.medium, mseed, cfg.window)
    paths = np.empty((cfg.M, len(grid)))
    counts = {s.name: 0 for s in Status}
    rows = 0
    n_events = 0
    refined = 0
    for i in range(cfg.M):
        traj = simulate(medium, cfg.engine, cfg.window, replicate_seed=replicate_seed(cfg.master_seed, k, i))
        counts[traj.status.name] += 1
        n_events += traj.n_events
        if traj.status is Status.BOUNDARY_EXIT:
            continue
        fit = None
        if traj.status is Status.CAPPED:
            fit = fit_growth_adaptive(traj, cfg.fit_grid_dt)
            refined += fit.grid_dt != cfg.fit_grid_dt
        paths[rows] = mu_path(traj, fit, grid)
        rows += 1
    if rows == 0:
        m1 = np.full(len(grid), np.nan)
        m2 = m1.copy()
    else:
        m1 = paths[:rows].mean(axis=0)
        m2 = (paths[:rows] ** 2).mean(axis=0)
    return MediumResult(k, mseed, m1, m2, rows, counts, n_events, refined)


def run_media(cfg: ExperimentConfig, grid: np.ndarray) -> list[MediumResult]:
    task = partial(simulate_medium, cfg, grid)
    if cfg.workers == 1:
        return [task(k) for k in range(cfg.M1)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(task, range(cfg.M1), chunksize=1))
    return sorted(results, key=lambda r: r.k)


@dataclass(eq=False)
class ExperimentResult:
    config: ExperimentConfig
    grid: np.ndarray
    media: list[MediumResult]
    curves: dict[int, list[MomentCurve]]
    annealed: dict[tuple[int, int], AnnealedSummary]
    manifest: dict = field(default_factory=dict)
    lyapunov: list[float] = field(default_factory=list)

    @property
    def pseudo(self) -> bool:
        return not self.config.is_random

    def m1_at(self, t: float) -> float:
        s = self.annealed[(1, 1)]
        return float(s.annealed[s.at(t)])

    def log10_m1_at(self, t: float) -> float:
        s = self.annealed[(1, 1)]
        return float(s.log_annealed[s.at(t)] / math.log(10))

    def trimmed_m1_at(self, t: float) -> float:
        s = self.annealed[(1, 1)]
        return float(s.trimmed[s.at(t)])

    def ratio_at(self, t: float) -> float:
        s = self.annealed[(1, 1)]
        return float(intermittency_curve(s)[s.at(t)])

    def gap_curve(self) -> np.ndarray:
        return log_moment_gap_curve(self.annealed[(1, 1)], self.annealed[(1, 2)])

    def quenched_at(self, t: float, n: int = 1) -> np.ndarray:
        i = grid_index(self.grid, t)
        return np.array([c.values[i] for c in self.curves[n]])

    def normality(self, t: float) -> tuple[float, float]:
        return shapiro_wilk(self.quenched_at(t))


def summarize(cfg: ExperimentConfig, grid: np.ndarray, media: list[MediumResult]) -> ExperimentResult:
    usable = [r for r in media if r.n_valid > 0]
    curves = {
        1: [MomentCurve(grid, r.m1, 1, r.n_valid, np.full(len(grid), r.n_valid), r.k) for r in usable],
        2: [MomentCurve(grid, r.m2, 2, r.n_valid, np.full(len(grid), r.n_valid), r.k) for r in usable],
    }
    pseudo = not cfg.is_random
    annealed = {}
    for p in range(1, max(2, cfg.max_power) + 1):
        annealed[(1, p)] = annealed_moment(curves[1], p, cfg.trim_fraction, pseudo)
    annealed[(2, 1)] = annealed_moment(curves[2], 1, cfg.trim_fraction, pseudo)
    result = ExperimentResult(cfg, grid, media, curves, annealed)
    try:
        result.lyapunov = lyapunov_ratio_estimate(
            [annealed[(1, p)] for p in range(1, max(2, cfg.max_power) + 1)], cfg.lyapunov_beta
        )
    except ValueError:
        result.lyapunov = [float("nan")] * max(2, cfg.max_power)
    return result


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentResult:
    cfg.validate()
    t0 = time.perf_counter()
    grid = time_grid(cfg.t_max, cfg.report_grid_dt, cfg.snapshot_times)
    media = run_media(cfg, grid)
    elapsed = time.perf_counter() - t0
    result = summarize(cfg, grid, media)

    totals = {s.name: sum(r.status_counts[s.name] for r in media) for s in Status}
    n_traj = cfg.M * cfg.M1
    result.manifest = {
        "code_version": brwsim.__version__,
        "config": cfg.to_dict(),
        "seed_rule": SEED_RULE,
        "medium_seeds": [r.medium_seed for r in media],
        "trajectories": n_traj,
        "status_counts": totals,
        "boundary_exits": totals[Status.BOUNDARY_EXIT.name],
        "media_without_valid_runs": [r.k for r in media if r.n_valid == 0],
        "fits_with_refined_grid": sum(r.fit_refined for r in media),
        "events": sum(r.n_events for r in media),
        "lyapunov_ratios": result.lyapunov,
        "wall_clock": {
            "simulate_seconds": elapsed,
            "trajectories_per_second": n_traj / elapsed if elapsed > 0 else None,
            "events_per_second": sum(r.n_events for r in media) / elapsed if elapsed > 0 else None,
            "workers": cfg.workers,
            "cpu_count": os.cpu_count(),
        },
    }
    if write:
        from brwsim.runner.report import render_report, write_tables

        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_tables(result, out)
        (out / "manifest.json").write_text(json.dumps(result.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        render_report(out)
    return result


def replay(cfg: ExperimentConfig, k: int, i: int):
    """Re-simulate replicate ``i`` of medium ``k`` exactly as a full run does."""
    medium = sample_medium(cfg.medium, medium_seed(cfg.master_seed, k), cfg.window)
    return simulate(medium, cfg.engine, cfg.window, replicate_seed=replicate_seed(cfg.master_seed, k, i))


def oracle_comparison(cfg: ExperimentConfig, k: int, times) -> dict:
    """Engine mean of mu(t) over ``cfg.M`` replicates in medium ``k`` vs the ODE.

    The ODE runs on a centred window of side ``cfg.oracle_window_side``.
    Returns arrays ``t, oracle, mean, se, z`` with ``z = |mean - oracle| / se``.
    """
    from brwsim.lattice import LatticeWindow
    from brwsim.oracle import OperatorSpec, solve_m1

    times = np.asarray(times, dtype=float)
    if times.max() > cfg.t_max:
        raise ValueError("comparison times must not exceed T_max")
    medium = sample_medium(cfg.medium, medium_seed(cfg.master_seed, k), cfg.window)
    side = min(cfg.oracle_window_side, cfg.window.side)
    spec = OperatorSpec.from_medium(medium, cfg.engine.kappa, LatticeWindow(cfg.window.dimension, side))
    t_end = float(times.max())
    dt = min(cfg.oracle_dt, 0.9 * spec.max_dt)
    dt = t_end / np.ceil(t_end / dt)
    sol = solve_m1(spec, t_end=t_end, dt=dt)
    oracle = np.array([sol.m1_start[int(round(t / dt))] for t in times])

    paths = []
    for i in range(cfg.M):
        traj = simulate(medium, cfg.engine, cfg.window, replicate_seed=replicate_seed(cfg.master_seed, k, i))
        if traj.status is Status.BOUNDARY_EXIT:
            continue
        fit = fit_growth_adaptive(traj, cfg.fit_grid_dt) if traj.status is Status.CAPPED else None
        paths.append(mu_path(traj, fit, times))
    paths = np.vstack(paths)
    mean = paths.mean(axis=0)
    se = paths.std(axis=0, ddof=1) / np.sqrt(len(paths))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(mean - oracle) / se
    return {"t": times, "oracle": oracle, "mean": mean, "se": se, "z": z, "replicates": len(paths)}
