"""Moment estimators over trajectory and medium ensembles, plus diagnostics.

Annealed averages are accumulated in the log domain: a quenched first
moment of order 1e20 squared still fits a double, but summing p-th powers of
several hundred such values is done with ``logsumexp`` so no intermediate
overflows. All reductions are over arrays in a fixed (medium index) order and
are therefore bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, ndtr, ndtri

from brwsim.engine import Status
from brwsim.extrapolate import mu_path

LN10 = math.log(10.0)


class TrimUnavailable(ValueError):
    pass


class RatioUndefined(ValueError):
    pass


@dataclass(eq=False)
class MomentCurve:
    time_grid: np.ndarray
    values: np.ndarray
    n: int
    M: int
    counts: np.ndarray
    medium_id: int | None = None


def moments_from_paths(paths: np.ndarray, n: int, time_grid, medium_id=None) -> MomentCurve:
    """Quenched moment from an ``(M, len(time_grid))`` array of mu paths."""
    paths = np.asarray(paths, dtype=float)
    if paths.ndim != 2 or paths.shape[0] == 0:
        raise ValueError("need a nonempty (replicates, grid) array of paths")
    if n < 0:
        raise ValueError("moment order must be >= 0")
    vals = (paths**n).mean(axis=0)
    counts = np.full(paths.shape[1], paths.shape[0], dtype=np.int64)
    return MomentCurve(np.asarray(time_grid, dtype=float), vals, n, paths.shape[0], counts, medium_id)


def quenched_moment(runs, n: int, time_grid, medium_id=None) -> MomentCurve:
    """Monte Carlo estimate of E[mu(t)^n] from ``(trajectory, fit)`` pairs.

    Capped trajectories are continued by their fit beyond T_stop; extinct
    ones contribute zero after extinction. Boundary-exit runs are dropped and
    show up as a smaller replicate count.
    """
    time_grid = np.asarray(time_grid, dtype=float)
    paths = [mu_path(traj, fit, time_grid) for traj, fit in runs if traj.status is not Status.BOUNDARY_EXIT]
    if not paths:
        raise ValueError("no usable trajectories")
    return moments_from_paths(np.vstack(paths), n, time_grid, medium_id)


def trim_count(n_values: int, trim_fraction: float) -> int:
    """Values removed from *each* end: ``ceil(trim_fraction * n / 2)``.

    Gives 2 + 2 for 250 values at 1 %, and 1 + 1 for 50 values.
    """
    if trim_fraction < 0 or trim_fraction >= 1:
        raise ValueError("trim_fraction must lie in [0, 1)")
    return math.ceil(round(trim_fraction * n_values / 2, 12))


def trimmed_mean(values, trim_fraction: float = 0.01) -> float:
    x = np.sort(np.asarray(values, dtype=float))
    k = trim_count(len(x), trim_fraction)
    if len(x) - 2 * k < 1:
        raise TrimUnavailable(f"cannot trim {k} from each end of {len(x)} values")
    return float(x[k : len(x) - k].mean())


@dataclass(eq=False)
class AnnealedSummary:
    """Average of p-th powers of quenched moments over a medium ensemble.

    For non-random media the same arithmetic gives the pseudo-annealed
    moment. Values are held as natural logs; ``annealed`` and ``trimmed``
    exponentiate them (and may overflow to inf).
    """

    time_grid: np.ndarray
    n: int
    p: int
    log_annealed: np.ndarray
    log_trimmed: np.ndarray
    M1: int
    trim_fraction: float
    trimmed_each_end: int
    pseudo: bool
    curves: list[MomentCurve] = field(repr=False, default_factory=list)

    @property
    def annealed(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_annealed)

    @property
    def trimmed(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_trimmed)

    def at(self, t: float) -> int:
        return grid_index(self.time_grid, t)


def grid_index(grid: np.ndarray, t: float) -> int:
    i = int(np.argmin(np.abs(grid - t)))
    if abs(grid[i] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t={t} is not on the time grid")
    return i


def _log_mean(logs: np.ndarray) -> np.ndarray:
    # column-wise log of the mean of exp(logs); all -inf columns stay -inf
    out = np.full(logs.shape[1], -np.inf)
    finite = np.isfinite(logs).any(axis=0)
    if finite.any():
        out[finite] = logsumexp(logs[:, finite], axis=0) - math.log(logs.shape[0])
    return out


def annealed_moment(curves: list[MomentCurve], p: int = 1, trim_fraction: float = 0.01, pseudo: bool = False) -> AnnealedSummary:
    if not curves:
        raise ValueError("need at least one quenched curve")
    grid = curves[0].time_grid
    n = curves[0].n
    for c in curves[1:]:
        if c.n != n or c.time_grid.shape != grid.shape or not np.array_equal(c.time_grid, grid):
            raise ValueError("quenched curves must share order and time grid")
    vals = np.vstack([c.values for c in curves])
    if np.any(vals < 0):
        raise ValueError("quenched moments must be nonnegative")
    with np.errstate(divide="ignore"):
        logs = p * np.log(vals)
    m1 = len(curves)
    k = trim_count(m1, trim_fraction)
    if m1 - 2 * k < 1:
        raise TrimUnavailable(f"cannot trim {k} from each end of {m1} media")
    logs_sorted = np.sort(logs, axis=0)
    return AnnealedSummary(
        time_grid=grid,
        n=n,
        p=p,
        log_annealed=_log_mean(logs),
        log_trimmed=_log_mean(logs_sorted[k : m1 - k]),
        M1=m1,
        trim_fraction=trim_fraction,
        trimmed_each_end=k,
        pseudo=pseudo,
        curves=list(curves),
    )


def intermittency_ratio(summary: AnnealedSummary, t: float) -> float:
    """Annealed first moment over its trimmed counterpart at time ``t``."""
    i = summary.at(t)
    lt = summary.log_trimmed[i]
    if not np.isfinite(lt):
        raise RatioUndefined(f"trimmed moment is zero at t={t}")
    return float(np.exp(summary.log_annealed[i] - lt))


def intermittency_curve(summary: AnnealedSummary) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        r = np.exp(summary.log_annealed - summary.log_trimmed)
    return np.where(np.isfinite(summary.log_trimmed), r, np.nan)


def log_moment_gap(first: AnnealedSummary, second: AnnealedSummary, t: float) -> float:
    """``log10 <m^2> - 2 log10 <m>`` at time ``t`` (p=2 and p=1 summaries)."""
    if first.p != 1 or second.p != 2:
        raise ValueError("expected summaries with p=1 and p=2")
    i = first.at(t)
    a1 = first.log_annealed[i]
    a2 = second.log_annealed[i]
    if not (np.isfinite(a1) and np.isfinite(a2)):
        raise ValueError(f"annealed moments must be positive at t={t}")
    return float((a2 - 2.0 * a1) / LN10)


def log_moment_gap_curve(first: AnnealedSummary, second: AnnealedSummary) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        g = (second.log_annealed - 2.0 * first.log_annealed) / LN10
    return np.where(np.isfinite(g), g, np.nan)


def lyapunov_ratio_estimate(summaries: list[AnnealedSummary], beta: float = 1.0, t_window=None) -> list[float]:
    """Growth rate of ``ln <m^p>`` against ``t**beta``, divided by ``p``.

    ``summaries[j]`` must hold power ``p = j + 1``. The slope is fitted by
    least squares on ``t_window`` (default: the last 30 % of the grid's
    horizon). A strictly increasing result signals intermittency.
    """
    if not summaries:
        raise ValueError("need at least one summary")
    grid = summaries[0].time_grid
    if t_window is None:
        t_window = (0.7 * grid[-1], grid[-1])
    sel = (grid >= t_window[0] - 1e-12) & (grid <= t_window[1] + 1e-12)
    if sel.sum() < 2:
        raise ValueError("window holds fewer than two grid points")
    x = grid[sel] ** beta
    out = []
    for j, s in enumerate(summaries):
        if s.p != j + 1:
            raise ValueError("summaries must be ordered p = 1, 2, ...")
        y = s.log_annealed[sel]
        if not np.all(np.isfinite(y)):
            raise ValueError("annealed moments must be positive on the window")
        slope = np.polyfit(x, y, 1)[0]
        out.append(float(slope) / s.p)
    return out


def lyapunov_pointwise(summary: AnnealedSummary, beta: float = 1.0) -> np.ndarray:
    """``ln <m^p>(t) / (p t^beta)`` on the grid (nan at t = 0)."""
    t = summary.time_grid
    with np.errstate(divide="ignore", invalid="ignore"):
        r = summary.log_annealed / (summary.p * t**beta)
    return np.where((t > 0) & np.isfinite(r), r, np.nan)


# -- Shapiro-Wilk (Royston 1995, algorithm AS R94) --------------------------

_C1 = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056]
_C2 = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]


def _poly(c, x):
    return sum(ci * x**i for i, ci in enumerate(c))


def _sw_coefficients(n: int) -> np.ndarray:
    """Antisymmetric weights a_1..a_n for ordered samples."""
    i = np.arange(1, n + 1)
    m = ndtri((i - 0.375) / (n + 0.25))
    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
        return a
    mm = float(m @ m)
    u = 1.0 / math.sqrt(n)
    an = m[-1] / math.sqrt(mm) + _poly(_C1, u)
    a = np.empty(n)
    if n > 5:
        an1 = m[-2] / math.sqrt(mm) + _poly(_C2, u)
        phi = (mm - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * an**2 - 2 * an1**2)
        a[2:-2] = m[2:-2] / math.sqrt(phi)
        a[-2], a[1] = an1, -an1
    else:
        phi = (mm - 2 * m[-1] ** 2) / (1 - 2 * an**2)
        a[1:-1] = m[1:-1] / math.sqrt(phi)
    a[-1], a[0] = an, -an
    return a


def shapiro_wilk(values) -> tuple[float, float]:
    """Shapiro-Wilk W and its p-value for 3 <= n <= 5000."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if not 3 <= n <= 5000:
        raise ValueError(f"Shapiro-Wilk needs 3 <= n <= 5000, got {n}")
    ss = float(((x - x.mean()) ** 2).sum())
    if ss <= (1e-12 * max(1.0, float(np.abs(x).max()))) ** 2 * n:
        raise ValueError("Shapiro-Wilk is undefined for a constant sample")
    a = _sw_coefficients(n)
    w = float((a @ x) ** 2 / ss)
    w = min(w, 1.0)
    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, float(min(max(p, 0.0), 1.0))
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
        if 1.0 - w <= 0.0 or gamma - math.log1p(-w) <= 0.0:
            return w, 1.0 if w >= 1.0 else 0.0
        y = -math.log(gamma - math.log1p(-w))
    else:
        ln = math.log(n)
        mu = -1.5861 - 0.31082 * ln - 0.083751 * ln**2 + 0.0038915 * ln**3
        sigma = math.exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln**2)
        if w >= 1.0:
            return w, 1.0
        y = math.log1p(-w)
    z = (y - mu) / sigma
    return w, float(1.0 - ndtr(z))
