"""Exponential-growth regression for trajectories stopped by the particle cap.

Past ``T_100`` a capped trajectory is treated as growing exponentially.
``ln mu`` is sampled on a uniform grid over ``[T_100, T_stop]`` and fitted by
ordinary least squares with an intercept; beyond ``T_stop`` the count is
predicted as ``exp(intercept + slope * t)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from brwsim.engine import EngineParams, Status, Trajectory, mu_at, simulate
from brwsim.lattice import LatticeWindow
from brwsim.medium import MediumRealization

DEFAULT_GRID_DT = 0.05


class FitUnavailable(ValueError):
    pass


class ValidationUnavailable(ValueError):
    pass


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    fit_window: tuple[float, float]
    grid_dt: float = DEFAULT_GRID_DT

    @property
    def grid(self) -> np.ndarray:
        return fit_window_grid(*self.fit_window, self.grid_dt)

    def predict(self, t):
        return np.exp(self.intercept + self.slope * np.asarray(t, dtype=float))


def fit_window_grid(t_start: float, t_end: float, grid_dt: float) -> np.ndarray:
    n = int(np.floor((t_end - t_start) / grid_dt + 1e-9)) + 1
    return t_start + grid_dt * np.arange(n)


def ols_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Slope, intercept and R^2 of ``y ~ a + b x``.

    R^2 is 1 for a constant response (the fit is exact).
    """
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise FitUnavailable("regression needs at least two distinct times")
    slope = float(dx @ (y - ym)) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if np.ptp(y) == 0.0 else 1.0 - float(resid @ resid) / ss_tot
    return slope, intercept, r2


def fit_growth(traj: Trajectory, grid_dt: float = DEFAULT_GRID_DT) -> RegressionFit:
    if traj.status is not Status.CAPPED:
        raise FitUnavailable(f"trajectory is {traj.status.name}, not capped")
    if traj.t_100 is None:
        raise FitUnavailable("trajectory never reached 100 particles")
    if grid_dt <= 0:
        raise ValueError("grid_dt must be positive")
    t = fit_window_grid(traj.t_100, traj.t_stop, grid_dt)
    if len(t) < 2:
        raise FitUnavailable(
            f"window [{traj.t_100:.4g}, {traj.t_stop:.4g}] holds fewer than 2 grid points at dt={grid_dt}"
        )
    y = np.log(traj.mu_on(t))
    slope, intercept, r2 = ols_line(t, y)
    return RegressionFit(slope, intercept, r2, len(t), (traj.t_100, traj.t_stop), grid_dt)


def fit_growth_adaptive(traj: Trajectory, grid_dt: float = DEFAULT_GRID_DT, min_points: int = 10) -> RegressionFit:
    """``fit_growth`` with the grid refined when the window is too short.

    Very strong sources can carry a trajectory from 100 to the cap in less
    than one grid step; the step is then shrunk to give ``min_points``
    points across the window.
    """
    try:
        return fit_growth(traj, grid_dt)
    except FitUnavailable:
        if traj.status is not Status.CAPPED or traj.t_100 is None:
            raise
        width = traj.t_stop - traj.t_100
        if width <= 0:
            raise
        return fit_growth(traj, width / (min_points - 1))


def extrapolated_mu(traj: Trajectory, fit: RegressionFit | None, t: float) -> float:
    if t > traj.t_max:
        raise ValueError(f"t={t} beyond T_max={traj.t_max}")
    if t <= traj.end_time or traj.status is not Status.CAPPED:
        return float(mu_at(traj, t))
    if fit is None:
        raise FitUnavailable("capped trajectory needs a fit to extrapolate")
    return float(fit.predict(t))


def mu_path(traj: Trajectory, fit: RegressionFit | None, grid: np.ndarray) -> np.ndarray:
    """mu on ``grid``: observed up to the stop time, predicted beyond it.

    Extinct trajectories stay at zero. Boundary-exit trajectories have no
    valid continuation and are rejected.
    """
    grid = np.asarray(grid, dtype=float)
    out = traj.mu_on(grid).astype(float)
    if traj.status is Status.CAPPED:
        if fit is None:
            raise FitUnavailable("capped trajectory needs a fit to extrapolate")
        late = grid > traj.t_stop
        out[late] = fit.predict(grid[late])
    elif traj.status is Status.BOUNDARY_EXIT:
        raise ValueError("boundary-exit trajectories cannot be continued")
    return out


@dataclass(frozen=True)
class ValidationReport:
    n_traj: int
    n_capped: int
    mean_r2: float
    min_r2: float
    mean_abs_err: float
    max_abs_err: float
    mean_err: float
    max_pointwise_abs_err: float

    def as_row(self) -> dict:
        return asdict(self)


def validation_stats(trajectories, grid_dt: float = DEFAULT_GRID_DT) -> ValidationReport:
    """Compare observed and fitted counts on [T_100, T_stop] for each capped run.

    A trajectory's error is the mean of ``observed - fitted`` (in particles)
    over its fit grid. ``mean_err`` averages these, ``mean_abs_err`` and
    ``max_abs_err`` summarize their magnitudes. ``max_pointwise_abs_err`` is
    the largest single-grid-point deviation seen.
    """
    r2s = []
    errs = []
    max_point = 0.0
    n = 0
    for traj in trajectories:
        n += 1
        if traj.status is not Status.CAPPED:
            continue
        fit = fit_growth_adaptive(traj, grid_dt)
        t = fit.grid
        err = traj.mu_on(t) - fit.predict(t)
        r2s.append(fit.r_squared)
        errs.append(float(err.mean()))
        max_point = max(max_point, float(np.abs(err).max()))
    if not r2s:
        raise ValidationUnavailable("no trajectory reached the particle cap")
    r2s = np.array(r2s)
    errs = np.array(errs)
    return ValidationReport(
        n_traj=n,
        n_capped=len(r2s),
        mean_r2=float(r2s.mean()),
        min_r2=float(r2s.min()),
        mean_abs_err=float(np.abs(errs).mean()),
        max_abs_err=float(np.abs(errs).max()),
        mean_err=float(errs.mean()),
        max_pointwise_abs_err=max_point,
    )


def validate_regression(
    medium: MediumRealization,
    n_traj: int,
    params: EngineParams,
    window: LatticeWindow,
    seeds,
    grid_dt: float = DEFAULT_GRID_DT,
) -> ValidationReport:
    """Simulate ``n_traj`` runs in ``medium`` and score the growth regression.

    ``seeds`` maps a replicate number to its seed.
    """
    if n_traj < 100:
        raise ValueError("validation needs at least 100 trajectories")
    trajs = (simulate(medium, params, window, replicate_seed=seeds(i)) for i in range(n_traj))
    return validation_stats(trajs, grid_dt)
