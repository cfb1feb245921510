"""JSON experiment configuration.

Example::

    {
      "model": 2,
      "M": 200, "M1": 50, "T_max": 10,
      "snapshot_times": [2.5, 10],
      "master_seed": 42, "workers": 4, "output_dir": "out/model2",
      "lattice": {"side": 100, "boundary_policy": "error"},
      "engine": {"kappa": 1, "particle_cap": 1000, "holding_time_mode": "total_rate"},
      "extrapolate": {"grid_dt": 0.05},
      "report": {"grid_dt": 0.1},
      "stats": {"trim_fraction": 0.01, "lyapunov_beta": 1.0, "max_power": 2},
      "oracle": {"dt": 0.001, "window_side": 41}
    }

Instead of ``model`` a config may give ``lattice.dimension`` and a
``medium`` block ``{"sources": "origin" | "every_point" | [[x, ...], ...],
"split_law": {"kind": "weibull", "shape": 2, "scale": 2.26},
"death_law": {"kind": "constant", "value": 1}}``. Every other key has a
default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from brwsim.engine import EngineParams, HoldingTimeMode
from brwsim.lattice import BoundaryPolicy, LatticeWindow
from brwsim.medium import MediumSpec, law_from_dict, sources_from_config
from brwsim.runner.registry import UnknownModel, registry

DESK_SCALE = {"M": 200, "M1": 50}
PAPER_SCALE = {"M": 1000, "M1": 250}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


@dataclass(frozen=True)
class ExperimentConfig:
    model: int | None
    medium: MediumSpec
    window: LatticeWindow
    engine: EngineParams
    M: int = DESK_SCALE["M"]
    M1: int = DESK_SCALE["M1"]
    snapshot_times: tuple[float, ...] = (2.5, 10.0)
    master_seed: int = 0
    workers: int = 1
    output_dir: str = "out"
    fit_grid_dt: float = 0.05
    report_grid_dt: float = 0.1
    trim_fraction: float = 0.01
    lyapunov_beta: float = 1.0
    max_power: int = 2
    oracle_dt: float = 1e-3
    oracle_window_side: int = 41
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def t_max(self) -> float:
        return self.engine.t_max

    @property
    def label(self) -> str:
        return str(self.model) if self.model is not None else "custom"

    @property
    def is_random(self) -> bool:
        return self.medium.is_random

    def with_overrides(self, **kw) -> "ExperimentConfig":
        engine_kw = {}
        if "t_max" in kw:
            engine_kw["t_max"] = kw.pop("t_max")
        cfg = replace(self, **kw)
        if engine_kw:
            cfg = replace(cfg, engine=replace(cfg.engine, **engine_kw))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.M < 1:
            raise ConfigError("M", "must be >= 1")
        if self.M1 < 1:
            raise ConfigError("M1", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if self.engine.particle_cap < 100:
            raise ConfigError("engine.particle_cap", "must be >= 100 so capped runs can be extrapolated")
        for t in self.snapshot_times:
            if not 0 <= t <= self.t_max:
                raise ConfigError("snapshot_times", f"{t} outside [0, T_max={self.t_max}]")
        if self.report_grid_dt <= 0 or self.fit_grid_dt <= 0:
            raise ConfigError("report.grid_dt", "grid steps must be positive")
        if not 0 <= self.trim_fraction < 0.5:
            raise ConfigError("stats.trim_fraction", "must lie in [0, 0.5)")
        if self.max_power < 1:
            raise ConfigError("stats.max_power", "must be >= 1")
        try:
            self.medium.sources.validate(self.window)
        except ValueError as exc:
            raise ConfigError("medium.sources", str(exc)) from None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "M": self.M,
            "M1": self.M1,
            "T_max": self.t_max,
            "snapshot_times": list(self.snapshot_times),
            "master_seed": self.master_seed,
            "workers": self.workers,
            "output_dir": str(self.output_dir),
            "lattice": {
                "dimension": self.window.dimension,
                "side": self.window.side,
                "boundary_policy": self.window.boundary_policy.value,
            },
            "medium": self.medium.to_dict(),
            "engine": {
                "kappa": self.engine.kappa,
                "particle_cap": self.engine.particle_cap,
                "holding_time_mode": self.engine.holding_time_mode.value,
            },
            "extrapolate": {"grid_dt": self.fit_grid_dt},
            "report": {"grid_dt": self.report_grid_dt},
            "stats": {
                "trim_fraction": self.trim_fraction,
                "lyapunov_beta": self.lyapunov_beta,
                "max_power": self.max_power,
            },
            "oracle": {"dt": self.oracle_dt, "window_side": self.oracle_window_side},
        }


_TOP_KEYS = {
    "model", "M", "M1", "T_max", "snapshot_times", "master_seed", "workers", "output_dir",
    "lattice", "medium", "engine", "extrapolate", "report", "stats", "oracle",
}
_SECTION_KEYS = {
    "lattice": {"dimension", "side", "boundary_policy"},
    "medium": {"sources", "split_law", "death_law"},
    "engine": {"kappa", "particle_cap", "holding_time_mode", "T_max"},
    "extrapolate": {"grid_dt"},
    "report": {"grid_dt"},
    "stats": {"trim_fraction", "lyapunov_beta", "max_power"},
    "oracle": {"dt", "window_side"},
}


def _get(d: dict, key: str, path: str, kind, default):
    if key not in d:
        return default
    v = d[key]
    try:
        if kind is int:
            if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                raise TypeError
            return int(v)
        if kind is float:
            if isinstance(v, bool):
                raise TypeError
            return float(v)
        if kind is str:
            if not isinstance(v, str):
                raise TypeError
            return v
    except (TypeError, ValueError):
        pass
    raise ConfigError(path, f"expected {kind.__name__}, got {v!r}")


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    for k in raw:
        if k not in _TOP_KEYS:
            raise ConfigError(k, "unknown key")
    sections = {}
    for name, allowed in _SECTION_KEYS.items():
        sec = raw.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(name, "must be an object")
        for k in sec:
            if k not in allowed:
                raise ConfigError(f"{name}.{k}", "unknown key")
        sections[name] = sec

    lat = sections["lattice"]
    model_id = raw.get("model")
    if model_id is not None:
        try:
            model = registry(model_id)
        except UnknownModel as exc:
            raise ConfigError("model", exc.args[0]) from None
        if raw.get("medium"):
            raise ConfigError("medium", "give either 'model' or 'medium', not both")
        dimension = model.dimension
        if "dimension" in lat and int(lat["dimension"]) != dimension:
            raise ConfigError("lattice.dimension", f"model {model_id} is {dimension}-dimensional")
        medium = model.medium
        model_id = model.model_id
    else:
        if "medium" not in raw:
            raise ConfigError("model", "required unless a 'medium' block is given")
        dimension = _get(lat, "dimension", "lattice.dimension", int, None)
        if dimension is None:
            raise ConfigError("lattice.dimension", "required with an inline medium")
        med = sections["medium"]
        for k in ("sources", "split_law", "death_law"):
            if k not in med:
                raise ConfigError(f"medium.{k}", "required")
        try:
            sources = sources_from_config(med["sources"], dimension)
        except ValueError as exc:
            raise ConfigError("medium.sources", str(exc)) from None
        laws = {}
        for k in ("split_law", "death_law"):
            try:
                laws[k] = law_from_dict(med[k])
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"medium.{k}", str(exc)) from None
        medium = MediumSpec(sources, laws["split_law"], laws["death_law"])

    side = _get(lat, "side", "lattice.side", int, 100)
    if side < 3:
        raise ConfigError("lattice.side", f"must be >= 3, got {side}")
    try:
        policy = BoundaryPolicy(_get(lat, "boundary_policy", "lattice.boundary_policy", str, "error"))
    except ValueError:
        raise ConfigError("lattice.boundary_policy", f"expected one of {[p.value for p in BoundaryPolicy]}") from None
    window = LatticeWindow(dimension, side, policy)

    eng = sections["engine"]
    t_max = _get(raw, "T_max", "T_max", float, None)
    if t_max is None:
        t_max = _get(eng, "T_max", "engine.T_max", float, 10.0)
    if not t_max > 0:
        raise ConfigError("T_max", "must be positive")
    kappa = _get(eng, "kappa", "engine.kappa", float, 1.0)
    if not kappa > 0:
        raise ConfigError("engine.kappa", "must be positive")
    try:
        mode = HoldingTimeMode(_get(eng, "holding_time_mode", "engine.holding_time_mode", str, "total_rate"))
    except ValueError:
        raise ConfigError("engine.holding_time_mode", f"expected one of {[m.value for m in HoldingTimeMode]}") from None
    engine = EngineParams(
        kappa=kappa,
        t_max=t_max,
        particle_cap=_get(eng, "particle_cap", "engine.particle_cap", int, 1000),
        holding_time_mode=mode,
    )

    snaps = raw.get("snapshot_times", sorted({min(2.5, t_max), t_max}))
    if not isinstance(snaps, list) or not all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in snaps):
        raise ConfigError("snapshot_times", "must be a list of numbers")

    st = sections["stats"]
    orc = sections["oracle"]
    cfg = ExperimentConfig(
        model=model_id,
        medium=medium,
        window=window,
        engine=engine,
        M=_get(raw, "M", "M", int, DESK_SCALE["M"]),
        M1=_get(raw, "M1", "M1", int, DESK_SCALE["M1"]),
        snapshot_times=tuple(float(s) for s in snaps),
        master_seed=_get(raw, "master_seed", "master_seed", int, 0),
        workers=_get(raw, "workers", "workers", int, 1),
        output_dir=_get(raw, "output_dir", "output_dir", str, "out"),
        fit_grid_dt=_get(sections["extrapolate"], "grid_dt", "extrapolate.grid_dt", float, 0.05),
        report_grid_dt=_get(sections["report"], "grid_dt", "report.grid_dt", float, 0.1),
        trim_fraction=_get(st, "trim_fraction", "stats.trim_fraction", float, 0.01),
        lyapunov_beta=_get(st, "lyapunov_beta", "stats.lyapunov_beta", float, 1.0),
        max_power=_get(st, "max_power", "stats.max_power", int, 2),
        oracle_dt=_get(orc, "dt", "oracle.dt", float, 1e-3),
        oracle_window_side=_get(orc, "window_side", "oracle.window_side", int, 41),
    )
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return config_from_dict(raw)


def model_config(model_id: int, **overrides) -> ExperimentConfig:
    raw = {"model": model_id}
    raw.update(overrides)
    return config_from_dict(raw)
