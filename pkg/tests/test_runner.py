import csv
import json

import numpy as np
import pytest

from brwsim.medium import Constant, SourceKind, Weibull
from brwsim.runner import registry
from brwsim.runner.cli import main
from brwsim.runner.config import ConfigError, config_from_dict, model_config
from brwsim.runner.experiment import replay, run_experiment
from brwsim.runner.registry import UnknownModel
from brwsim.runner.report import render_report
from brwsim.runner.seeds import replicate_seed

ARTIFACTS = {"moments.csv", "annealed.csv", "diagnostics.csv", "normality.csv", "table2.csv", "manifest.json",
             "annealed.svg", "gap.svg", "quenched_t2.5.svg", "quenched_t3.svg"}


def small(model, out, **kw):
    raw = {"model": model, "M": 12, "M1": 6, "T_max": 3.0, "master_seed": 42, "output_dir": str(out)}
    raw.update(kw)
    return config_from_dict(raw)


# -- registry ---------------------------------------------------------------

def test_registry_rows():
    m1 = registry(1)
    assert m1.dimension == 1
    assert m1.medium.sources.kind is SourceKind.SINGLE_POINT
    assert m1.medium.sources.points == ((0,),)
    assert (m1.medium.split_law, m1.medium.death_law) == (Constant(2.0), Constant(1.0))
    m6 = registry(6)
    assert m6.medium.sources.kind is SourceKind.EVERY_POINT
    assert m6.medium.split_law == Weibull(2.0, 1.13) == m6.medium.death_law
    m10 = registry(10)
    assert m10.dimension == 3
    assert set(m10.medium.sources.points) == {(2, 0, 0), (0, 2, 0), (0, 0, 2)}
    assert (m10.medium.split_law, m10.medium.death_law) == (Weibull(2.0, 2.26), Weibull(2.0, 1.13))
    assert registry(5).medium.split_law == Constant(1.0)
    assert set(registry(9).medium.sources.points) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


@pytest.mark.parametrize("bad", [0, 11, -1])
def test_registry_unknown(bad):
    with pytest.raises(UnknownModel):
        registry(bad)


# -- config -----------------------------------------------------------------

@pytest.mark.parametrize(
    "raw, key",
    [
        ({"model": 1, "lattice": {"side": 2}}, "lattice.side"),
        ({"model": 1, "M": 0}, "M"),
        ({"model": 1, "M": 2.5}, "M"),
        ({"model": 1, "bogus": 1}, "bogus"),
        ({"model": 1, "engine": {"kappa": -1}}, "engine.kappa"),
        ({"model": 1, "engine": {"holding_time_mode": "x"}}, "engine.holding_time_mode"),
        ({"model": 1, "snapshot_times": [20.0]}, "snapshot_times"),
        ({"model": 12}, "model"),
        ({}, "model"),
        ({"lattice": {"dimension": 1}, "medium": {"sources": "origin", "split_law": {"kind": "weibull"},
                                                  "death_law": {"kind": "constant", "value": 1}}}, "medium.split_law"),
    ],
)
def test_config_errors_name_key(raw, key):
    with pytest.raises(ConfigError) as exc:
        config_from_dict(raw)
    assert exc.value.key == key


def test_inline_medium_config():
    cfg = config_from_dict({
        "lattice": {"dimension": 2, "side": 21},
        "medium": {"sources": [[0, 0], [1, 1]],
                   "split_law": {"kind": "weibull", "shape": 2, "scale": 2.26},
                   "death_law": {"kind": "constant", "value": 1}},
        "T_max": 4,
    })
    assert cfg.window.dimension == 2
    assert cfg.snapshot_times == (2.5, 4.0)
    assert cfg.is_random
    assert config_from_dict(cfg.to_dict() | {"lattice": {"dimension": 2, "side": 21}}).medium == cfg.medium


def test_defaults_are_desk_scale():
    cfg = model_config(3)
    assert (cfg.M, cfg.M1, cfg.t_max, cfg.engine.particle_cap) == (200, 50, 10.0, 1000)
    assert cfg.snapshot_times == (2.5, 10.0)


# -- experiment -------------------------------------------------------------

def test_artifacts_and_manifest(tmp_path):
    cfg = small(2, tmp_path / "a")
    res = run_experiment(cfg)
    names = {p.name for p in (tmp_path / "a").iterdir()}
    assert ARTIFACTS <= names
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert len(man["medium_seeds"]) == 6
    assert sum(man["status_counts"].values()) == 72
    assert man["boundary_exits"] == 0
    row = list(csv.DictReader(open(tmp_path / "a" / "table2.csv")))[0]
    assert float(row["annealed_m1"]) == pytest.approx(res.m1_at(3.0), rel=1e-11)
    assert all(b"\r\n" not in (tmp_path / "a" / n).read_bytes() for n in names)


def test_jensen_on_run(tmp_path):
    res = run_experiment(small(4, tmp_path), write=False)
    m1 = np.array([c.values for c in res.curves[1]])
    m2 = np.array([c.values for c in res.curves[2]])
    assert np.all(m2 >= m1**2 * (1 - 1e-12))


def test_workers_byte_identical(tmp_path):
    run_experiment(small(2, tmp_path / "w1", workers=1))
    run_experiment(small(2, tmp_path / "w2", workers=2))
    for name in ("moments.csv", "annealed.csv", "diagnostics.csv", "normality.csv", "table2.csv",
                 "annealed.svg", "gap.svg"):
        assert (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w2" / name).read_bytes(), name


def test_seed_changes_output(tmp_path):
    run_experiment(small(2, tmp_path / "a"))
    run_experiment(small(2, tmp_path / "b", master_seed=43))
    assert (tmp_path / "a" / "moments.csv").read_bytes() != (tmp_path / "b" / "moments.csv").read_bytes()


def test_report_idempotent(tmp_path):
    run_experiment(small(1, tmp_path))
    before = {p.name: p.read_bytes() for p in tmp_path.glob("*.svg")}
    render_report(tmp_path)
    after = {p.name: p.read_bytes() for p in tmp_path.glob("*.svg")}
    assert before == after and before


def test_replay_reproduces_events(tmp_path):
    cfg = small(2, tmp_path)
    a = replay(cfg, 3, 5)
    b = replay(cfg, 3, 5)
    assert a.replicate_seed == replicate_seed(42, 3, 5)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.positions, b.positions)


# -- cli --------------------------------------------------------------------

def test_cli_run(tmp_path, capsys):
    code = main(["run", "--model", "5", "--m", "10", "--m1", "4", "--seed", "42", "--tmax", "2", "--out", str(tmp_path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["model"] == "5"
    assert (tmp_path / "table2.csv").exists()


def test_cli_simulate_replay(tmp_path, capsys):
    f = tmp_path / "t.csv"
    assert main(["simulate", "--model", "1", "--seed", "7", "--replay", "2,3", "--out", str(f)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["replicate_seed"] == replicate_seed(7, 2, 3)
    lines = f.read_text().splitlines()
    assert lines[0] == "time,event,x0,mu_after"
    assert len(lines) == out["events"] + 1


def test_cli_oracle(tmp_path, capsys):
    f = tmp_path / "o.csv"
    assert main(["oracle", "--model", "1", "--seed", "7", "--m", "300", "--tmax", "2", "--out", str(f)]) == 0
    rows = list(csv.DictReader(open(f)))
    assert [float(r["t"]) for r in rows] == [1.0, 2.0]
    assert set(rows[0]) == {"t", "oracle_m1", "engine_mean", "engine_se", "abs_dev_over_se", "max_abs_dev_over_se"}
    assert float(rows[0]["oracle_m1"]) == pytest.approx(2.068259, rel=1e-5)


def test_cli_validate_regression(tmp_path, capsys):
    f = tmp_path / "v.csv"
    assert main(["validate-regression", "--n", "150", "--seed", "1", "--out", str(f)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n_traj"] == 150 and out["mean_r2"] > 0.95


def test_cli_report(tmp_path, capsys):
    run_experiment(small(1, tmp_path))
    assert main(["report", "--out", str(tmp_path)]) == 0


def test_cli_config_error(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": 1, "lattice": {"side": 1}}))
    assert main(["run", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err.strip()
    assert err.startswith("error: ")
    payload = json.loads(err[len("error: "):])
    assert payload == {"kind": "config", "key": "lattice.side", "message": payload["message"]}


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["frobnicate"]) == 2
    assert main(["run"]) == 2
    assert main(["report", "--out", str(tmp_path / "missing")]) != 0
    for line in capsys.readouterr().err.splitlines():
        if line.startswith("error: "):
            json.loads(line[len("error: "):])
