"""CSV tables for one experiment and the SVG figures rendered from them.

Figures are rebuilt from the CSV files alone (plus the snapshot times in
``manifest.json``), so ``render_report`` can be rerun on an existing output
directory.
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from pathlib import Path

import numpy as np

from brwsim.runner import svg
from brwsim.stats import intermittency_curve, lyapunov_pointwise, shapiro_wilk, trim_count


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.12g" % x


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_tables(result, out: Path) -> None:
    cfg = result.config
    grid = result.grid

    def moment_rows():
        for n in (1, 2):
            for c in result.curves[n]:
                for t, v in zip(grid, c.values):
                    yield (t, c.medium_id, n, v)

    write_csv(out / "moments.csv", ["t", "medium_id", "n", "m_hat"], moment_rows())

    def annealed_rows():
        for (n, p), s in sorted(result.annealed.items()):
            r = intermittency_curve(s)
            for j, t in enumerate(grid):
                yield (t, n, p, s.annealed[j], s.trimmed[j], r[j])

    write_csv(out / "annealed.csv", ["t", "n", "p", "annealed", "trimmed", "R"], annealed_rows())

    gap = result.gap_curve()
    powers = sorted(p for (n, p) in result.annealed if n == 1)
    lyap = [lyapunov_pointwise(result.annealed[(1, p)], cfg.lyapunov_beta) for p in powers]
    write_csv(
        out / "diagnostics.csv",
        ["t", "gap"] + [f"lyapunov_p{p}" for p in powers],
        ((t, gap[j], *[ly[j] for ly in lyap]) for j, t in enumerate(grid)),
    )

    rows = []
    for t in cfg.snapshot_times:
        vals = result.quenched_at(t)
        try:
            w, pv = shapiro_wilk(vals)
        except ValueError:
            w, pv = float("nan"), float("nan")
        rows.append((t, w, pv))
    write_csv(out / "normality.csv", ["t", "W", "p_value"], rows)

    t_end = cfg.t_max
    write_csv(
        out / "table2.csv",
        ["model", "random", "annealed_m1", "trimmed_m1", "R", "t"],
        [(cfg.label, "yes" if cfg.is_random else "no", result.m1_at(t_end), result.trimmed_m1_at(t_end), result.ratio_at(t_end), t_end)],
    )


def render_report(out) -> list[Path]:
    out = Path(out)
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    cfg = manifest["config"]
    label = f"model {cfg['model']}" if cfg["model"] is not None else "custom model"
    trim_fraction = cfg["stats"]["trim_fraction"]
    written = []

    quenched = defaultdict(dict)
    for row in read_csv(out / "moments.csv"):
        if row["n"] == "1":
            quenched[row["t"]][int(row["medium_id"])] = float(row["m_hat"])
    times = {float(t): t for t in quenched}
    for snap in cfg["snapshot_times"]:
        key = min(times, key=lambda t: abs(t - snap))
        per_medium = quenched[times[key]]
        vals = [per_medium[k] for k in sorted(per_medium)]
        k = trim_count(len(vals), trim_fraction)
        order = np.argsort(vals, kind="stable")
        drop = set(order[:k].tolist()) | set(order[len(vals) - k :].tolist())
        kept = [v for i, v in enumerate(vals) if i not in drop]
        doc = svg.bar_panels(
            [
                ("all media", vals, float(np.mean(vals))),
                (f"{trim_fraction:.0%} trimmed", kept, float(np.mean(kept)) if kept else float("nan")),
            ],
            "quenched m1",
            f"{label}: quenched first moments at t = {snap:g}",
        )
        path = out / f"quenched_t{snap:g}.svg"
        path.write_text(doc, encoding="utf-8")
        written.append(path)

    series = defaultdict(lambda: ([], []))
    for row in read_csv(out / "annealed.csv"):
        if row["n"] == "1" and row["p"] == "1":
            t = float(row["t"])
            for name, col in (("log10 annealed m1", "annealed"), ("log10 trimmed m1", "trimmed")):
                v = float(row[col])
                series[name][0].append(t)
                series[name][1].append(math.log10(v) if v > 0 else float("nan"))
    path = out / "annealed.svg"
    path.write_text(svg.line_plot(dict(series), f"{label}: annealed first moment", "t", "log10"), encoding="utf-8")
    written.append(path)

    m = defaultdict(dict)
    for row in read_csv(out / "annealed.csv"):
        if row["n"] == "1" and row["p"] in ("1", "2"):
            m[row["p"]][float(row["t"])] = float(row["annealed"])
    ts = sorted(m["1"])

    def lg(v):
        return math.log10(v) if v > 0 and math.isfinite(v) else float("nan")

    gap_series = {
        "log10 <m1^2>": (ts, [lg(m["2"][t]) for t in ts]),
        "2 log10 <m1>": (ts, [2 * lg(m["1"][t]) for t in ts]),
        "gap": (ts, [float(r["gap"]) for r in read_csv(out / "diagnostics.csv")]),
    }
    path = out / "gap.svg"
    path.write_text(svg.line_plot(gap_series, f"{label}: growth of the first two annealed moments", "t", "log10"), encoding="utf-8")
    written.append(path)
    return written
