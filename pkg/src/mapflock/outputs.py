"""Deterministic plain-text outputs: metrics CSV, key=value summary, SVG plots.

All numbers are written with 6 significant digits so identical runs
produce byte-identical files.
"""

import os

import numpy as np

from .world import ScenarioConfig, config_from_lines, config_to_lines


def fmt(x):
    """6-significant-digit decimal formatting."""
    return format(float(x), ".6g")


def metrics_header(n_clusters):
    return "t,coverage_ratio,fiedler,alive,m0,m1,m2," \
        + ",".join(f"rg_{k}" for k in range(n_clusters))


def write_metrics_csv(path, result):
    """One row per sample: time, global metrics, per-cluster coverage."""
    n_clusters = len(result.samples[0].cluster_coverage)
    lines = [metrics_header(n_clusters)]
    for s in result.samples:
        row = [fmt(s.t), fmt(s.coverage_ratio), fmt(s.fiedler),
               str(s.alive_count), *(str(c) for c in s.mode_counts),
               *(fmt(c) for c in s.cluster_coverage)]
        lines.append(",".join(row))
    _write_lines(path, lines)


def write_trajectories_csv(path, result):
    if result.trajectory is None:
        raise ValueError("run was executed without trajectory recording")
    lines = ["t,map_id,x,y,vx,vy,mode,alive"]
    for t, i, x, y, vx, vy, mode, alive in result.trajectory:
        lines.append(",".join([fmt(t), str(i), fmt(x), fmt(y),
                               fmt(vx), fmt(vy), str(mode), str(alive)]))
    _write_lines(path, lines)


def write_summary(path, result, extra=None):
    """key=value summary: final metrics, convergence, and a config echo
    sufficient to reproduce the run exactly."""
    final = result.final
    lines = [
        f"final_coverage_ratio = {fmt(final.coverage_ratio)}",
        f"final_fiedler = {fmt(final.fiedler)}",
        f"final_alive = {final.alive_count}",
        f"convergence_time = "
        + (fmt(result.convergence_time) if result.convergence_time is not None else "none"),
        f"seed = {result.config.seed}",
    ]
    for k, cov in enumerate(final.cluster_coverage):
        lines.append(f"final_rg_{k} = {fmt(cov)}")
    if extra:
        lines.extend(f"{key} = {value}" for key, value in extra.items())
    lines.extend("config." + line for line in config_to_lines(result.config))
    _write_lines(path, lines)


def config_from_summary(path) -> ScenarioConfig:
    """Rebuild the exact run configuration from a summary's config echo."""
    with open(path, "r", encoding="utf-8") as fh:
        echo = [line[len("config."):] for line in fh.read().splitlines()
                if line.startswith("config.")]
    return config_from_lines(echo)


def write_run_outputs(result, out_dir):
    """Standard output bundle for one run; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    metrics = os.path.join(out_dir, "metrics.csv")
    summary = os.path.join(out_dir, "summary.txt")
    write_metrics_csv(metrics, result)
    write_summary(summary, result)
    paths = [metrics, summary]
    if result.trajectory is not None:
        traj = os.path.join(out_dir, "trajectories.csv")
        write_trajectories_csv(traj, result)
        paths.append(traj)
    return paths


def read_csv(path):
    """Parse a metrics-style CSV into (column names, dict of float arrays)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty CSV")
    names = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    if any(len(row) != len(names) for row in rows):
        raise ValueError(f"{path}: ragged CSV rows")
    cols = {name: np.array([float(row[j]) for row in rows])
            for j, name in enumerate(names)}
    return names, cols


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")


def write_line_svg(path, x, series, x_label="t", width=800, height=500):
    """Minimal SVG line chart: one polyline per series plus axes and legend."""
    x = np.asarray(x, dtype=float)
    if not series:
        raise ValueError("nothing to plot")
    ml, mr, mt, mb = 60, 20, 20, 40
    pw, ph = width - ml - mr, height - mt - mb
    ys = np.concatenate([np.asarray(v, float) for v in series.values()])
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(v):
        return ml + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return mt + ph - (v - y_lo) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
        f'<text x="{ml + pw / 2}" y="{height - 8}" text-anchor="middle" '
        f'font-size="14">{x_label}</text>',
        f'<text x="{ml - 8}" y="{mt + ph}" text-anchor="end" font-size="12">{fmt(y_lo)}</text>',
        f'<text x="{ml - 8}" y="{mt + 12}" text-anchor="end" font-size="12">{fmt(y_hi)}</text>',
        f'<text x="{ml}" y="{mt + ph + 18}" text-anchor="middle" font-size="12">{fmt(x_lo)}</text>',
        f'<text x="{ml + pw}" y="{mt + ph + 18}" text-anchor="middle" font-size="12">{fmt(x_hi)}</text>',
    ]
    for idx, (name, y) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x, np.asarray(y, float)))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{pts}"/>')
        parts.append(f'<text x="{ml + pw - 6}" y="{mt + 16 + 16 * idx}" text-anchor="end" '
                     f'font-size="12" fill="{color}">{name}</text>')
    parts.append("</svg>")
    _write_lines(path, parts)


def _write_lines(path, lines):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
