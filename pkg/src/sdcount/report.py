"""Delimited output, run manifests and figure rendering.

All floats are serialized with 17 significant digits so that written
matrices and result tables round-trip bit-exactly. Figures are rendered
with matplotlib to SVG with a fixed hash salt and no date metadata, which
makes the byte output a pure function of the plotted data.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "RESULTS_COLUMNS",
    "CURVES_COLUMNS",
    "format_float",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_results_csv",
    "read_results_csv",
    "write_curves_csv",
    "write_curve_csv",
    "write_manifest",
    "render_error_rates",
    "render_sdc_curves",
]

RESULTS_COLUMNS = ("scenario", "grid_label", "grid_value", "method",
                   "trials", "errors", "error_rate")
CURVES_COLUMNS = ("scenario", "grid_label", "grid_value", "hypothesis",
                  "mean_sdc")

# fixed salt makes matplotlib's generated SVG ids reproducible
plt.rcParams["svg.hashsalt"] = "sdcount"

_METHOD_STYLE = {
    "sdc": ("o", "-"),
    "mdl": ("s", "--"),
    "sorte": ("^", "-."),
    "rmt": ("d", ":"),
}


def format_float(value):
    return format(float(value), ".17g")


def write_matrix_csv(path, matrix):
    """Write a 2-D array as header-less CSV, one row per line."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for row in matrix:
            handle.write(",".join(format_float(v) for v in row))
            handle.write("\n")


def read_matrix_csv(path):
    """Read a header-less CSV matrix; raises ValueError on ragged input."""
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not a number row: {exc}") from exc
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(
                    f"{path}:{lineno}: row has {len(rows[-1])} values, "
                    f"expected {len(rows[0])}"
                )
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    return np.array(rows, dtype=np.float64)


def write_results_csv(path, sweep):
    """Write a `SweepResult`'s error-rate table."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULTS_COLUMNS)
        for row in sweep.rows:
            writer.writerow([
                row.scenario_id,
                row.grid_label,
                format_float(row.grid_value),
                row.method,
                row.trials,
                row.errors,
                format_float(row.error_rate),
            ])


def read_results_csv(path):
    """Read an error-rate table back into a list of dict rows."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != RESULTS_COLUMNS:
            raise ValueError(
                f"{path}: expected header {','.join(RESULTS_COLUMNS)}"
            )
        rows = []
        for record in reader:
            if len(record) != len(RESULTS_COLUMNS):
                raise ValueError(f"{path}: malformed row {record!r}")
            rows.append({
                "scenario": int(record[0]),
                "grid_label": record[1],
                "grid_value": float(record[2]),
                "method": record[3],
                "trials": int(record[4]),
                "errors": int(record[5]),
                "error_rate": float(record[6]),
            })
    if not rows:
        raise ValueError(f"{path}: results file has no data rows")
    return rows


def write_curves_csv(path, sweep):
    """Write the per-grid-point mean dependency curves of a sweep."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CURVES_COLUMNS)
        for row in sweep.curves:
            writer.writerow([
                sweep.scenario_id,
                sweep.grid_label,
                format_float(row.grid_value),
                row.hypothesis,
                format_float(row.mean_value),
            ])


def write_curve_csv(path, curve):
    """Write a single `SdcCurve` as two columns: N, sdc."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("N", "sdc"))
        for n in sorted(curve.values):
            writer.writerow([n, format_float(curve.values[n])])


def write_manifest(path, entries):
    """Write a flat key-value manifest atomically (write + rename)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        for key, value in entries:
            handle.write(f"{key} = {value}\n")
    os.replace(tmp, path)


def _save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_error_rates(rows, path, title=None):
    """One polyline per method: empirical error probability vs grid value."""
    methods = sorted({r["method"] for r in rows})
    grid_label = rows[0]["grid_label"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method in methods:
        pts = sorted(
            (r["grid_value"], r["error_rate"]) for r in rows if r["method"] == method
        )
        marker, style = _METHOD_STYLE.get(method, ("x", "-"))
        (line,) = ax.plot([p[0] for p in pts], [p[1] for p in pts],
                          marker=marker, linestyle=style, label=method)
        line.set_gid(f"method-{method}")
    ax.set_xlabel(grid_label)
    ax.set_ylabel("empirical error probability")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save_svg(fig, path)


def render_sdc_curves(curves, path, grid_label="grid", title=None):
    """Mean dependency score vs hypothesis, one polyline per grid value."""
    grid_values = sorted({c.grid_value for c in curves})
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for gv in grid_values:
        pts = sorted((c.hypothesis, c.mean_value) for c in curves
                     if c.grid_value == gv)
        (line,) = ax.plot([p[0] for p in pts], [p[1] for p in pts],
                          marker="o", label=f"{grid_label}={gv:g}")
        line.set_gid(f"grid-{gv:g}")
    ax.set_xlabel("hypothesis N")
    ax.set_ylabel("mean dependency score")
    ax.set_yscale("log")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save_svg(fig, path)
