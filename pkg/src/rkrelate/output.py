"""CSV and SVG output for experiment records."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .relatedness import ExperimentRecord


def _fmt(v) -> str:
    # shortest round-trip decimal
    return repr(float(v))


def trajectory_header(n: int, m: int, with_constraint: bool) -> list[str]:
    cols = ["step", "t"]
    cols += [f"x_{i}" for i in range(1, n + 1)]
    cols += [f"fx_{i}" for i in range(1, m + 1)]
    cols += [f"y_{i}" for i in range(1, m + 1)]
    cols.append("residual_l1")
    if with_constraint:
        cols.append("constraint_abs")
    return cols


def write_csv(record: ExperimentRecord, out_dir: Path) -> tuple[Path, Path]:
    """Write ``trajectory.csv`` (full state) and ``residual.csv`` (diagnostics only)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n, m = record.xs.shape[1], record.ys.shape[1]
    has_c = record.constraint_abs is not None
    traj_path, res_path = out_dir / "trajectory.csv", out_dir / "residual.csv"
    with open(traj_path, "w", newline="") as ft, open(res_path, "w", newline="") as fr:
        wt, wr = csv.writer(ft, lineterminator="\n"), csv.writer(fr, lineterminator="\n")
        wt.writerow(trajectory_header(n, m, has_c))
        wr.writerow(["step", "t", "residual_l1"] + (["constraint_abs"] if has_c else []))
        for k in range(len(record.residuals)):
            t = _fmt(k * record.h)
            tail = [_fmt(record.residuals[k])]
            if has_c:
                tail.append(_fmt(record.constraint_abs[k]))
            wt.writerow(
                [k, t]
                + [_fmt(v) for v in record.xs[k]]
                + [_fmt(v) for v in record.fxs[k]]
                + [_fmt(v) for v in record.ys[k]]
                + tail
            )
            wr.writerow([k, t] + tail)
    return traj_path, res_path


def read_residuals(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["residual_l1"]) for r in rows])


def write_plots(record: ExperimentRecord, out_dir: Path, title: str = "") -> list[Path]:
    """Residual semi-log plot, plus a phase portrait when the target is 2-d."""
    import matplotlib
    from matplotlib.figure import Figure  # no pyplot: safe to call from worker threads

    matplotlib.rcParams["svg.hashsalt"] = "rkrelate"
    out_dir = Path(out_dir)
    written = []

    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    t = record.times
    r = record.residuals
    pos = r > 0
    if pos.any():
        ax.semilogy(t[pos], r[pos], lw=1, label=r"$\|y_n - f(x_n)\|_1$")
    else:
        ax.set_yscale("log")
        ax.text(0.5, 0.5, "residual identically zero", transform=ax.transAxes, ha="center")
    if record.constraint_abs is not None:
        c = record.constraint_abs
        cpos = c > 0
        if cpos.any():
            ax.semilogy(t[cpos], c[cpos], lw=1, ls="--", label=r"$|c(y_n)|$")
    ax.set_xlabel("t")
    ax.set_title(title or f"{record.system} {record.tableau} {record.mode} h={record.h}")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    path = out_dir / "residual.svg"
    fig.savefig(path, format="svg", metadata={"Date": None})
    written.append(path)

    if record.ys.shape[1] == 2:
        fig = Figure(figsize=(5, 5))
        ax = fig.add_subplot()
        ax.plot(record.ys[:, 0], record.ys[:, 1], lw=1.5, label="$y_n$")
        ax.plot(record.fxs[:, 0], record.fxs[:, 1], lw=1, ls="--", label="$f(x_n)$")
        ax.plot(record.ys[0, 0], record.ys[0, 1], "ko", ms=3)
        ax.set_xlabel("$y_1$")
        ax.set_ylabel("$y_2$")
        ax.legend()
        path = out_dir / "phase.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        written.append(path)
    return written
