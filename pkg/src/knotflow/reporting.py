"""Figure rendering for finished simulation directories.

Reads the delimited outputs of `simulate` (energy.csv, snap_*.curve,
run.json) and writes PNG figures next to them: the energy descent history,
step-size and constraint diagnostics, and a gallery of snapshot curves
colored by distance to the center of mass.
"""

from pathlib import Path
from typing import List

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .curvefile import read_curve_file, read_energy_log  # noqa: E402
from .errors import ParseError  # noqa: E402
from .fields import reconstruct_curve  # noqa: E402


def render_run_report(run_dir) -> List[Path]:
    run_dir = Path(run_dir)
    log_path = run_dir / "energy.csv"
    if not log_path.exists():
        raise ParseError(f"no energy.csv in {run_dir}")
    log = read_energy_log(log_path)
    written = [
        _energy_figure(run_dir, log),
        _diagnostics_figure(run_dir, log),
    ]
    snaps = sorted(run_dir.glob("snap_*.curve"), key=lambda p: int(p.stem.split("_")[1]))
    if snaps:
        written.append(_snapshot_figure(run_dir, snaps))
    return written


def _energy_figure(run_dir: Path, log) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(log.t, log.E_total, label="total", color="k", lw=1.6)
    ax.plot(log.t, log.E_bend, label="bending", color="tab:blue", lw=1.0)
    ax.plot(log.t, log.E_interaction, label="interaction", color="tab:red", lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(frameon=False)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    out = run_dir / "energy.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _diagnostics_figure(run_dir: Path, log) -> Path:
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.2))
    axes[0].semilogy(log.t[1:], log.dt[1:], color="k", lw=1.0)
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("dt")
    axes[1].plot(log.t, log.distortion, color="tab:green", lw=1.0)
    axes[1].axhline(np.pi / 2, color="0.6", ls="--", lw=0.8)
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("distortion")
    floor = 1e-18
    axes[2].semilogy(log.t, np.maximum(log.speed_err, floor), label="speed", lw=1.0)
    axes[2].semilogy(log.t, np.maximum(log.mean_err, floor), label="mean", lw=1.0)
    axes[2].set_xlabel("t")
    axes[2].set_ylabel("constraint error")
    axes[2].legend(frameon=False, fontsize=8)
    for ax in axes:
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    fig.tight_layout()
    out = run_dir / "diagnostics.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _snapshot_figure(run_dir: Path, snap_paths: List[Path]) -> Path:
    cols = min(4, len(snap_paths))
    rows = (len(snap_paths) + cols - 1) // cols
    fig = plt.figure(figsize=(3.2 * cols, 3.0 * rows))
    for idx, path in enumerate(snap_paths):
        tau = read_curve_file(path)
        gamma = reconstruct_curve(tau).gamma
        closed = np.vstack([gamma, gamma[:1]])
        radius = np.linalg.norm(closed - closed.mean(axis=0), axis=1)
        ax = fig.add_subplot(rows, cols, idx + 1, projection="3d")
        pts = closed.reshape(-1, 1, 3)
        segs = np.concatenate([pts[:-1], pts[1:]], axis=1)
        from mpl_toolkits.mplot3d.art3d import Line3DCollection

        lc = Line3DCollection(segs, cmap="viridis", linewidths=1.4)
        lc.set_array(0.5 * (radius[:-1] + radius[1:]))
        ax.add_collection3d(lc)
        lim = float(np.max(np.abs(closed))) * 1.05
        ax.set_xlim(-lim, lim)
        ax.set_ylim(-lim, lim)
        ax.set_zlim(-lim, lim)
        ax.set_title(path.stem, fontsize=9)
        ax.set_axis_off()
    fig.tight_layout()
    out = run_dir / "snapshots.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
