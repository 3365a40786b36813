"""Matplotlib rendering of trajectories to image files."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .integrator import Trajectory  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.8,
    "svg.fonttype": "none",
}

X_COLOR = "#0072BD"
G_COLOR = "#D95319"


def _save(fig, paths) -> list[Path]:
    out = []
    for p in paths:
        p = Path(p)
        fig.savefig(p, bbox_inches="tight", dpi=150)
        out.append(p)
    plt.close(fig)
    return out


def plot_trajectory(traj: Trajectory, paths, title: str | None = None) -> list[Path]:
    """x(t) and g(t) on shared axes, one file per path (format from the suffix)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 2.6))
        ax.plot(traj.times, traj.x, color=X_COLOR, label="$x(t)$")
        ax.plot(traj.times, traj.g, color=G_COLOR, label="$g(t)$")
        ax.set_xlabel("time, $t$")
        ax.set_xlim(traj.times[0], traj.times[-1])
        ax.set_ylim(bottom=0.0)
        ax.legend(loc="best")
        if title:
            ax.set_title(title)
        return _save(fig, paths)


def plot_share_panels(panels: list[tuple[str, list[Trajectory]]], paths) -> list[Path]:
    """One panel per game with x(t) for several initial conditions."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(panels), figsize=(2.4 * len(panels), 2.0), sharey=True)
        for ax, (title, trajs) in zip(axes, panels):
            for traj in trajs:
                ax.plot(traj.times, traj.x)
            ax.set_title(title)
            ax.set_xlabel("time, $t$")
            ax.set_ylim(0.0, 1.0)
        axes[0].set_ylabel("$x(t)$")
        fig.tight_layout()
        return _save(fig, paths)


def plot_controlled_panels(panels: list[tuple[str, Trajectory]], paths) -> list[Path]:
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(panels), figsize=(2.6 * len(panels), 2.0))
        for ax, (title, traj) in zip(axes, panels):
            ax.plot(traj.times, traj.x, color=X_COLOR, label="$x(t)$")
            ax.plot(traj.times, traj.g, color=G_COLOR, label="$g(t)$")
            ax.set_title(title)
            ax.set_xlabel("time, $t$")
            ax.set_xlim(traj.times[0], traj.times[-1])
            ax.set_ylim(bottom=0.0)
        axes[0].legend(loc="upper right")
        fig.tight_layout()
        return _save(fig, paths)
