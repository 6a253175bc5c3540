"""Figure rendering for the three plot kinds.

    traj3d          one 3D figure, one line per trajectory file
    traj3d_compare  stochastic trajectory in blue, deterministic in red,
                    jump events as point markers
    h_curve         H-function decay curves

Rendering is deterministic for given inputs (fixed colors, no timestamps)
and side-effect free beyond the output file.  ``render`` returns a summary
with the number of rows drawn per input, which always equals the file's
data-row count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from plotkit.parser import read_hcurve, read_jumps, read_trajectory

__all__ = ["PlotSpec", "render"]

KINDS = ("traj3d", "traj3d_compare", "h_curve")

TRAJECTORY_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red",
                     "tab:purple", "tab:brown", "tab:pink", "tab:gray",
                     "tab:olive", "tab:cyan")
COMPARE_STOCHASTIC = "blue"
COMPARE_DETERMINISTIC = "red"


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: figure kind, input files, styling, output path."""

    kind: str
    inputs: tuple = ()
    stochastic: str | None = None     # traj3d_compare
    deterministic: str | None = None  # traj3d_compare
    jumps: str | None = None          # traj3d_compare
    jump_markers: bool = True
    colors: tuple = ()
    title: str | None = None
    output: str = "figure.png"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        object.__setattr__(self, "colors", tuple(self.colors))
        if self.kind == "traj3d" and not self.inputs:
            raise ValueError("traj3d needs at least one trajectory file")
        if self.kind == "h_curve" and not self.inputs:
            raise ValueError("h_curve needs at least one input file")
        if self.kind == "traj3d_compare":
            if not self.stochastic or not self.deterministic:
                raise ValueError("traj3d_compare needs stochastic and "
                                 "deterministic trajectory files")


def _save(fig, output):
    path = Path(output)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if path.suffix.lower() == ".svg" else None
    fig.savefig(path, dpi=150, metadata=metadata)
    plt.close(fig)


def _render_traj3d(spec: PlotSpec):
    fig = plt.figure(figsize=(8, 7))
    ax = fig.add_subplot(projection="3d")
    rows = {}
    for i, name in enumerate(spec.inputs):
        t, xyz, _, _ = read_trajectory(name)
        rows[name] = len(t)
        color = (spec.colors[i] if i < len(spec.colors)
                 else TRAJECTORY_COLORS[i % len(TRAJECTORY_COLORS)])
        ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], color=color, linewidth=0.9,
                label=Path(name).stem)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    if spec.title:
        ax.set_title(spec.title)
    if len(spec.inputs) <= 10:
        ax.legend(loc="upper left", fontsize="small")
    _save(fig, spec.output)
    return rows


def _render_compare(spec: PlotSpec):
    fig = plt.figure(figsize=(8, 7))
    ax = fig.add_subplot(projection="3d")
    rows = {}
    t, xyz, _, _ = read_trajectory(spec.stochastic)
    rows[spec.stochastic] = len(t)
    ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], color=COMPARE_STOCHASTIC,
            linewidth=0.8, label="stochastic (branch-flipping)")
    t, xyz, _, _ = read_trajectory(spec.deterministic)
    rows[spec.deterministic] = len(t)
    ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], color=COMPARE_DETERMINISTIC,
            linewidth=1.2, label="deterministic")
    if spec.jumps and spec.jump_markers:
        jt, jxyz, _, _ = read_jumps(spec.jumps)
        rows[spec.jumps] = len(jt)
        if len(jt):
            ax.scatter(jxyz[:, 0], jxyz[:, 1], jxyz[:, 2], s=4, c="black",
                       depthshade=False, label="jumps")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="upper left", fontsize="small")
    _save(fig, spec.output)
    return rows


def _render_hcurve(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    rows = {}
    for i, name in enumerate(spec.inputs):
        t, h = read_hcurve(name)
        rows[name] = len(t)
        color = (spec.colors[i] if i < len(spec.colors)
                 else TRAJECTORY_COLORS[i % len(TRAJECTORY_COLORS)])
        ax.plot(t, h, marker="o", markersize=3, color=color, label=Path(name).stem)
    ax.set_xlabel("t")
    ax.set_ylabel("coarse-grained H")
    ax.grid(True, alpha=0.3)
    if spec.title:
        ax.set_title(spec.title)
    if len(spec.inputs) > 1:
        ax.legend(fontsize="small")
    _save(fig, spec.output)
    return rows


def render(spec: PlotSpec) -> dict:
    """Draw the figure described by ``spec``.

    Returns {input path: rows drawn}; every referenced input is parsed
    strictly and a malformed or empty file aborts with an error naming the
    file and line.
    """
    if spec.kind == "traj3d":
        return _render_traj3d(spec)
    if spec.kind == "traj3d_compare":
        return _render_compare(spec)
    return _render_hcurve(spec)
