"""Plain-text column formats for simulation output.

One record per line, whitespace separated, floats serialized with 17
significant digits so a reparse is bit-exact.  Header lines start with
"# " and repeat the resolved parameter set of the run that produced the
file.

    trajectory:  t x y z branch speed     (branch "-" for deterministic runs)
    jump log:    t x y z from to
    H-curve:     t H
    frame:       x y z branch             (frame time in the header)
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "fmt",
    "write_trajectory",
    "write_jumps",
    "write_hcurve",
    "write_frame",
    "read_columns",
]


def fmt(value: float) -> str:
    return f"{float(value):.17g}"


def _header_block(header_lines):
    return "".join(f"# {line}\n" for line in header_lines)


def write_trajectory(path, traj, header_lines=()):
    branches = traj.branch if traj.branch is not None else ["-"] * len(traj)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header_block(header_lines))
        fh.write("# columns: t x y z branch speed\n")
        for t, x, b, s in zip(traj.t, traj.x, branches, traj.speed):
            fh.write(f"{fmt(t)} {fmt(x[0])} {fmt(x[1])} {fmt(x[2])} {b} {fmt(s)}\n")


def write_jumps(path, events, header_lines=()):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header_block(header_lines))
        fh.write("# columns: t x y z from to\n")
        for ev in events:
            fh.write(f"{fmt(ev.t)} {fmt(ev.x[0])} {fmt(ev.x[1])} {fmt(ev.x[2])} "
                     f"{ev.from_branch} {ev.to_branch}\n")


def write_hcurve(path, curve, header_lines=()):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header_block(header_lines))
        fh.write("# columns: t H\n")
        for t, h in curve:
            fh.write(f"{fmt(t)} {fmt(h)}\n")


def write_frame(path, frame, header_lines=()):
    branches = frame.branches if frame.branches is not None else ["-"] * len(frame)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header_block(header_lines))
        fh.write(f"# t = {fmt(frame.t)}\n")
        fh.write("# columns: x y z branch\n")
        for x, b in zip(frame.positions, branches):
            fh.write(f"{fmt(x[0])} {fmt(x[1])} {fmt(x[2])} {b}\n")


def read_columns(path):
    """Read a column file back as (rows, header_lines).

    Rows are lists of str tokens; numeric conversion is the caller's job
    (column meaning differs per format).
    """
    rows = []
    header = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                header.append(line[1:].strip())
                continue
            rows.append(line.split())
    return rows, header


def read_trajectory(path):
    """Parse a trajectory file into (t, x, branch, speed) arrays."""
    rows, _ = read_columns(path)
    t = np.array([float(r[0]) for r in rows])
    x = np.array([[float(r[1]), float(r[2]), float(r[3])] for r in rows])
    branch = np.array([r[4] for r in rows])
    speed = np.array([float(r[5]) for r in rows])
    return t, x, branch, speed
