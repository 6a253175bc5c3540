"""Strict parsers for the pilotwave column formats.

Data lines are whitespace-separated columns; lines starting with ``#`` are
headers and blank lines are ignored.  The grammars:

    trajectory:  t x y z branch speed   (floats; branch is zig/zag/-)
    jump log:    t x y z from to        (floats; from/to are zig/zag)
    H-curve:     t H                    (floats)

Any malformed row raises :class:`ColumnFormatError` naming the file and line
number.  Parsed row counts equal the file's data-row counts exactly.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ColumnFormatError", "read_trajectory", "read_jumps", "read_hcurve"]

_BRANCHES = ("zig", "zag", "-")


class ColumnFormatError(ValueError):
    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = str(path)
        self.line_number = line_number


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield number, stripped.split()


def _floats(tokens, indices, path, number):
    out = []
    for i in indices:
        try:
            out.append(float(tokens[i]))
        except ValueError:
            raise ColumnFormatError(path, number,
                                    f"column {i + 1}: {tokens[i]!r} is not a number") from None
    return out


def read_trajectory(path):
    """Parse ``t x y z branch speed`` rows; returns (t, xyz, branch, speed)."""
    t, xyz, branch, speed = [], [], [], []
    for number, tokens in _data_lines(path):
        if len(tokens) != 6:
            raise ColumnFormatError(path, number,
                                    f"expected 6 columns (t x y z branch speed), got {len(tokens)}")
        values = _floats(tokens, (0, 1, 2, 3, 5), path, number)
        if tokens[4] not in _BRANCHES:
            raise ColumnFormatError(path, number,
                                    f"branch must be zig, zag or -, got {tokens[4]!r}")
        t.append(values[0])
        xyz.append(values[1:4])
        branch.append(tokens[4])
        speed.append(values[4])
    if not t:
        raise ColumnFormatError(path, 0, "no data rows")
    return np.array(t), np.array(xyz), np.array(branch), np.array(speed)


def read_jumps(path):
    """Parse ``t x y z from to`` rows; returns (t, xyz, from, to).

    An empty jump log is valid (a run may have no branch flips).
    """
    t, xyz, src, dst = [], [], [], []
    for number, tokens in _data_lines(path):
        if len(tokens) != 6:
            raise ColumnFormatError(path, number,
                                    f"expected 6 columns (t x y z from to), got {len(tokens)}")
        values = _floats(tokens, (0, 1, 2, 3), path, number)
        for label in tokens[4:6]:
            if label not in ("zig", "zag"):
                raise ColumnFormatError(path, number,
                                        f"branch must be zig or zag, got {label!r}")
        t.append(values[0])
        xyz.append(values[1:4])
        src.append(tokens[4])
        dst.append(tokens[5])
    return np.array(t), np.array(xyz).reshape(-1, 3), np.array(src), np.array(dst)


def read_hcurve(path):
    """Parse ``t H`` rows; returns (t, H)."""
    t, h = [], []
    for number, tokens in _data_lines(path):
        if len(tokens) != 2:
            raise ColumnFormatError(path, number,
                                    f"expected 2 columns (t H), got {len(tokens)}")
        values = _floats(tokens, (0, 1), path, number)
        t.append(values[0])
        h.append(values[1])
    if not t:
        raise ColumnFormatError(path, 0, "no data rows")
    return np.array(t), np.array(h)
