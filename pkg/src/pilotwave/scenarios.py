"""Scenario configs: parsing, validation, round-trip emission, and presets.

A scenario is a YAML document with nested sections.  Complex mode amplitudes
are entered as (weight, phase-in-radians) pairs, i.e. amplitude =
weight * exp(i * phase).  Every parse fully validates the document: unknown
keys are rejected and non-physical values produce a diagnostic naming the
offending key and the violated constraint.  Defaults (dt = 1e-3, seed = 0,
t0 = 0) are applied at parse time and echoed back by :func:`emit_scenario`,
so ``parse_scenario(emit_scenario(s)) == s``.

Scenario kinds
--------------
weyl_trajectories   deterministic guidance trajectories of a massless fermion
zigzag_single       one stochastic two-branch electron trajectory + jump log
zigzag_vs_dirac     the same start run both stochastically and deterministically
equivariance        equilibrium ensemble evolved and histogrammed on a grid
ensemble_relaxation octant-concentrated ensemble, H-function at checkpoints
two_particle_map    speed-defect map of an (anti)symmetrized pair on a plane
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

__all__ = [
    "Scenario",
    "ScenarioError",
    "parse_scenario",
    "parse_scenario_dict",
    "emit_scenario",
    "preset_scenario",
    "preset_names",
]

KINDS = (
    "weyl_trajectories",
    "zigzag_single",
    "zigzag_vs_dirac",
    "equivariance",
    "ensemble_relaxation",
    "two_particle_map",
)

_INV_SQRT3 = 1.0 / np.sqrt(3.0)


class ScenarioError(ValueError):
    """Configuration rejected; the message names the key and constraint."""


@dataclass(frozen=True)
class Scenario:
    """A fully validated, fully resolved scenario description."""

    spec: dict

    @property
    def kind(self) -> str:
        return self.spec["kind"]

    @property
    def label(self) -> str:
        return self.spec["label"]

    def __getitem__(self, key):
        return self.spec[key]

    def get(self, key, default=None):
        return self.spec.get(key, default)

    def numerics(self):
        n = self.spec["numerics"]
        return n["t0"], n["t1"], n["dt"], n["seed"]


def _fail(path: str, constraint: str):
    raise ScenarioError(f"{path}: {constraint}")


def _need(mapping, key, path):
    if not isinstance(mapping, dict):
        _fail(path or "config", "must be a mapping")
    if key not in mapping:
        _fail(f"{path}.{key}" if path else key, "missing required key")
    return mapping[key]


def _no_unknown(mapping, allowed, path):
    for key in mapping:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _real(value, path, *, positive=False, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "must be a real number")
    value = float(value)
    if not np.isfinite(value):
        _fail(path, "must be finite")
    if positive and value <= 0.0:
        _fail(path, "must be > 0")
    if nonnegative and value < 0.0:
        _fail(path, "must be >= 0")
    return value


def _int(value, path, *, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "must be an integer")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}")
    return int(value)


def _vec3(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        _fail(path, "must be a list of 3 numbers")
    return [_real(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _box(value, path):
    _no_unknown(value if isinstance(value, dict) else {}, {"lo", "hi"}, path)
    lo = _vec3(_need(value, "lo", path), f"{path}.lo")
    hi = _vec3(_need(value, "hi", path), f"{path}.hi")
    if any(h <= l for l, h in zip(lo, hi)):
        _fail(path, "must satisfy hi > lo on every axis")
    return {"lo": lo, "hi": hi}


def _mode(value, path, *, allow_energy):
    allowed = {"p", "weight", "phase"} | ({"energy"} if allow_energy else set())
    _no_unknown(value if isinstance(value, dict) else {}, allowed, path)
    p = _vec3(_need(value, "p", path), f"{path}.p")
    if all(c == 0.0 for c in p):
        _fail(f"{path}.p", "must have |p| > 0")
    mode = {
        "p": p,
        "weight": _real(_need(value, "weight", path), f"{path}.weight", nonnegative=True),
        "phase": _real(value.get("phase", 0.0), f"{path}.phase"),
    }
    if allow_energy:
        energy = value.get("energy", 1)
        if energy not in (1, -1):
            _fail(f"{path}.energy", "must be 1 or -1")
        mode["energy"] = int(energy)
    return mode


def _modes(value, path, *, allow_energy):
    if not isinstance(value, list) or not value:
        _fail(path, "must be a nonempty list of modes")
    return [_mode(m, f"{path}[{i}]", allow_energy=allow_energy)
            for i, m in enumerate(value)]


def _weyl_state(value, path):
    _no_unknown(value, {"handedness", "modes"}, path)
    chi = _need(value, "handedness", path)
    if chi not in ("R", "L"):
        _fail(f"{path}.handedness", "must be 'R' or 'L'")
    return {"handedness": chi,
            "modes": _modes(_need(value, "modes", path), f"{path}.modes",
                            allow_energy=True)}


def _zigzag_state(value, path):
    _no_unknown(value, {"mass", "modes"}, path)
    mass = _real(_need(value, "mass", path), f"{path}.mass", positive=True)
    return {"mass": mass,
            "modes": _modes(_need(value, "modes", path), f"{path}.modes",
                            allow_energy=False)}


def _any_state(value, path):
    if not isinstance(value, dict):
        _fail(path, "must be a mapping")
    return _zigzag_state(value, path) if "mass" in value else _weyl_state(value, path)


def _numerics(value, path):
    value = dict(value or {})
    _no_unknown(value, {"t0", "t1", "dt", "seed"}, path)
    t0 = _real(value.get("t0", 0.0), f"{path}.t0")
    t1 = _real(_need(value, "t1", path), f"{path}.t1")
    if t1 <= t0:
        _fail(f"{path}.t1", "must be > t0")
    dt = _real(value.get("dt", 1e-3), f"{path}.dt", positive=True)
    seed = _int(value.get("seed", 0), f"{path}.seed", minimum=0)
    return {"t0": t0, "t1": t1, "dt": dt, "seed": seed}


def _branch(value, path):
    if value not in ("zig", "zag"):
        _fail(path, "must be 'zig' or 'zag'")
    return value


def _checkpoints(value, path, t0):
    if not isinstance(value, list) or not value:
        _fail(path, "must be a nonempty increasing list of times")
    times = [_real(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if any(b <= a for a, b in zip(times, times[1:])):
        _fail(path, "must be strictly increasing")
    if times[0] < t0:
        _fail(path, "must not precede numerics.t0")
    return times


def parse_scenario_dict(doc: dict) -> Scenario:
    """Validate a parsed config mapping and resolve defaults."""
    if not isinstance(doc, dict):
        raise ScenarioError("config: top level must be a mapping")
    kind = _need(doc, "kind", "")
    if kind not in KINDS:
        _fail("kind", f"must be one of {', '.join(KINDS)}")
    out = {"kind": kind, "label": doc.get("label", kind)}
    if not isinstance(out["label"], str) or not out["label"]:
        _fail("label", "must be a nonempty string")

    top_allowed = {"kind", "label", "numerics", "output"}
    number = _numerics(_need(doc, "numerics", ""), "numerics")
    out["numerics"] = number

    output = dict(doc.get("output") or {})
    _no_unknown(output, {"directory"}, "output")
    directory = output.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        _fail("output.directory", "must be a nonempty string")
    out["output"] = {"directory": directory}

    if kind == "weyl_trajectories":
        top_allowed |= {"state", "initial"}
        out["state"] = _weyl_state(_need(doc, "state", ""), "state")
        initial = _need(doc, "initial", "")
        _no_unknown(initial, {"starts"}, "initial")
        starts = _need(initial, "starts", "initial")
        if not isinstance(starts, list) or not starts:
            _fail("initial.starts", "must be a nonempty list of 3-vectors")
        out["initial"] = {"starts": [_vec3(s, f"initial.starts[{i}]")
                                     for i, s in enumerate(starts)]}
    elif kind in ("zigzag_single", "zigzag_vs_dirac"):
        top_allowed |= {"state", "initial"}
        out["state"] = _zigzag_state(_need(doc, "state", ""), "state")
        initial = _need(doc, "initial", "")
        _no_unknown(initial, {"start", "branch"}, "initial")
        out["initial"] = {
            "start": _vec3(_need(initial, "start", "initial"), "initial.start"),
            "branch": _branch(initial.get("branch", "zag"), "initial.branch"),
        }
    elif kind == "equivariance":
        top_allowed |= {"state", "ensemble"}
        out["state"] = _any_state(_need(doc, "state", ""), "state")
        ens = _need(doc, "ensemble", "")
        _no_unknown(ens, {"n", "sample_box", "grid", "checkpoints"}, "ensemble")
        grid = dict(_need(ens, "grid", "ensemble"))
        _no_unknown(grid, {"lo", "hi", "cell"}, "ensemble.grid")
        gbox = _box({"lo": grid.get("lo"), "hi": grid.get("hi")}, "ensemble.grid")
        cell = _real(_need(grid, "cell", "ensemble.grid"), "ensemble.grid.cell",
                     positive=True)
        sample_box = _box(_need(ens, "sample_box", "ensemble"), "ensemble.sample_box")
        checkpoints = _checkpoints(_need(ens, "checkpoints", "ensemble"),
                                   "ensemble.checkpoints", number["t0"])
        # beables move at speed <= 1, so everything that can reach the grid
        # box by the last checkpoint must have been inside the sampling box
        flight = checkpoints[-1] - number["t0"]
        for axis in range(3):
            if sample_box["lo"][axis] > gbox["lo"][axis] - flight or \
                    sample_box["hi"][axis] < gbox["hi"][axis] + flight:
                _fail("ensemble.sample_box",
                      "must contain the grid box padded by the flight distance "
                      f"(last checkpoint - t0 = {flight:g}) on every axis")
        out["ensemble"] = {
            "n": _int(_need(ens, "n", "ensemble"), "ensemble.n", minimum=1),
            "sample_box": sample_box,
            "grid": {"lo": gbox["lo"], "hi": gbox["hi"], "cell": cell},
            "checkpoints": checkpoints,
        }
    elif kind == "ensemble_relaxation":
        top_allowed |= {"state", "ensemble"}
        out["state"] = _any_state(_need(doc, "state", ""), "state")
        ens = _need(doc, "ensemble", "")
        _no_unknown(ens, {"n", "reference_n", "sample_box", "reference_box",
                          "cells_per_axis", "checkpoints"}, "ensemble")
        sample_box = _box(_need(ens, "sample_box", "ensemble"), "ensemble.sample_box")
        reference_box = _box(_need(ens, "reference_box", "ensemble"),
                             "ensemble.reference_box")
        sides = [h - l for l, h in zip(reference_box["lo"], reference_box["hi"])]
        if max(sides) - min(sides) > 1e-9 * max(sides):
            _fail("ensemble.reference_box", "must be a cube")
        for axis in range(3):
            if sample_box["lo"][axis] < reference_box["lo"][axis] or \
                    sample_box["hi"][axis] > reference_box["hi"][axis]:
                _fail("ensemble.sample_box",
                      "must lie inside the reference box (its mass sets the "
                      "normalization of the comparison density)")
        n_members = _int(_need(ens, "n", "ensemble"), "ensemble.n", minimum=1)
        out["ensemble"] = {
            "n": n_members,
            "reference_n": _int(ens.get("reference_n", 4 * n_members),
                                "ensemble.reference_n", minimum=1),
            "sample_box": sample_box,
            "reference_box": reference_box,
            "cells_per_axis": _int(_need(ens, "cells_per_axis", "ensemble"),
                                   "ensemble.cells_per_axis", minimum=1),
            "checkpoints": _checkpoints(_need(ens, "checkpoints", "ensemble"),
                                        "ensemble.checkpoints", number["t0"]),
        }
    elif kind == "two_particle_map":
        top_allowed |= {"pair", "map"}
        pair = _need(doc, "pair", "")
        _no_unknown(pair, {"mode_a", "mode_b", "antisymmetrized"}, "pair")
        anti = pair.get("antisymmetrized", True)
        if not isinstance(anti, bool):
            _fail("pair.antisymmetrized", "must be true or false")
        out["pair"] = {
            "mode_a": _mode(_need(pair, "mode_a", "pair"), "pair.mode_a",
                            allow_energy=False),
            "mode_b": _mode(_need(pair, "mode_b", "pair"), "pair.mode_b",
                            allow_energy=False),
            "antisymmetrized": anti,
        }
        mp = _need(doc, "map", "")
        _no_unknown(mp, {"t", "x2", "plane", "extent", "points"}, "map")
        plane = mp.get("plane", "xz")
        if plane not in ("xy", "xz", "yz"):
            _fail("map.plane", "must be one of xy, xz, yz")
        out["map"] = {
            "t": _real(mp.get("t", 0.0), "map.t"),
            "x2": _vec3(mp.get("x2", [0.0, 0.0, 0.0]), "map.x2"),
            "plane": plane,
            "extent": _real(_need(mp, "extent", "map"), "map.extent", positive=True),
            "points": _int(mp.get("points", 41), "map.points", minimum=2),
        }

    _no_unknown(doc, top_allowed, "")
    return Scenario(out)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a YAML scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"config: not valid YAML ({exc})") from None
    return parse_scenario_dict(doc)


def emit_scenario(scenario: Scenario) -> str:
    """Serialize with every resolved field explicit; parses back equal."""
    return yaml.safe_dump(scenario.spec, sort_keys=True, default_flow_style=None)


# ---------------------------------------------------------------------------
# presets

_THREE_MODES = [
    {"p": [1.0, 0.0, 1.0], "weight": _INV_SQRT3, "phase": 0.0},
    {"p": [-1.0, -2.0, -1.0], "weight": _INV_SQRT3, "phase": 4.0},
    {"p": [1.0, -1.0, 1.0], "weight": _INV_SQRT3, "phase": 9.0},
]


def _weyl_modes():
    return [dict(m, energy=1) for m in _THREE_MODES]


def _fig1():
    return {
        "kind": "weyl_trajectories",
        "label": "fig1",
        "state": {"handedness": "R", "modes": _weyl_modes()},
        "initial": {"starts": [[0.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0],
                               [0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0],
                               [0.0, -1.0, 0.0]]},
        "numerics": {"t1": 50.0},
    }


def _fig8():
    return {
        "kind": "zigzag_vs_dirac",
        "label": "fig8",
        "state": {"mass": 10.0, "modes": [dict(m) for m in _THREE_MODES]},
        "initial": {"start": [0.0, 1.0, 0.0], "branch": "zag"},
        "numerics": {"t1": 50.0, "seed": 42},
    }


def _zigzag():
    return {
        "kind": "zigzag_single",
        "label": "zigzag",
        "state": {"mass": 10.0, "modes": [dict(m) for m in _THREE_MODES]},
        "initial": {"start": [0.0, 1.0, 0.0], "branch": "zag"},
        "numerics": {"t1": 50.0, "seed": 42},
    }


def _equivariance():
    return {
        "kind": "equivariance",
        "label": "equivariance",
        "state": {"handedness": "R", "modes": _weyl_modes()},
        "ensemble": {
            "n": 20000,
            "sample_box": {"lo": [-15.0, -15.0, -15.0], "hi": [15.0, 15.0, 15.0]},
            "grid": {"lo": [-5.0, -5.0, -5.0], "hi": [5.0, 5.0, 5.0], "cell": 2.0},
            "checkpoints": [5.0, 10.0],
        },
        "numerics": {"t1": 10.0, "dt": 0.01},
    }


def _relaxation():
    return {
        "kind": "ensemble_relaxation",
        "label": "relaxation",
        "state": {"handedness": "R", "modes": _weyl_modes()},
        "ensemble": {
            "n": 20000,
            "reference_n": 60000,
            "sample_box": {"lo": [-5.0, -5.0, -5.0], "hi": [0.0, 0.0, 0.0]},
            "reference_box": {"lo": [-5.0, -5.0, -5.0], "hi": [5.0, 5.0, 5.0]},
            "cells_per_axis": 8,
            "checkpoints": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0,
                            45.0, 50.0],
        },
        "numerics": {"t1": 50.0, "dt": 0.02},
    }


def _pair_map():
    return {
        "kind": "two_particle_map",
        "label": "pair_map",
        "pair": {
            "mode_a": {"p": [0.0, 0.0, 1.0], "weight": 1.0, "phase": 0.0},
            "mode_b": {"p": [1.0, 0.0, 0.0], "weight": 1.0, "phase": 0.0},
            "antisymmetrized": True,
        },
        "map": {"t": 0.3, "x2": [0.0, 0.0, 0.0], "plane": "xz", "extent": 3.0,
                "points": 41},
        "numerics": {"t1": 1.0},
    }


_PRESETS = {
    "fig1": _fig1,
    "fig8": _fig8,
    "zigzag": _zigzag,
    "equivariance": _equivariance,
    "relaxation": _relaxation,
    "pair_map": _pair_map,
}


def preset_names():
    return sorted(_PRESETS)


def preset_scenario(name: str) -> Scenario:
    """Built-in scenario by name (see :func:`preset_names`)."""
    if name not in _PRESETS:
        raise ScenarioError(
            f"preset: unknown name {name!r}; available: {', '.join(preset_names())}")
    return parse_scenario_dict(_PRESETS[name]())
