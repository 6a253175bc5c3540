"""Command-line front end: run scenarios, emit deterministic data files.

Subcommands
-----------
run CONFIG           run a scenario config file
preset NAME          run a built-in scenario (see list-presets)
validate CONFIG      parse and validate only
list-presets         names of built-in scenarios

``--override key.path=value`` (repeatable) rewrites config entries by dotted
path before validation; ``--out DIR`` overrides the output directory.

Every data file carries the fully resolved parameter set in its header, and
re-running a scenario with the same seed reproduces the data files byte for
byte.  The run manifest additionally records the wall time, so it is the one
output that differs between identical runs.

Exit codes: 0 success (warnings included), 1 validation error, 2 runtime
abort (e.g. a trajectory hit a wavefunction node).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from pilotwave import __version__
from pilotwave.columns import fmt, write_frame, write_hcurve, write_jumps, write_trajectory
from pilotwave.dynamics import (
    NodeError,
    dirac_velocity_field,
    integrate_deterministic,
    simulate_zigzag,
    weyl_velocity_field,
)
from pilotwave.ensembles import (
    EnsembleFrame,
    Grid,
    WeylEnsembleMover,
    ZigzagEnsembleMover,
    coarse_grained_H,
    evolve_ensemble,
    relative_entropy_frames,
    sample_density,
    sample_zigzag_frame,
)
from pilotwave.scenarios import (
    Scenario,
    ScenarioError,
    emit_scenario,
    parse_scenario,
    parse_scenario_dict,
    preset_names,
    preset_scenario,
)
from pilotwave.states import Mode, WeylWavefunction, ZigzagState
from pilotwave.twobody import antisymmetrize, product_pair, speed_defect

__all__ = ["run_scenario", "main"]


def _amplitude(mode: dict) -> complex:
    return mode["weight"] * np.exp(1j * mode["phase"])


def build_weyl(state: dict) -> WeylWavefunction:
    chi = state["handedness"]
    return WeylWavefunction([
        Mode(tuple(m["p"]), _amplitude(m), energy_sign=m.get("energy", 1),
             handedness=chi)
        for m in state["modes"]
    ])


def build_zigzag(state: dict) -> ZigzagState:
    return ZigzagState(state["mass"],
                       [m["p"] for m in state["modes"]],
                       [_amplitude(m) for m in state["modes"]])


def _header(scenario: Scenario):
    # the header carries every parameter that defines the data; the output
    # directory is ambient plumbing and would break byte-identity across runs
    spec = {k: v for k, v in scenario.spec.items() if k != "output"}
    return yaml.safe_dump(spec, sort_keys=True,
                          default_flow_style=None).rstrip("\n").split("\n")


def _warn(message: str):
    print(f"warning: {message}", file=sys.stderr)


def _run_weyl_trajectories(scenario, out_dir, header):
    wf = build_weyl(scenario["state"])
    t0, t1, dt, _ = scenario.numerics()
    starts = scenario["initial"]["starts"]

    def one(start):
        return integrate_deterministic(weyl_velocity_field(wf), start, t0, t1, dt)

    with ThreadPoolExecutor() as pool:
        trajectories = list(pool.map(one, starts))
    files = []
    for i, traj in enumerate(trajectories):
        name = f"trajectory_{i:02d}.txt"
        write_trajectory(out_dir / name, traj, header + [f"start index: {i}"])
        files.append(name)
    return files, {}


def _run_zigzag_kind(scenario, out_dir, header, with_dirac: bool):
    state = build_zigzag(scenario["state"])
    t0, t1, dt, seed = scenario.numerics()
    start = scenario["initial"]["start"]
    branch = scenario["initial"]["branch"]

    with ThreadPoolExecutor() as pool:
        zig_future = pool.submit(simulate_zigzag, state, start, branch, t0, t1, dt, seed)
        dirac_future = (pool.submit(integrate_deterministic, dirac_velocity_field(state),
                                    start, t0, t1, dt) if with_dirac else None)
        traj, events = zig_future.result()
        dirac_traj = dirac_future.result() if dirac_future else None

    files = []
    write_trajectory(out_dir / "zigzag.txt", traj, header)
    files.append("zigzag.txt")
    write_jumps(out_dir / "jumps.txt", events, header)
    files.append("jumps.txt")
    if dirac_traj is not None:
        write_trajectory(out_dir / "dirac.txt", dirac_traj, header)
        files.append("dirac.txt")
    warnings = {}
    if traj.meta.get("rate_dt_warnings"):
        warnings["rate_dt_warnings"] = traj.meta["rate_dt_warnings"]
    return files, warnings


def _restrict(frame: EnsembleFrame, grid: Grid) -> EnsembleFrame:
    inside = grid.contains(frame.positions)
    if not np.any(inside):
        raise RuntimeError("no ensemble members inside the grid box")
    return EnsembleFrame(frame.t,
                         frame.positions[inside],
                         None if frame.branches is None else frame.branches[inside])


def _sample_and_mover(state_spec, box, n, seed, t0, dt, *, stream):
    """(frame, mover, density) for either state flavor; ``stream`` separates
    the random streams of independently sampled ensembles under one seed."""
    if "mass" in state_spec:
        state = build_zigzag(state_spec)
        frame = sample_zigzag_frame(state, box, n, seed, t=t0, stream=stream)
        mover = ZigzagEnsembleMover(state, seed, dt=dt,
                                    stream_base=(stream + 1) << 32)
        density = lambda t, pts: state.rho_total(t, pts)
    else:
        wf = build_weyl(state_spec)
        frame = sample_density(lambda pts: wf.density(t0, pts), box, n, seed,
                               t=t0, stream=stream)
        mover = WeylEnsembleMover(wf, dt=dt)
        density = lambda t, pts: wf.density(t, pts)
    return frame, mover, density


def _cloud_grid(frames, cells: int) -> Grid:
    """Cell-aligned bounding cube of one or more frames."""
    points = np.concatenate([f.positions for f in frames])
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    side = float(np.max(hi - lo)) * (1.0 + 1e-9) + 1e-9
    center = 0.5 * (lo + hi)
    lo_cube = center - 0.5 * side
    return Grid(tuple(lo_cube), tuple(lo_cube + side), side / cells)


def _run_ensemble(scenario, out_dir, header):
    ens = scenario["ensemble"]
    t0, t1, dt, seed = scenario.numerics()
    state_spec = scenario["state"]
    box = (ens["sample_box"]["lo"], ens["sample_box"]["hi"])
    frame, mover, density = _sample_and_mover(state_spec, box, ens["n"], seed,
                                              t0, dt, stream=0)

    relaxation = scenario.kind == "ensemble_relaxation"
    if relaxation:
        # the analytic comparison density only holds on the flow image of the
        # initial support; an equilibrium reference ensemble evolved by the
        # same dynamics estimates that restricted density without bias
        ref_box = (ens["reference_box"]["lo"], ens["reference_box"]["hi"])
        reference, ref_mover, _ = _sample_and_mover(state_spec, ref_box,
                                                    ens["reference_n"], seed,
                                                    t0, dt, stream=4)
        cells = ens["cells_per_axis"]
    else:
        g = ens["grid"]
        fixed = Grid(tuple(g["lo"]), tuple(g["hi"]), g["cell"])

    files = []
    curve = []
    for k, ck in enumerate(ens["checkpoints"]):
        if ck > frame.t:
            frame = evolve_ensemble(mover, frame, ck, dt)
        name = f"frame_{k:03d}.txt"
        write_frame(out_dir / name, frame, header + [f"checkpoint index: {k}"])
        files.append(name)
        if relaxation:
            if ck > reference.t:
                reference = evolve_ensemble(ref_mover, reference, ck, dt)
            grid = _cloud_grid([frame, reference], cells)
            h_val = relative_entropy_frames(frame, reference, grid)
        else:
            h_val = coarse_grained_H(_restrict(frame, fixed), density, fixed)
        curve.append((ck, h_val))
    write_hcurve(out_dir / "hcurve.txt", curve, header)
    files.append("hcurve.txt")
    warnings = {}
    if frame.meta.get("node_hits"):
        warnings["node_hits"] = frame.meta["node_hits"]
    if frame.meta.get("rate_dt_warnings"):
        warnings["rate_dt_warnings"] = frame.meta["rate_dt_warnings"]
    return files, warnings


def _run_pair_map(scenario, out_dir, header):
    pair = scenario["pair"]
    mode_a = Mode(tuple(pair["mode_a"]["p"]), _amplitude(pair["mode_a"]))
    mode_b = Mode(tuple(pair["mode_b"]["p"]), _amplitude(pair["mode_b"]))
    wf = antisymmetrize(mode_a, mode_b) if pair["antisymmetrized"] \
        else product_pair(mode_a, mode_b)
    mp = scenario["map"]
    axes = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}[mp["plane"]]
    grid = np.linspace(-mp["extent"], mp["extent"], mp["points"])
    x2 = np.asarray(mp["x2"], dtype=float)
    a_mesh, b_mesh = np.meshgrid(grid, grid, indexing="ij")
    x1 = np.tile(x2, (mp["points"], mp["points"], 1))
    x1[..., axes[0]] += a_mesh
    x1[..., axes[1]] += b_mesh
    defect = speed_defect(wf, mp["t"], x1, np.broadcast_to(x2, x1.shape))
    name = "defect_map.txt"
    with open(out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(f"# {line}\n" for line in header))
        fh.write("# columns: a b defect   (x1 = x2 + a*e_i + b*e_j on the map plane)\n")
        for i in range(mp["points"]):
            for j in range(mp["points"]):
                fh.write(f"{fmt(grid[i])} {fmt(grid[j])} {fmt(defect[i, j])}\n")
    return [name], {}


_RUNNERS = {
    "weyl_trajectories": _run_weyl_trajectories,
    "zigzag_single": lambda s, d, h: _run_zigzag_kind(s, d, h, with_dirac=False),
    "zigzag_vs_dirac": lambda s, d, h: _run_zigzag_kind(s, d, h, with_dirac=True),
    "equivariance": _run_ensemble,
    "ensemble_relaxation": _run_ensemble,
    "two_particle_map": _run_pair_map,
}


def run_scenario(scenario: Scenario, out_dir=None) -> dict:
    """Run a validated scenario; write data files and a manifest.

    Returns the manifest mapping.  Data files are byte-identical across
    re-runs with the same parameters and seed; the manifest records wall
    time and is excluded from that guarantee.
    """
    out_dir = Path(out_dir if out_dir is not None else scenario["output"]["directory"])
    out_dir.mkdir(parents=True, exist_ok=True)
    header = _header(scenario)
    started = time.perf_counter()
    files, warnings = _RUNNERS[scenario.kind](scenario, out_dir, header)
    manifest = {
        "label": scenario.label,
        "kind": scenario.kind,
        "code_version": __version__,
        "parameters": scenario.spec,
        "seed": scenario["numerics"]["seed"],
        "files": files,
        "warnings": warnings,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for key, value in warnings.items():
        _warn(f"{key}: {value}")
    return manifest


def _apply_override(doc, dotted: str):
    if "=" not in dotted:
        raise ScenarioError(f"override {dotted!r}: expected key.path=value")
    path, _, raw = dotted.partition("=")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError:
        raise ScenarioError(f"override {dotted!r}: value is not valid YAML") from None
    parts = path.split(".")
    target = doc
    for part in parts[:-1]:
        if isinstance(target, list):
            target = target[int(part)]
        elif isinstance(target, dict):
            target = target.setdefault(part, {})
        else:
            raise ScenarioError(f"override {dotted!r}: {part} is not a section")
    last = parts[-1]
    if isinstance(target, list):
        target[int(last)] = value
    elif isinstance(target, dict):
        target[last] = value
    else:
        raise ScenarioError(f"override {dotted!r}: cannot assign into a scalar")


def _scenario_from_args(args) -> Scenario:
    if getattr(args, "preset", None) is not None:
        doc = yaml.safe_load(emit_scenario(preset_scenario(args.preset)))
    else:
        text = Path(args.config).read_text(encoding="utf-8")
        doc = yaml.safe_load(text)
        if not isinstance(doc, dict):
            raise ScenarioError("config: top level must be a mapping")
    for item in args.override or []:
        _apply_override(doc, item)
    if getattr(args, "out", None):
        doc.setdefault("output", {})["directory"] = args.out
    return parse_scenario_dict(doc)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pilotwave",
                                     description="pilot-wave trajectory and "
                                                 "ensemble simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("-O", "--override", action="append", metavar="KEY.PATH=VALUE",
                       help="override a config entry by dotted path (repeatable)")
        p.add_argument("--out", help="output directory (overrides output.directory)")

    p_run = sub.add_parser("run", help="run a scenario config file")
    p_run.add_argument("config")
    add_common(p_run)

    p_preset = sub.add_parser("preset", help="run a built-in scenario")
    p_preset.add_argument("preset", choices=preset_names())
    add_common(p_preset)

    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("config")
    p_val.add_argument("-O", "--override", action="append",
                       metavar="KEY.PATH=VALUE", help=argparse.SUPPRESS)

    sub.add_parser("list-presets", help="list built-in scenario names")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-presets":
        for name in preset_names():
            print(name)
        return 0
    try:
        if args.command == "validate":
            scenario = _scenario_from_args(args)
            print(f"ok: {scenario.label} ({scenario.kind})")
            return 0
        scenario = _scenario_from_args(args)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        manifest = run_scenario(scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NodeError, RuntimeError) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(manifest['files'])} data files to "
          f"{scenario['output']['directory']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
