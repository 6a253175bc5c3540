"""plotkit command line.

    plotkit render SPEC.yaml                 draw from a spec file
    plotkit traj3d FILES... --out FIG        3D trajectories
    plotkit compare --stochastic F --deterministic F [--jumps F] --out FIG
    plotkit hcurve FILES... --out FIG        H-function curves

Spec files mirror :class:`plotkit.render.PlotSpec`:

    kind: traj3d_compare
    stochastic: out/zigzag.txt
    deterministic: out/dirac.txt
    jumps: out/jumps.txt
    jump_markers: true
    output: fig8.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from plotkit.parser import ColumnFormatError
from plotkit.render import PlotSpec, render

__all__ = ["main"]

_SPEC_KEYS = {"kind", "inputs", "stochastic", "deterministic", "jumps",
              "jump_markers", "colors", "title", "output"}


def spec_from_mapping(doc: dict) -> PlotSpec:
    if not isinstance(doc, dict):
        raise ValueError("plot spec must be a mapping")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise ValueError(f"unknown plot spec keys: {', '.join(sorted(unknown))}")
    return PlotSpec(
        kind=doc.get("kind", ""),
        inputs=tuple(doc.get("inputs") or ()),
        stochastic=doc.get("stochastic"),
        deterministic=doc.get("deterministic"),
        jumps=doc.get("jumps"),
        jump_markers=bool(doc.get("jump_markers", True)),
        colors=tuple(doc.get("colors") or ()),
        title=doc.get("title"),
        output=doc.get("output", "figure.png"),
    )


def _build_parser():
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="render pilotwave column files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="draw from a YAML spec file")
    p.add_argument("spec")

    p = sub.add_parser("traj3d", help="3D figure from trajectory files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default="traj3d.png")
    p.add_argument("--title")

    p = sub.add_parser("compare", help="stochastic vs deterministic comparison")
    p.add_argument("--stochastic", required=True)
    p.add_argument("--deterministic", required=True)
    p.add_argument("--jumps")
    p.add_argument("--no-jump-markers", action="store_true")
    p.add_argument("--out", default="compare.png")
    p.add_argument("--title")

    p = sub.add_parser("hcurve", help="H-function decay curves")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default="hcurve.png")
    p.add_argument("--title")
    return parser


def _spec_from_args(args) -> PlotSpec:
    if args.command == "render":
        doc = yaml.safe_load(Path(args.spec).read_text(encoding="utf-8"))
        return spec_from_mapping(doc)
    if args.command == "traj3d":
        return PlotSpec(kind="traj3d", inputs=tuple(args.inputs),
                        title=args.title, output=args.out)
    if args.command == "compare":
        return PlotSpec(kind="traj3d_compare", stochastic=args.stochastic,
                        deterministic=args.deterministic, jumps=args.jumps,
                        jump_markers=not args.no_jump_markers,
                        title=args.title, output=args.out)
    return PlotSpec(kind="h_curve", inputs=tuple(args.inputs),
                    title=args.title, output=args.out)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        rows = render(spec)
    except (ValueError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    total = sum(rows.values())
    print(f"wrote {spec.output} ({total} rows from {len(rows)} file(s))")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
