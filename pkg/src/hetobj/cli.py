"""Command line interface: ``hetobj validate|info|query|mesh|slice``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import ExportError, HetObjError, OutsideObjectError
from .materials import voigt_property
from .modelspec import load_model_spec
from .regions import GradientRegion, HybridRegion, OffsetRegion, evaluate_point
from .slicer import export_slice_json, export_slice_svg, generate_slices
from .visualization import ColorMap, export_colored_mesh, facet_boundary

EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _point(text):
    try:
        p = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid point {text!r}") from None
    if len(p) != 3:
        raise argparse.ArgumentTypeError("point needs three comma-separated coordinates")
    return np.array(p)


def _g(x):
    return f"{x:.9g}"


def cmd_validate(args):
    load_model_spec(args.spec)
    return 0


def cmd_info(args):
    obj = load_model_spec(args.spec)
    space = obj.space
    kinds = {GradientRegion: "gradient", OffsetRegion: "offset", HybridRegion: "hybrid"}
    counts = {}
    for r in obj.regions:
        counts[kinds[type(r)]] = counts.get(kinds[type(r)], 0) + 1
    lo, hi = obj.bounds
    print(f"materials k={space.k}: {', '.join(space.names)}")
    print(f"properties: {', '.join(space.property_names) or '-'}")
    print(f"cells {len(obj.cells)} ({len(obj.leaf_cells)} leaf)")
    print("regions " + str(len(obj.regions)) + " ("
          + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())) + ")")
    print(f"bounding box {' '.join(map(_g, lo))} .. {' '.join(map(_g, hi))} mm")
    return 0


def cmd_query(args):
    obj = load_model_spec(args.spec)
    try:
        v = evaluate_point(obj, args.point)
    except OutsideObjectError:
        print("point outside object", file=sys.stderr)
        return EXIT_DOMAIN
    print("fractions " + " ".join(_g(x) for x in v))
    for prop in obj.space.property_names:
        print(f"{prop} {_g(voigt_property(v, prop, obj.space))}")
    return 0


def cmd_mesh(args):
    obj = load_model_spec(args.spec)
    cmap = ColorMap.for_space(obj.space, args.colormap)
    cm = facet_boundary(obj, args.subdiv, args.threshold, cmap)
    export_colored_mesh(cm, args.out)
    print(f"wrote {len(cm.mesh.vertices)} vertices, {len(cm.mesh.triangles)} triangles to {args.out}")
    print(f"adaptive splits {cm.adaptive_splits}, depth cap hit on {cm.cap_hits} triangles")
    return 0


def cmd_slice(args):
    obj = load_model_spec(args.spec)
    stack = generate_slices(obj, args.thickness, args.max_edge,
                            ColorMap.for_space(obj.space, args.colormap))
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"cannot create {out}: {exc}") from exc
    export_slice_json(stack, out / "slices.json")
    if args.svg:
        for s in stack.slices:
            export_slice_svg(s, out / f"slice_{s.index:04d}.svg")
    print(f"wrote {len(stack)} slices to {out / 'slices.json'}")
    return 0


def build_parser():
    p = _Parser(prog="hetobj", description="Heterogeneous object modeling toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a model spec; exit status only")
    s.add_argument("spec")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("info", help="summarize a model")
    s.add_argument("spec")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("query", help="composition and properties at a point")
    s.add_argument("spec")
    s.add_argument("--point", type=_point, required=True, help="x,y,z in mm")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("mesh", help="export the colored boundary mesh as PLY")
    s.add_argument("spec")
    s.add_argument("--out", required=True)
    s.add_argument("--subdiv", type=int, default=1)
    s.add_argument("--threshold", type=float, default=0.05)
    s.add_argument("--colormap", choices=("rgb", "hls"), default="rgb")
    s.set_defaults(func=cmd_mesh)

    s = sub.add_parser("slice", help="write the slice stack (and SVG previews)")
    s.add_argument("spec")
    s.add_argument("--thickness", type=float, required=True)
    s.add_argument("--max-edge", type=float, required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--svg", action="store_true")
    s.add_argument("--colormap", choices=("rgb", "hls"), default="rgb")
    s.set_defaults(func=cmd_slice)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExportError, OSError) as exc:
        print(f"hetobj: {exc}", file=sys.stderr)
        return EXIT_IO
    except (HetObjError, ValueError) as exc:
        print(f"hetobj: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
