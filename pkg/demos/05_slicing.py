"""
Slicing for layered fabrication.

Each layer plane sections every cell; the section is meshed and the
material is re-sampled at the mesh nodes. The stack goes to JSON and
each layer to an SVG preview.
"""
import argparse
from pathlib import Path

from hetobj.modelspec import load_model_spec
from hetobj.slicer import export_slice_json, export_slice_svg, generate_slices

here = Path(__file__).parent
ap = argparse.ArgumentParser()
ap.add_argument("--out", default=here / "out" / "stacked", type=Path)
out = ap.parse_args().out
out.mkdir(parents=True, exist_ok=True)

obj = load_model_spec(here / "models" / "stacked.yaml")
stack = generate_slices(obj, thickness=1.0, max_edge=1.5, workers=4)
export_slice_json(stack, out / "slices.json")
for s in stack.slices:
    export_slice_svg(s, out / f"slice_{s.index:04d}.svg")
    c = s.node_compositions[:, 0]
    print(f"layer {s.index:2d} z={s.z:4.1f}  nodes {len(c):4d}  area {s.area:6.2f}  "
          f"steel {c.min():.3f}..{c.max():.3f}")
print(f"wrote {len(stack)} layers to {out}")
