"""
Colored boundary meshes.

Cell boundaries are subdivided, then split further wherever the
material changes faster than a threshold. The result is a PLY mesh
with one color per vertex, written to the given directory.
"""
import argparse
from pathlib import Path

from hetobj.modelspec import load_model_spec
from hetobj.visualization import ColorMap, export_colored_mesh, facet_boundary

here = Path(__file__).parent
ap = argparse.ArgumentParser()
ap.add_argument("--out", default=here / "out", type=Path)
out = ap.parse_args().out
out.mkdir(parents=True, exist_ok=True)

for name in ("slab", "disk", "wedge"):
    obj = load_model_spec(here / "models" / f"{name}.yaml")
    for threshold in (0.2, 0.05):
        cm = facet_boundary(obj, 1, threshold, ColorMap.for_space(obj.space, "hls"))
        path = out / f"{name}_{threshold}.ply"
        export_colored_mesh(cm, path)
        print(f"{name:6s} threshold {threshold:4}: {len(cm.mesh.triangles):6d} triangles, "
              f"{cm.adaptive_splits} splits, cap hits {cm.cap_hits} -> {path.name}")
