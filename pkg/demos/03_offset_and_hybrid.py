"""
Offset and hybrid regions.

The disk model steps its composition between nested contours, each gap
split into a fixed number of equal composition steps. The wedge model
blends three boundary patches with inverse-distance weights, so each
patch carries its own composition exactly.
"""
from pathlib import Path

import numpy as np

from hetobj.modelspec import load_model_spec
from hetobj.regions import evaluate_points, offset_subdivide, step_width

here = Path(__file__).parent / "models"

disk = load_model_spec(here / "disk.yaml")
reg = disk.regions[0]
print("disk: contour compositions", [c.tolist() for c in reg.compositions])
for r in range(1, len(reg.compositions)):
    levels = [offset_subdivide(reg, r, i).round(4).tolist()
              for i in range(reg.subdivisions[r - 1] + 1)]
    print(f"  gap {r}: step {step_width(reg, r).round(4).tolist()}  levels {levels}")

x = np.linspace(0.5, 9.5, 7)
pts = np.column_stack([x, np.zeros_like(x), np.ones_like(x)])
print("  along +x:", "  ".join(f"{a:.1f}:{v[0]:.3f}" for a, v in zip(x, evaluate_points(disk, pts))))

wedge = load_model_spec(here / "wedge.yaml")
print("\nwedge:", ", ".join(wedge.space.names))
probes = {"on the axis": (0, 0, 2), "on the slanted face": (5, 5, 2), "on the floor": (3, 2, 0),
          "interior": (2, 2, 2)}
for label, p in probes.items():
    v = evaluate_points(wedge, [p])[0]
    print(f"  {label:20s} " + " ".join(f"{x:.3f}" for x in v))
