"""
Gradient regions between two references.

The slab model grades steel to aluminium between its bottom and top
faces. The composition at a point depends on the two distances d0, d1
to the references through s = d0 / (d0 + d1). Swapping the references
for a point and a sphere turns the planar iso-surfaces into spheres.
"""
from pathlib import Path

import numpy as np

from hetobj.materials import voigt_property
from hetobj.mesh import Plane, icosphere
from hetobj.modelspec import load_model_spec
from hetobj.references import PlaneRef, PointRef, SurfaceRef
from hetobj.regions import Cell, GradientRegion, HeterogeneousObject, evaluate_points, retarget_references

here = Path(__file__).parent
slab = load_model_spec(here / "models" / "slab.yaml")

print("slab: composition up the centre line")
z = np.linspace(0, 10, 6)
pts = np.column_stack([np.full_like(z, 10), np.full_like(z, 10), z])
for p, v in zip(pts, evaluate_points(slab, pts)):
    print(f"  z={p[2]:4.1f}  steel {v[0]:.2f}  E {voigt_property(v, 'E', slab.space) / 1e9:6.1f} GPa")

# same grading, new references: centre point to an enclosing sphere
space = slab.space
ball = Cell("ball", icosphere(3, 9.0))
base = GradientRegion("ball", PlaneRef(Plane((0, 0, -9), (0, 0, 1))),
                      PlaneRef(Plane((0, 0, 9), (0, 0, 1))), [1, 0], [0, 1])
radial = retarget_references(base, PointRef((0, 0, 0)), SurfaceRef(icosphere(4, 10.0)))
obj = HeterogeneousObject(space, (ball,), (radial,))

print("\nball: steel fraction on spheres about the centre (equal up to the facet error)")
for r in (2.0, 5.0, 8.0):
    dirs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1] / np.sqrt(3)])
    v = evaluate_points(obj, r * dirs)[:, 0]
    print(f"  r={r:3.1f}  " + "  ".join(f"{x:.4f}" for x in v))
