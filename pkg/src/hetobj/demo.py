"""Ready-made heterogeneous objects used by the demos and the test suite."""
from __future__ import annotations

import numpy as np

from .materials import CompositionFunction, Material, MaterialSpace
from .mesh import Plane, Polyline, box_mesh, extrude_polygon, regular_polygon, uv_sphere
from .references import AxisRef, PlaneRef
from .regions import Cell, GradientRegion, HeterogeneousObject, HybridRegion, OffsetRegion

RED = (255, 0, 0)
GREEN = (0, 255, 0)
BLUE = (0, 0, 255)


def two_materials():
    return MaterialSpace((
        Material("steel", {"E": 200e9, "rho": 7850.0}, {"E": "Pa", "rho": "kg/m^3"}, RED),
        Material("aluminium", {"E": 70e9, "rho": 2700.0}, {"E": "Pa", "rho": "kg/m^3"}, BLUE),
    ))


def three_materials():
    return MaterialSpace((
        Material("nickel", {"E": 200e9, "k": 90.0}, {"E": "Pa", "k": "W/m/K"}, RED),
        Material("zirconia", {"E": 205e9, "k": 2.0}, {"E": "Pa", "k": "W/m/K"}, GREEN),
        Material("alumina", {"E": 370e9, "k": 30.0}, {"E": "Pa", "k": "W/m/K"}, BLUE),
    ))


def linear_slab(size=(20.0, 20.0, 10.0), fn=None, mcs=(1.0, 0.0), mcf=(0.0, 1.0)):
    """Box graded along z between its bottom (start) and top (end) faces."""
    sx, sy, sz = size
    cell = Cell("slab", box_mesh((0, 0, 0), (sx, sy, sz)))
    region = GradientRegion(
        "slab",
        PlaneRef(Plane((0, 0, 0), (0, 0, 1))),
        PlaneRef(Plane((0, 0, sz), (0, 0, 1))),
        np.array(mcs), np.array(mcf),
        fn or CompositionFunction("linear"),
    )
    return HeterogeneousObject(two_materials(), (cell,), (region,))


def homogeneous_cube(size=10.0):
    cell = Cell("cube", box_mesh((0, 0, 0), (size,) * 3))
    region = GradientRegion(
        "cube",
        PlaneRef(Plane((0, 0, 0), (0, 0, 1))),
        PlaneRef(Plane((0, 0, size), (0, 0, 1))),
        np.array([0.25, 0.75]), np.array([0.25, 0.75]),
    )
    return HeterogeneousObject(two_materials(), (cell,), (region,))


def offset_disk(radius=10.0, height=2.0, segments=64, radii=(10.0, 6.0, 2.0),
                subdivisions=(4, 2), direction="inwards"):
    """Disk graded across three concentric contours (outer edge first)."""
    cell = Cell("disk", extrude_polygon(regular_polygon(radius, segments), height))
    contours = tuple(
        Polyline(np.column_stack([regular_polygon(r, segments), np.zeros(segments)]), True)
        for r in radii
    )
    comps = (np.array([1.0, 0.0]), np.array([0.5, 0.5]), np.array([0.0, 1.0]))
    region = OffsetRegion("disk", contours, comps, direction, subdivisions)
    return HeterogeneousObject(two_materials(), (cell,), (region,))


def hybrid_wedge(leg=10.0, height=5.0):
    """
    Triangular prism blending three dissimilar boundary patches: the
    right-angle edge, the slanted face and the bottom face.
    """
    cell = Cell("wedge", extrude_polygon([(0, 0), (leg, 0), (0, leg)], height))
    refs = (
        AxisRef((0, 0, 0), (0, 0, height)),
        PlaneRef(Plane((leg, 0, 0), (1, 1, 0))),
        PlaneRef(Plane((0, 0, 0), (0, 0, 1))),
    )
    comps = (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))
    region = HybridRegion("wedge", refs, comps)
    return HeterogeneousObject(three_materials(), (cell,), (region,))


def stacked_boxes():
    """Two cells sharing the face z = 5, each with its own gradient."""
    lower = Cell("lower", box_mesh((0, 0, 0), (10, 10, 5)))
    upper = Cell("upper", box_mesh((0, 0, 5), (10, 10, 10)))
    regions = (
        GradientRegion("lower", PlaneRef(Plane((0, 0, 0), (0, 0, 1))),
                       PlaneRef(Plane((0, 0, 5), (0, 0, 1))),
                       np.array([1.0, 0.0]), np.array([0.0, 1.0])),
        GradientRegion("upper", PlaneRef(Plane((0, 0, 0), (1, 0, 0))),
                       PlaneRef(Plane((10, 0, 0), (1, 0, 0))),
                       np.array([0.5, 0.5]), np.array([0.0, 1.0]),
                       CompositionFunction("power", 2.0)),
    )
    return HeterogeneousObject(two_materials(), (lower, upper), regions)


def graded_sphere(radius=5.0, n_lat=50, n_lon=103):
    """UV sphere (10094 triangles by default) graded bottom to top."""
    cell = Cell("sphere", uv_sphere(n_lat, n_lon, radius))
    region = GradientRegion(
        "sphere",
        PlaneRef(Plane((0, 0, -radius), (0, 0, 1))),
        PlaneRef(Plane((0, 0, radius), (0, 0, 1))),
        np.array([1.0, 0.0]), np.array([0.0, 1.0]),
        CompositionFunction("parabolic"),
    )
    return HeterogeneousObject(two_materials(), (cell,), (region,))


DEMOS = {
    "linear_slab": linear_slab,
    "offset_disk": offset_disk,
    "hybrid_wedge": hybrid_wedge,
}
