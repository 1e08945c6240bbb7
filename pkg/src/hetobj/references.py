"""
Gradient references: the geometric entities grading distance is
measured from (point, straight axis, swept polyline axis, plane and
triangulated surface).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegionError, GeometryError
from .mesh import Plane, Polyline, TriangleMesh
from .spatial import point_distance, polyline_distance, segment_distance


class GradientReference:
    """Base class; subclasses implement vectorized :meth:`distance`."""

    kind = "reference"

    def distance(self, points):
        raise NotImplementedError

    def same_as(self, other):
        raise NotImplementedError

    def transformed(self, matrix, offset):
        raise NotImplementedError


def _vec3(x, what):
    a = np.asarray(x, dtype=np.float64).reshape(-1)
    if a.shape != (3,) or not np.isfinite(a).all():
        raise GeometryError(f"{what} must be a finite 3D point")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PointRef(GradientReference):
    point: np.ndarray
    kind = "point"

    def __post_init__(self):
        object.__setattr__(self, "point", _vec3(self.point, "point reference"))

    def distance(self, points):
        return point_distance(points, self.point)

    def same_as(self, other):
        return isinstance(other, PointRef) and np.array_equal(self.point, other.point)

    def transformed(self, matrix, offset):
        return PointRef(np.asarray(matrix) @ self.point + offset)


@dataclass(frozen=True, eq=False)
class AxisRef(GradientReference):
    """Straight axis given as a finite segment."""

    start: np.ndarray
    end: np.ndarray
    kind = "axis"

    def __post_init__(self):
        a = _vec3(self.start, "axis start")
        b = _vec3(self.end, "axis end")
        if np.linalg.norm(b - a) <= 1e-9:
            raise GeometryError("axis reference has zero length")
        object.__setattr__(self, "start", a)
        object.__setattr__(self, "end", b)

    def distance(self, points):
        return segment_distance(points, self.start, self.end)

    def same_as(self, other):
        return (isinstance(other, AxisRef) and np.array_equal(self.start, other.start)
                and np.array_equal(self.end, other.end))

    def transformed(self, matrix, offset):
        m = np.asarray(matrix)
        return AxisRef(m @ self.start + offset, m @ self.end + offset)


@dataclass(frozen=True, eq=False)
class PolylineRef(GradientReference):
    """Flexible axis: a swept path approximated by a polyline."""

    polyline: Polyline
    kind = "polyline"

    def distance(self, points):
        return polyline_distance(points, self.polyline.segments())

    def same_as(self, other):
        return (isinstance(other, PolylineRef)
                and other.polyline.closed == self.polyline.closed
                and np.array_equal(self.polyline.points, other.polyline.points))

    def transformed(self, matrix, offset):
        p = self.polyline.points @ np.asarray(matrix).T + offset
        return PolylineRef(Polyline(p, self.polyline.closed))


@dataclass(frozen=True, eq=False)
class PlaneRef(GradientReference):
    plane: Plane
    kind = "plane"

    def distance(self, points):
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        o, n = self.plane.origin, self.plane.normal
        return np.abs(
            (p[:, 0] - o[0]) * n[0] + (p[:, 1] - o[1]) * n[1] + (p[:, 2] - o[2]) * n[2]
        )

    def same_as(self, other):
        if not isinstance(other, PlaneRef):
            return False
        n1, n2 = self.plane.normal, other.plane.normal
        parallel = np.linalg.norm(np.cross(n1, n2)) <= 1e-12
        return bool(parallel and abs(np.dot(other.plane.origin - self.plane.origin, n1)) <= 1e-12)

    def transformed(self, matrix, offset):
        m = np.asarray(matrix)
        return PlaneRef(Plane(m @ self.plane.origin + offset, m @ self.plane.normal))


@dataclass(frozen=True, eq=False)
class SurfaceRef(GradientReference):
    """Flexible plane: a pre-tessellated (possibly open) reference surface."""

    mesh: TriangleMesh
    kind = "surface"

    def __post_init__(self):
        if self.mesh.dim != 3 or len(self.mesh.triangles) == 0:
            raise GeometryError("surface reference needs a non-empty 3D mesh")

    def distance(self, points):
        return self.mesh.locator.surface_distance(points)

    def same_as(self, other):
        return (isinstance(other, SurfaceRef)
                and np.array_equal(self.mesh.vertices, other.mesh.vertices)
                and np.array_equal(self.mesh.triangles, other.mesh.triangles))

    def transformed(self, matrix, offset):
        return SurfaceRef(self.mesh.transformed(matrix, offset))


def distance_to_reference(p, ref):
    """
    Euclidean distance from point(s) ``p`` to a gradient reference.

    A single 3D point returns a float; an (n, 3) array returns (n,).
    """
    p = np.asarray(p, dtype=np.float64)
    d = ref.distance(p.reshape(-1, 3))
    return float(d[0]) if p.ndim == 1 else d


#: below this the bi-distance coordinate is undefined
COINCIDENT_EPS = 1e-12


def bidistance_coordinate(d0, d1):
    """``clamp(d0 / (d0 + d1), 0, 1)`` with the degenerate case rejected."""
    total = d0 + d1
    if (total < COINCIDENT_EPS).any():
        raise DegenerateRegionError("start and end references coincide at the query point")
    return np.clip(d0 / total, 0.0, 1.0)


def normalized_gradient_coordinate(p, region):
    """
    Fractional position ``s`` of ``p`` between a region's start and end
    references: ``d_start / (d_start + d_end)``, clamped to [0, 1].
    """
    p = np.asarray(p, dtype=np.float64)
    pts = p.reshape(-1, 3)
    s = bidistance_coordinate(region.start_ref.distance(pts), region.end_ref.distance(pts))
    return float(s[0]) if p.ndim == 1 else s
