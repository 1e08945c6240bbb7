"""
Cells, gradient regions and point-wise material evaluation.

A heterogeneous object is a set of closed cells tiling the part, each
bound to exactly one region that says how material varies inside it:

* :class:`GradientRegion` grades between a start and an end reference,
* :class:`OffsetRegion` interpolates across nested contours split into
  linear sub-regions,
* :class:`HybridRegion` blends several boundary patches by inverse
  distance.
"""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np
from shapely.geometry import LinearRing

from .errors import (
    AmbiguityError,
    BoundsError,
    ConsistencyError,
    DegenerateRegionError,
    GeometryError,
    ModelError,
    OutsideObjectError,
    ShapeError,
)
from .materials import CompositionFunction, MaterialSpace, as_composition, eval_composition, eval_fraction
from .mesh import Plane, Polyline, TriangleMesh
from .references import GradientReference, bidistance_coordinate
from .spatial import loop_distance_2d, points_in_polygon

#: points within this distance of a cell surface count as inside it, mm
BOUNDARY_TOL = 1e-7
#: distance floor for inverse-distance weights, mm
HYBRID_EPS = 1e-9
#: step-width constancy tolerance
STEP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Cell:
    """
    Closed region of the object.

    A cell listing ``sub_volumes`` is a container whose listed child
    cells tile it; only leaf cells carry a region binding.
    """

    id: str
    geometry: TriangleMesh
    sub_volumes: tuple = ()

    def __post_init__(self):
        if self.geometry.dim != 3 or not self.geometry.is_watertight:
            raise GeometryError(f"cell {self.id!r} geometry is not a watertight 3D mesh")
        object.__setattr__(self, "sub_volumes", tuple(self.sub_volumes))

    @property
    def is_leaf(self):
        return not self.sub_volumes

    def transformed(self, matrix, offset):
        return replace(self, geometry=self.geometry.transformed(matrix, offset))


# ---------------------------------------------------------------------------
# region kinds


@dataclass(frozen=True, eq=False)
class GradientRegion:
    cell: str
    start_ref: GradientReference
    end_ref: GradientReference
    mcs: np.ndarray
    mcf: np.ndarray
    fn: CompositionFunction = field(default_factory=CompositionFunction)

    def __post_init__(self):
        if self.start_ref.same_as(self.end_ref):
            raise DegenerateRegionError(f"region of cell {self.cell!r}: start and end references coincide")
        mcs = as_composition(self.mcs, name="Mcs")
        mcf = as_composition(self.mcf, k=len(mcs), name="Mcf")
        object.__setattr__(self, "mcs", mcs)
        object.__setattr__(self, "mcf", mcf)

    @property
    def k(self):
        return len(self.mcs)

    def evaluate(self, points):
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        s = bidistance_coordinate(self.start_ref.distance(p), self.end_ref.distance(p))
        f = eval_fraction(self.fn, s)
        return eval_composition(f, self.mcs, self.mcf)

    def transformed(self, matrix, offset):
        return replace(self, start_ref=self.start_ref.transformed(matrix, offset),
                       end_ref=self.end_ref.transformed(matrix, offset))


def _newell_normal(p):
    q = np.roll(p, -1, axis=0)
    n = np.array([
        np.sum((p[:, 1] - q[:, 1]) * (p[:, 2] + q[:, 2])),
        np.sum((p[:, 2] - q[:, 2]) * (p[:, 0] + q[:, 0])),
        np.sum((p[:, 0] - q[:, 0]) * (p[:, 1] + q[:, 1])),
    ])
    length = np.linalg.norm(n)
    if length == 0:
        raise GeometryError("offset contour encloses no area")
    return n / length


@dataclass(frozen=True, eq=False)
class OffsetRegion:
    """
    Nested closed contours ``C_1 ... C_R`` (outermost first) with a
    composition on each, every gap split into ``subdivisions`` linear
    sub-regions.

    Contours are planar and swept along their common normal, so points
    are classified by their projection onto the plane of ``C_1``.
    """

    cell: str
    contours: tuple
    compositions: tuple
    direction: str = "inwards"
    subdivisions: tuple = (1,)

    def __post_init__(self):
        contours = tuple(self.contours)
        if len(contours) < 2:
            raise GeometryError("offset region needs at least two contours")
        for c in contours:
            if not isinstance(c, Polyline) or not c.closed:
                raise GeometryError("offset contours must be closed polylines")
        if self.direction not in ("inwards", "outwards"):
            raise ModelError(f"offset direction must be 'inwards' or 'outwards', got {self.direction!r}")
        comps = tuple(as_composition(m, k=len(np.ravel(self.compositions[0])),
                                     name=f"M(C_{r + 1})")
                      for r, m in enumerate(self.compositions))
        if len(comps) != len(contours):
            raise ShapeError(f"{len(contours)} contours but {len(comps)} compositions")
        subs = self.subdivisions
        subs = (subs,) if np.ndim(subs) == 0 else tuple(subs)
        if len(subs) == 1:
            subs = subs * (len(contours) - 1)
        subs = tuple(int(x) for x in subs)
        if len(subs) != len(contours) - 1 or min(subs) < 1:
            raise ModelError("subdivisions must give a positive count per contour gap")

        first = contours[0].points
        normal = _newell_normal(first)
        plane = Plane(first[0], normal)
        loops = []
        for r, c in enumerate(contours):
            off = np.abs(plane.signed_distance(c.points)).max()
            extent = np.ptp(first, axis=0).max()
            if off > 1e-9 * max(1.0, extent):
                raise GeometryError(f"offset contour {r + 1} is not in the plane of contour 1")
            loops.append(plane.to_2d(c.points))
        for r in range(len(loops) - 1):
            if not points_in_polygon(loops[r + 1], loops[r]).all():
                raise GeometryError(f"offset contour {r + 2} is not nested inside contour {r + 1}")
            if LinearRing(loops[r]).intersects(LinearRing(loops[r + 1])):
                raise GeometryError(f"offset contours {r + 1} and {r + 2} intersect")
        u, v = plane.frame()
        object.__setattr__(self, "contours", contours)
        object.__setattr__(self, "compositions", comps)
        object.__setattr__(self, "subdivisions", subs)
        object.__setattr__(self, "frame", (plane.origin, u, v))
        object.__setattr__(self, "loops", tuple(loops))

    @property
    def k(self):
        return len(self.compositions[0])

    def project(self, points):
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        o, u, v = self.frame
        dx, dy, dz = p[:, 0] - o[0], p[:, 1] - o[1], p[:, 2] - o[2]
        return np.column_stack([dx * u[0] + dy * u[1] + dz * u[2],
                                dx * v[0] + dy * v[1] + dz * v[2]])

    def gap_of(self, q):
        """Number of contours enclosing each projected point (0..R)."""
        count = np.zeros(len(q), dtype=np.int64)
        for loop in self.loops:
            count += points_in_polygon(q, loop)
        return count

    def evaluate(self, points):
        q = self.project(points)
        gap = self.gap_of(q)
        R = len(self.loops)
        out = np.empty((len(q), self.k))
        out[gap == 0] = self.compositions[0]
        out[gap == R] = self.compositions[-1]
        for r in range(1, R):
            sel = np.nonzero(gap == r)[0]
            if len(sel) == 0:
                continue
            qs = q[sel]
            d_outer = loop_distance_2d(qs, self.loops[r - 1])
            d_inner = loop_distance_2d(qs, self.loops[r])
            t = bidistance_coordinate(d_outer, d_inner)
            rm = self.subdivisions[r - 1]
            pos = (1.0 - t) * rm if self.direction == "inwards" else t * rm
            i0 = np.clip(np.floor(pos), 0, rm - 1)
            frac = pos - i0
            w = step_width(self, r)
            out[sel] = _subregion(self, r, i0) + frac[:, None] * w
        return out

    def transformed(self, matrix, offset):
        m = np.asarray(matrix)
        cs = tuple(Polyline(c.points @ m.T + offset, True) for c in self.contours)
        return replace(self, contours=cs)


def _subregion(region, r, i):
    """Composition at sub-region boundary ``i`` of gap ``r`` (1-based)."""
    m_r = region.compositions[r - 1]
    m_next = region.compositions[r]
    rm = region.subdivisions[r - 1]
    i = np.asarray(i, dtype=np.float64)[..., None]
    if region.direction == "inwards":
        return i * (m_r - m_next) / rm + m_next
    return (rm - i) * (m_r - m_next) / rm + m_next


def offset_subdivide(region, r, i):
    """
    Composition array of sub-region ``i`` in the gap between contours
    ``r`` and ``r + 1`` (1-based): linear in ``i`` from ``M(C_{r+1})``
    at ``i = 0`` (inwards) or from ``M(C_r)`` at ``i = 0`` (outwards).
    """
    n = len(region.compositions)
    if not 1 <= r < n:
        raise BoundsError(f"gap index {r} outside 1..{n - 1}")
    rm = region.subdivisions[r - 1]
    if int(i) != i or not 0 <= i <= rm:
        raise BoundsError(f"sub-region index {i} outside 0..{rm}")
    return _subregion(region, r, int(i))


def step_width(region, r):
    """
    Constant composition step between consecutive sub-regions of gap ``r``.

    Every step ``M_c(i+1) - M_c(i)`` is computed and checked against the
    first; a spread above ``STEP_TOL`` raises :class:`ConsistencyError`.
    """
    rm = region.subdivisions[r - 1] if 1 <= r < len(region.compositions) else None
    if rm is None:
        raise BoundsError(f"gap index {r} outside 1..{len(region.compositions) - 1}")
    levels = np.stack([offset_subdivide(region, r, i) for i in range(rm + 1)])
    steps = np.diff(levels, axis=0)
    spread = np.abs(steps - steps[0]).max()
    if spread > STEP_TOL:
        raise ConsistencyError(f"step width varies by {spread:.3g} across sub-regions of gap {r}")
    return steps[0]


@dataclass(frozen=True, eq=False)
class HybridRegion:
    """
    Boundary patches (references with attached compositions) blended by
    weighted inverse distance. ``weights`` scale each patch's influence.
    """

    cell: str
    refs: tuple
    compositions: tuple
    weights: tuple = None

    def __post_init__(self):
        refs = tuple(self.refs)
        if len(refs) < 2:
            raise GeometryError("hybrid region needs at least two boundary patches")
        k = len(np.ravel(self.compositions[0]))
        comps = tuple(as_composition(m, k=k, name=f"patch {j + 1} composition")
                      for j, m in enumerate(self.compositions))
        if len(comps) != len(refs):
            raise ShapeError(f"{len(refs)} patches but {len(comps)} compositions")
        w = (1.0,) * len(refs) if self.weights is None else tuple(map(float, self.weights))
        if len(w) != len(refs) or min(w) <= 0:
            raise ModelError("hybrid weights must be positive, one per patch")
        object.__setattr__(self, "refs", refs)
        object.__setattr__(self, "compositions", comps)
        object.__setattr__(self, "weights", w)

    @property
    def k(self):
        return len(self.compositions[0])

    def blend_weights(self, points):
        """(n, patches) normalized inverse-distance weights."""
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        d = np.stack([ref.distance(p) for ref in self.refs], axis=1)
        inv = np.asarray(self.weights) / np.maximum(d, HYBRID_EPS)
        u = inv / inv.sum(axis=1, keepdims=True)
        on = d < HYBRID_EPS
        hit = on.any(axis=1)
        if hit.any():
            first = np.argmax(on[hit], axis=1)
            u[hit] = 0.0
            u[np.nonzero(hit)[0], first] = 1.0
        return u

    def evaluate(self, points):
        return hybrid_evaluate(self, points)

    def transformed(self, matrix, offset):
        return replace(self, refs=tuple(r.transformed(matrix, offset) for r in self.refs))


def hybrid_evaluate(region, p):
    """Inverse-distance blend of patch compositions at point(s) ``p``."""
    p = np.asarray(p, dtype=np.float64)
    u = region.blend_weights(p.reshape(-1, 3))
    m = np.stack(region.compositions)
    out = u[:, :1] * m[0]
    for j in range(1, len(m)):
        out = out + u[:, j:j + 1] * m[j]
    return out[0] if p.ndim == 1 else out


def retarget_references(region, new_start, new_end):
    """Same region with its start and end references replaced."""
    if new_start.same_as(new_end):
        raise DegenerateRegionError("new start and end references coincide")
    return replace(region, start_ref=new_start, end_ref=new_end)


# ---------------------------------------------------------------------------
# object and evaluation


class EvaluationCache:
    """Thread-safe LRU map from exact point coordinates to compositions."""

    def __init__(self, maxsize=1 << 18):
        self.maxsize = maxsize
        self._data = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_many(self, keys):
        with self._lock:
            get = self._data.get
            out = [get(key) for key in keys]
            touch = self._data.move_to_end
            for key, val in zip(keys, out):
                if val is not None:
                    touch(key)
            found = sum(val is not None for val in out)
            self.hits += found
            self.misses += len(out) - found
            return out

    def put_many(self, keys, values):
        with self._lock:
            self._data.update(zip(keys, values))
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)


@dataclass(frozen=True, eq=False)
class HeterogeneousObject:
    space: MaterialSpace
    cells: tuple
    regions: tuple

    def __post_init__(self):
        cells = tuple(self.cells)
        regions = tuple(self.regions)
        by_id = {}
        for c in cells:
            if c.id in by_id:
                raise AmbiguityError(f"duplicate cell id {c.id!r}")
            by_id[c.id] = c
        for c in cells:
            for child in c.sub_volumes:
                if child not in by_id:
                    raise ModelError(f"cell {c.id!r} lists unknown sub-volume {child!r}")
        binding = {}
        for reg in regions:
            if reg.cell not in by_id:
                raise ModelError(f"region bound to unknown cell {reg.cell!r}")
            if not by_id[reg.cell].is_leaf:
                raise ModelError(f"cell {reg.cell!r} has sub-volumes; bind regions to them instead")
            if reg.cell in binding:
                raise AmbiguityError(f"cell {reg.cell!r} has more than one region")
            if reg.k != self.space.k:
                raise ShapeError(
                    f"region of cell {reg.cell!r} has {reg.k} fractions, material space has {self.space.k}"
                )
            binding[reg.cell] = reg
        leaves = [c for c in cells if c.is_leaf]
        for c in leaves:
            if c.id not in binding:
                raise ModelError(f"cell {c.id!r} has no region")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_binding", binding)
        object.__setattr__(self, "_leaves", tuple(leaves))
        object.__setattr__(self, "cache", EvaluationCache())

    @property
    def leaf_cells(self):
        return self._leaves

    def cell(self, cell_id):
        return self._by_id[cell_id]

    def region_of(self, cell_id):
        return self._binding[cell_id]

    @property
    def bounds(self):
        b = np.array([c.geometry.bounds for c in self._leaves])
        return np.array([b[:, 0].min(axis=0), b[:, 1].max(axis=0)])

    def transformed(self, matrix, offset=(0.0, 0.0, 0.0)):
        offset = np.asarray(offset, dtype=np.float64)
        return HeterogeneousObject(
            self.space,
            tuple(c.transformed(matrix, offset) for c in self.cells),
            tuple(r.transformed(matrix, offset) for r in self.regions),
        )

    def translated(self, offset):
        return self.transformed(np.eye(3), offset)

    def locate(self, points):
        """
        Index into :attr:`leaf_cells` of the cell containing each point.

        Raises
        ------
        OutsideObjectError
          A point is in no cell.
        AmbiguityError
          A point is strictly inside two cells.
        """
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        inside = np.stack([c.geometry.locator.contains(p) for c in self._leaves])
        count = inside.sum(axis=0)
        if (count > 1).any():
            j = int(np.argmax(count > 1))
            ids = [self._leaves[c].id for c in np.nonzero(inside[:, j])[0]]
            raise AmbiguityError(f"point {p[j].tolist()} lies in cells {ids[0]!r} and {ids[1]!r}")
        idx = np.where(count == 1, np.argmax(inside, axis=0), -1)
        missing = np.nonzero(idx < 0)[0]
        if len(missing):
            pending = missing
            for c, cell in enumerate(self._leaves):
                if len(pending) == 0:
                    break
                near = cell.geometry.locator.near_surface(p[pending], BOUNDARY_TOL)
                idx[pending[near]] = c
                pending = pending[~near]
            if len(pending):
                raise OutsideObjectError(f"point {p[pending[0]].tolist()} is outside the object")
        return idx


def evaluate_in_cell(obj, cell_id, points):
    """Evaluate a cell's region at points without any containment test."""
    return obj.region_of(cell_id).evaluate(points)


def _evaluate_uncached(obj, p):
    idx = obj.locate(p)
    out = np.empty((len(p), obj.space.k))
    for c in np.unique(idx):
        sel = idx == c
        out[sel] = obj.region_of(obj.leaf_cells[c].id).evaluate(p[sel])
    return out


def evaluate_points(obj, points, use_cache=True):
    """
    Material composition at each of an (n, 3) array of points.

    With ``use_cache`` results are memoized per exact coordinate
    triple; cached and uncached results are identical.
    """
    p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if not use_cache or len(p) == 0:
        return _evaluate_uncached(obj, p)
    keys = list(map(tuple, p.tolist()))
    found = obj.cache.get_many(keys)
    miss = [j for j, val in enumerate(found) if val is None]
    out = np.empty((len(p), obj.space.k))
    hit = [j for j, val in enumerate(found) if val is not None]
    if hit:
        out[hit] = np.stack([found[j] for j in hit])
    if miss:
        fresh = _evaluate_uncached(obj, p[miss])
        out[miss] = fresh
        obj.cache.put_many([keys[j] for j in miss], list(fresh))
    return out


def evaluate_point(obj, p, use_cache=True):
    """Material composition vector at a single 3D point."""
    return evaluate_points(obj, np.asarray(p, dtype=np.float64).reshape(1, 3), use_cache)[0]
