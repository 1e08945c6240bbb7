"""
mesh.py
-------

Indexed triangle meshes, planes, polylines and 2D contours, plus
ASCII STL/PLY readers, primitive constructors and midpoint refinement.

All lengths are millimetres.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import ExportError, GeometryError

#: minimum admissible triangle area, mm^2
AREA_EPS = 1e-12
#: vertex welding / contour chaining tolerance, mm
MERGE_TOL = 1e-7


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


def triangle_areas(vertices, triangles):
    """Unsigned area of each triangle, for 2D or 3D vertices."""
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if len(t) == 0:
        return np.zeros(0)
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    if v.shape[1] == 2:
        cr = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
            c[:, 0] - a[:, 0]
        )
        return 0.5 * np.abs(cr)
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def mesh_edges(triangles):
    """
    Unique undirected edges of a triangle list.

    Returns
    -------
    edges : (e, 2) int
      Sorted vertex pairs.
    tri_edge : (m, 3) int
      Edge index of local edge ``k`` = (t[k], t[(k+1) % 3]).
    """
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if len(t) == 0:
        return np.zeros((0, 2), dtype=np.int64), np.zeros((0, 3), dtype=np.int64)
    a = t.reshape(-1)
    b = np.roll(t, -1, axis=1).reshape(-1)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    n = int(t.max()) + 1
    keys, inverse = np.unique(lo * n + hi, return_inverse=True)
    edges = np.column_stack([keys // n, keys % n])
    return edges, inverse.reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """
    Indexed triangle surface.

    ``vertices`` may be 2D (planar meshes produced by the slicer) or 3D.
    ``feature_edges`` holds sorted vertex-index pairs flagged as sharp.
    Instances are immutable; derived data is cached lazily.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    feature_edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] not in (2, 3):
            if v.size == 0:
                v = v.reshape(0, 3)
            else:
                raise GeometryError(f"vertices must be (n, 2) or (n, 3), got {v.shape}")
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "vertices", _frozen(v, np.float64))
        object.__setattr__(self, "triangles", _frozen(t, np.int64))
        if len(t):
            if t.min() < 0 or t.max() >= len(v):
                bad = int(np.nonzero((t < 0).any(1) | (t >= len(v)).any(1))[0][0])
                raise GeometryError(f"triangle {bad} references a missing vertex")
            areas = triangle_areas(v, t)
            if (areas <= AREA_EPS).any():
                bad = int(np.nonzero(areas <= AREA_EPS)[0][0])
                raise GeometryError(
                    f"triangle {bad} is degenerate (area {areas[bad]:.3g} mm^2)"
                )
        feats = frozenset(tuple(sorted(map(int, e))) for e in self.feature_edges)
        if feats:
            known = set(map(tuple, self.edges.tolist()))
            missing = feats - known
            if missing:
                raise GeometryError(f"feature edge {min(missing)} is not a mesh edge")
        object.__setattr__(self, "feature_edges", feats)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def __len__(self):
        return len(self.triangles)

    @cached_property
    def _edge_data(self):
        return mesh_edges(self.triangles)

    @property
    def edges(self):
        return self._edge_data[0]

    @property
    def tri_edge(self):
        return self._edge_data[1]

    @cached_property
    def edge_face_count(self):
        return np.bincount(self.tri_edge.ravel(), minlength=len(self.edges))

    @cached_property
    def is_watertight(self):
        """Every edge shared by exactly two triangles."""
        return len(self.triangles) > 0 and bool((self.edge_face_count == 2).all())

    @cached_property
    def areas(self):
        return triangle_areas(self.vertices, self.triangles)

    @property
    def area(self):
        return float(self.areas.sum())

    @cached_property
    def bounds(self):
        if len(self.vertices) == 0:
            return np.zeros((2, self.dim))
        return np.array([self.vertices.min(0), self.vertices.max(0)])

    @cached_property
    def face_normals(self):
        v, t = self.vertices, self.triangles
        n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        return n / np.linalg.norm(n, axis=1)[:, None]

    @cached_property
    def volume(self):
        """Signed enclosed volume (positive for outward-oriented closed meshes)."""
        v, t = self.vertices, self.triangles
        return float(
            np.einsum("ij,ij->i", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]])).sum() / 6.0
        )

    @cached_property
    def locator(self):
        from .spatial import MeshLocator

        return MeshLocator(self)

    def translated(self, offset):
        return TriangleMesh(self.vertices + np.asarray(offset, float), self.triangles,
                            self.feature_edges)

    def transformed(self, matrix, offset=(0.0, 0.0, 0.0)):
        """Apply ``x -> matrix @ x + offset``; flips winding if det < 0."""
        m = np.asarray(matrix, float)
        v = self.vertices @ m.T + np.asarray(offset, float)
        t = self.triangles if np.linalg.det(m) > 0 else self.triangles[:, ::-1]
        return TriangleMesh(v, t, self.feature_edges)


@dataclass(frozen=True, eq=False)
class Plane:
    origin: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=np.float64).reshape(3)
        n = np.asarray(self.normal, dtype=np.float64).reshape(3)
        length = np.linalg.norm(n)
        if not np.isfinite(length) or length < 1e-12:
            raise GeometryError("plane normal must be non-zero")
        if abs(length - 1.0) > 1e-9:
            n = n / length
        object.__setattr__(self, "origin", _frozen(o, np.float64))
        object.__setattr__(self, "normal", _frozen(n, np.float64))

    def frame(self):
        """
        Orthonormal in-plane axes ``(u, v)`` with ``u x v = normal``.

        For the +z normal this is exactly the x and y axes, so 2D
        section coordinates lift back to 3D without rounding.
        """
        n = self.normal
        if n[0] == 0.0 and n[1] == 0.0:
            u = np.array([1.0, 0.0, 0.0])
            v = np.array([0.0, 1.0 if n[2] > 0 else -1.0, 0.0])
            return u, v
        helper = np.eye(3)[np.argmin(np.abs(n))]
        u = np.cross(helper, n)
        u /= np.linalg.norm(u)
        return u, np.cross(n, u)

    def signed_distance(self, points):
        p = np.asarray(points, dtype=np.float64) - self.origin
        n = self.normal
        return p[..., 0] * n[0] + p[..., 1] * n[1] + p[..., 2] * n[2]

    def to_2d(self, points):
        u, v = self.frame()
        p = np.asarray(points, dtype=np.float64) - self.origin
        return np.stack([p @ u, p @ v], axis=-1)

    def to_3d(self, uv):
        u, v = self.frame()
        uv = np.asarray(uv, dtype=np.float64)
        return self.origin + uv[..., :1] * u + uv[..., 1:2] * v


@dataclass(frozen=True, eq=False)
class Polyline:
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 3 or len(p) < 2:
            raise GeometryError("polyline needs at least 2 points in 3D")
        if self.closed and np.array_equal(p[0], p[-1]) and len(p) > 2:
            p = p[:-1]
        seg = np.linalg.norm(np.diff(p, axis=0), axis=1)
        if (seg <= 1e-9).any():
            raise GeometryError(
                f"polyline points {int(np.argmin(seg))} and {int(np.argmin(seg)) + 1} coincide"
            )
        object.__setattr__(self, "points", _frozen(p, np.float64))

    def segments(self):
        """(s, 2, 3) array of consecutive point pairs, closing if needed."""
        p = self.points
        b = np.roll(p, -1, axis=0) if self.closed else p[1:]
        a = p if self.closed else p[:-1]
        return np.stack([a, b], axis=1)


def signed_area_2d(points):
    p = np.asarray(points, dtype=np.float64)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class Contour2D:
    """Closed simple loop in a section plane's local (u, v) frame."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        if len(p) > 1 and np.array_equal(p[0], p[-1]):
            p = p[:-1]
        if p.ndim != 2 or p.shape[1] != 2 or len(p) < 3:
            raise GeometryError("contour needs at least 3 points in 2D")
        if signed_area_2d(p) == 0.0:
            raise GeometryError("contour has zero signed area")
        object.__setattr__(self, "points", _frozen(p, np.float64))

    @property
    def closed(self):
        return True

    @property
    def signed_area(self):
        return signed_area_2d(self.points)

    @property
    def perimeter(self):
        return float(np.linalg.norm(self.points - np.roll(self.points, -1, 0), axis=1).sum())

    def reversed(self):
        return Contour2D(self.points[::-1])


# ---------------------------------------------------------------------------
# refinement


def split_marked_edges(vertices, triangles, marked, features=frozenset()):
    """
    Conforming midpoint refinement of the marked edges.

    The marking is first closed so that every triangle with a marked edge
    also has its longest edge marked. Triangles with all three edges
    marked are split regularly into four; the others are bisected from
    the midpoint of their longest edge. Midpoints are shared between
    neighbours so no hanging nodes appear.

    Parameters
    ----------
    vertices : (n, d) float
    triangles : (m, 3) int
    marked : (e,) bool
      Mask over ``mesh_edges(triangles)[0]``.
    features : set of (int, int)
      Sharp edges; halves of split feature edges stay flagged.

    Returns
    -------
    vertices : (n', d) float
    triangles : (m', 3) int
    parent : (m',) int
      Index of the input triangle each output triangle came from.
    features : frozenset
    """
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    edges, tri_edge = mesh_edges(t)
    marked = np.array(marked, dtype=bool, copy=True)
    if len(t) == 0 or not marked.any():
        return v, t, np.arange(len(t)), frozenset(features)

    lengths = np.linalg.norm(v[edges[:, 0]] - v[edges[:, 1]], axis=1)
    rows = np.arange(len(t))
    longest = np.argmax(lengths[tri_edge], axis=1)
    longest_edge = tri_edge[rows, longest]
    while True:
        need = marked[tri_edge].any(axis=1) & ~marked[longest_edge]
        if not need.any():
            break
        marked[longest_edge[need]] = True

    mid = np.full(len(edges), -1, dtype=np.int64)
    split = np.nonzero(marked)[0]
    mid[split] = len(v) + np.arange(len(split))
    mids = (v[edges[split, 0]] + v[edges[split, 1]]) * 0.5
    v_out = np.vstack([v, mids])

    # canonical roll: local edge 0 is the longest edge
    roll = (longest[:, None] + np.arange(3)[None, :]) % 3
    a, b, c = (t[rows, roll[:, k]] for k in range(3))
    e = tri_edge[rows[:, None], roll]
    m0, m1, m2 = (mid[e[:, k]] for k in range(3))
    s0, s1, s2 = (marked[e[:, k]] for k in range(3))

    pieces, parents = [], []

    def emit(mask, *tris):
        idx = np.nonzero(mask)[0]
        for tri in tris:
            pieces.append(np.stack([x[idx] for x in tri], axis=1))
            parents.append(idx)

    emit(~s0, (a, b, c))
    emit(s0 & ~s1 & ~s2, (a, m0, c), (m0, b, c))
    emit(s0 & s1 & ~s2, (a, m0, c), (m0, b, m1), (m0, m1, c))
    emit(s0 & ~s1 & s2, (a, m0, m2), (m2, m0, c), (m0, b, c))
    emit(s0 & s1 & s2, (a, m0, m2), (m0, b, m1), (m2, m1, c), (m0, m1, m2))

    t_out = np.concatenate(pieces, axis=0)
    parent = np.concatenate(parents)
    order = np.argsort(parent, kind="stable")
    t_out, parent = t_out[order], parent[order]

    new_features = set()
    index = {(int(i), int(j)): k for k, (i, j) in enumerate(edges)} if features else {}
    for i, j in features:
        k = index.get((i, j))
        if k is not None and marked[k]:
            mm = int(mid[k])
            new_features.add((min(i, mm), max(i, mm)))
            new_features.add((min(j, mm), max(j, mm)))
        else:
            new_features.add((i, j))
    return v_out, t_out, parent, frozenset(new_features)


def subdivide_mesh(mesh, levels):
    """
    Split every triangle into four at its edge midpoints, ``levels`` times.

    Geometry is not smoothed: every new vertex lies on an input facet,
    so sharp features are preserved and feature flags follow the
    split edges.
    """
    if int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels!r}")
    if len(mesh.triangles):
        bad = np.nonzero(mesh.areas <= AREA_EPS)[0]
        if len(bad):
            raise GeometryError(f"triangle {int(bad[0])} is degenerate")
    v, t, f = mesh.vertices, mesh.triangles, mesh.feature_edges
    for _ in range(int(levels)):
        edges, _ = mesh_edges(t)
        v, t, _, f = split_marked_edges(v, t, np.ones(len(edges), bool), f)
    return TriangleMesh(v, t, f)


# ---------------------------------------------------------------------------
# welding and IO


def weld_vertices(vertices, triangles, tol=MERGE_TOL):
    """Merge vertices closer than ``tol``; returns (vertices, triangles)."""
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if len(v) == 0:
        return v.reshape(0, 3), t
    pairs = cKDTree(v).query_pairs(tol, output_type="ndarray")
    n = len(v)
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else
        (np.zeros(0), (np.zeros(0, int), np.zeros(0, int))),
        shape=(n, n),
    )
    _, labels = connected_components(graph, directed=False)
    # representative = first occurrence, keeps input order stable
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(len(first), dtype=np.int64)
    remap[order] = np.arange(len(first))
    new_v = v[np.sort(first)]
    return new_v, remap[labels][t]


def read_stl(path, weld=True):
    """Read an ASCII STL file into a welded :class:`TriangleMesh`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    tokens = text.split()
    if not tokens or tokens[0].lower() != "solid":
        raise GeometryError(f"{path}: not an ASCII STL file")
    coords = []
    i = 0
    while i < len(tokens):
        if tokens[i].lower() == "vertex":
            try:
                coords.append([float(x) for x in tokens[i + 1:i + 4]])
            except (ValueError, IndexError) as exc:
                raise GeometryError(f"{path}: bad vertex record near token {i}") from exc
            i += 4
        else:
            i += 1
    if len(coords) % 3:
        raise GeometryError(f"{path}: vertex count {len(coords)} is not a multiple of 3")
    v = np.array(coords, dtype=np.float64).reshape(-1, 3)
    t = np.arange(len(v)).reshape(-1, 3)
    if weld:
        v, t = weld_vertices(v, t)
    return TriangleMesh(v, t)


def read_ply_data(path):
    """
    Parse an ASCII PLY file.

    Returns
    -------
    vertex : dict of str -> (n,) array
      One entry per declared vertex property.
    faces : (m, 3) int
      Polygons with more than 3 corners are fan-triangulated.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0].strip() != "ply":
        raise GeometryError(f"{path}: missing 'ply' magic line")
    elements, current, fmt = [], None, None
    body_start = None
    for n, line in enumerate(lines[1:], start=1):
        parts = line.split()
        if not parts or parts[0] in ("comment", "obj_info"):
            continue
        if parts[0] == "format":
            fmt = parts[1]
        elif parts[0] == "element":
            current = {"name": parts[1], "count": int(parts[2]), "props": []}
            elements.append(current)
        elif parts[0] == "property":
            current["props"].append(parts[-1] if parts[1] != "list" else ("list", parts[-1]))
        elif parts[0] == "end_header":
            body_start = n + 1
            break
    if fmt != "ascii" or body_start is None:
        raise GeometryError(f"{path}: only ASCII PLY is supported")
    rows = iter(lines[body_start:])
    vertex, faces = {}, []
    for el in elements:
        if el["name"] == "vertex":
            data = np.array([next(rows).split() for _ in range(el["count"])], dtype=np.float64)
            data = data.reshape(el["count"], len(el["props"]))
            vertex = {name: data[:, k] for k, name in enumerate(el["props"])}
        elif el["name"] == "face":
            for _ in range(el["count"]):
                vals = [int(x) for x in next(rows).split()]
                poly = vals[1:1 + vals[0]]
                faces.extend([poly[0], poly[k], poly[k + 1]] for k in range(1, len(poly) - 1))
        else:
            for _ in range(el["count"]):
                next(rows)
    return vertex, np.array(faces, dtype=np.int64).reshape(-1, 3)


def read_ply(path):
    vertex, faces = read_ply_data(path)
    if vertex:
        v = np.stack([vertex["x"], vertex["y"], vertex["z"]], axis=1)
    else:
        v = np.zeros((0, 3))
    return TriangleMesh(v, faces)


def read_mesh(path):
    suffix = Path(path).suffix.lower()
    if suffix == ".stl":
        return read_stl(path)
    if suffix == ".ply":
        return read_ply(path)
    raise GeometryError(f"unsupported mesh format {suffix!r} (expected .stl or .ply)")


def write_stl(mesh, path, name="hetobj"):
    v, t = mesh.vertices, mesh.triangles
    out = [f"solid {name}"]
    for tri, n in zip(t, mesh.face_normals):
        out.append(f"  facet normal {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}")
        out.append("    outer loop")
        for i in tri:
            out.append(f"      vertex {v[i, 0]:.17g} {v[i, 1]:.17g} {v[i, 2]:.17g}")
        out.append("    endloop")
        out.append("  endfacet")
    out.append(f"endsolid {name}")
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# primitives


def box_mesh(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)):
    """Axis-aligned box, 12 outward-facing triangles, box edges flagged sharp."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    corners = np.array([[(hi if (i >> k) & 1 else lo)[k] for k in range(3)] for i in range(8)])
    tris = [
        (0, 2, 1), (1, 2, 3),  # z = lo
        (4, 5, 6), (5, 7, 6),  # z = hi
        (0, 1, 4), (1, 5, 4),  # y = lo
        (2, 6, 3), (3, 6, 7),  # y = hi
        (0, 4, 2), (2, 4, 6),  # x = lo
        (1, 3, 5), (3, 7, 5),  # x = hi
    ]
    feats = {(0, 1), (2, 3), (4, 5), (6, 7), (0, 2), (1, 3), (4, 6), (5, 7),
             (0, 4), (1, 5), (2, 6), (3, 7)}
    return TriangleMesh(corners, tris, frozenset(feats))


def icosahedron(radius=1.0, center=(0.0, 0.0, 0.0)):
    g = (1.0 + 5 ** 0.5) / 2.0
    v = np.array([
        [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
        [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
        [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
    ], dtype=float)
    t = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    v = v / np.linalg.norm(v, axis=1)[:, None] * radius + np.asarray(center, float)
    return TriangleMesh(v, t)


def icosphere(subdivisions=3, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Geodesic sphere with ``20 * 4**subdivisions`` triangles."""
    center = np.asarray(center, float)
    m = icosahedron()
    v, t = m.vertices, m.triangles
    for _ in range(subdivisions):
        edges, _ = mesh_edges(t)
        v, t, _, _ = split_marked_edges(v, t, np.ones(len(edges), bool))
        v = v / np.linalg.norm(v, axis=1)[:, None]
    return TriangleMesh(v * radius + center, t)


def uv_sphere(n_lat=50, n_lon=100, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Latitude/longitude sphere with ``2 * n_lon * (n_lat - 1)`` triangles."""
    theta = np.linspace(0.0, np.pi, n_lat + 1)[1:-1]
    phi = np.linspace(0.0, 2 * np.pi, n_lon, endpoint=False)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    ring = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
    v = np.vstack([[0, 0, 1.0], ring.reshape(-1, 3), [0, 0, -1.0]])
    south = len(v) - 1
    idx = 1 + np.arange((n_lat - 1) * n_lon).reshape(n_lat - 1, n_lon)
    nxt = np.roll(idx, -1, axis=1)
    tris = [np.stack([np.zeros(n_lon, int), idx[0], nxt[0]], 1)]
    a, b, c, d = idx[:-1], idx[1:], nxt[1:], nxt[:-1]
    tris.append(np.stack([a, b, c], -1).reshape(-1, 3))
    tris.append(np.stack([a, c, d], -1).reshape(-1, 3))
    tris.append(np.stack([np.full(n_lon, south), nxt[-1], idx[-1]], 1))
    return TriangleMesh(v * radius + np.asarray(center, float), np.vstack(tris))


def extrude_polygon(polygon, height, z0=0.0):
    """
    Prism over a simple CCW 2D polygon, from ``z0`` to ``z0 + height``.

    Caps are triangulated with a constrained Delaunay triangulation so
    concave outlines work. Outline edges of both caps and the vertical
    edges are flagged sharp.
    """
    from .section import constrained_triangulation

    p = np.asarray(polygon, float)
    if signed_area_2d(p) < 0:
        p = p[::-1]
    n = len(p)
    cap_v, cap_t = constrained_triangulation([p])
    # cap triangulation keeps the outline as its first n vertices
    if len(cap_v) != n or not np.array_equal(cap_v, p):
        raise GeometryError("polygon cap triangulation introduced new vertices")
    bottom = np.column_stack([p, np.full(n, z0)])
    top = np.column_stack([p, np.full(n, z0 + height)])
    v = np.vstack([bottom, top])
    i = np.arange(n)
    j = (i + 1) % n
    sides = np.vstack([np.stack([i, j, j + n], 1), np.stack([i, j + n, i + n], 1)])
    tris = np.vstack([cap_t[:, ::-1], cap_t + n, sides])
    feats = set()
    for a, b in zip(i, j):
        feats.add((min(a, b), max(a, b)))
        feats.add((min(a, b) + n, max(a, b) + n))
        feats.add((int(a), int(a) + n))
    return TriangleMesh(v, tris, frozenset(feats))


def regular_polygon(radius, segments, center=(0.0, 0.0)):
    ang = 2 * np.pi * np.arange(segments) / segments
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang)]) + np.asarray(center)
