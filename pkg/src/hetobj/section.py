"""
Planar sections of closed meshes and meshing of the resulting regions.
"""
from __future__ import annotations

import numpy as np
import shapely
from shapely.geometry import LinearRing, Polygon

from .errors import GeometryError, TopologyError
from .mesh import MERGE_TOL, Contour2D, Plane, TriangleMesh, mesh_edges, split_marked_edges
from .spatial import points_in_polygon

#: section height nudge used when the plane passes exactly through a vertex
PLANE_NUDGE = 1e-9


def intersect_mesh_plane(mesh, plane):
    """
    Closed intersection loops of a watertight mesh with a plane.

    Parameters
    ----------
    mesh : TriangleMesh
      Closed, consistently oriented 3D mesh.
    plane : Plane
      Section plane.

    Returns
    -------
    contours : list of Contour2D
      Loops in the plane's (u, v) frame. Outer loops are
      counter-clockwise, holes clockwise.

    Raises
    ------
    TopologyError
      If a chain cannot be closed (open or non-manifold input).
    """
    if len(mesh.triangles) == 0:
        return []
    v = mesh.vertices
    d = plane.signed_distance(v)
    # symbolic perturbation: move the plane off any vertex it touches
    for _ in range(16):
        if not (d == 0.0).any():
            break
        plane = Plane(plane.origin + PLANE_NUDGE * plane.normal, plane.normal)
        d = plane.signed_distance(v)
    else:
        raise TopologyError("section plane could not be moved off mesh vertices")

    t = mesh.triangles
    pos = d[t] > 0
    cross = pos.any(axis=1) & ~pos.all(axis=1)
    if not cross.any():
        return []
    ct = t[cross]
    cpos = pos[cross]
    edges, tri_edge = mesh_edges(ct)

    # local edge k runs t[k] -> t[k+1]; "exit" goes + to -, "entry" - to +
    nxt = np.roll(cpos, -1, axis=1)
    exits = cpos & ~nxt
    entries = ~cpos & nxt
    rows = np.arange(len(ct))
    start = tri_edge[rows, np.argmax(exits, axis=1)]
    end = tri_edge[rows, np.argmax(entries, axis=1)]

    used = np.zeros(len(edges), dtype=bool)
    used[start] = True
    used[end] = True
    ue = np.nonzero(used)[0]
    i, j = edges[ue, 0], edges[ue, 1]
    w = d[i] / (d[i] - d[j])
    pts = np.zeros((len(edges), 3))
    pts[ue] = v[i] + w[:, None] * (v[j] - v[i])

    if len(np.unique(start)) != len(start):
        dup = start[np.argmax(np.bincount(start))]
        raise TopologyError(f"non-manifold section at {pts[dup].tolist()}")
    succ = np.full(len(edges), -1, dtype=np.int64)
    succ[start] = end
    dangling = np.setdiff1d(end, start)
    if len(dangling):
        raise TopologyError(f"open section chain, dangling endpoint {pts[dangling[0]].tolist()}")

    loops = []
    visited = np.zeros(len(edges), dtype=bool)
    for s in start:
        if visited[s]:
            continue
        chain = []
        e = s
        while not visited[e]:
            visited[e] = True
            chain.append(e)
            e = succ[e]
        if e != s:
            raise TopologyError(f"section chain does not close at {pts[e].tolist()}")
        loop = plane.to_2d(pts[chain])
        keep = np.linalg.norm(loop - np.roll(loop, 1, axis=0), axis=1) > MERGE_TOL
        loop = loop[keep]
        if len(loop) >= 3 and _area(loop) != 0.0:
            loops.append(loop)
    return [Contour2D(p) for p in orient_by_nesting(loops)]


def _area(p):
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def nesting_depth(loops):
    """Number of other loops enclosing each loop."""
    depth = np.zeros(len(loops), dtype=int)
    for a, la in enumerate(loops):
        for b, lb in enumerate(loops):
            if a != b and points_in_polygon(la[:1], lb)[0]:
                depth[a] += 1
    return depth


def orient_by_nesting(loops):
    """Make even-depth loops CCW and odd-depth loops CW."""
    out = []
    for loop, dep in zip(loops, nesting_depth(loops)):
        ccw = _area(loop) > 0
        out.append(loop if ccw == (dep % 2 == 0) else loop[::-1])
    return out


def _polygons(contours):
    loops = [np.asarray(c.points if isinstance(c, Contour2D) else c, float) for c in contours]
    for k, loop in enumerate(loops):
        if not LinearRing(loop).is_simple:
            raise GeometryError(f"contour {k} is self-intersecting")
    rings = [LinearRing(x) for x in loops]
    for a in range(len(rings)):
        for b in range(a + 1, len(rings)):
            if rings[a].intersects(rings[b]):
                raise GeometryError(f"contours {a} and {b} intersect")
    depth = nesting_depth(loops)
    outers = [k for k in range(len(loops)) if depth[k] % 2 == 0]
    holes = {k: [] for k in outers}
    for k in range(len(loops)):
        if depth[k] % 2 == 0:
            continue
        parents = [o for o in outers if depth[o] == depth[k] - 1
                   and points_in_polygon(loops[k][:1], loops[o])[0]]
        if len(parents) != 1:
            raise GeometryError(f"contour {k} is not nested in exactly one outer contour")
        holes[parents[0]].append(k)
    polys = []
    for o in outers:
        outer = loops[o] if _area(loops[o]) > 0 else loops[o][::-1]
        hs = [h if _area(h) < 0 else h[::-1] for h in (loops[k] for k in holes[o])]
        poly = Polygon(outer, hs)
        if not poly.is_valid:
            raise GeometryError(f"contour {o} and its holes do not form a valid region")
        polys.append((outer, hs, poly))
    return polys


def constrained_triangulation(contours):
    """
    Constrained Delaunay triangulation of the region bounded by ``contours``
    (outer loops and holes, nesting inferred).

    Returns ``(vertices, triangles)`` with CCW triangles; the contour points
    come first, in input order.
    """
    all_v, all_t = [], []
    base = 0
    for outer, hs, poly in _polygons(contours):
        ring_pts = np.vstack([outer] + hs)
        index = {tuple(p): k for k, p in enumerate(ring_pts.tolist())}
        if len(index) != len(ring_pts):
            raise GeometryError("contour has repeated points")
        coords = shapely.get_coordinates(shapely.constrained_delaunay_triangles(poly))
        # each triangle is a closed 4-point ring
        corners = coords.reshape(-1, 4, 2)[:, :3].reshape(-1, 2)
        try:
            t = np.array([index[p] for p in map(tuple, corners.tolist())], dtype=np.int64)
        except KeyError as exc:
            raise GeometryError("triangulation produced an unknown vertex") from exc
        t = t.reshape(-1, 3)
        p = ring_pts
        cr = (p[t[:, 1], 0] - p[t[:, 0], 0]) * (p[t[:, 2], 1] - p[t[:, 0], 1]) - (
            p[t[:, 1], 1] - p[t[:, 0], 1]) * (p[t[:, 2], 0] - p[t[:, 0], 0])
        t[cr < 0] = t[cr < 0][:, ::-1]
        all_v.append(ring_pts)
        all_t.append(t + base)
        base += len(ring_pts)
    if not all_v:
        return np.zeros((0, 2)), np.zeros((0, 3), dtype=np.int64)
    return np.vstack(all_v), np.vstack(all_t)


def refine_to_edge_length(vertices, triangles, max_edge):
    """Split edges longer than ``max_edge`` until none remain."""
    v, t = vertices, triangles
    while len(t):
        edges, _ = mesh_edges(t)
        lengths = np.linalg.norm(v[edges[:, 0]] - v[edges[:, 1]], axis=1)
        marked = lengths > max_edge
        if not marked.any():
            break
        v, t, _, _ = split_marked_edges(v, t, marked)
    return v, t


def triangulate_region(contours, max_edge):
    """
    Triangulate the region enclosed by outer contours minus holes.

    Every output edge is at most ``max_edge`` long; interior Steiner
    points come from longest-edge bisection, so the mesh stays
    conforming and the area is exactly that of the contours.
    """
    if not max_edge > 0:
        raise ValueError(f"max_edge must be positive, got {max_edge!r}")
    v, t = constrained_triangulation(contours)
    v, t = refine_to_edge_length(v, t, max_edge)
    return TriangleMesh(v.reshape(-1, 2), t)
