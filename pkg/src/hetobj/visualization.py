"""
Boundary visualization: adaptive sub-faceting of cell boundaries by
material variation, composition-to-color mapping and colored PLY export.
"""
from __future__ import annotations

import colorsys
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ExportError, ShapeError
from .mesh import TriangleMesh, mesh_edges, read_ply_data, split_marked_edges, subdivide_mesh
from .regions import evaluate_in_cell

#: adaptive splitting depth cap (rounds beyond the base subdivision)
DEPTH_CAP = 6


@dataclass(frozen=True, eq=False)
class ColorMap:
    """One display color per primary material, blended in RGB or HLS."""

    anchors: np.ndarray
    mode: str = "rgb"

    def __post_init__(self):
        a = np.asarray(self.anchors, dtype=np.int64).reshape(-1, 3)
        if (a < 0).any() or (a > 255).any():
            raise ValueError("color anchors must be 8-bit RGB triples")
        mode = self.mode.lower()
        if mode not in ("rgb", "hls"):
            raise ValueError(f"color mode must be 'rgb' or 'hls', got {self.mode!r}")
        object.__setattr__(self, "anchors", a)
        object.__setattr__(self, "mode", mode)

    @classmethod
    def for_space(cls, space, mode="rgb"):
        return cls(space.colors(), mode)

    @property
    def k(self):
        return len(self.anchors)


def _round_half_up(x):
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def map_colors(compositions, cmap):
    """Vectorized :func:`map_color`: (n, k) compositions to (n, 3) uint8."""
    v = np.asarray(compositions, dtype=np.float64)
    v = v.reshape(0, cmap.k) if v.size == 0 else np.atleast_2d(v)
    if v.shape[1] != cmap.k:
        raise ShapeError(f"composition has {v.shape[1]} fractions, color map has {cmap.k}")
    anchors = cmap.anchors.astype(np.float64)
    if cmap.mode == "rgb":
        acc = v[:, :1] * anchors[0]
        for r in range(1, cmap.k):
            acc = acc + v[:, r:r + 1] * anchors[r]
        return _round_half_up(acc)

    hls = np.array([colorsys.rgb_to_hls(*(anchors[r] / 255.0)) for r in range(cmap.k)])
    # unwrap hues around the first anchor: pairwise blends take the short arc
    hue = hls[:, 0].copy()
    delta = (hue - hue[0] + 0.5) % 1.0 - 0.5
    hue = hue[0] + delta
    h = (v @ hue) % 1.0
    light = v @ hls[:, 1]
    sat = v @ hls[:, 2]
    rgb = np.array([colorsys.hls_to_rgb(a, b, c) for a, b, c in zip(h, light, sat)]).reshape(-1, 3)
    return _round_half_up(rgb * 255.0)


def map_color(v, cmap):
    """
    Display color of one composition vector.

    RGB mode takes the composition-weighted mix of the anchor colors,
    rounded half-up per channel. HLS mode mixes lightness and saturation
    linearly and hue along the shorter arc.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (cmap.k,):
        raise ShapeError(f"composition has {v.size} fractions, color map has {cmap.k}")
    return tuple(int(c) for c in map_colors(v[None, :], cmap)[0])


@dataclass(frozen=True, eq=False)
class ColoredMesh:
    mesh: TriangleMesh
    vertex_colors: np.ndarray
    vertex_compositions: np.ndarray = None
    adaptive_splits: int = 0
    cap_hits: int = 0

    def __post_init__(self):
        n = len(self.mesh.vertices)
        c = np.asarray(self.vertex_colors, dtype=np.uint8).reshape(-1, 3)
        if len(c) != n:
            raise ShapeError(f"{len(c)} colors for {n} vertices")
        object.__setattr__(self, "vertex_colors", c)
        if self.vertex_compositions is not None:
            comp = np.asarray(self.vertex_compositions, dtype=np.float64)
            if len(comp) != n:
                raise ShapeError(f"{len(comp)} compositions for {n} vertices")
            object.__setattr__(self, "vertex_compositions", comp)


def composition_span(compositions, triangles):
    """Per-triangle max over materials of the corner composition range."""
    c = compositions[triangles]
    return (c.max(axis=1) - c.min(axis=1)).max(axis=-1)


def _facet_cell(obj, cell, base_levels, threshold, memoize, depth_cap):
    mesh = cell.geometry
    if base_levels:
        mesh = subdivide_mesh(mesh, base_levels)
    v, t, feats = mesh.vertices, mesh.triangles, mesh.feature_edges

    def evaluate(points):
        return evaluate_in_cell(obj, cell.id, points)

    def corner_compositions(v, t):
        if memoize:
            return comps[t]
        return evaluate(v[t.reshape(-1)]).reshape(len(t), 3, -1)

    comps = evaluate(v) if memoize else None
    depth = np.zeros(len(t), dtype=np.int64)
    splits = 0
    while True:
        c = corner_compositions(v, t)
        span = (c.max(axis=1) - c.min(axis=1)).max(axis=-1)
        eligible = (span > threshold) & (depth < depth_cap)
        if not eligible.any():
            break
        edges, tri_edge = mesh_edges(t)
        marked = np.zeros(len(edges), dtype=bool)
        marked[tri_edge[eligible].ravel()] = True
        n_old = len(v)
        v, t, parent, feats = split_marked_edges(v, t, marked, feats)
        children = np.bincount(parent, minlength=len(depth))
        splits += int((children > 1).sum())
        depth = depth[parent] + (children[parent] > 1)
        if memoize:
            comps = np.vstack([comps, evaluate(v[n_old:])])
    cap_hits = int(((span > threshold) & (depth >= depth_cap)).sum())
    if not memoize:
        comps = np.empty((len(v), obj.space.k))
        comps[t.reshape(-1)] = corner_compositions(v, t).reshape(-1, obj.space.k)
    return TriangleMesh(v, t, feats), comps, splits, cap_hits


def facet_boundary(obj, base_levels=1, gradient_threshold=0.05, cmap=None,
                   memoize=True, depth_cap=DEPTH_CAP):
    """
    Colored boundary mesh of every leaf cell.

    Each cell boundary is midpoint-subdivided ``base_levels`` times, then
    triangles whose corner compositions differ by more than
    ``gradient_threshold`` (max-norm) are split further, conformingly,
    until they do not or ``depth_cap`` rounds have touched them.
    With ``memoize`` each vertex is evaluated once; without it every
    triangle corner is evaluated separately (same result, slower).

    Returns
    -------
    ColoredMesh
      With ``adaptive_splits`` (triangles split beyond the base level)
      and ``cap_hits`` (triangles still above threshold at the cap).
    """
    if not gradient_threshold > 0:
        raise ValueError("gradient_threshold must be positive")
    if int(base_levels) != base_levels or base_levels < 0:
        raise ValueError("base_levels must be a non-negative integer")
    cmap = cmap or ColorMap.for_space(obj.space)
    verts, tris, comps, feats = [], [], [], set()
    splits = caps = 0
    base = 0
    for cell in obj.leaf_cells:
        m, c, s, h = _facet_cell(obj, cell, int(base_levels), gradient_threshold, memoize, depth_cap)
        verts.append(m.vertices)
        tris.append(m.triangles + base)
        comps.append(c)
        feats.update((a + base, b + base) for a, b in m.feature_edges)
        base += len(m.vertices)
        splits += s
        caps += h
    mesh = TriangleMesh(np.vstack(verts), np.vstack(tris), frozenset(feats))
    comps = np.vstack(comps)
    return ColoredMesh(mesh, map_colors(comps, cmap), comps, splits, caps)


def _ply_text(cm):
    v, t, c = cm.mesh.vertices, cm.mesh.triangles, cm.vertex_colors
    out = io.StringIO()
    out.write("ply\nformat ascii 1.0\n")
    out.write(f"element vertex {len(v)}\n")
    out.write("property float x\nproperty float y\nproperty float z\n")
    out.write("property uchar red\nproperty uchar green\nproperty uchar blue\n")
    out.write(f"element face {len(t)}\n")
    out.write("property list uchar int vertex_indices\nend_header\n")
    for p, col in zip(v.tolist(), c.tolist()):
        out.write(f"{p[0]:.9g} {p[1]:.9g} {p[2]:.9g} {col[0]} {col[1]} {col[2]}\n")
    for a, b, d in t.tolist():
        out.write(f"3 {a} {b} {d}\n")
    return out.getvalue()


def export_colored_mesh(cm, destination):
    """
    Write an ASCII PLY with per-vertex colors.

    ``destination`` is a path or a writable text stream. Returns the
    number of bytes written.
    """
    data = _ply_text(cm)
    if hasattr(destination, "write"):
        destination.write(data)
        return len(data.encode())
    path = Path(destination)
    try:
        path.write_bytes(data.encode())
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return len(data.encode())


def read_colored_ply(path):
    """Load a PLY written by :func:`export_colored_mesh`."""
    vertex, faces = read_ply_data(path)
    if not vertex:
        return ColoredMesh(TriangleMesh(np.zeros((0, 3)), faces), np.zeros((0, 3)))
    v = np.stack([vertex["x"], vertex["y"], vertex["z"]], axis=1)
    if "red" in vertex:
        c = np.stack([vertex["red"], vertex["green"], vertex["blue"]], axis=1)
    else:
        c = np.zeros((len(v), 3))
    return ColoredMesh(TriangleMesh(v, faces), c.astype(np.uint8))
