"""
Layer slicing for rapid prototyping: section each cell, mesh the
section, re-sample the material field at the mesh nodes and write the
stack as JSON (plus optional per-layer SVG previews).
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ExportError, HetObjError
from .mesh import Contour2D, Plane, TriangleMesh
from .regions import evaluate_in_cell, evaluate_points
from .section import intersect_mesh_plane, triangulate_region
from .visualization import ColorMap, map_colors

DIGITS = 9


@dataclass(frozen=True, eq=False)
class Slice:
    index: int
    z: float
    contours: tuple
    mesh2d: TriangleMesh
    node_compositions: np.ndarray
    node_colors: np.ndarray
    triangle_colors: np.ndarray = None

    @property
    def node_positions(self):
        """Mesh nodes lifted to 3D at the section height."""
        uv = self.mesh2d.vertices
        return np.column_stack([uv[:, 0], uv[:, 1], np.full(len(uv), self.z)])

    @property
    def area(self):
        return self.mesh2d.area


@dataclass(frozen=True, eq=False)
class SliceStack:
    layer_thickness: float
    slices: tuple
    material_names: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.slices)


def layer_heights(z_min, z_max, thickness, anchor=None):
    """
    Mid-layer section heights covering ``[z_min, z_max]``.

    Without ``anchor`` layer ``i`` sits at ``z_min + (i + 0.5) * thickness``.
    With an absolute ``anchor`` the layer grid is ``anchor + (i + 0.5) *
    thickness`` and indices count from the anchor.

    Returns a list of ``(index, z)``.
    """
    if not thickness > 0:
        raise ValueError(f"thickness must be positive, got {thickness!r}")
    if anchor is None:
        n = max(0, math.ceil((z_max - z_min) / thickness - 1e-9))
        return [(i, z_min + (i + 0.5) * thickness) for i in range(n)]
    first = math.floor((z_min - anchor) / thickness + 1e-9)
    last = math.ceil((z_max - anchor) / thickness - 1e-9)
    return [(i, anchor + (i + 0.5) * thickness) for i in range(first, last)]


def _slice_layer(obj, index, z, max_edge, cmap):
    plane = Plane((0.0, 0.0, z), (0.0, 0.0, 1.0))
    contours, verts, tris, tri_comps = [], [], [], []
    base = 0
    for cell in obj.leaf_cells:
        loops = intersect_mesh_plane(cell.geometry, plane)
        if not loops:
            continue
        m = triangulate_region(loops, max_edge)
        contours.extend(loops)
        verts.append(m.vertices)
        tris.append(m.triangles + base)
        base += len(m.vertices)
        # centroids are interior to this cell's section
        centroids = m.vertices[m.triangles].mean(axis=1)
        centroids = np.column_stack([centroids, np.full(len(centroids), z)])
        tri_comps.append(evaluate_in_cell(obj, cell.id, centroids))
    if not contours:
        return None
    mesh2d = TriangleMesh(np.vstack(verts), np.vstack(tris))
    nodes = np.column_stack([mesh2d.vertices, np.full(len(mesh2d.vertices), z)])
    # slice nodes are unique points: the evaluation cache would only add overhead
    comps = evaluate_points(obj, nodes, use_cache=False)
    tri_colors = map_colors(np.vstack(tri_comps), cmap)
    return Slice(index, z, tuple(contours), mesh2d, comps, map_colors(comps, cmap), tri_colors)


def generate_slices(obj, thickness, max_edge, cmap=None, anchor=None, workers=1):
    """
    Slice a heterogeneous object into uniform layers.

    For every mid-layer plane each cell is sectioned, the section is
    meshed with edges no longer than ``max_edge`` and the composition
    is evaluated at every mesh node lifted back to the plane height.
    Planes that miss the object produce no slice; indices of the others
    are kept. Layers may run on ``workers`` threads; the result does not
    depend on scheduling.
    """
    if not max_edge > 0:
        raise ValueError(f"max_edge must be positive, got {max_edge!r}")
    cmap = cmap or ColorMap.for_space(obj.space)
    lo, hi = obj.bounds
    layers = layer_heights(float(lo[2]), float(hi[2]), thickness, anchor)

    def run(layer):
        index, z = layer
        try:
            return _slice_layer(obj, index, z, max_edge, cmap)
        except HetObjError as exc:
            raise type(exc)(f"layer {index} (z={z:.9g}): {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, layers))
    else:
        results = [run(layer) for layer in layers]
    slices = tuple(s for s in results if s is not None)
    return SliceStack(float(thickness), slices, tuple(obj.space.names))


# ---------------------------------------------------------------------------
# export


def _r(a):
    return np.round(np.asarray(a, dtype=np.float64), DIGITS).tolist()


def stack_to_dict(stack):
    return {
        "layer_thickness": round(stack.layer_thickness, DIGITS),
        "material_names": list(stack.material_names),
        "slices": [
            {
                "index": s.index,
                "z": round(s.z, DIGITS),
                "contours": [_r(c.points) for c in s.contours],
                "triangles": s.mesh2d.triangles.tolist(),
                "node_positions": _r(s.node_positions),
                "node_compositions": _r(s.node_compositions),
                "node_colors": np.asarray(s.node_colors).tolist(),
            }
            for s in stack.slices
        ],
    }


def export_slice_json(stack, destination):
    """
    Write the stack as one JSON document; returns bytes written.

    Scalars carry 9 decimal digits; no timestamps are emitted so equal
    stacks give byte-identical files.
    """
    data = json.dumps(stack_to_dict(stack), separators=(",", ":")) + "\n"
    raw = data.encode()
    if hasattr(destination, "write"):
        destination.write(data)
        return len(raw)
    path = Path(destination)
    try:
        path.write_bytes(raw)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return len(raw)


def load_slice_json(source):
    """Parse a file written by :func:`export_slice_json` back into a stack."""
    try:
        if hasattr(source, "read"):
            doc = json.load(source)
        else:
            doc = json.loads(Path(source).read_text())
    except OSError as exc:
        raise ExportError(f"cannot read {source}: {exc}") from exc
    slices = []
    for s in doc["slices"]:
        pos = np.asarray(s["node_positions"], dtype=np.float64).reshape(-1, 3)
        mesh2d = TriangleMesh(pos[:, :2], np.asarray(s["triangles"], dtype=np.int64))
        slices.append(Slice(
            int(s["index"]), float(s["z"]),
            tuple(Contour2D(c) for c in s["contours"]),
            mesh2d,
            np.asarray(s["node_compositions"], dtype=np.float64).reshape(len(pos), -1),
            np.asarray(s["node_colors"], dtype=np.uint8).reshape(-1, 3),
        ))
    return SliceStack(float(doc["layer_thickness"]), tuple(slices), tuple(doc["material_names"]))


def export_slice_svg(slc, destination):
    """
    SVG preview of one slice: every triangle as a flat polygon filled
    with the color evaluated at its centroid. Units are mm; the view box
    is the slice bounding box plus a 5% margin. SVG's y axis points
    down, so the preview is mirrored top to bottom.
    """
    uv = slc.mesh2d.vertices
    lo, hi = uv.min(axis=0), uv.max(axis=0)
    size = hi - lo
    margin = 0.05 * np.where(size > 0, size, max(size.max(), 1.0))
    x0, y0 = lo - margin
    w, h = size + 2 * margin
    colors = slc.triangle_colors if slc.triangle_colors is not None else (
        slc.node_colors[slc.mesh2d.triangles].mean(axis=1).round().astype(np.uint8))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.9g}mm" height="{h:.9g}mm" '
        f'viewBox="{x0:.9g} {y0:.9g} {w:.9g} {h:.9g}">',
        f"<title>slice {slc.index} z={slc.z:.9g}</title>",
    ]
    for tri, col in zip(slc.mesh2d.triangles, colors):
        pts = " ".join(f"{uv[i, 0]:.9g},{uv[i, 1]:.9g}" for i in tri)
        out.append(f'<polygon points="{pts}" fill="#{col[0]:02x}{col[1]:02x}{col[2]:02x}"/>')
    out.append("</svg>")
    data = "\n".join(out) + "\n"
    if hasattr(destination, "write"):
        destination.write(data)
        return len(data.encode())
    path = Path(destination)
    try:
        path.write_bytes(data.encode())
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return len(data.encode())
