"""
Model spec loading.

A model spec is a YAML (or JSON) document::

    units: mm
    materials:
      - {name: steel, color: [255, 0, 0], properties: {E: 2.0e+11}}
      - {name: aluminium, color: [0, 0, 255], properties: {E: 7.0e+10}}
    cells:
      - {id: slab, mesh: slab.stl}            # path relative to the spec
      # or {id: slab, box: {min: [0,0,0], max: [20,20,10]}}
    regions:
      - cell: slab
        type: gradient
        start: {plane: {origin: [0,0,0], normal: [0,0,1]}}
        end:   {plane: {origin: [0,0,10], normal: [0,0,1]}}
        mcs: [1, 0]
        mcf: [0, 1]
        function: {kind: linear, margin: 0}

Offset regions list ``contours`` (each ``{points, composition}``),
``direction`` and ``subdivisions``; hybrid regions list ``patches``
(each ``{ref, composition, weight}``). References are one of ``point``,
``axis``, ``polyline``, ``plane`` or ``surface``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .errors import AmbiguityError, ExportError, GeometryError, HetObjError, SpecError
from .materials import CompositionFunction, Material, MaterialSpace, as_composition
from .mesh import (
    Plane,
    Polyline,
    TriangleMesh,
    box_mesh,
    extrude_polygon,
    icosphere,
    read_mesh,
    regular_polygon,
)
from .references import AxisRef, PlaneRef, PointRef, PolylineRef, SurfaceRef
from .regions import Cell, GradientRegion, HeterogeneousObject, HybridRegion, OffsetRegion


def _fail(element, message, rule=None):
    raise SpecError(f"{element}: {message}", element=element, rule=rule)


def _get(mapping, key, element, kind=None):
    if not isinstance(mapping, dict):
        _fail(element, "expected a mapping", "schema")
    if key not in mapping:
        _fail(element, f"missing required field {key!r}", "schema")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        _fail(f"{element}.{key}", f"expected {kind.__name__}", "schema")
    return value


def _floats(value, element, shape=None):
    try:
        a = np.array(value, dtype=np.float64)
    except (TypeError, ValueError):
        _fail(element, "expected numbers", "schema")
    if shape is not None and a.shape != shape:
        _fail(element, f"expected shape {shape}, got {a.shape}", "schema")
    if not np.isfinite(a).all():
        _fail(element, "values must be finite", "schema")
    return a


def _number(value, element):
    try:
        x = float(value)
    except (TypeError, ValueError):
        _fail(element, f"expected a number, got {value!r}", "schema")
    if not np.isfinite(x):
        _fail(element, "value must be finite", "schema")
    return x


def _wrap(element, fn, *args, **kwargs):
    """Call a constructor, prefixing any domain error with the element name."""
    try:
        return fn(*args, **kwargs)
    except SpecError:
        raise
    except HetObjError as exc:
        raise type(exc)(f"{element}: {exc}") from exc


def _composition(value, element, k):
    v = _floats(value, element)
    return _wrap(element, as_composition, v, k)


def _materials(doc):
    items = _get(doc, "materials", "materials", list)
    mats = []
    for n, item in enumerate(items):
        el = f"materials[{n}]"
        name = str(_get(item, "name", el))
        color = _floats(item.get("color", (128, 128, 128)), f"{el}.color", (3,))
        if (color < 0).any() or (color > 255).any() or (color != np.round(color)).any():
            _fail(f"{el}.color", "color must be three integers in 0..255", "color")
        props = item.get("properties", {}) or {}
        if not isinstance(props, dict):
            _fail(f"{el}.properties", "expected a mapping", "schema")
        values, units = {}, {}
        for key, val in props.items():
            if isinstance(val, dict):
                units[key] = str(val.get("unit", ""))
                val = val.get("value")
            values[str(key)] = _number(val, f"{el}.properties.{key}")
        mats.append(Material(name, values, units, tuple(int(c) for c in color)))
    return _wrap("materials", MaterialSpace, tuple(mats))


def _cell_mesh(item, el, base):
    if "mesh" in item:
        path = base / str(item["mesh"])
        if not path.is_file():
            raise ExportError(f"{el}.mesh: mesh file {str(path)!r} not found")
        return _wrap(f"{el}.mesh", read_mesh, path)
    if "box" in item:
        box = item["box"]
        return box_mesh(_floats(_get(box, "min", f"{el}.box"), f"{el}.box.min", (3,)),
                        _floats(_get(box, "max", f"{el}.box"), f"{el}.box.max", (3,)))
    if "cylinder" in item:
        c = item["cylinder"]
        r = _number(_get(c, "radius", f"{el}.cylinder"), f"{el}.cylinder.radius")
        h = _number(_get(c, "height", f"{el}.cylinder"), f"{el}.cylinder.height")
        seg = int(c.get("segments", 64))
        center = _floats(c.get("center", (0, 0)), f"{el}.cylinder.center", (2,))
        return _wrap(el, extrude_polygon, regular_polygon(r, seg, center), h,
                     _number(c.get("z0", 0.0), f"{el}.cylinder.z0"))
    if "prism" in item:
        c = item["prism"]
        poly = _floats(_get(c, "polygon", f"{el}.prism"), f"{el}.prism.polygon")
        h = _number(_get(c, "height", f"{el}.prism"), f"{el}.prism.height")
        return _wrap(el, extrude_polygon, poly, h, _number(c.get("z0", 0.0), f"{el}.prism.z0"))
    if "sphere" in item:
        c = item["sphere"]
        return icosphere(int(c.get("subdivisions", 3)),
                         _number(_get(c, "radius", f"{el}.sphere"), f"{el}.sphere.radius"),
                         _floats(c.get("center", (0, 0, 0)), f"{el}.sphere.center", (3,)))
    _fail(el, "cell needs one of 'mesh', 'box', 'cylinder', 'prism' or 'sphere'", "schema")


def _cells(doc, base):
    cells = []
    for n, item in enumerate(_get(doc, "cells", "cells", list)):
        el = f"cells[{n}]"
        cid = str(_get(item, "id", el))
        mesh = _cell_mesh(item, el, base)
        subs = tuple(str(s) for s in item.get("sub_volumes", ()) or ())
        cells.append(_wrap(f"{el} ({cid})", Cell, cid, mesh, subs))
    return cells


def _reference(item, el, base):
    if not isinstance(item, dict) or len(item) != 1:
        _fail(el, "reference must have exactly one of point/axis/polyline/plane/surface", "schema")
    (kind, value), = item.items()
    if kind == "point":
        return _wrap(el, PointRef, _floats(value, f"{el}.point", (3,)))
    if kind == "axis":
        a = _floats(value, f"{el}.axis", (2, 3))
        return _wrap(el, AxisRef, a[0], a[1])
    if kind == "polyline":
        if isinstance(value, dict):
            pts = _floats(_get(value, "points", f"{el}.polyline"), f"{el}.polyline.points")
            closed = bool(value.get("closed", False))
        else:
            pts, closed = _floats(value, f"{el}.polyline"), False
        return _wrap(el, lambda: PolylineRef(Polyline(pts, closed)))
    if kind == "plane":
        o = _floats(_get(value, "origin", f"{el}.plane"), f"{el}.plane.origin", (3,))
        nrm = _floats(_get(value, "normal", f"{el}.plane"), f"{el}.plane.normal", (3,))
        return _wrap(el, lambda: PlaneRef(Plane(o, nrm)))
    if kind == "surface":
        if isinstance(value, str):
            path = base / value
            if not path.is_file():
                raise ExportError(f"{el}.surface: mesh file {str(path)!r} not found")
            return _wrap(el, lambda: SurfaceRef(read_mesh(path)))
        v = _floats(_get(value, "vertices", f"{el}.surface"), f"{el}.surface.vertices")
        t = _floats(_get(value, "triangles", f"{el}.surface"), f"{el}.surface.triangles")
        return _wrap(el, lambda: SurfaceRef(TriangleMesh(v, t.astype(np.int64))))
    _fail(el, f"unknown reference kind {kind!r}", "schema")


def _region(item, n, k, base):
    el = f"regions[{n}]"
    cell = str(_get(item, "cell", el))
    kind = item.get("type", "gradient")
    if kind == "gradient":
        start = _reference(_get(item, "start", el), f"{el}.start", base)
        end = _reference(_get(item, "end", el), f"{el}.end", base)
        mcs = _composition(_get(item, "mcs", el), f"{el}.mcs", k)
        mcf = _composition(_get(item, "mcf", el), f"{el}.mcf", k)
        fdef = item.get("function", {}) or {}
        fn = _wrap(f"{el}.function", CompositionFunction, str(fdef.get("kind", "linear")),
                   _number(fdef.get("param", 1.0), f"{el}.function.param"),
                   _number(fdef.get("margin", 0.0), f"{el}.function.margin"))
        return _wrap(el, GradientRegion, cell, start, end, mcs, mcf, fn)
    if kind == "offset":
        contours, comps = [], []
        for j, c in enumerate(_get(item, "contours", el, list)):
            cel = f"{el}.contours[{j}]"
            pts = _floats(_get(c, "points", cel), f"{cel}.points")
            contours.append(_wrap(cel, Polyline, pts, True))
            comps.append(_composition(_get(c, "composition", cel), f"{cel}.composition", k))
        subs = item.get("subdivisions", 1)
        return _wrap(el, OffsetRegion, cell, tuple(contours), tuple(comps),
                     str(item.get("direction", "inwards")), subs)
    if kind == "hybrid":
        refs, comps, weights = [], [], []
        for j, p in enumerate(_get(item, "patches", el, list)):
            pel = f"{el}.patches[{j}]"
            refs.append(_reference(_get(p, "ref", pel), f"{pel}.ref", base))
            comps.append(_composition(_get(p, "composition", pel), f"{pel}.composition", k))
            weights.append(_number(p.get("weight", 1.0), f"{pel}.weight"))
        return _wrap(el, HybridRegion, cell, tuple(refs), tuple(comps), tuple(weights))
    _fail(f"{el}.type", f"unknown region type {kind!r}", "schema")


def check_cells(obj):
    """
    Eager geometric checks: leaf cells must not overlap and sub-volumes
    must lie inside their parent cell.
    """
    leaves = obj.leaf_cells
    for a, ca in enumerate(leaves):
        ga = ca.geometry
        scale = float(np.ptp(ga.vertices, axis=0).max())
        centroids = ga.vertices[ga.triangles].mean(axis=1)
        probes = centroids - ga.face_normals * (1e-6 * scale)
        for b, cb in enumerate(leaves):
            if a == b:
                continue
            lo, hi = cb.geometry.bounds
            if (ga.bounds[1] < lo).any() or (ga.bounds[0] > hi).any():
                continue
            if cb.geometry.locator.contains(probes).any():
                raise AmbiguityError(f"cells {ca.id!r} and {cb.id!r} overlap")
    for parent in obj.cells:
        for child_id in parent.sub_volumes:
            child = obj.cell(child_id)
            loc = parent.geometry.locator
            v = child.geometry.vertices
            ok = loc.contains(v) | loc.near_surface(v, 1e-7)
            if not ok.all():
                raise GeometryError(
                    f"sub-volume {child_id!r} is not nested within cell {parent.id!r}"
                )


def load_model_spec(path):
    """
    Parse and fully validate a model spec file into a
    :class:`HeterogeneousObject`.

    Raises
    ------
    SpecError
      Parse errors (with line and column) and schema violations.
    ExportError
      Unreadable spec or missing mesh file.
    HetObjError
      Any model invariant violation, message prefixed with the element.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise SpecError(f"{path}: parse error at {where}: {getattr(exc, 'problem', exc)}",
                        element=where, rule="syntax") from exc
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: top level must be a mapping", rule="schema")
    units = doc.get("units", "mm")
    if units != "mm":
        _fail("units", f"units must be 'mm', got {units!r}", "units")
    base = path.parent
    space = _materials(doc)
    cells = _cells(doc, base)
    regions = [_region(item, n, space.k, base)
               for n, item in enumerate(_get(doc, "regions", "regions", list))]
    obj = _wrap("model", HeterogeneousObject, space, tuple(cells), tuple(regions))
    check_cells(obj)
    return obj
