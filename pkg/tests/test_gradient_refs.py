from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from conftest import interior_points
from hetobj import demo
from hetobj.errors import (
    AmbiguityError,
    BoundsError,
    CompositionError,
    DegenerateRegionError,
    GeometryError,
    ModelError,
    OutsideObjectError,
    ShapeError,
)
from hetobj.materials import CompositionFunction, Material, MaterialSpace
from hetobj.mesh import Plane, Polyline, box_mesh, icosphere
from hetobj.references import AxisRef, PlaneRef, PointRef, SurfaceRef
from hetobj.regions import (
    Cell,
    GradientRegion,
    HeterogeneousObject,
    HybridRegion,
    OffsetRegion,
    evaluate_in_cell,
    evaluate_point,
    evaluate_points,
    hybrid_evaluate,
    offset_subdivide,
    retarget_references,
    step_width,
)


def square(h, z=0.0):
    return Polyline([(-h, -h, z), (h, -h, z), (h, h, z), (-h, h, z)], True)


def two_mats():
    return MaterialSpace((Material("a", {"E": 2.0}), Material("b", {"E": 1.0})))


# --- gradient regions and objects -------------------------------------------


def test_slab_midplane(slab):
    assert evaluate_point(slab, (10, 10, 5)).tolist() == [0.5, 0.5]


def test_slab_start_face_gives_mcf(slab):
    # f = 0 at the start reference yields Mcf
    assert evaluate_point(slab, (3, 4, 0)).tolist() == [0.0, 1.0]
    assert evaluate_point(slab, (3, 4, 10)).tolist() == [1.0, 0.0]


def test_margin_gives_mcf_exactly():
    obj = demo.linear_slab(fn=CompositionFunction("exponential", 2.0, 0.2),
                           mcs=(0.7, 0.3), mcf=(0.1, 0.9))
    for z in (0.0, 0.5, 1.9, 2.0):
        assert evaluate_point(obj, (5, 5, z)).tolist() == [0.1, 0.9]
    for z in (8.0, 9.3, 10.0):
        assert evaluate_point(obj, (5, 5, z)).tolist() == [0.7, 0.3]


def test_slab_linear_in_height(slab):
    z = np.linspace(0.25, 9.75, 39)
    pts = np.column_stack([np.full_like(z, 7.0), np.full_like(z, 3.0), z])
    v = evaluate_points(slab, pts)
    assert np.allclose(v[:, 0], z / 10, atol=1e-15)


def test_outside_raises(slab):
    with pytest.raises(OutsideObjectError):
        evaluate_point(slab, (10, 10, 10.5))
    with pytest.raises(OutsideObjectError):
        evaluate_points(slab, [(1, 1, 1), (-1, 1, 1)])


def test_boundary_points_are_inside(slab):
    corners = [(0, 0, 0), (20, 20, 10), (20, 0, 5), (10, 20, 10)]
    assert evaluate_points(slab, corners).shape == (4, 2)


def test_overlap_raises_naming_cells():
    a = Cell("a", box_mesh((0, 0, 0), (2, 2, 2)))
    b = Cell("b", box_mesh((1, 1, 1), (3, 3, 3)))
    reg = lambda c: GradientRegion(c, PointRef((0, 0, 0)), PointRef((3, 3, 3)), [1, 0], [0, 1])
    obj = HeterogeneousObject(two_mats(), (a, b), (reg("a"), reg("b")))
    assert evaluate_point(obj, (0.5, 0.5, 0.5)).shape == (2,)
    with pytest.raises(AmbiguityError, match="'a'.*'b'"):
        evaluate_point(obj, (1.5, 1.5, 1.5))


def test_stacked_shared_face(stacked):
    # points on the shared face belong to exactly one cell; the lower one here
    p = np.array([[2.0, 3.0, 5.0], [7.5, 1.25, 5.0]])
    lower = evaluate_in_cell(stacked, "lower", p)
    assert np.array_equal(evaluate_points(stacked, p), lower)
    assert np.array_equal(evaluate_point(stacked, (2, 2, 7)),
                          evaluate_in_cell(stacked, "upper", [(2, 2, 7)])[0])


def test_object_validation():
    c = Cell("c", box_mesh())
    reg = GradientRegion("c", PointRef((0, 0, 0)), PointRef((1, 1, 1)), [1, 0], [0, 1])
    with pytest.raises(ModelError, match="no region"):
        HeterogeneousObject(two_mats(), (c,), ())
    with pytest.raises(AmbiguityError, match="more than one region"):
        HeterogeneousObject(two_mats(), (c,), (reg, reg))
    with pytest.raises(AmbiguityError, match="duplicate cell"):
        HeterogeneousObject(two_mats(), (c, c), (reg,))
    with pytest.raises(ModelError, match="unknown cell"):
        HeterogeneousObject(two_mats(), (c,), (reg, GradientRegion(
            "zz", PointRef((0, 0, 0)), PointRef((1, 1, 1)), [1, 0], [0, 1])))
    three = GradientRegion("c", PointRef((0, 0, 0)), PointRef((1, 1, 1)), [1, 0, 0], [0, 1, 0])
    with pytest.raises(ShapeError):
        HeterogeneousObject(two_mats(), (c,), (three,))
    with pytest.raises(GeometryError, match="watertight"):
        from hetobj.mesh import TriangleMesh
        Cell("open", TriangleMesh(box_mesh().vertices, box_mesh().triangles[2:]))


def test_sub_volumes_only_leaves_bound():
    parent = Cell("p", box_mesh((0, 0, 0), (2, 1, 1)), ("l", "r"))
    left = Cell("l", box_mesh((0, 0, 0), (1, 1, 1)))
    right = Cell("r", box_mesh((1, 0, 0), (2, 1, 1)))
    reg = lambda c: GradientRegion(c, PointRef((0, 0, 0)), PointRef((2, 1, 1)), [1, 0], [0, 1])
    obj = HeterogeneousObject(two_mats(), (parent, left, right), (reg("l"), reg("r")))
    assert [c.id for c in obj.leaf_cells] == ["l", "r"]
    assert evaluate_point(obj, (1.5, 0.5, 0.5)).shape == (2,)
    with pytest.raises(ModelError, match="sub-volumes"):
        HeterogeneousObject(two_mats(), (parent, left, right), (reg("p"), reg("l"), reg("r")))
    with pytest.raises(ModelError, match="unknown sub-volume"):
        HeterogeneousObject(two_mats(), (Cell("p", box_mesh(), ("x",)),), ())


def test_region_composition_validation():
    with pytest.raises(CompositionError, match="Mcs sum 0.9"):
        GradientRegion("c", PointRef((0, 0, 0)), PointRef((1, 1, 1)), [0.6, 0.3], [0, 1])
    with pytest.raises(ShapeError):
        GradientRegion("c", PointRef((0, 0, 0)), PointRef((1, 1, 1)), [1, 0], [0, 0, 1])


@pytest.mark.parametrize("name", ["linear_slab", "offset_disk", "hybrid_wedge"])
def test_partition_of_unity(name, rng):
    obj = getattr(demo, name)()
    v = evaluate_points(obj, interior_points(obj, 3000, rng))
    assert np.abs(v.sum(axis=1) - 1).max() <= 1e-9
    assert v.min() >= -1e-12 and v.max() <= 1 + 1e-12


@pytest.mark.parametrize("name", ["linear_slab", "offset_disk", "hybrid_wedge", "stacked_boxes"])
def test_cache_invisible(name, rng):
    obj = getattr(demo, name)()
    pts = interior_points(obj, 500, rng)
    cold = evaluate_points(obj, pts, use_cache=False)
    warm1 = evaluate_points(obj, pts)
    warm2 = evaluate_points(obj, pts[::-1])[::-1]
    assert np.array_equal(cold, warm1) and np.array_equal(cold, warm2)
    assert obj.cache.hits >= len(pts)
    for j in range(0, len(pts), 50):
        assert np.array_equal(evaluate_point(obj, pts[j], use_cache=False), cold[j])


def test_concurrent_evaluation_deterministic(disk, rng):
    pts = interior_points(disk, 2000, rng)
    expect = evaluate_points(disk, pts, use_cache=False)
    chunks = np.array_split(pts, 16)
    with ThreadPoolExecutor(8) as pool:
        got = list(pool.map(lambda c: evaluate_points(disk, c), chunks + chunks))
    assert np.array_equal(np.vstack(got[:16]), expect)
    assert np.array_equal(np.vstack(got[16:]), expect)


# --- offset regions ---------------------------------------------------------------


def offset(direction="inwards", subs=4, comps=((1.0, 0.0), (0.0, 1.0))):
    return OffsetRegion("c", (square(4), square(2)), tuple(np.array(c) for c in comps),
                        direction, subs)


def test_offset_subdivide_examples():
    inw = offset()
    assert np.array_equal(offset_subdivide(inw, 1, 0), [0.0, 1.0])
    assert np.array_equal(offset_subdivide(inw, 1, 1), [0.25, 0.75])
    assert np.array_equal(offset_subdivide(offset("outwards"), 1, 1), [0.75, 0.25])
    assert np.array_equal(offset_subdivide(offset("outwards"), 1, 0), [1.0, 0.0])


@pytest.mark.parametrize("rm", [1, 2, 3, 4, 7, 8])
def test_offset_endpoints(rm):
    ma, mb = np.array([0.625, 0.375]), np.array([0.125, 0.875])
    inw = offset("inwards", rm, (ma, mb))
    out = offset("outwards", rm, (ma, mb))
    assert np.abs(offset_subdivide(inw, 1, 0) - mb).max() <= 1e-15
    assert np.abs(offset_subdivide(inw, 1, rm) - ma).max() <= 1e-15
    assert np.abs(offset_subdivide(out, 1, 0) - ma).max() <= 1e-15
    assert np.abs(offset_subdivide(out, 1, rm) - mb).max() <= 1e-15


def test_offset_bounds():
    reg = offset()
    for r, i in [(0, 0), (2, 0), (1, 5), (1, -1), (1, 1.5)]:
        with pytest.raises(BoundsError):
            offset_subdivide(reg, r, i)
    with pytest.raises(IndexError):
        step_width(reg, 2)


def test_step_width_examples():
    assert np.array_equal(step_width(offset(), 1), [0.25, -0.25])
    assert np.array_equal(step_width(offset("outwards"), 1), [-0.25, 0.25])
    w = step_width(offset(subs=1, comps=((0.3, 0.7), (0.9, 0.1))), 1)
    assert np.array_equal(w, np.array([0.3, 0.7]) - np.array([0.9, 0.1]))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(1, 12), st.sampled_from(["inwards", "outwards"]),
       st.integers(0, 2**32 - 1))
def test_step_width_constant_and_balanced(k, rm, direction, seed):
    rng = np.random.default_rng(seed)
    reg = offset(direction, rm, (rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))))
    w = step_width(reg, 1)
    levels = np.stack([offset_subdivide(reg, 1, i) for i in range(rm + 1)])
    assert np.abs(np.diff(levels, axis=0) - w).max() <= 1e-12
    assert abs(w.sum()) <= 1e-12


def test_offset_region_validation():
    with pytest.raises(GeometryError, match="not nested"):
        OffsetRegion("c", (square(2), square(4)), ([1, 0], [0, 1]))
    with pytest.raises(GeometryError, match="plane"):
        OffsetRegion("c", (square(4), square(2, z=1.0)), ([1, 0], [0, 1]))
    with pytest.raises(GeometryError):
        OffsetRegion("c", (square(4),), ([1, 0],))
    with pytest.raises(ModelError):
        OffsetRegion("c", (square(4), square(2)), ([1, 0], [0, 1]), "sideways")
    with pytest.raises(ModelError):
        OffsetRegion("c", (square(4), square(2)), ([1, 0], [0, 1]), subdivisions=0)
    with pytest.raises(ShapeError):
        OffsetRegion("c", (square(4), square(2)), ([1, 0], [0, 1], [0.5, 0.5]))


def test_offset_evaluation_profile(disk):
    # on the x axis (a vertex ray of the 64-gons) the outer contour is reached
    # through an edge, (R - r) cos(pi/64) away; the inner one at its vertex, r - R
    c = np.cos(np.pi / 64)
    rims = [(10.0, 1.0), (6.0, 0.5), (2.0, 0.0)]
    for r in (9.99, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 1.0):
        if r <= 2.0:
            expect = 0.0
        else:
            (ro, mo), (ri, mi) = next((a, b) for a, b in zip(rims, rims[1:]) if b[0] <= r)
            d_out, d_in = (ro - r) * c, r - ri
            expect = mo + d_out / (d_out + d_in) * (mi - mo)
        assert abs(evaluate_point(disk, (r, 0.0, 1.0))[0] - expect) <= 1e-12


def test_offset_matches_sub_region_levels(disk):
    reg = disk.region_of("disk")
    # exactly on a contour vertex: distance to that contour is zero
    assert np.allclose(evaluate_point(disk, (6.0, 0.0, 0.5)), reg.compositions[1], atol=1e-15)


def test_offset_continuous(disk, rng):
    pts = interior_points(disk, 2000, rng, margin=1e-3)
    step = rng.normal(size=pts.shape)
    step *= 1e-6 / np.linalg.norm(step, axis=1, keepdims=True)
    a = evaluate_points(disk, pts, use_cache=False)
    b = evaluate_points(disk, pts + step, use_cache=False)
    assert np.abs(a - b).max() < 1e-3


# --- hybrid regions ---------------------------------------------------------------


def test_hybrid_on_patch_is_exact(wedge):
    reg = wedge.region_of("wedge")
    assert np.array_equal(hybrid_evaluate(reg, np.array([0.0, 0.0, 2.0])), reg.compositions[0])
    assert np.array_equal(hybrid_evaluate(reg, np.array([5.0, 5.0, 2.0])), reg.compositions[1])
    assert np.array_equal(hybrid_evaluate(reg, np.array([3.0, 2.0, 0.0])), reg.compositions[2])


def test_hybrid_equidistant_mean():
    reg = HybridRegion("c", (PlaneRef(Plane((0, 0, 0), (0, 0, 1))),
                             PlaneRef(Plane((0, 0, 4), (0, 0, 1)))), ([1, 0], [0.25, 0.75]))
    assert np.array_equal(hybrid_evaluate(reg, np.array([1.0, 2.0, 2.0])), [0.625, 0.375])


def test_hybrid_weights(wedge, rng):
    reg = wedge.region_of("wedge")
    pts = interior_points(wedge, 1000, rng)
    u = reg.blend_weights(pts)
    assert np.abs(u.sum(axis=1) - 1).max() <= 1e-12
    # brute-force recomputation of the weights
    d = np.array([[np.linalg.norm(p[:2]), abs((p[0] + p[1] - 10) / np.sqrt(2)), p[2]] for p in pts])
    inv = np.array(reg.weights) / d
    assert np.allclose(u, inv / inv.sum(axis=1, keepdims=True), rtol=1e-12, atol=1e-15)
    v = hybrid_evaluate(reg, pts)
    assert np.abs(v.sum(axis=1) - 1).max() <= 1e-12


def test_hybrid_continuity(wedge, rng):
    pts = interior_points(wedge, 2000, rng, margin=0.05)
    step = rng.normal(size=pts.shape)
    step *= 1e-6 / np.linalg.norm(step, axis=1, keepdims=True)
    reg = wedge.region_of("wedge")
    assert np.abs(hybrid_evaluate(reg, pts) - hybrid_evaluate(reg, pts + step)).max() < 1e-3


def test_hybrid_validation():
    p = PointRef((0, 0, 0))
    with pytest.raises(GeometryError):
        HybridRegion("c", (p,), ([1, 0],))
    with pytest.raises(ModelError):
        HybridRegion("c", (p, PointRef((1, 0, 0))), ([1, 0], [0, 1]), (1.0, 0.0))
    with pytest.raises(ShapeError):
        HybridRegion("c", (p, PointRef((1, 0, 0))), ([1, 0], [0, 1], [0, 1]))


# --- retargeting and rigid motion -----------------------------------------------------


def test_retarget_same_refs_is_noop(slab, rng):
    reg = slab.region_of("slab")
    same = retarget_references(reg, reg.start_ref, reg.end_ref)
    obj2 = HeterogeneousObject(slab.space, slab.cells, (same,))
    pts = interior_points(slab, 500, rng)
    assert np.array_equal(evaluate_points(slab, pts, False), evaluate_points(obj2, pts, False))


def test_retarget_rejects_coincident(slab):
    reg = slab.region_of("slab")
    with pytest.raises(DegenerateRegionError):
        retarget_references(reg, PointRef((1, 1, 1)), PointRef((1, 1, 1)))


@pytest.mark.parametrize("name", ["linear_slab", "offset_disk", "hybrid_wedge"])
def test_rigid_motion_invariance(name, rng):
    obj = getattr(demo, name)()
    rot = Rotation.from_rotvec([0.3, -1.1, 0.7]).as_matrix()
    shift = np.array([5.0, -2.0, 11.0])
    moved = obj.transformed(rot, shift)
    pts = interior_points(obj, 1000, rng, margin=1e-3)
    a = evaluate_points(obj, pts, use_cache=False)
    b = evaluate_points(moved, pts @ rot.T + shift, use_cache=False)
    assert np.abs(a - b).max() <= 1e-12


def test_retarget_to_point_and_sphere(rng):
    # planes -> centre point and enclosing sphere: iso-sets become spheres
    sphere = icosphere(4, 10.0)
    cell = Cell("ball", icosphere(3, 9.0))
    base = GradientRegion("ball", PlaneRef(Plane((0, 0, -9), (0, 0, 1))),
                          PlaneRef(Plane((0, 0, 9), (0, 0, 1))), [1, 0], [0, 1])
    reg = retarget_references(base, PointRef((0, 0, 0)), SurfaceRef(sphere))
    obj = HeterogeneousObject(two_mats(), (cell,), (reg,))
    v, e = sphere.vertices, sphere.edges
    chord = (10 - np.linalg.norm((v[e[:, 0]] + v[e[:, 1]]) / 2, axis=1)).max()
    for radius in (2.0, 5.0, 7.5):
        dirs = rng.normal(size=(200, 3))
        probes = radius * dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        comp = evaluate_points(obj, probes)
        # exact sphere: s = r / 10; the faceted sphere moves d1 by at most the chord error
        assert np.abs(comp[:, 0] - radius / 10).max() <= chord / 10 * 1.01
        # equal computed coordinate gives equal composition
        d0 = reg.start_ref.distance(probes)
        d1 = reg.end_ref.distance(probes)
        s = d0 / (d0 + d1)
        assert np.array_equal(comp[:, 0], s) or np.allclose(comp[:, 0], s, atol=1e-15, rtol=0)


def test_reference_transform_roundtrip():
    rot = Rotation.from_rotvec([0.2, 0.4, -0.3]).as_matrix()
    ax = AxisRef((0, 0, 0), (0, 0, 5)).transformed(rot, np.ones(3))
    p = rot @ np.array([3.0, 4.0, 1.0]) + 1
    assert ax.distance(p[None])[0] == pytest.approx(5.0, abs=1e-12)
