import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetobj.errors import CompositionError, DomainError, PropertyLookupError, ShapeError
from hetobj.materials import (
    KINDS,
    CompositionFunction,
    Material,
    MaterialSpace,
    as_composition,
    blended_property,
    eval_composition,
    eval_fraction,
    voigt_property,
)

ALL_FNS = [CompositionFunction("linear"), CompositionFunction("power", 2.0),
           CompositionFunction("power", 0.3), CompositionFunction("logarithmic"),
           CompositionFunction("exponential", 4.0), CompositionFunction("exponential", -1.5),
           CompositionFunction("parabolic")]


def space(*values, prop="S"):
    return MaterialSpace(tuple(Material(f"m{j}", {prop: v}) for j, v in enumerate(values)))


# --- material space and compositions ---------------------------------------


def test_space_invariants():
    with pytest.raises(CompositionError):
        MaterialSpace(())
    with pytest.raises(CompositionError, match="duplicate"):
        MaterialSpace((Material("a"), Material("a")))
    with pytest.raises(PropertyLookupError):
        MaterialSpace((Material("a", {"E": 1.0}), Material("b", {"rho": 2.0})))
    s = MaterialSpace((Material("a", {"E": 1.0}), Material("b", {"E": 2.0})))
    assert s.k == 2 and s.names == ["a", "b"] and s.property_names == ["E"]


def test_composition_validation():
    assert as_composition([0.25, 0.75]).tolist() == [0.25, 0.75]
    with pytest.raises(CompositionError, match="composition sum 0.9 ≠ 1"):
        as_composition([0.6, 0.3])
    with pytest.raises(CompositionError):
        as_composition([1.5, -0.5])
    with pytest.raises(ShapeError):
        as_composition([0.5, 0.5], k=3)
    as_composition([0.5, 0.5 + 5e-10])  # within tolerance


# --- grading functions --------------------------------------------------------


def test_function_validation():
    with pytest.raises(DomainError):
        CompositionFunction("cubic")
    with pytest.raises(DomainError):
        CompositionFunction("linear", margin=0.5)
    with pytest.raises(DomainError):
        CompositionFunction("power", 0.0)
    with pytest.raises(DomainError):
        CompositionFunction("exponential", 0.0)
    with pytest.raises(DomainError):
        CompositionFunction("linear", float("inf"))


@pytest.mark.parametrize("kind", KINDS)
def test_clamp_in_margin(kind):
    assert eval_fraction(CompositionFunction(kind, 2.0, 0.2), 0.1) == 0.0
    assert eval_fraction(CompositionFunction(kind, 2.0, 0.2), 0.95) == 1.0


def test_fraction_examples():
    assert eval_fraction(CompositionFunction("linear"), 0.5) == 0.5
    assert eval_fraction(CompositionFunction("power", 2.0), 0.5) == 0.25
    assert eval_fraction(CompositionFunction("parabolic"), 0.5) == 0.5
    assert eval_fraction(CompositionFunction("logarithmic"), 1.0) == 1.0
    # hand values of the normalized shapes
    assert eval_fraction(CompositionFunction("logarithmic"), 0.5) == pytest.approx(
        math.log(1 + (math.e - 1) / 2), abs=1e-15)
    assert eval_fraction(CompositionFunction("exponential", 2.0), 0.5) == pytest.approx(
        (math.e - 1) / (math.e ** 2 - 1), abs=1e-15)
    assert eval_fraction(CompositionFunction("linear", margin=0.25), 0.5) == 0.5
    assert eval_fraction(CompositionFunction("linear", margin=0.25), 0.375) == 0.25


def test_fraction_domain():
    fn = CompositionFunction()
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(DomainError):
            eval_fraction(fn, bad)


def test_fraction_scalar_and_array():
    fn = CompositionFunction("power", 3.0)
    assert isinstance(eval_fraction(fn, 0.5), float)
    s = np.linspace(0, 1, 11)
    assert np.array_equal(eval_fraction(fn, s), [eval_fraction(fn, x) for x in s])


@pytest.mark.parametrize("fn", ALL_FNS, ids=lambda f: f"{f.kind}-{f.param}")
@pytest.mark.parametrize("a", [0.0, 0.1, 0.3])
def test_fraction_monotone_and_endpoints(fn, a, rng):
    fn = CompositionFunction(fn.kind, fn.param, a)
    pairs = np.sort(rng.uniform(0, 1, (10_000, 2)), axis=1)
    assert (eval_fraction(fn, pairs[:, 0]) <= eval_fraction(fn, pairs[:, 1])).all()
    assert eval_fraction(fn, 0.0) == 0.0 and eval_fraction(fn, 1.0) == 1.0


@pytest.mark.parametrize("fn", ALL_FNS, ids=lambda f: f"{f.kind}-{f.param}")
@pytest.mark.parametrize("a", [0.05, 0.2])
def test_fraction_continuous_at_margins(fn, a):
    fn = CompositionFunction(fn.kind, fn.param, a)
    # the jump over eps is the shape value at t = eps / (1 - 2a) (or 1 - t): slopes of the
    # normalized shapes are below 5, except power p < 1 which behaves like t**p
    p = min(fn.param, 1.0) if fn.kind == "power" else 1.0
    for eps in (1e-3, 1e-6, 1e-9):
        bound = 5 * (eps / (1 - 2 * a)) ** p
        for edge in (a, 1 - a):
            assert abs(eval_fraction(fn, edge + eps) - eval_fraction(fn, edge)) <= bound
            assert abs(eval_fraction(fn, edge - eps) - eval_fraction(fn, edge)) <= bound


# --- composition blend ------------------------------------------------------------


def test_blend_examples():
    assert eval_composition(1.0, [0.7, 0.3], [0.1, 0.9]).tolist() == [0.7, 0.3]
    assert eval_composition(0.0, [0.7, 0.3], [0.1, 0.9]).tolist() == [0.1, 0.9]
    assert np.allclose(eval_composition(0.5, [0.8, 0.2], [0.2, 0.8]), [0.5, 0.5], atol=1e-15)
    with pytest.raises(ShapeError):
        eval_composition(0.5, [1.0, 0.0], [0.0, 0.5, 0.5])
    with pytest.raises(DomainError):
        eval_composition(1.5, [1.0, 0.0], [0.0, 1.0])


def test_blend_vectorized():
    f = np.array([0.0, 0.25, 1.0])
    out = eval_composition(f, [1.0, 0.0], [0.0, 1.0])
    assert out.shape == (3, 2)
    assert out.tolist() == [[0.0, 1.0], [0.25, 0.75], [1.0, 0.0]]


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_blend_partition_of_unity(f, k, seed):
    rng = np.random.default_rng(seed)
    mcs, mcf = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    v = eval_composition(f, mcs, mcf)
    assert abs(v.sum() - 1.0) <= 1e-12
    assert (v >= -1e-15).all() and (v <= 1 + 1e-15).all()


# --- properties -------------------------------------------------------------------


def test_voigt_examples():
    sp = space(200.0, 70.0)
    assert voigt_property([1.0, 0.0], "S", sp) == 200.0
    assert voigt_property([0.5, 0.5], "S", sp) == 135.0
    assert voigt_property([0.25, 0.75], "S", space(100.0, 0.0)) == 25.0
    with pytest.raises(PropertyLookupError):
        voigt_property([0.5, 0.5], "E", sp)
    with pytest.raises(KeyError):
        voigt_property([0.5, 0.5], "E", sp)
    with pytest.raises(ShapeError):
        voigt_property([0.2, 0.3, 0.5], "S", sp)


def test_voigt_two_materials_closed_form(rng):
    for _ in range(500):
        v1 = rng.uniform()
        s1, s2 = rng.uniform(-1e3, 1e3, 2)
        assert voigt_property([v1, 1 - v1], "S", space(s1, s2)) == v1 * s1 + (1 - v1) * s2


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_voigt_linear(alpha, k, seed):
    rng = np.random.default_rng(seed)
    sp = space(*rng.uniform(-10, 10, k))
    v, w = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    lhs = voigt_property(alpha * v + (1 - alpha) * w, "S", sp)
    rhs = alpha * voigt_property(v, "S", sp) + (1 - alpha) * voigt_property(w, "S", sp)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, 10 * k)


def test_voigt_batch():
    sp = space(200.0, 70.0)
    out = voigt_property(np.array([[1.0, 0.0], [0.5, 0.5]]), "S", sp)
    assert out.tolist() == [200.0, 135.0]


def test_blended_examples():
    assert blended_property(1.0, 1.0, 1.0, 200.0, 70.0) == 200.0
    assert blended_property(0.0, 1.0, 0.0, 200.0, 70.0) == 70.0
    assert blended_property(0.5, 0.8, 0.5, 100.0, 40.0) == pytest.approx(33.0, abs=1e-12)
    for bad in [(1.5, 1.0, 0.5), (0.5, 0.0, 0.5), (0.5, 1.0, -0.1)]:
        with pytest.raises(DomainError):
            blended_property(bad[0], bad[1], bad[2], 1.0, 1.0)


def test_blended_matches_two_material_form_when_f_equals_v1(rng):
    # with fb = 1 the blend reduces to the Voigt closed form only if f = V1
    for _ in range(100):
        v1 = rng.uniform()
        s1, s2 = rng.uniform(0, 100, 2)
        assert blended_property(v1, 1.0, v1, s1, s2) == pytest.approx(
            v1 * v1 * s1 + (1 - v1) ** 2 * s2)
