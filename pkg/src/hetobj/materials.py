"""
Material space, composition vectors, grading functions and effective
properties (rule of mixtures).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CompositionError, DomainError, PropertyLookupError, ShapeError

#: tolerance on the partition of unity of a composition vector
SUM_TOL = 1e-9

KINDS = ("linear", "power", "logarithmic", "exponential", "parabolic")


@dataclass(frozen=True)
class Material:
    name: str
    properties: dict = field(default_factory=dict)
    units: dict = field(default_factory=dict)
    color: tuple = (128, 128, 128)


@dataclass(frozen=True, eq=False)
class MaterialSpace:
    """Ordered primary materials; ``k`` counts air too if it is used."""

    materials: tuple

    def __post_init__(self):
        mats = tuple(self.materials)
        if not mats:
            raise CompositionError("material space needs at least one material")
        names = [m.name for m in mats]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise CompositionError(f"duplicate material name {sorted(dup)[0]!r}")
        declared = set().union(*(m.properties for m in mats))
        for m in mats:
            missing = declared - set(m.properties)
            if missing:
                raise PropertyLookupError(
                    f"material {m.name!r} does not define property {sorted(missing)[0]!r}"
                )
        object.__setattr__(self, "materials", mats)

    @property
    def k(self):
        return len(self.materials)

    @property
    def names(self):
        return [m.name for m in self.materials]

    @property
    def property_names(self):
        return sorted(set().union(*(m.properties for m in self.materials)))

    def property_values(self, name):
        try:
            return np.array([float(m.properties[name]) for m in self.materials])
        except KeyError:
            raise PropertyLookupError(f"unknown property {name!r}") from None

    def colors(self):
        return np.array([m.color for m in self.materials], dtype=np.int64)


def as_composition(values, k=None, name="composition"):
    """
    Validate a material composition vector and return it as a float array.

    Each fraction must lie in [0, 1] and the fractions must sum to one
    within ``SUM_TOL``.
    """
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if k is not None and len(v) != k:
        raise ShapeError(f"{name} has {len(v)} fractions, expected {k}")
    if not np.isfinite(v).all():
        raise CompositionError(f"{name} has non-finite fractions")
    if (v < 0).any() or (v > 1).any():
        raise CompositionError(f"{name} fraction outside [0, 1]: {v.tolist()}")
    total = float(v.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise CompositionError(f"{name} sum {total:g} ≠ 1")
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class CompositionFunction:
    """
    Grading function ``f(s)`` with homogeneous margins of width ``margin``.

    ``param`` is the exponent for ``power`` and the rate for
    ``exponential``; other kinds ignore it.
    """

    kind: str = "linear"
    param: float = 1.0
    margin: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown composition function kind {self.kind!r}")
        if not (0.0 <= self.margin < 0.5):
            raise DomainError(f"margin must be in [0, 0.5), got {self.margin}")
        if not math.isfinite(self.param):
            raise DomainError("composition function parameter must be finite")
        if self.kind == "power" and self.param <= 0:
            raise DomainError(f"power exponent must be > 0, got {self.param}")
        if self.kind == "exponential" and self.param == 0:
            raise DomainError("exponential rate must be non-zero")

    def __call__(self, s):
        return eval_fraction(self, s)


def _shape(kind, param, t):
    if kind == "linear":
        return t
    if kind == "power":
        return np.power(t, param)
    if kind == "logarithmic":
        return np.log1p(np.expm1(1.0) * t)
    if kind == "exponential":
        return np.expm1(param * t) / np.expm1(param)
    # parabolic (cubic smoothstep: zero slope at both ends)
    return t * t * (3.0 - 2.0 * t)


def eval_fraction(fn, s):
    """
    Evaluate the grading function at normalized coordinate(s) ``s``.

    Zero for ``s <= a``, one for ``s >= 1 - a``; in between the
    normalized shape is applied to ``t = (s - a) / (1 - 2a)``.
    Accepts scalars or arrays; returns the same kind.
    """
    s_arr = np.asarray(s, dtype=np.float64)
    if np.isnan(s_arr).any() or (s_arr < 0).any() or (s_arr > 1).any():
        raise DomainError("s must lie in [0, 1]")
    a = fn.margin
    lo = s_arr <= a
    hi = s_arr >= 1.0 - a
    t = (s_arr - a) / (1.0 - 2.0 * a)
    with np.errstate(all="ignore"):
        g = np.clip(_shape(fn.kind, fn.param, t), 0.0, 1.0)
    f = np.where(lo, 0.0, np.where(hi, 1.0, g))
    return float(f) if f.ndim == 0 else f


def eval_composition(f, mcs, mcf):
    """
    Blend two end compositions: ``V = f * (Mcs - Mcf) + Mcf``.

    The end points are exact: ``f = 0`` gives ``Mcf`` and ``f = 1``
    gives ``Mcs`` bit for bit.

    ``f`` may be a scalar or an (n,) array; returns (k,) or (n, k).
    """
    mcs = np.asarray(mcs, dtype=np.float64)
    mcf = np.asarray(mcf, dtype=np.float64)
    if mcs.shape != mcf.shape:
        raise ShapeError(f"end compositions differ in length: {len(mcs)} vs {len(mcf)}")
    f_arr = np.asarray(f, dtype=np.float64)
    if (f_arr < 0).any() or (f_arr > 1).any():
        raise DomainError("blend fraction must lie in [0, 1]")
    v = f_arr[..., None] * (mcs - mcf) + mcf
    # f = 1 must reproduce Mcs exactly; the product form can be 1 ulp off
    return np.where(f_arr[..., None] == 1.0, mcs, v)


def voigt_property(v, prop, space):
    """Rule-of-mixtures (Voigt) estimate ``sum_r V_r * S_r``."""
    values = space.property_values(prop)
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != len(values):
        raise ShapeError(f"composition has {v.shape[-1]} fractions, space has {len(values)}")
    out = v[..., 0] * values[0]
    for r in range(1, len(values)):
        out = out + v[..., r] * values[r]
    return float(out) if np.ndim(out) == 0 else out


def blended_property(f, fb, v1, s1, s2):
    """Two-material property with a constant end blend ``fb`` (default use: 1)."""
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"f must lie in [0, 1], got {f}")
    if not 0.0 < fb <= 1.0:
        raise DomainError(f"fb must lie in (0, 1], got {fb}")
    if not 0.0 <= v1 <= 1.0:
        raise DomainError(f"V1 must lie in [0, 1], got {v1}")
    return f * v1 * s1 + (1.0 - v1) * (1.0 - f) * fb * s2
