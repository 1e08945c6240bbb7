"""
Materials and grading functions.

A material space holds the primary materials; a composition is a vector
of volume fractions over them. Grading functions map the normalized
coordinate s in [0, 1] to a blend factor, and the rule of mixtures turns
a composition into an effective property.
"""
import numpy as np

from hetobj import demo
from hetobj.materials import (
    KINDS,
    CompositionFunction,
    blended_property,
    eval_composition,
    eval_fraction,
    voigt_property,
)

space = demo.two_materials()
print("materials:", ", ".join(space.names))
print("properties:", ", ".join(space.property_names))

# every grading kind at a handful of coordinates
s = np.linspace(0, 1, 6)
print("\nblend factor f(s)")
print("kind          " + " ".join(f"{x:6.2f}" for x in s))
for kind in KINDS:
    fn = CompositionFunction(kind, 2.0)
    print(f"{kind:13s} " + " ".join(f"{v:6.3f}" for v in eval_fraction(fn, s)))

# a margin holds the end compositions flat near both references
fn = CompositionFunction("linear", margin=0.2)
print("\nlinear with margin 0.2:", np.round(eval_fraction(fn, s), 3).tolist())

# compositions and properties along the gradient
mcs, mcf = np.array([1.0, 0.0]), np.array([0.0, 1.0])
print("\n  s    steel  alu    E [GPa]  rho [kg/m^3]")
for x in s:
    v = eval_composition(eval_fraction(CompositionFunction("power", 2.0), x), mcs, mcf)
    e = voigt_property(v, "E", space) / 1e9
    rho = voigt_property(v, "rho", space)
    print(f"{x:4.2f}  {v[0]:5.3f}  {v[1]:5.3f}  {e:7.2f}  {rho:8.1f}")

# the blended two-material form with its own blend factor
print("\nblended E at V1=0.5, fb=0.8, f=0.5:",
      f"{blended_property(0.5, 0.8, 0.5, 200e9, 70e9) / 1e9:.2f} GPa")
