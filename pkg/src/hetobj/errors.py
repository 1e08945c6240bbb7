"""Exception hierarchy shared by every hetobj module."""


class HetObjError(Exception):
    """Base class for all errors raised by hetobj."""


class GeometryError(HetObjError, ValueError):
    """Invalid geometry: degenerate triangles, bad contours, bad indices."""


class TopologyError(GeometryError):
    """Non-manifold or open surfaces where a closed one is required."""


class DegenerateRegionError(HetObjError, ValueError):
    """Start and end references coincide where a gradient is evaluated."""


class CompositionError(HetObjError, ValueError):
    """A material composition vector violates the partition of unity."""


class DomainError(HetObjError, ValueError):
    """Scalar argument outside its admissible interval."""


class ShapeError(HetObjError, ValueError):
    """Arrays whose lengths must agree do not."""


class PropertyLookupError(HetObjError, KeyError):
    """Unknown material property name."""


class BoundsError(HetObjError, IndexError):
    """Index outside the admissible range."""


class ConsistencyError(HetObjError, AssertionError):
    """Internal self-check failed; indicates a bug, not bad input."""


class OutsideObjectError(HetObjError, ValueError):
    """Query point is not inside any cell of the object."""


class AmbiguityError(HetObjError, ValueError):
    """A point or cell is claimed by more than one binding."""


class SpecError(HetObjError, ValueError):
    """Model file could not be parsed or violates an invariant.

    ``element`` names the offending model-file element and ``rule`` the
    violated invariant, when known.
    """

    def __init__(self, message, element=None, rule=None):
        super().__init__(message)
        self.element = element
        self.rule = rule


class ExportError(HetObjError, OSError):
    """Reading or writing a file failed."""


class ModelError(HetObjError, ValueError):
    """Structural problem in a heterogeneous object (cells, bindings)."""
