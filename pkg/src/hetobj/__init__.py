"""Heterogeneous object modeling: geometry, material fields, colored meshes and slices."""
from .errors import (
    AmbiguityError,
    BoundsError,
    CompositionError,
    ConsistencyError,
    DegenerateRegionError,
    DomainError,
    ExportError,
    GeometryError,
    HetObjError,
    ModelError,
    OutsideObjectError,
    PropertyLookupError,
    ShapeError,
    SpecError,
    TopologyError,
)
from .materials import (
    CompositionFunction,
    Material,
    MaterialSpace,
    as_composition,
    blended_property,
    eval_composition,
    eval_fraction,
    voigt_property,
)
from .mesh import (
    Contour2D,
    Plane,
    Polyline,
    TriangleMesh,
    box_mesh,
    extrude_polygon,
    icosphere,
    read_mesh,
    subdivide_mesh,
    uv_sphere,
    write_stl,
)
from .modelspec import load_model_spec
from .references import (
    AxisRef,
    PlaneRef,
    PointRef,
    PolylineRef,
    SurfaceRef,
    bidistance_coordinate,
    distance_to_reference,
    normalized_gradient_coordinate,
)
from .regions import (
    Cell,
    GradientRegion,
    HeterogeneousObject,
    HybridRegion,
    OffsetRegion,
    evaluate_point,
    evaluate_points,
    hybrid_evaluate,
    offset_subdivide,
    retarget_references,
    step_width,
)
from .section import constrained_triangulation, intersect_mesh_plane, triangulate_region
from .slicer import export_slice_json, export_slice_svg, generate_slices, load_slice_json
from .visualization import ColorMap, export_colored_mesh, facet_boundary, map_color

__version__ = "0.1.0"
