"""Circle-packing metrics on weighted triangulated closed surfaces.

A packing metric assigns a radius to every vertex; edge lengths combine the
two radii with the edge's crossing-angle weight, triangles get Euclidean,
hyperbolic, or spherical shapes, and the angle defects at the vertices define
a discrete curvature.  This package evolves the radii by the curvature-driven
flow (or solves directly by Newton's method), tests the combinatorial
existence conditions, and develops the result into a drawable layout.
"""

from .conditions import (
    ConditionReport,
    DegenerationRow,
    LoopConditionVerdict,
    SubsetConditionVerdict,
    check_loop_conditions,
    check_subset_inequalities,
    degeneration_probe,
    full_report,
    subset_bound,
)
from .curvature import (
    CurvatureState,
    DefinitenessVerdict,
    GaussBonnetViolation,
    PackingMetric,
    UCoordinates,
    curvature_hessian,
    curvature_state,
    diagonal_dominance_verdict,
    from_u,
    to_u,
)
from .files import (
    MeshFormatError,
    MeshValidationError,
    parse_mesh,
    read_trace,
    write_mesh,
    write_trace,
)
from .flow import (
    MODE_EULER,
    MODE_NEWTON,
    ConvergenceReport,
    FlowConfig,
    FlowSample,
    FlowTrace,
    MaxPrincipleVerdict,
    NewtonNonConvergenceError,
    Termination,
    check_max_principle,
    default_targets,
    estimate_exponential_rate,
    euler_step,
    newton_solve,
    potential_value,
    ricci_rhs,
    run_flow,
)
from .geometry import (
    DegenerateTriangleError,
    DomainError,
    Geometry,
    TriangleAngles,
    TriangleConfig,
    angles_from_lengths,
    dtheta_dr,
    dtheta_dx,
    edge_length,
    s_func,
    tri_angles,
    triangle_lengths,
)
from .layout import LayoutPlan, develop_layout, hyperbolic_circle, render_svg
from .mesh import (
    Edge,
    Face,
    Loop,
    SubcomplexStats,
    WeightedTriangulation,
    enumerate_short_loops,
    euler_characteristic,
    subcomplex_and_link,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionReport",
    "ConvergenceReport",
    "CurvatureState",
    "DefinitenessVerdict",
    "DegenerateTriangleError",
    "DegenerationRow",
    "DomainError",
    "Edge",
    "Face",
    "FlowConfig",
    "FlowSample",
    "FlowTrace",
    "MODE_EULER",
    "MODE_NEWTON",
    "GaussBonnetViolation",
    "Geometry",
    "LayoutPlan",
    "Loop",
    "LoopConditionVerdict",
    "MaxPrincipleVerdict",
    "MeshFormatError",
    "MeshValidationError",
    "NewtonNonConvergenceError",
    "PackingMetric",
    "SubcomplexStats",
    "SubsetConditionVerdict",
    "Termination",
    "TriangleAngles",
    "TriangleConfig",
    "UCoordinates",
    "WeightedTriangulation",
    "angles_from_lengths",
    "check_loop_conditions",
    "check_max_principle",
    "check_subset_inequalities",
    "curvature_hessian",
    "curvature_state",
    "default_targets",
    "degeneration_probe",
    "develop_layout",
    "diagonal_dominance_verdict",
    "dtheta_dr",
    "dtheta_dx",
    "edge_length",
    "enumerate_short_loops",
    "estimate_exponential_rate",
    "euler_characteristic",
    "euler_step",
    "from_u",
    "full_report",
    "hyperbolic_circle",
    "newton_solve",
    "parse_mesh",
    "potential_value",
    "read_trace",
    "render_svg",
    "ricci_rhs",
    "run_flow",
    "s_func",
    "subcomplex_and_link",
    "subset_bound",
    "to_u",
    "tri_angles",
    "triangle_lengths",
    "validate",
    "write_mesh",
    "write_trace",
]
