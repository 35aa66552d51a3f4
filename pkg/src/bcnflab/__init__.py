"""Numerical laboratory for a two-piece piecewise-linear planar map.

The map acts as (x, y) -> (tau*x + y + 1, -delta*x) with one (tau, delta)
pair for x < 0 and another for x >= 0.  The package computes its fixed
points and cycles, invariant-manifold polylines, attractor samples,
parameter-region classification and the contact curve where the attractor
collides with a saddle cycle's stable set, plus a self-test battery and a
command-line front end over all of it.
"""
from .core import (
    EigenData,
    FixedPoints,
    Orbit,
    Params,
    Point,
    SIGMA_TOL,
    apply,
    apply_inverse,
    apply_inverse_many,
    apply_many,
    eigen,
    eigen_pair,
    fixed_points,
    jacobian,
    orbit,
)
from .errors import (
    BcnfError,
    ComplexEigenvaluesError,
    DegenerateParameterError,
    EscapeError,
    ItineraryMismatchError,
    OutsidePhiError,
    PointUndefinedError,
    SingularCompositionError,
    VertexBudgetError,
)
from .geometry import (
    Polygon,
    Polyline,
    Segment,
    SlopeCone,
    cone_step,
    expansion_certificate,
    inverted_cone,
    longest_piece_bound,
    map_polyline,
    polyline_clearance,
    split_at_sigma,
    standard_cone,
)
from .paramspace import (
    RegionClass,
    SliceQuantities,
    TheoremFlags,
    chaos_indices,
    classify_region,
    find_region_point,
    in_phi,
    phi,
    region_code,
    renormalise,
    sample_phi,
    sample_phi_byg,
    slice_quantities,
)
from .manifolds import (
    AttractorApprox,
    CoverageReport,
    DeltaRegion,
    ManifoldApprox,
    SpecialPoints,
    TrapRegion,
    attractor_cloud,
    coverage_gaps,
    delta_region,
    grow_manifold,
    iterate_polyline,
    special_points,
    trapping_region,
)
from .bifurcation import (
    CurveTrace,
    EscapeReport,
    HTCurveRow,
    HTSample,
    PeriodicCycle,
    cycle_stable_manifolds,
    escape_survey,
    find_cycle,
    ht_distance,
    phi_zero_boundary,
    trace_ht_curve,
)
from .verify import CheckResult, VerifyReport, run_verify

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "Params", "Point", "EigenData", "FixedPoints", "Orbit", "SIGMA_TOL",
    "apply", "apply_inverse", "apply_many", "apply_inverse_many",
    "eigen", "eigen_pair", "fixed_points", "jacobian", "orbit",
    # errors
    "BcnfError", "ComplexEigenvaluesError", "DegenerateParameterError",
    "EscapeError", "ItineraryMismatchError", "OutsidePhiError",
    "PointUndefinedError", "SingularCompositionError", "VertexBudgetError",
    # geometry
    "Segment", "Polyline", "Polygon", "SlopeCone",
    "split_at_sigma", "map_polyline", "cone_step", "standard_cone",
    "inverted_cone", "expansion_certificate", "longest_piece_bound",
    "polyline_clearance",
    # parameter space
    "RegionClass", "TheoremFlags", "SliceQuantities",
    "in_phi", "phi", "renormalise", "classify_region", "region_code",
    "chaos_indices", "slice_quantities", "sample_phi", "sample_phi_byg",
    "find_region_point",
    # manifolds
    "SpecialPoints", "TrapRegion", "ManifoldApprox", "AttractorApprox",
    "CoverageReport", "DeltaRegion",
    "special_points", "trapping_region", "iterate_polyline", "grow_manifold",
    "attractor_cloud", "coverage_gaps", "delta_region",
    # bifurcation
    "PeriodicCycle", "HTSample", "HTCurveRow", "CurveTrace", "EscapeReport",
    "find_cycle", "cycle_stable_manifolds", "ht_distance", "trace_ht_curve",
    "escape_survey", "phi_zero_boundary",
    # verification
    "CheckResult", "VerifyReport", "run_verify",
]
