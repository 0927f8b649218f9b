"""Plane curves, their frames and global radius, and curve systems."""

from .curves import (
    CLOSED,
    OPEN,
    UNBOUNDED,
    Curve,
    CurveFrame,
    DegenerateInput,
    FrameSample,
    GeometryError,
    MissingEta,
    NotClosed,
    SelfIntersecting,
    TooFewPoints,
    TubeNotRegular,
    check_regular,
    curvature_profile,
    elastica_energy,
    global_radius,
    load_curve_csv,
    resample_arclength,
    tube_injectivity_gap,
    tube_map,
    turning_number,
)
from .systems import (
    CrossingReport,
    CurveSystem,
    detect_transverse_crossings,
    has_transverse_crossing,
    load_system_manifest,
    multiplicity_at,
    system_metrics,
    systems_equivalent,
)

__all__ = [
    "CLOSED",
    "OPEN",
    "UNBOUNDED",
    "Curve",
    "CurveFrame",
    "FrameSample",
    "GeometryError",
    "DegenerateInput",
    "TooFewPoints",
    "SelfIntersecting",
    "TubeNotRegular",
    "NotClosed",
    "MissingEta",
    "resample_arclength",
    "load_curve_csv",
    "curvature_profile",
    "elastica_energy",
    "turning_number",
    "global_radius",
    "check_regular",
    "tube_map",
    "tube_injectivity_gap",
    "CurveSystem",
    "CrossingReport",
    "system_metrics",
    "multiplicity_at",
    "detect_transverse_crossings",
    "has_transverse_crossing",
    "systems_equivalent",
    "load_system_manifest",
]
