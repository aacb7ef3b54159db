"""Pliss times, CP-hyperbolic constants and Birkhoff scans for torus maps."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BadOrdering,
    DegenerateSplitting,
    EmptySequence,
    MapError,
    NonInvertibleParameters,
    NotConverged,
    OrbitTooShort,
    PlisskitError,
    PreconditionNotMet,
    ReportIOError,
    SchedulerError,
    SideConditionViolated,
    SOutOfRange,
    TOutOfRange,
    TTooSmall,
)
from .maps import (
    Direction,
    MapBounds,
    MapDescriptor,
    TorusPoint,
    apply,
    arnold_cat,
    estimate_bounds,
    jacobian,
    orbit,
    perturbed_cat,
    standard_map,
    torus_distance,
)
from .cocycle import (
    DirectionPair,
    LyapunovEstimate,
    cocycle_trace,
    ftle,
    log_det_sequence,
    oseledets_directions,
    stable_log_norms,
    step_log_norms,
    unstable_log_norms,
)
from .pliss import PlissParams, PlissResult, density_bound, pliss, pliss_oracle, pliss_times
from .cp import (
    CPConstants,
    DeltaFlags,
    SchedulerInput,
    angle_bound_check,
    check_hypothesis,
    check_membership,
    cp_predicate,
    orbit_flags,
    delta_lower_bound,
    s_interval,
    schedule_constants,
)
from .experiment import (
    CPScanReport,
    ScanConfig,
    birkhoff_measure,
    cluster_cp_points,
    load_report,
    run_scan,
    write_report,
)

__all__ = [
    "angle_bound_check",
    "annotations",
    "apply",
    "arnold_cat",
    "BadOrdering",
    "birkhoff_measure",
    "check_hypothesis",
    "check_membership",
    "cluster_cp_points",
    "cocycle_trace",
    "cp_predicate",
    "CPConstants",
    "CPScanReport",
    "DegenerateSplitting",
    "delta_lower_bound",
    "DeltaFlags",
    "density_bound",
    "Direction",
    "DirectionPair",
    "EmptySequence",
    "estimate_bounds",
    "ftle",
    "jacobian",
    "load_report",
    "log_det_sequence",
    "LyapunovEstimate",
    "MapBounds",
    "MapDescriptor",
    "MapError",
    "NonInvertibleParameters",
    "NotConverged",
    "orbit",
    "orbit_flags",
    "OrbitTooShort",
    "oseledets_directions",
    "perturbed_cat",
    "pliss",
    "pliss_oracle",
    "pliss_times",
    "PlisskitError",
    "PlissParams",
    "PlissResult",
    "PreconditionNotMet",
    "ReportIOError",
    "run_scan",
    "s_interval",
    "ScanConfig",
    "schedule_constants",
    "SchedulerError",
    "SchedulerInput",
    "SideConditionViolated",
    "SOutOfRange",
    "stable_log_norms",
    "standard_map",
    "step_log_norms",
    "torus_distance",
    "TorusPoint",
    "TOutOfRange",
    "TTooSmall",
    "unstable_log_norms",
    "write_report",
]
