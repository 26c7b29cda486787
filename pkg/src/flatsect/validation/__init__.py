from ._chunks import DEFAULT_CHUNKS, ChunkExecutor, chunk_sizes, run_chunks
from ._estimators import (
    IntersectionBatch,
    estimate_hit_probability,
    estimate_moment,
    moment_window,
    sample_intersection_distances,
    sample_intersections,
)
from ._reports import (
    CalibrationReport,
    CheckRecord,
    ChiSquareReport,
    GoodnessOfFitReport,
    MCEstimate,
    PairedEstimate,
    RecordKind,
    calibrate_ks,
    chi_square_test,
    ks_critical_value,
    ks_test,
    ks_two_sample,
    sample_from_cdf,
    tamper_record,
)
from ._settings import HarnessSettings
from ._suite import Check, case_checks, default_checks, run_suite
from ._theorems import (
    MultipleIntersectionReport,
    containment_residuals,
    validate_fixed_subspace_theorem,
    validate_lemma_axis_moment,
    validate_multiple_intersections,
    validate_tangent_beta,
    validate_theorem_general,
)

__all__ = (
    "DEFAULT_CHUNKS",
    "CalibrationReport",
    "Check",
    "CheckRecord",
    "ChiSquareReport",
    "ChunkExecutor",
    "GoodnessOfFitReport",
    "HarnessSettings",
    "IntersectionBatch",
    "MCEstimate",
    "MultipleIntersectionReport",
    "PairedEstimate",
    "RecordKind",
    "calibrate_ks",
    "case_checks",
    "chi_square_test",
    "chunk_sizes",
    "containment_residuals",
    "default_checks",
    "estimate_hit_probability",
    "estimate_moment",
    "ks_critical_value",
    "ks_test",
    "ks_two_sample",
    "moment_window",
    "run_chunks",
    "run_suite",
    "sample_from_cdf",
    "sample_intersection_distances",
    "sample_intersections",
    "tamper_record",
    "validate_fixed_subspace_theorem",
    "validate_lemma_axis_moment",
    "validate_multiple_intersections",
    "validate_tangent_beta",
    "validate_theorem_general",
)
