"""Skill-constrained team formation from teammate preferences.

Partition a class of students into teams under size and skill-coverage
constraints, then pick among the feasible assignments by lexicographically
optimizing preference objectives: the realized preference sum, the minimum
realized preference, and per-value realized-pair counts. Includes an exact
anytime solver, a brute-force oracle for verification, seeded generation of
realistic instances, and a benchmark harness with reports and figures.
"""

from .model import (
    Assignment,
    CoverageOutOfRange,
    FeasibilityReport,
    Instance,
    InstanceError,
    NonZeroDiagonal,
    PreferenceOutOfRange,
    SizeBoundsInfeasible,
    SkillNotDeclared,
    StructuralMismatch,
    TeamViolation,
    is_feasible,
    realized_pairs,
    team_coverage,
    validate_instance,
)
from .objectives import (
    O1,
    O2,
    Objective,
    PartialAssignment,
    eval_o1,
    eval_o2,
    eval_o3,
    evaluate,
    o3_max,
    o3_min,
    optimistic_bound,
    render_objective,
)
from .preferences import (
    AllProfilesIdenticalWarning,
    BucketMap,
    DegenerateAttributeWarning,
    ExplicitPreferences,
    MergedPreferences,
    PreferenceError,
    PreferenceExceedsBound,
    ProfileAttribute,
    ProfileSet,
    bucketize,
    merge_preferences,
    normalize_profiles,
    profile_preference_matrix,
    profile_similarity,
    remap_team_dating,
)
from .strategy import (
    DuplicateStage,
    EmptyAfterAdaptation,
    ParseError,
    Strategy,
    UnknownObjective,
    adapt_to_instance,
    catalog,
    parse_strategy,
    render,
)
from .solver import (
    NODES_PER_SECOND,
    CertCheck,
    CertificationFailure,
    CertificationReport,
    SolveConfig,
    SolveOutcome,
    StageResult,
    TracePoint,
    certify,
    solve,
    solve_feasibility,
    stage_value_checks,
)
from .verify import (
    PRESETS,
    AssumptionViolated,
    GenerationError,
    GeneratorPreset,
    HistogramOverflow,
    InstanceTooLarge,
    SetCoverInstance,
    assignment_profile,
    enumerate_assignments,
    extract_cover,
    generate,
    oracle_solve,
    random_feasible,
    reduce_set_cover,
    set_cover_brute,
)
from .instance_io import (
    InstanceDocument,
    SchemaError,
    SolutionDocument,
    build_solution_document,
    document_from_instance,
    instance_fingerprint,
    load_instance,
    load_solution,
    save_instance,
    save_solution,
)
from .report import BenchReport, run_bench, write_report

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "Instance", "Assignment", "validate_instance", "is_feasible",
    "realized_pairs", "team_coverage", "FeasibilityReport", "TeamViolation",
    "InstanceError", "SizeBoundsInfeasible", "CoverageOutOfRange",
    "PreferenceOutOfRange", "NonZeroDiagonal", "SkillNotDeclared",
    "StructuralMismatch",
    # objectives
    "Objective", "O1", "O2", "o3_max", "o3_min", "render_objective",
    "evaluate", "eval_o1", "eval_o2", "eval_o3", "PartialAssignment",
    "optimistic_bound",
    # preferences
    "ExplicitPreferences", "ProfileAttribute", "ProfileSet", "BucketMap",
    "MergedPreferences", "normalize_profiles", "profile_similarity",
    "bucketize", "merge_preferences", "profile_preference_matrix",
    "remap_team_dating", "PreferenceError", "PreferenceExceedsBound",
    "DegenerateAttributeWarning", "AllProfilesIdenticalWarning",
    # strategy
    "Strategy", "parse_strategy", "render", "catalog", "adapt_to_instance",
    "ParseError", "UnknownObjective", "DuplicateStage", "EmptyAfterAdaptation",
    # solver
    "SolveConfig", "SolveOutcome", "StageResult", "TracePoint", "solve",
    "solve_feasibility", "certify", "stage_value_checks", "CertCheck",
    "CertificationReport", "CertificationFailure", "NODES_PER_SECOND",
    # verify
    "SetCoverInstance", "set_cover_brute", "reduce_set_cover", "extract_cover",
    "enumerate_assignments", "assignment_profile", "oracle_solve",
    "GeneratorPreset", "PRESETS", "generate", "random_feasible",
    "AssumptionViolated", "InstanceTooLarge", "HistogramOverflow",
    "GenerationError",
    # io
    "InstanceDocument", "SolutionDocument", "document_from_instance",
    "instance_fingerprint", "save_instance", "load_instance", "save_solution",
    "load_solution", "build_solution_document", "SchemaError",
    # report
    "BenchReport", "run_bench", "write_report",
]
