"""Restricted mean survival analysis over tiered ordinal outcomes.

Subjects carry one time-to-event per severity tier (reached level j+1 or
worse of an ordinal outcome scale). The package estimates each tier's
restricted mean survival time jointly with a full influence-based
covariance across tiers, runs single-arm, between-arm, within-arm, and
overall chi-square tests, simulates trials from a five-state progression
process, and reproduces estimator-quality and power studies.
"""

from ._version import __version__
from .dataio import read_dataset, write_wide_csv
from .door import (
    ARMS,
    CONTROL,
    TREATMENT,
    Cohort,
    DoorConfig,
    LongitudinalRecord,
    SubjectRecord,
    monotonize_trajectory,
    validate_cohort,
)
from .errors import (
    ArityMismatch,
    BackendUnavailable,
    CensoringNotPropagated,
    CohortValidationError,
    ConfigError,
    DoorRmstError,
    EmptyCohort,
    EmptyTrajectory,
    InsufficientReplicates,
    InvalidRecordValue,
    NoRiskAtTau,
    NonMonotoneTimes,
    SameTier,
    SchemaError,
    SingularCovariance,
    TauMismatch,
    TierOutOfRange,
    ValidationError,
)
from .inference import (
    InferenceResult,
    infer_between,
    infer_single,
    infer_wald,
    infer_within,
)
from .km import KmCurve, RiskTable, build_risk_table, km_fit
from .oracle import (
    TrueRmst,
    expected_observed_events_tier1,
    true_rmst1_closed_form,
    true_rmst_mc,
)
from .rmst import (
    RmstEstimate,
    estimate_arm,
    g_function,
    influence_contributions,
    martingale_variance,
    rmst,
)
from .simulate import (
    SimConfig,
    TransitionRates,
    simulate_arm,
    simulate_subject,
    simulate_trial,
)
from .study import (
    PowerRow,
    StudyRow,
    run_power_study,
    run_table1_study,
)

__all__ = [
    "__version__",
    "read_dataset", "write_wide_csv",
    "ARMS", "CONTROL", "TREATMENT",
    "Cohort", "DoorConfig", "LongitudinalRecord", "SubjectRecord",
    "monotonize_trajectory", "validate_cohort",
    "ArityMismatch", "BackendUnavailable", "CensoringNotPropagated",
    "CohortValidationError", "ConfigError", "DoorRmstError", "EmptyCohort",
    "EmptyTrajectory", "InsufficientReplicates", "InvalidRecordValue",
    "NoRiskAtTau", "NonMonotoneTimes", "SameTier", "SchemaError",
    "SingularCovariance", "TauMismatch", "TierOutOfRange", "ValidationError",
    "InferenceResult", "infer_between", "infer_single", "infer_wald", "infer_within",
    "KmCurve", "RiskTable", "build_risk_table", "km_fit",
    "TrueRmst", "expected_observed_events_tier1", "true_rmst1_closed_form",
    "true_rmst_mc",
    "RmstEstimate", "estimate_arm", "g_function", "influence_contributions",
    "martingale_variance", "rmst",
    "SimConfig", "TransitionRates", "simulate_arm", "simulate_subject",
    "simulate_trial",
    "PowerRow", "StudyRow", "run_power_study", "run_table1_study",
]
