"""Exception types shared across the package."""

from __future__ import annotations


class DoorRmstError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DoorRmstError):
    """A record or cohort violates a structural invariant."""


class NonMonotoneTimes(ValidationError):
    """Observed times decrease between adjacent tiers."""

    def __init__(self, subject_id: str, tier: int):
        super().__init__(
            f"subject {subject_id!r}: time at tier {tier} is smaller than at tier {tier - 1}"
        )
        self.subject_id = subject_id
        self.tier = tier


class CensoringNotPropagated(ValidationError):
    """A censored tier is followed by an event or a different time."""

    def __init__(self, subject_id: str, tier: int):
        super().__init__(
            f"subject {subject_id!r}: tier {tier} must be censored at the same time "
            "as the first censored tier before it"
        )
        self.subject_id = subject_id
        self.tier = tier


class ArityMismatch(ValidationError):
    """Record length disagrees with the configured number of tiers."""

    def __init__(self, subject_id: str, expected: int, got: int):
        super().__init__(
            f"subject {subject_id!r}: expected {expected} tier entries, got {got}"
        )
        self.subject_id = subject_id
        self.expected = expected
        self.got = got


class InvalidRecordValue(ValidationError):
    """A time or indicator lies outside its admissible domain."""

    def __init__(self, subject_id: str, detail: str):
        super().__init__(f"subject {subject_id!r}: {detail}")
        self.subject_id = subject_id
        self.detail = detail


class CohortValidationError(ValidationError):
    """Aggregate of every per-record violation found in one cohort."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:20])
        more = "" if len(self.violations) <= 20 else f" (+{len(self.violations) - 20} more)"
        super().__init__(f"{len(self.violations)} invalid record(s): {lines}{more}")


class EmptyTrajectory(ValidationError):
    def __init__(self, subject_id: str):
        super().__init__(f"subject {subject_id!r}: trajectory has no visits")
        self.subject_id = subject_id


class EmptyCohort(DoorRmstError):
    def __init__(self):
        super().__init__("cohort contains no subjects")


class TierOutOfRange(DoorRmstError):
    def __init__(self, tier: int, num_tiers: int):
        super().__init__(f"tier {tier} out of range 1..{num_tiers}")
        self.tier = tier
        self.num_tiers = num_tiers


class NoRiskAtTau(DoorRmstError):
    """Nobody is still at risk at the restriction time; the estimand is undefined there."""

    def __init__(self, tau: float, tier: int | None = None):
        where = f"tier {tier}" if tier is not None else "the curve"
        super().__init__(
            f"no subject at risk at tau={tau:g} for {where}; lower tau or check censoring"
        )
        self.tau = tau
        self.tier = tier


class TauMismatch(DoorRmstError):
    def __init__(self, detail: str):
        super().__init__(detail)


class SameTier(DoorRmstError):
    def __init__(self, tier: int):
        super().__init__(f"within-arm contrast needs two distinct tiers, got {tier} twice")
        self.tier = tier


class SingularCovariance(DoorRmstError):
    def __init__(self, rcond: float):
        super().__init__(
            f"combined covariance is numerically singular (reciprocal condition {rcond:.2e}); "
            "drop tiers without events or lower tau"
        )
        self.rcond = rcond


class InsufficientReplicates(DoorRmstError):
    def __init__(self, got: int, minimum: int):
        super().__init__(f"study needs at least {minimum} replicates, got {got}")
        self.got = got
        self.minimum = minimum


class ConfigError(DoorRmstError):
    """Configuration file is missing, malformed, or inconsistent."""


class SchemaError(DoorRmstError):
    """Dataset file does not match the wide or longitudinal schema."""


class BackendUnavailable(DoorRmstError):
    """The requested compute backend cannot be loaded."""
