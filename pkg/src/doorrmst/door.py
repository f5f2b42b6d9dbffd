"""Tiered event-time records and their structural validation.

The ordinal outcome scale has L ordered levels; level 1 is event-free and
level L is the worst. Tier j (1-based, J = L - 1 tiers) is the composite
endpoint "reached level j+1 or worse". A subject therefore carries J
observed times and J event indicators, the times nondecreasing across
tiers, and once a tier is censored every later tier is censored at the
same time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatch,
    CensoringNotPropagated,
    CohortValidationError,
    EmptyTrajectory,
    InvalidRecordValue,
    NonMonotoneTimes,
    TierOutOfRange,
)

CONTROL = "control"
TREATMENT = "treatment"
ARMS = (CONTROL, TREATMENT)


@dataclass(frozen=True)
class DoorConfig:
    """Level structure of the ordinal outcome scale.

    ``num_event_types`` composite tiers sit between ``num_event_types + 1``
    ordered levels. Labels default to ``level 1`` .. ``level L`` and must be
    unique and non-empty when given.
    """

    num_event_types: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if int(self.num_event_types) < 1:
            raise ValueError("num_event_types must be at least 1")
        object.__setattr__(self, "num_event_types", int(self.num_event_types))
        labels = tuple(self.labels)
        if not labels:
            labels = tuple(f"level {i}" for i in range(1, self.num_levels + 1))
        if len(labels) != self.num_levels:
            raise ValueError(
                f"need {self.num_levels} level labels, got {len(labels)}"
            )
        if any(not lab for lab in labels) or len(set(labels)) != len(labels):
            raise ValueError("level labels must be non-empty and unique")
        object.__setattr__(self, "labels", labels)

    @property
    def num_levels(self) -> int:
        return self.num_event_types + 1

    @property
    def num_tiers(self) -> int:
        return self.num_event_types


@dataclass(frozen=True)
class SubjectRecord:
    """One subject's tier times and event indicators (1 event, 0 censored)."""

    subject_id: str
    arm: str
    times: tuple[float, ...]
    indicators: tuple[int, ...]


@dataclass(frozen=True)
class LongitudinalRecord:
    """Visit-level outcome history: (visit day, ordinal level) pairs."""

    subject_id: str
    arm: str
    visits: tuple[tuple[float, int], ...]


@dataclass(frozen=True)
class Cohort:
    """Validated single-arm column store used by the estimators.

    ``times`` is (n, J) float64, ``indicators`` (n, J) uint8. Subject ids
    are optional; simulation leaves them out and they are materialized only
    when records are exported.
    """

    config: DoorConfig
    arm: str
    times: np.ndarray
    indicators: np.ndarray
    subject_ids: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def num_tiers(self) -> int:
        return self.config.num_tiers

    def subject_id(self, i: int) -> str:
        if self.subject_ids is not None:
            return self.subject_ids[i]
        return f"{self.arm}-{i:05d}"

    def head(self, n: int) -> "Cohort":
        """Prefix sub-cohort of the first ``n`` subjects."""
        if not 0 <= n <= self.n:
            raise ValueError(f"prefix size {n} outside 0..{self.n}")
        ids = self.subject_ids[:n] if self.subject_ids is not None else None
        return Cohort(self.config, self.arm, self.times[:n], self.indicators[:n], ids)

    def tier_column(self, tier: int) -> tuple[np.ndarray, np.ndarray]:
        """Contiguous (times, indicators) for 1-based ``tier``."""
        if not 1 <= tier <= self.num_tiers:
            raise TierOutOfRange(tier, self.num_tiers)
        x = np.ascontiguousarray(self.times[:, tier - 1], dtype=np.float64)
        d = np.ascontiguousarray(self.indicators[:, tier - 1], dtype=np.uint8)
        return x, d

    def observed_events(self, tau: float) -> np.ndarray:
        """Per-tier counts of events observed at or before ``tau``."""
        return np.sum((self.times <= tau) & (self.indicators != 0), axis=0)

    def to_records(self) -> list[SubjectRecord]:
        return [
            SubjectRecord(
                subject_id=self.subject_id(i),
                arm=self.arm,
                times=tuple(float(v) for v in self.times[i]),
                indicators=tuple(int(v) for v in self.indicators[i]),
            )
            for i in range(self.n)
        ]


def _record_violations(rec: SubjectRecord, num_tiers: int) -> list:
    if len(rec.times) != num_tiers or len(rec.indicators) != num_tiers:
        got = len(rec.times) if len(rec.times) != num_tiers else len(rec.indicators)
        return [ArityMismatch(rec.subject_id, num_tiers, got)]
    out = []
    for j, (t, ind) in enumerate(zip(rec.times, rec.indicators), start=1):
        if not np.isfinite(t) or t < 0:
            out.append(InvalidRecordValue(rec.subject_id, f"time at tier {j} is {t!r}"))
        if ind not in (0, 1):
            out.append(
                InvalidRecordValue(rec.subject_id, f"indicator at tier {j} is {ind!r}")
            )
    if out:
        return out
    for j in range(1, num_tiers):
        if rec.times[j] < rec.times[j - 1]:
            out.append(NonMonotoneTimes(rec.subject_id, j + 1))
    censored_at = None
    for j in range(num_tiers):
        if censored_at is not None:
            if rec.indicators[j] != 0 or rec.times[j] != rec.times[censored_at]:
                out.append(CensoringNotPropagated(rec.subject_id, j + 1))
        elif rec.indicators[j] == 0:
            censored_at = j
    return out


def validate_cohort(records, config: DoorConfig, arm: str | None = None) -> Cohort:
    """Check every record and assemble the column store.

    Raises ``CohortValidationError`` carrying one entry per violation
    (nothing stops at the first bad record). Records must all belong to one
    arm; pass ``arm`` to assert which one.
    """
    records = list(records)
    arms = {rec.arm for rec in records}
    if arm is None:
        if len(arms) > 1:
            raise ValueError(f"records mix arms {sorted(arms)}; split before validating")
        arm = records[0].arm if records else CONTROL
    elif arms - {arm}:
        raise ValueError(f"records for arm {arm!r} include arms {sorted(arms - {arm})}")

    violations = []
    for rec in records:
        violations.extend(_record_violations(rec, config.num_tiers))
    if violations:
        raise CohortValidationError(violations)

    n = len(records)
    times = np.empty((n, config.num_tiers))
    indicators = np.empty((n, config.num_tiers), dtype=np.uint8)
    for i, rec in enumerate(records):
        times[i] = rec.times
        indicators[i] = rec.indicators
    ids = tuple(rec.subject_id for rec in records)
    return Cohort(config, arm, times, indicators, ids)


def monotonize_trajectory(rec: LongitudinalRecord, config: DoorConfig) -> SubjectRecord:
    """Tier times from a visit history by first crossing of each level.

    The running worst level seen so far drives the crossings, so a
    transient improvement never un-reaches a tier. Tiers the subject never
    reaches are censored at the last visit day.
    """
    if not rec.visits:
        raise EmptyTrajectory(rec.subject_id)
    days = [float(day) for day, _ in rec.visits]
    levels = [int(level) for _, level in rec.visits]
    for k, day in enumerate(days):
        if not np.isfinite(day) or day < 0:
            raise InvalidRecordValue(rec.subject_id, f"visit day {day!r} is invalid")
        if k > 0 and day <= days[k - 1]:
            raise InvalidRecordValue(
                rec.subject_id, f"visit days must strictly increase, got {day} after {days[k - 1]}"
            )
    for level in levels:
        if not 1 <= level <= config.num_levels:
            raise InvalidRecordValue(
                rec.subject_id,
                f"level {level} outside 1..{config.num_levels}",
            )

    worst = []
    running = 0
    for level in levels:
        running = max(running, level)
        worst.append(running)

    last_day = days[-1]
    times = []
    indicators = []
    for tier in range(1, config.num_tiers + 1):
        threshold = tier + 1
        hit = next((k for k, w in enumerate(worst) if w >= threshold), None)
        if hit is None:
            times.append(last_day)
            indicators.append(0)
        else:
            times.append(days[hit])
            indicators.append(1)
    return SubjectRecord(
        subject_id=rec.subject_id,
        arm=rec.arm,
        times=tuple(times),
        indicators=tuple(indicators),
    )
