"""CSV dataset schemas and curve exports.

Two input layouts are accepted and told apart by their header:

wide            subject_id,arm,t1..tK,d1..dK   one row per subject
longitudinal    subject_id,arm,visit_day,door_level   one row per visit

``arm`` is 0 for control, 1 for treatment. Headers must match exactly;
unknown or reordered columns are rejected, not ignored, so a malformed
file fails loudly instead of analyzing the wrong thing.
"""

from __future__ import annotations

import csv
import hashlib
import math

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
from .errors import SchemaError

LONG_HEADER = ("subject_id", "arm", "visit_day", "door_level")
_ARM_CODE = {"0": CONTROL, "1": TREATMENT}


def wide_header(num_tiers: int) -> list[str]:
    return (
        ["subject_id", "arm"]
        + [f"t{j}" for j in range(1, num_tiers + 1)]
        + [f"d{j}" for j in range(1, num_tiers + 1)]
    )


def _sniff_wide_tiers(header: list[str]) -> int | None:
    """Number of tiers if the header is exactly the wide layout, else None."""
    if len(header) < 4 or header[:2] != ["subject_id", "arm"]:
        return None
    rest = header[2:]
    if len(rest) % 2 != 0:
        return None
    k = len(rest) // 2
    if rest == wide_header(k)[2:]:
        return k
    return None


def detect_schema(header: list[str]) -> tuple[str, int | None]:
    """('wide', K) or ('long', None); raises SchemaError otherwise."""
    if list(header) == list(LONG_HEADER):
        return "long", None
    k = _sniff_wide_tiers(list(header))
    if k is not None:
        return "wide", k
    raise SchemaError(
        f"unrecognized header {header!r}; expected subject_id,arm,t1..tK,d1..dK "
        "or subject_id,arm,visit_day,door_level"
    )


def _parse_arm(value: str, row_num: int) -> str:
    arm = _ARM_CODE.get(value.strip())
    if arm is None:
        raise SchemaError(f"row {row_num}: arm must be 0 (control) or 1 (treatment), got {value!r}")
    return arm


def _parse_time(value: str, row_num: int, col: str) -> float:
    try:
        t = float(value)
    except ValueError:
        raise SchemaError(f"row {row_num}: column {col} is not a number: {value!r}") from None
    if not math.isfinite(t) or t < 0.0:
        raise SchemaError(f"row {row_num}: column {col} must be finite and nonnegative, got {value!r}")
    return t


def _parse_indicator(value: str, row_num: int, col: str) -> int:
    v = value.strip()
    if v not in ("0", "1"):
        raise SchemaError(f"row {row_num}: column {col} must be 0 or 1, got {value!r}")
    return int(v)


def _read_rows(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except (UnicodeDecodeError, csv.Error) as exc:
        raise SchemaError(f"{path}: cannot parse as CSV: {exc}") from exc
    rows = [row for row in rows if row]
    if not rows:
        raise SchemaError(f"{path}: file is empty")
    return rows


def read_wide_records(rows, num_tiers: int, round_decimals=None):
    records = []
    seen = set()
    for row_num, row in enumerate(rows, start=2):
        if len(row) != 2 + 2 * num_tiers:
            raise SchemaError(
                f"row {row_num}: expected {2 + 2 * num_tiers} fields, got {len(row)}"
            )
        subject_id = row[0].strip()
        if not subject_id:
            raise SchemaError(f"row {row_num}: subject_id is empty")
        if subject_id in seen:
            raise SchemaError(f"row {row_num}: duplicate subject_id {subject_id!r}")
        seen.add(subject_id)
        arm = _parse_arm(row[1], row_num)
        times = [
            _parse_time(row[2 + j], row_num, f"t{j + 1}") for j in range(num_tiers)
        ]
        if round_decimals is not None:
            times = [round(t, round_decimals) for t in times]
        indicators = [
            _parse_indicator(row[2 + num_tiers + j], row_num, f"d{j + 1}")
            for j in range(num_tiers)
        ]
        records.append(
            SubjectRecord(
                subject_id=subject_id,
                arm=arm,
                times=tuple(times),
                indicators=tuple(indicators),
            )
        )
    return records


def read_long_records(rows, config: DoorConfig, round_decimals=None):
    """Group visit rows into trajectories and derive tier records."""
    visits: dict[str, list[tuple[float, int]]] = {}
    arms: dict[str, str] = {}
    order: list[str] = []
    for row_num, row in enumerate(rows, start=2):
        if len(row) != len(LONG_HEADER):
            raise SchemaError(f"row {row_num}: expected {len(LONG_HEADER)} fields, got {len(row)}")
        subject_id = row[0].strip()
        if not subject_id:
            raise SchemaError(f"row {row_num}: subject_id is empty")
        arm = _parse_arm(row[1], row_num)
        day = _parse_time(row[2], row_num, "visit_day")
        if round_decimals is not None:
            day = round(day, round_decimals)
        try:
            level = int(row[3])
        except ValueError:
            raise SchemaError(f"row {row_num}: door_level is not an integer: {row[3]!r}") from None
        if not 1 <= level <= config.num_levels:
            raise SchemaError(
                f"row {row_num}: door_level {level} outside 1..{config.num_levels}"
            )
        if subject_id not in visits:
            visits[subject_id] = []
            arms[subject_id] = arm
            order.append(subject_id)
        elif arms[subject_id] != arm:
            raise SchemaError(f"row {row_num}: subject {subject_id!r} switches arm")
        visits[subject_id].append((day, level))

    records = []
    for subject_id in order:
        vs = sorted(visits[subject_id])
        days = [day for day, _ in vs]
        if len(set(days)) != len(days):
            raise SchemaError(f"subject {subject_id!r} has duplicate visit days")
        records.append(
            monotonize_trajectory(
                LongitudinalRecord(
                    subject_id=subject_id, arm=arms[subject_id], visits=tuple(vs)
                ),
                config,
            )
        )
    return records


def read_dataset(path, door: DoorConfig | None = None, round_decimals=None):
    """Load either layout into per-arm validated cohorts.

    Returns (DoorConfig, {arm: Cohort}) with only the arms present in the
    file. Wide files can infer their tier count from the header; the
    longitudinal layout needs the level structure from configuration.
    """
    rows = _read_rows(path)
    schema, k = detect_schema(rows[0])
    body = rows[1:]
    if schema == "wide":
        if door is not None and door.num_tiers != k:
            raise SchemaError(
                f"file has {k} tiers but configuration declares {door.num_tiers}"
            )
        door = door if door is not None else DoorConfig(num_event_types=k)
        records = read_wide_records(body, k, round_decimals)
    else:
        if door is None:
            raise SchemaError(
                "longitudinal data needs the outcome levels from configuration "
                "([door] labels or num_event_types)"
            )
        records = read_long_records(body, door, round_decimals)

    by_arm: dict[str, list[SubjectRecord]] = {}
    for rec in records:
        by_arm.setdefault(rec.arm, []).append(rec)
    cohorts = {
        arm: validate_cohort(recs, door, arm=arm) for arm, recs in by_arm.items()
    }
    return door, cohorts


def write_wide_csv(path, cohorts) -> None:
    """Write cohorts (iterable, control first if present) to the wide layout."""
    cohorts = list(cohorts)
    if not cohorts:
        raise ValueError("nothing to write")
    num_tiers = cohorts[0].num_tiers
    arm_code = {CONTROL: "0", TREATMENT: "1"}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(wide_header(num_tiers))
        for cohort in cohorts:
            if cohort.num_tiers != num_tiers:
                raise ValueError("cohorts disagree on tier count")
            if cohort.arm not in arm_code:
                raise ValueError(f"arm {cohort.arm!r} not one of {ARMS}")
            for i in range(cohort.n):
                writer.writerow(
                    [cohort.subject_id(i), arm_code[cohort.arm]]
                    + [repr(float(v)) for v in cohort.times[i]]
                    + [str(int(v)) for v in cohort.indicators[i]]
                )


def write_km_curves_csv(path, curves) -> None:
    """Plot-ready staircase rows: arm,tier,time,survival.

    ``curves`` maps (arm, tier) to a fitted curve; each block starts with
    the implicit (0, 1) point.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("arm", "tier", "time", "survival"))
        for (arm, tier), curve in curves.items():
            writer.writerow((arm, tier, repr(0.0), repr(1.0)))
            for t, s in zip(curve.times, curve.survival):
                writer.writerow((arm, tier, repr(float(t)), repr(float(s))))


def file_digest(path) -> str:
    """Short sha256 digest of a file's bytes (reports embed it)."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()[:12]
