"""Run configuration: TOML loading, validation, canonical hashing.

One plain-text file drives simulation, analysis, and the study harness.
Unknown keys are rejected so a typo never silently falls back to a
default. The effective configuration (after command-line overrides) hashes
to a short digest that every report embeds, making each printed number
tied to a reproducible setup.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .door import DoorConfig
from .errors import ConfigError
from .simulate import RATE_ORDER, SimConfig, TransitionRates

DEFAULT_ALPHA = 0.05
DEFAULT_TESTS = ("between", "wald")
KNOWN_TESTS = ("single", "between", "within", "wald")
DEFAULT_TABLE1_N = (100, 400)
DEFAULT_POWER_N = (100, 200, 400)


@dataclass(frozen=True)
class AnalysisSettings:
    tau_list: tuple[float, ...]
    alpha: float = DEFAULT_ALPHA
    tests: tuple[str, ...] = DEFAULT_TESTS
    single_null: float | None = None
    within_pairs: tuple[tuple[int, int], ...] = ()
    round_decimals: int | None = None


@dataclass(frozen=True)
class StudySettings:
    table1_n: tuple[int, ...] = DEFAULT_TABLE1_N
    power_n: tuple[int, ...] = DEFAULT_POWER_N
    null_rates: TransitionRates | None = None
    oracle_reps: int = 1_000_000


@dataclass(frozen=True)
class RunConfig:
    """Everything a command run needs, plus the digest that names it."""

    seed: int | None
    door: DoorConfig | None
    sim: SimConfig | None
    analysis: AnalysisSettings
    study: StudySettings
    digest: str


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return table[key]


def _reject_unknown(table: dict, allowed, where: str) -> None:
    unknown = set(table) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in [{where}]")


def _as_float_list(value, where: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{where} must contain only numbers, got {v!r}")
        out.append(float(v))
    return tuple(out)


def _as_int_list(value, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of integers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{where} must contain only integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


def _rates(value, where: str) -> TransitionRates:
    values = _as_float_list(value, where)
    if len(values) != len(RATE_ORDER):
        raise ConfigError(f"{where} needs {len(RATE_ORDER)} rates, got {len(values)}")
    try:
        return TransitionRates.from_sequence(values)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_door(table: dict) -> DoorConfig:
    _reject_unknown(table, ("labels", "num_event_types"), "door")
    labels = table.get("labels")
    if labels is not None and "num_event_types" in table:
        raise ConfigError("door takes labels or num_event_types, not both")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise ConfigError("door.labels must be a list of strings")
        try:
            return DoorConfig(num_event_types=len(labels) - 1, labels=tuple(labels))
        except ValueError as exc:
            raise ConfigError(f"door.labels: {exc}") from exc
    if "num_event_types" in table:
        try:
            return DoorConfig(num_event_types=int(table["num_event_types"]))
        except ValueError as exc:
            raise ConfigError(f"door.num_event_types: {exc}") from exc
    raise ConfigError("[door] needs labels or num_event_types")


def _parse_analysis(table: dict, alpha: float) -> AnalysisSettings:
    allowed = ("tau", "tests", "single_null", "within_pairs", "round_decimals")
    _reject_unknown(table, allowed, "analysis")
    tau_list = ()
    if "tau" in table:
        tau_list = _as_float_list(table["tau"], "analysis.tau")
        if any(t <= 0 for t in tau_list):
            raise ConfigError("analysis.tau entries must be positive")
    tests = DEFAULT_TESTS
    if "tests" in table:
        raw = table["tests"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("analysis.tests must be a non-empty list")
        for t in raw:
            if t not in KNOWN_TESTS:
                raise ConfigError(
                    f"analysis.tests entry {t!r} not one of {list(KNOWN_TESTS)}"
                )
        tests = tuple(dict.fromkeys(raw))
    single_null = None
    if "single_null" in table:
        v = table["single_null"]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError("analysis.single_null must be a number")
        single_null = float(v)
    if "single" in tests and single_null is None:
        raise ConfigError(
            "analysis.tests includes 'single' but analysis.single_null is not set; "
            "a null value must be chosen explicitly"
        )
    within_pairs = ()
    if "within_pairs" in table:
        raw = table["within_pairs"]
        if not isinstance(raw, list):
            raise ConfigError("analysis.within_pairs must be a list of [a, b] pairs")
        pairs = []
        for item in raw:
            pair = _as_int_list(item, "analysis.within_pairs entry")
            if len(pair) != 2 or pair[0] == pair[1] or min(pair) < 1:
                raise ConfigError(
                    f"analysis.within_pairs entry must be two distinct tiers >= 1, got {item!r}"
                )
            pairs.append((pair[0], pair[1]))
        within_pairs = tuple(pairs)
    round_decimals = None
    if "round_decimals" in table:
        v = table["round_decimals"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ConfigError("analysis.round_decimals must be a nonnegative integer")
        round_decimals = v
    return AnalysisSettings(
        tau_list=tau_list,
        alpha=alpha,
        tests=tests,
        single_null=single_null,
        within_pairs=within_pairs,
        round_decimals=round_decimals,
    )


def _parse_simulation(table: dict, seed, tau_list) -> SimConfig:
    allowed = (
        "n_per_arm", "censor_max", "replicates", "rates_control", "rates_treatment",
    )
    _reject_unknown(table, allowed, "simulation")
    if seed is None:
        raise ConfigError("simulation requires a top-level seed")
    if not tau_list:
        raise ConfigError("simulation requires analysis.tau (restriction horizons)")
    try:
        return SimConfig(
            rates_control=_rates(_require(table, "rates_control", "simulation"),
                                 "simulation.rates_control"),
            rates_treatment=_rates(_require(table, "rates_treatment", "simulation"),
                                   "simulation.rates_treatment"),
            n_per_arm=int(_require(table, "n_per_arm", "simulation")),
            censor_max=float(_require(table, "censor_max", "simulation")),
            tau_list=tau_list,
            seed=int(seed),
            replicates=int(table.get("replicates", 1)),
        )
    except ValueError as exc:
        raise ConfigError(f"[simulation]: {exc}") from exc


def _parse_study(table: dict) -> StudySettings:
    allowed = ("table1_n", "power_n", "null_rates", "oracle_reps")
    _reject_unknown(table, allowed, "study")
    table1_n = DEFAULT_TABLE1_N
    if "table1_n" in table:
        table1_n = _as_int_list(table["table1_n"], "study.table1_n")
    power_n = DEFAULT_POWER_N
    if "power_n" in table:
        power_n = _as_int_list(table["power_n"], "study.power_n")
    for name, values in (("table1_n", table1_n), ("power_n", power_n)):
        if any(n < 1 for n in values) or len(set(values)) != len(values):
            raise ConfigError(f"study.{name} must hold distinct positive sizes")
    null_rates = None
    if "null_rates" in table:
        null_rates = _rates(table["null_rates"], "study.null_rates")
    oracle_reps = 1_000_000
    if "oracle_reps" in table:
        v = table["oracle_reps"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError("study.oracle_reps must be a positive integer")
        oracle_reps = v
    return StudySettings(
        table1_n=table1_n,
        power_n=power_n,
        null_rates=null_rates,
        oracle_reps=oracle_reps,
    )


def parse_config(
    raw: dict,
    tau_override=None,
    alpha_override=None,
    seed_override=None,
) -> RunConfig:
    """Build the run configuration from a parsed TOML mapping."""
    _reject_unknown(raw, ("seed", "alpha", "door", "analysis", "simulation", "study"),
                    "top level")
    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError("seed must be an integer")
    if seed_override is not None:
        seed = int(seed_override)
    alpha = raw.get("alpha", DEFAULT_ALPHA)
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
        raise ConfigError("alpha must be a number")
    if alpha_override is not None:
        alpha = alpha_override
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie strictly between 0 and 1, got {alpha}")

    for section in ("door", "analysis", "simulation", "study"):
        if section in raw and not isinstance(raw[section], dict):
            raise ConfigError(f"[{section}] must be a table")

    analysis = _parse_analysis(dict(raw.get("analysis", {})), alpha)
    if tau_override:
        taus = tuple(float(t) for t in tau_override)
        if any(t <= 0 for t in taus):
            raise ConfigError("tau overrides must be positive")
        analysis = AnalysisSettings(
            tau_list=taus,
            alpha=alpha,
            tests=analysis.tests,
            single_null=analysis.single_null,
            within_pairs=analysis.within_pairs,
            round_decimals=analysis.round_decimals,
        )

    door = _parse_door(dict(raw["door"])) if "door" in raw else None
    sim = None
    if "simulation" in raw:
        sim = _parse_simulation(dict(raw["simulation"]), seed, analysis.tau_list)
    study = _parse_study(dict(raw.get("study", {})))
    if study.null_rates is None and sim is not None:
        study = StudySettings(
            table1_n=study.table1_n,
            power_n=study.power_n,
            null_rates=sim.rates_treatment,
            oracle_reps=study.oracle_reps,
        )

    effective = {
        "seed": seed,
        "alpha": alpha,
        "raw": raw,
        "tau": list(analysis.tau_list),
    }
    digest = config_digest(effective)
    return RunConfig(
        seed=seed, door=door, sim=sim, analysis=analysis, study=study, digest=digest
    )


def load_config(
    path, tau_override=None, alpha_override=None, seed_override=None
) -> RunConfig:
    """Parse and validate a TOML configuration file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: not valid TOML: {exc}") from exc
    return parse_config(
        raw,
        tau_override=tau_override,
        alpha_override=alpha_override,
        seed_override=seed_override,
    )


def config_digest(effective: dict) -> str:
    """Short stable digest of the effective configuration."""
    canon = json.dumps(effective, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
