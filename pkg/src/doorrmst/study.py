"""Replicated simulation studies: estimator-quality table and power curves.

The quality study repeats one arm's trial many times and reports, per tier
and horizon: mean bias against the Monte Carlo truth, the spread of the
estimates (se), the mean estimated standard error (see), 95% coverage
(cp), and the mean number of observed events. The power study runs both
arms, applies the between-arm tests per tier plus the overall chi-square,
and reports rejection rates over a grid of arm sizes and horizons.

Replicates where estimation is impossible (nobody at risk at the horizon)
are counted and reported, never silently dropped. Work can fan out over a
thread pool; every replicate writes to its own slot, so results are
byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .door import CONTROL, TREATMENT
from .errors import InsufficientReplicates, NoRiskAtTau, SingularCovariance
from .inference import infer_between, infer_wald, normal_quantile
from .oracle import TrueRmst
from .rmst import estimate_arm
from .rng import child_seed
from .simulate import NUM_TIERS, SimConfig, simulate_arm

log = logging.getLogger(__name__)

TABLE1_COLUMNS = ("tier", "tau", "bias", "se", "see", "cp", "events", "failed_replicates")
POWER_COLUMNS = ("test", "n_per_arm", "tau", "rejection_rate")

MIN_TABLE1_REPLICATES = 2
MIN_POWER_REPLICATES = 100

COVERAGE_LEVEL = 0.95


@dataclass(frozen=True)
class StudyRow:
    """One (tier, horizon) cell of the estimator-quality table."""

    tier: int
    tau: float
    bias: float
    se: float
    see: float
    cp: float
    events: float
    failed_replicates: int


@dataclass(frozen=True)
class PowerRow:
    """Rejection rate of one test at one (arm size, horizon) setting."""

    test: str
    n_per_arm: int
    tau: float
    rejection_rate: float


def _map_replicates(fn, replicates: int, n_jobs: int) -> None:
    if n_jobs <= 1:
        for r in range(replicates):
            fn(r)
        return
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        list(pool.map(fn, range(replicates), chunksize=64))


def run_table1_study(
    config: SimConfig,
    truths: Mapping[float, TrueRmst],
    n_jobs: int = 1,
) -> list[StudyRow]:
    """Estimator-quality study on the control-arm process.

    ``truths`` maps each horizon in ``config.tau_list`` to its Monte Carlo
    truth. Coverage uses the fixed 95% normal interval.
    """
    if config.replicates < MIN_TABLE1_REPLICATES:
        raise InsufficientReplicates(config.replicates, MIN_TABLE1_REPLICATES)
    taus = config.tau_list
    for tau in taus:
        if tau not in truths:
            raise KeyError(f"no truth supplied for tau={tau!r}")
    reps = config.replicates
    n_tau = len(taus)

    estimates = np.full((reps, n_tau, NUM_TIERS), np.nan)
    see_vals = np.full((reps, n_tau, NUM_TIERS), np.nan)
    covered = np.zeros((reps, n_tau, NUM_TIERS), dtype=bool)
    events = np.zeros((reps, n_tau, NUM_TIERS))
    valid = np.zeros((reps, n_tau), dtype=bool)
    z = normal_quantile(1.0 - COVERAGE_LEVEL)
    true_by_tau = {tau: np.asarray(truths[tau].values) for tau in taus}

    def one_replicate(r: int) -> None:
        cohort = simulate_arm(
            config.rates_control,
            config.n_per_arm,
            config.censor_max,
            child_seed(config.seed, r),
            arm=CONTROL,
        )
        for ti, tau in enumerate(taus):
            try:
                est = estimate_arm(cohort, tau)
            except NoRiskAtTau:
                continue
            se = est.std_errors()
            truth = true_by_tau[tau]
            estimates[r, ti] = est.rmst
            see_vals[r, ti] = se
            covered[r, ti] = np.abs(est.rmst - truth) <= z * se
            events[r, ti] = cohort.observed_events(tau)
            valid[r, ti] = True

    _map_replicates(one_replicate, reps, n_jobs)

    rows = []
    for ti, tau in enumerate(taus):
        ok = valid[:, ti]
        n_ok = int(ok.sum())
        failed = reps - n_ok
        if n_ok < MIN_TABLE1_REPLICATES:
            raise InsufficientReplicates(n_ok, MIN_TABLE1_REPLICATES)
        truth = true_by_tau[tau]
        for j in range(NUM_TIERS):
            est_j = estimates[ok, ti, j]
            rows.append(
                StudyRow(
                    tier=j + 1,
                    tau=tau,
                    bias=float(np.mean(est_j) - truth[j]),
                    se=float(np.std(est_j, ddof=1)),
                    see=float(np.mean(see_vals[ok, ti, j])),
                    cp=float(np.mean(covered[ok, ti, j])),
                    events=float(np.mean(events[ok, ti, j])),
                    failed_replicates=failed,
                )
            )
    return rows


def power_test_labels() -> tuple[str, ...]:
    return tuple(f"between_tier_{j}" for j in range(1, NUM_TIERS + 1)) + ("wald_overall",)


def run_power_study(
    config: SimConfig,
    alpha: float = 0.05,
    n_grid: Sequence[int] | None = None,
    n_jobs: int = 1,
) -> list[PowerRow]:
    """Rejection rates of the between-arm tests over (n, tau) settings.

    Per replicate, one maximal cohort per arm is drawn and every smaller
    arm size reuses its leading subjects; all horizons are evaluated on
    the same data. That makes the estimated power curves move together
    across the grid instead of carrying independent simulation noise.
    Under equal rates in both arms the same machinery measures type-I
    error instead of power.
    """
    if config.replicates < MIN_POWER_REPLICATES:
        raise InsufficientReplicates(config.replicates, MIN_POWER_REPLICATES)
    sizes = tuple(int(n) for n in (n_grid if n_grid is not None else (config.n_per_arm,)))
    if not sizes or any(n < 1 for n in sizes) or len(set(sizes)) != len(sizes):
        raise ValueError(f"n_grid must hold distinct positive sizes, got {sizes!r}")
    n_max = max(sizes)
    taus = config.tau_list
    reps = config.replicates
    labels = power_test_labels()
    n_tests = len(labels)

    reject = np.zeros((reps, len(sizes), len(taus), n_tests), dtype=bool)
    valid = np.zeros((reps, len(sizes), len(taus)), dtype=bool)

    def one_replicate(r: int) -> None:
        control_full = simulate_arm(
            config.rates_control,
            n_max,
            config.censor_max,
            child_seed(config.seed, r, 0),
            arm=CONTROL,
        )
        treatment_full = simulate_arm(
            config.rates_treatment,
            n_max,
            config.censor_max,
            child_seed(config.seed, r, 1),
            arm=TREATMENT,
        )
        for ni, n in enumerate(sizes):
            control = control_full.head(n)
            treatment = treatment_full.head(n)
            for ti, tau in enumerate(taus):
                try:
                    est_c = estimate_arm(control, tau)
                    est_t = estimate_arm(treatment, tau)
                    for j in range(NUM_TIERS):
                        res = infer_between(est_t, est_c, j + 1, alpha)
                        reject[r, ni, ti, j] = res.reject
                    reject[r, ni, ti, NUM_TIERS] = infer_wald(est_t, est_c, alpha).reject
                except (NoRiskAtTau, SingularCovariance):
                    continue
                valid[r, ni, ti] = True

    _map_replicates(one_replicate, reps, n_jobs)

    rows = []
    for ni, n in enumerate(sizes):
        for ti, tau in enumerate(taus):
            ok = valid[:, ni, ti]
            n_ok = int(ok.sum())
            if n_ok < MIN_POWER_REPLICATES:
                raise InsufficientReplicates(n_ok, MIN_POWER_REPLICATES)
            if n_ok < reps:
                log.warning(
                    "power cell n=%d tau=%g: %d of %d replicates failed estimation",
                    n, tau, reps - n_ok, reps,
                )
            for t_idx, label in enumerate(labels):
                rows.append(
                    PowerRow(
                        test=label,
                        n_per_arm=n,
                        tau=tau,
                        rejection_rate=float(np.mean(reject[ok, ni, ti, t_idx])),
                    )
                )
    return rows


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_table1_csv(rows: Sequence[StudyRow], path) -> None:
    """Full-precision CSV with the fixed quality-table columns."""
    _write_csv(
        path,
        TABLE1_COLUMNS,
        [
            (r.tier, repr(r.tau), repr(r.bias), repr(r.se), repr(r.see),
             repr(r.cp), repr(r.events), r.failed_replicates)
            for r in rows
        ],
    )


def write_power_csv(rows: Sequence[PowerRow], path) -> None:
    """Full-precision CSV with the fixed power-table columns."""
    _write_csv(
        path,
        POWER_COLUMNS,
        [(r.test, r.n_per_arm, repr(r.tau), repr(r.rejection_rate)) for r in rows],
    )
