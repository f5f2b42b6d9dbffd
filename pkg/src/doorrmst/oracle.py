"""Ground truth for the simulated process.

The Monte Carlo oracle draws uncensored tier times straight from the
event-time kernel and averages min(T, tau); it never touches the
censoring machinery, so it stays an independent target for the estimator
rather than a mirror of it. Two small closed forms cover what is
analytically available: the first-tier restricted mean (the initial
holding time is exponential in the total exit rate) and the expected
number of first-tier events observed under uniform censoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import make_generator
from .simulate import NUM_TIERS, TransitionRates, true_event_times


@dataclass(frozen=True)
class TrueRmst:
    """Monte Carlo truth for one rate vector at one horizon."""

    tau: float
    values: np.ndarray
    mc_reps: int
    mc_standard_error: np.ndarray


def true_rmst_mc(
    rates: TransitionRates,
    tau: float,
    reps: int = 1_000_000,
    seed: int = 0,
    chunk_size: int = 262_144,
) -> TrueRmst:
    """True tier-wise restricted means by direct simulation, no censoring.

    One stream is consumed in row order, so the result does not depend on
    ``chunk_size`` beyond floating-point grouping of the partial sums.
    ``seed`` may be an integer or a derived ``SeedSequence``.
    """
    tau = float(tau)
    if not tau >= 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau!r}")
    reps = int(reps)
    if reps < 1:
        raise ValueError("reps must be at least 1")
    gen = make_generator(seed)
    sums = np.zeros(NUM_TIERS)
    sumsq = np.zeros(NUM_TIERS)
    done = 0
    while done < reps:
        take = min(int(chunk_size), reps - done)
        times, _ = true_event_times(rates, take, gen)
        clipped = np.minimum(times, tau)
        sums += clipped.sum(axis=0)
        sumsq += np.square(clipped).sum(axis=0)
        done += take
    values = sums / reps
    variance = np.maximum(sumsq / reps - values * values, 0.0)
    return TrueRmst(
        tau=tau,
        values=values,
        mc_reps=reps,
        mc_standard_error=np.sqrt(variance / reps),
    )


def true_rmst1_closed_form(rates: TransitionRates, tau: float) -> float:
    """Exact first-tier restricted mean: (1 - exp(-lam * tau)) / lam.

    The time to leaving the initial state is exponential with rate equal
    to that state's total exit rate, and every exit counts for tier 1.
    """
    tau = float(tau)
    if not tau >= 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau!r}")
    lam = rates.exit_initial
    return float(-math.expm1(-lam * tau) / lam)


def expected_observed_events_tier1(
    rates: TransitionRates, censor_max: float, tau: float
) -> float:
    """P(tier-1 event observed by tau) under uniform censoring on (0, b).

    The first-tier time T is exponential with the initial state's total
    exit rate and the censoring time C is uniform on (0, b), independent;
    the probability that T <= min(C, tau) is

        (1/b) * integral_0^t (1 - exp(-lam c)) dc  +  (1 - t/b) * (1 - exp(-lam t))

    with t = min(tau, b). Multiplying by the arm size gives the expected
    event count a study reports for tier 1.
    """
    tau = float(tau)
    b = float(censor_max)
    if not b > 0.0:
        raise ValueError("censor_max must be positive")
    if not tau >= 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau!r}")
    lam = rates.exit_initial
    t = min(tau, b)
    cdf_t = -math.expm1(-lam * t)
    integral = t - cdf_t / lam
    return integral / b + (1.0 - t / b) * cdf_t
