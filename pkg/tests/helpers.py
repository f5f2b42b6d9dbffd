"""Cohort builders shared by several test modules."""

import numpy as np

from doorrmst.door import CONTROL, Cohort, DoorConfig


def make_cohort(times, indicators, arm=CONTROL):
    """Cohort straight from arrays; 1-d inputs become a single tier."""
    times = np.asarray(times, dtype=np.float64)
    indicators = np.asarray(indicators, dtype=np.uint8)
    if times.ndim == 1:
        times = times[:, None]
    if indicators.ndim == 1:
        indicators = indicators[:, None]
    config = DoorConfig(num_event_types=times.shape[1])
    return Cohort(config=config, arm=arm, times=times, indicators=indicators)


def random_cohort(rng, n, num_tiers=2, max_time=5.0, censor_prob=0.35, arm=CONTROL):
    """Small random cohort with ties and valid censoring propagation.

    Tier gaps are drawn on a coarse half-integer grid so exact ties occur
    often, and a uniform censoring time is folded in the same way the data
    model demands: once censored, every later tier repeats the censoring
    time with indicator zero.
    """
    gaps = rng.integers(0, int(2 * max_time) + 1, size=(n, num_tiers)) / 2.0
    true_times = np.cumsum(gaps, axis=1)
    censor = np.where(
        rng.random(n) < censor_prob,
        rng.integers(0, int(2 * max_time) + 1, size=n) / 2.0,
        np.inf,
    )[:, None]
    times = np.minimum(true_times, censor)
    indicators = (true_times <= censor).astype(np.uint8)
    return make_cohort(times, indicators, arm=arm)
