"""Counting-process summaries and the product-limit survival estimator.

Risk tables aggregate a tier's observations onto the grid of distinct
observed times with the events-first tie convention: events at time t are
removed from the same risk set the censored subjects at t still belong to.
Times are compared exactly; no epsilon tie detection happens here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .door import Cohort
from .errors import EmptyCohort, TierOutOfRange


@dataclass(frozen=True)
class RiskTable:
    """Distinct-time counts for one tier of one cohort.

    ``times`` is strictly increasing; ``at_risk[k]`` counts subjects with
    observed time >= times[k]; ``events`` and ``censored`` split the
    subjects observed exactly at times[k].
    """

    times: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray
    censored: np.ndarray
    n: int

    @property
    def pi(self) -> np.ndarray:
        """At-risk proportions Y/n."""
        return self.at_risk / self.n

    def check(self) -> None:
        """Re-derive the defining recurrences; raises AssertionError on drift."""
        assert np.all(np.diff(self.times) > 0)
        assert int(self.events.sum() + self.censored.sum()) == self.n
        assert self.at_risk[0] == self.n
        expect = self.at_risk[:-1] - self.events[:-1] - self.censored[:-1]
        assert np.array_equal(self.at_risk[1:], expect)


@dataclass(frozen=True)
class KmCurve:
    """Right-continuous product-limit step function for one tier.

    ``survival[k]`` is the value just after ``times[k]``; the curve is 1
    before the first entry. ``hazard[k]`` is the increment dN/Y at
    ``times[k]`` (zero at pure-censoring times).
    """

    times: np.ndarray
    survival: np.ndarray
    hazard: np.ndarray

    @property
    def support_max(self) -> float:
        return float(self.times[-1])

    def evaluate(self, t):
        """Step-function lookup S(t) for scalar or array ``t``."""
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.times, t, side="right") - 1
        vals = np.where(idx >= 0, self.survival[np.maximum(idx, 0)], 1.0)
        return float(vals) if vals.ndim == 0 else vals


def build_risk_table(cohort: Cohort, tier: int) -> RiskTable:
    """Aggregate one tier onto its distinct-time grid.

    ``tier`` is 1-based. Raises ``EmptyCohort`` for n = 0 and
    ``TierOutOfRange`` for a bad tier index.
    """
    if cohort.n == 0:
        raise EmptyCohort()
    if not 1 <= tier <= cohort.num_tiers:
        raise TierOutOfRange(tier, cohort.num_tiers)
    x, d = cohort.tier_column(tier)
    order = np.argsort(x, kind="quicksort")
    xs = x[order]
    es = (d[order] != 0).astype(np.int64)
    times, start, counts = np.unique(xs, return_index=True, return_counts=True)
    events = np.add.reduceat(es, start)
    return RiskTable(
        times=times,
        at_risk=(cohort.n - start).astype(np.int64),
        events=events,
        censored=counts - events,
        n=cohort.n,
    )


def km_fit(table: RiskTable) -> KmCurve:
    """Product-limit curve from a risk table.

    Multiplies the factors (1 - dN/Y) in time order; rows without events
    leave the curve flat. The last value is carried forward past the end of
    the grid.
    """
    hazard = table.events / table.at_risk
    survival = np.cumprod(1.0 - hazard)
    return KmCurve(times=table.times.copy(), survival=survival, hazard=hazard)
