"""Restricted mean survival and its influence-based covariance.

For one tier, the restricted mean at horizon tau is the area under the
product-limit curve over [0, tau]. Joint uncertainty across tiers comes
from per-subject influence values

    psi_i = g(x_i) (n / Y(x_i)) [x_i event at or before tau]
            - sum over event times s <= min(x_i, tau) of g(s) (n / Y(s)) dN(s) / Y(s)

with g(s) = -(remaining area from s to tau). Averaging products of
influence columns gives a J x J covariance estimate for the whole vector
of tier means on the same subjects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .door import Cohort
from .errors import EmptyCohort, NoRiskAtTau, TierOutOfRange
from .km import KmCurve, build_risk_table, km_fit


@dataclass(frozen=True)
class RmstEstimate:
    """Joint tier-wise restricted-mean estimate for one arm.

    ``rmst`` is (J,), ``cov`` (J, J), ``influence`` (n, J) with columns
    summing to zero, and ``g_cache`` holds per tier the event times at or
    below tau together with g evaluated there (diagnostics and plotting).
    """

    arm: str
    tau: float
    n: int
    rmst: np.ndarray
    cov: np.ndarray
    influence: np.ndarray
    g_cache: tuple[tuple[np.ndarray, np.ndarray], ...]

    @property
    def num_tiers(self) -> int:
        return self.rmst.shape[0]

    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be finite and nonnegative, got {tau!r}")
    return tau


def _segment_areas(curve: KmCurve, tau: float) -> float:
    times = curve.times
    surv_before = np.concatenate((np.ones(1), curve.survival[:-1]))
    clipped = np.minimum(times, tau)
    widths = np.diff(np.concatenate((np.zeros(1), clipped)))
    area = float(np.sum(surv_before * widths))
    area += float(curve.survival[-1]) * (tau - float(clipped[-1]))
    return area


def rmst(curve: KmCurve, tau: float) -> float:
    """Area under the survival step function over [0, tau].

    Exact segment-by-segment integration, no quadrature. Raises
    ``NoRiskAtTau`` when the curve's support ends before tau, since the
    estimand is undefined past the last observed time.
    """
    tau = _check_tau(tau)
    if tau == 0.0:
        return 0.0
    if curve.support_max < tau:
        raise NoRiskAtTau(tau)
    return _segment_areas(curve, tau)


def cumulative_area(curve: KmCurve, s) -> np.ndarray:
    """Integral of the curve from 0 to ``s`` (scalar or array, any s >= 0)."""
    s = np.asarray(s, dtype=np.float64)
    times = curve.times
    surv_before = np.concatenate((np.ones(1), curve.survival[:-1]))
    widths = np.diff(np.concatenate((np.zeros(1), times)))
    node_area = np.cumsum(surv_before * widths)  # area up to each grid time
    idx = np.searchsorted(times, s, side="right") - 1
    idx_safe = np.maximum(idx, 0)
    base = np.where(idx >= 0, node_area[idx_safe], 0.0)
    anchor = np.where(idx >= 0, times[idx_safe], 0.0)
    level = np.where(idx >= 0, curve.survival[idx_safe], 1.0)
    out = base + level * (s - anchor)
    return float(out) if out.ndim == 0 else out


def g_function(curve: KmCurve, s: float, tau: float) -> float:
    """Negative remaining area: ``-(integral of S from s to tau)``.

    Defined for 0 <= s <= tau; zero at s = tau, and it shrinks in
    magnitude as s moves toward tau.
    """
    tau = _check_tau(tau)
    s = float(s)
    if not 0.0 <= s <= tau:
        raise ValueError(f"s must lie in [0, tau], got s={s!r}, tau={tau!r}")
    return cumulative_area(curve, s) - _segment_areas(curve, tau)


def _checked_column(cohort: Cohort, tier: int, tau: float):
    if cohort.n == 0:
        raise EmptyCohort()
    if not 1 <= tier <= cohort.num_tiers:
        raise TierOutOfRange(tier, cohort.num_tiers)
    x, d = cohort.tier_column(tier)
    if not np.any(x >= tau):
        raise NoRiskAtTau(tau, tier)
    return x, d


def influence_contributions(cohort: Cohort, tier: int, tau: float) -> np.ndarray:
    """Per-subject influence values for one tier (they sum to zero)."""
    tau = _check_tau(tau)
    x, d = _checked_column(cohort, tier, tau)
    backend = kernels.active_backend()
    _, psi, _, _ = backend.tier_estimate(x, d, tau)
    return psi


def martingale_variance(cohort: Cohort, tier: int, tau: float) -> float:
    """Counting-process variance of one tier's restricted mean.

    Sums g(s)^2 dN(s) / Y(s)^2 over event times at or below tau. This is
    an alternative route to the same variance the influence columns give;
    the two agree closely once cohorts are moderately large, and the tests
    hold them against each other.
    """
    tau = _check_tau(tau)
    _checked_column(cohort, tier, tau)
    table = build_risk_table(cohort, tier)
    curve = km_fit(table)
    within = table.times <= tau
    has_event = within & (table.events > 0)
    if not np.any(has_event):
        return 0.0
    s = table.times[has_event]
    total = _segment_areas(curve, tau)
    g = cumulative_area(curve, s) - total
    dn = table.events[has_event]
    y = table.at_risk[has_event]
    return float(np.sum(g * g * dn / (y * y)))


def estimate_arm(cohort: Cohort, tau: float) -> RmstEstimate:
    """Joint restricted-mean estimate over all tiers of one arm.

    Every tier must still have somebody at risk at tau. The covariance is
    the influence cross-product divided by n^2, with no small-sample
    inflation factor, and is symmetrized against floating-point drift.
    """
    tau = _check_tau(tau)
    if cohort.n == 0:
        raise EmptyCohort()
    n = cohort.n
    num_tiers = cohort.num_tiers
    columns = [_checked_column(cohort, tier, tau) for tier in range(1, num_tiers + 1)]

    backend = kernels.active_backend()
    values = np.empty(num_tiers)
    influence = np.empty((n, num_tiers))
    cache = []
    for j, (x, d) in enumerate(columns):
        area, psi, jump_times, jump_g = backend.tier_estimate(x, d, tau)
        values[j] = area
        influence[:, j] = psi
        cache.append((jump_times, jump_g))
    cov = influence.T @ influence / float(n * n)
    cov = (cov + cov.T) / 2.0
    return RmstEstimate(
        arm=cohort.arm,
        tau=tau,
        n=n,
        rmst=values,
        cov=cov,
        influence=influence,
        g_cache=tuple(cache),
    )
