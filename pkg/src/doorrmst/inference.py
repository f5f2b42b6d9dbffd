"""Normal and chi-square inference over tiered restricted-mean estimates.

Four questions are covered: one tier against a fixed null, one tier
between arms, two tiers within one arm (their influence columns share
subjects, so the covariance term matters), and an overall between-arm
chi-square across all tiers at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import SameTier, SingularCovariance, TauMismatch, TierOutOfRange
from .rmst import RmstEstimate

SINGLE = "single"
BETWEEN_ARMS = "between_arms"
WITHIN_ARM = "within_arm"
WALD_OVERALL = "wald_overall"

# chi-square solves stay direct (pivoted LU on a J x J system); anything
# larger signals a misuse of the tier structure.
MAX_WALD_TIERS = 16

_RCOND_FLOOR = 1e-12


@dataclass(frozen=True)
class InferenceResult:
    """Outcome of one hypothesis test.

    Interval fields are ``None`` for the chi-square test, whose result is
    the statistic, its degrees of freedom, and the p-value.
    """

    test_type: str
    statistic: float
    p_value: float
    alpha: float
    estimate: float | None = None
    std_error: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    df: int | None = None
    null_value: float | None = None

    @property
    def reject(self) -> bool:
        return self.p_value < self.alpha


@lru_cache(maxsize=32)
def normal_quantile(alpha: float) -> float:
    """Two-sided normal critical value z with P(|Z| > z) = alpha."""
    return float(special.ndtri(1.0 - alpha / 2.0))


def normal_p_value(statistic: float) -> float:
    return float(math.erfc(abs(statistic) / math.sqrt(2.0)))


def chi_square_p_value(statistic: float, df: int) -> float:
    return float(special.gammaincc(df / 2.0, statistic / 2.0))


def chi_square_critical(alpha: float, df: int) -> float:
    return float(2.0 * special.gammainccinv(df / 2.0, alpha))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha!r}")
    return alpha


def _check_tier(est: RmstEstimate, tier: int) -> int:
    if not 1 <= tier <= est.num_tiers:
        raise TierOutOfRange(tier, est.num_tiers)
    return tier


def _check_comparable(a: RmstEstimate, b: RmstEstimate) -> None:
    if a.tau != b.tau:
        raise TauMismatch(
            f"estimates restrict to different horizons: {a.tau!r} vs {b.tau!r}"
        )
    if a.num_tiers != b.num_tiers:
        raise TauMismatch(
            f"estimates carry different tier counts: {a.num_tiers} vs {b.num_tiers}"
        )


def _normal_result(test_type, diff, variance, alpha, null_value) -> InferenceResult:
    se = math.sqrt(max(float(variance), 0.0))
    z = normal_quantile(alpha)
    centered = diff - null_value
    if se > 0.0:
        statistic = centered / se
        p = normal_p_value(statistic)
    else:
        statistic = 0.0 if centered == 0.0 else math.copysign(math.inf, centered)
        p = 1.0 if centered == 0.0 else 0.0
    return InferenceResult(
        test_type=test_type,
        statistic=statistic,
        p_value=p,
        alpha=alpha,
        estimate=diff,
        std_error=se,
        ci_low=diff - z * se,
        ci_high=diff + z * se,
        null_value=null_value,
    )


def infer_single(
    est: RmstEstimate, tier: int, null_value: float = 0.0, alpha: float = 0.05
) -> InferenceResult:
    """One tier's restricted mean against a fixed null value.

    The zero default is a placeholder; callers comparing against a
    meaningful reference should always pass one explicitly.
    """
    alpha = _check_alpha(alpha)
    j = _check_tier(est, tier) - 1
    return _normal_result(
        SINGLE,
        float(est.rmst[j]),
        float(est.cov[j, j]),
        alpha,
        float(null_value),
    )


def infer_between(
    treated: RmstEstimate, control: RmstEstimate, tier: int, alpha: float = 0.05
) -> InferenceResult:
    """Treated-minus-control difference of one tier's restricted mean.

    Arms are independent samples, so the variances add.
    """
    alpha = _check_alpha(alpha)
    _check_comparable(treated, control)
    j = _check_tier(treated, tier) - 1
    diff = float(treated.rmst[j] - control.rmst[j])
    variance = float(treated.cov[j, j] + control.cov[j, j])
    return _normal_result(BETWEEN_ARMS, diff, variance, alpha, 0.0)


def infer_within(
    est: RmstEstimate, tier_a: int, tier_b: int, alpha: float = 0.05
) -> InferenceResult:
    """Difference between two tiers of one arm, tier_b minus tier_a.

    Both tiers are estimated on the same subjects; the covariance between
    their influence columns enters the variance with a minus-two weight.
    """
    alpha = _check_alpha(alpha)
    a = _check_tier(est, tier_a) - 1
    b = _check_tier(est, tier_b) - 1
    if a == b:
        raise SameTier(tier_a)
    diff = float(est.rmst[b] - est.rmst[a])
    variance = float(est.cov[a, a] + est.cov[b, b] - 2.0 * est.cov[a, b])
    return _normal_result(WITHIN_ARM, diff, variance, alpha, 0.0)


def infer_wald(
    treated: RmstEstimate, control: RmstEstimate, alpha: float = 0.05
) -> InferenceResult:
    """Overall between-arm chi-square across the whole tier vector.

    The statistic is d' M^{-1} d with d the vector of tier differences and
    M the sum of the two covariance matrices, on J degrees of freedom. M
    is solved directly; a reciprocal condition number below 1e-12 raises
    ``SingularCovariance`` instead of returning noise.
    """
    alpha = _check_alpha(alpha)
    _check_comparable(treated, control)
    j = treated.num_tiers
    if j > MAX_WALD_TIERS:
        raise TierOutOfRange(j, MAX_WALD_TIERS)
    d = np.asarray(treated.rmst - control.rmst, dtype=np.float64)
    m = np.asarray(treated.cov + control.cov, dtype=np.float64)

    sing = np.linalg.svd(m, compute_uv=False)
    if not np.all(np.isfinite(sing)) or sing[0] <= 0.0:
        raise SingularCovariance(0.0)
    rcond = float(sing[-1] / sing[0])
    if rcond < _RCOND_FLOOR:
        raise SingularCovariance(rcond)

    statistic = float(d @ np.linalg.solve(m, d))
    statistic = max(statistic, 0.0)
    return InferenceResult(
        test_type=WALD_OVERALL,
        statistic=statistic,
        p_value=chi_square_p_value(statistic, j),
        alpha=alpha,
        df=j,
    )
