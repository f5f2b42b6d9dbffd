"""Analysis report assembly and rendering.

The report carries per-arm restricted means with intervals, the requested
contrasts, and enough provenance (configuration digest, dataset digest,
package version) that every printed number can be recomputed from the
archived inputs. Human tables print at three decimals; the CSV exports
keep full precision.
"""

from __future__ import annotations

import contextlib
import csv
from dataclasses import dataclass, field
from typing import Sequence

from ._version import __version__
from .door import CONTROL, TREATMENT, DoorConfig
from .inference import (
    BETWEEN_ARMS,
    InferenceResult,
    WALD_OVERALL,
    chi_square_critical,
    infer_between,
    infer_single,
    infer_wald,
    infer_within,
    normal_quantile,
)
from .rmst import RmstEstimate


@dataclass(frozen=True)
class ArmSummary:
    """One arm's tier means with normal intervals at one horizon."""

    arm: str
    tau: float
    n: int
    rmst: tuple[float, ...]
    std_error: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]


@dataclass(frozen=True)
class AnalysisReport:
    """Everything an analysis run produced, ready to render."""

    config_digest: str
    data_digest: str
    door: DoorConfig
    alpha: float
    taus: tuple[float, ...]
    arm_sizes: dict
    arms: tuple[ArmSummary, ...]
    between: tuple[tuple[float, int, InferenceResult], ...] = ()
    within: tuple[tuple[float, str, int, int, InferenceResult], ...] = ()
    wald: tuple[tuple[float, InferenceResult], ...] = ()
    single: tuple[tuple[float, str, int, InferenceResult], ...] = ()
    version: str = field(default=__version__)


def summarize_arm(est: RmstEstimate, alpha: float) -> ArmSummary:
    z = normal_quantile(alpha)
    se = est.std_errors()
    return ArmSummary(
        arm=est.arm,
        tau=est.tau,
        n=est.n,
        rmst=tuple(float(v) for v in est.rmst),
        std_error=tuple(float(v) for v in se),
        ci_low=tuple(float(v - z * s) for v, s in zip(est.rmst, se)),
        ci_high=tuple(float(v + z * s) for v, s in zip(est.rmst, se)),
    )


def build_report(
    config_digest: str,
    data_digest: str,
    door: DoorConfig,
    alpha: float,
    estimates: dict,
    tests: Sequence[str],
    single_null: float | None = None,
    within_pairs: Sequence[tuple[int, int]] = (),
) -> AnalysisReport:
    """Assemble the report from per-(tau, arm) estimates.

    ``estimates`` maps tau to {arm: RmstEstimate}; contrasts are computed
    for every tau where both arms are present.
    """
    taus = tuple(sorted(estimates))
    arms = []
    between = []
    within = []
    wald = []
    single = []
    arm_sizes = {}
    for tau in taus:
        by_arm = estimates[tau]
        for arm in sorted(by_arm):
            est = by_arm[arm]
            arm_sizes[arm] = est.n
            arms.append(summarize_arm(est, alpha))
            if "single" in tests and single_null is not None:
                for tier in range(1, est.num_tiers + 1):
                    single.append(
                        (tau, arm, tier, infer_single(est, tier, single_null, alpha))
                    )
            if "within" in tests:
                for a, b in within_pairs:
                    within.append((tau, arm, a, b, infer_within(est, a, b, alpha)))
        if CONTROL in by_arm and TREATMENT in by_arm:
            treated = by_arm[TREATMENT]
            control = by_arm[CONTROL]
            if "between" in tests:
                for tier in range(1, treated.num_tiers + 1):
                    between.append((tau, tier, infer_between(treated, control, tier, alpha)))
            if "wald" in tests:
                wald.append((tau, infer_wald(treated, control, alpha)))
    return AnalysisReport(
        config_digest=config_digest,
        data_digest=data_digest,
        door=door,
        alpha=alpha,
        taus=taus,
        arm_sizes=arm_sizes,
        arms=tuple(arms),
        between=tuple(between),
        within=tuple(within),
        wald=tuple(wald),
        single=tuple(single),
    )


def _cell(est: float, lo: float, hi: float) -> str:
    return f"{est:.3f}({lo:.3f}, {hi:.3f})"


def render_text(report: AnalysisReport) -> str:
    """Fixed-width summary; estimates print as value(low, high) at 3 decimals."""
    lines = []
    lines.append("restricted mean survival by tier")
    lines.append(
        f"version {report.version}  config {report.config_digest}  data {report.data_digest}"
    )
    sizes = "  ".join(f"{arm} n={n}" for arm, n in sorted(report.arm_sizes.items()))
    lines.append(f"alpha={report.alpha:g}  {sizes}")

    by_tau: dict[float, dict[str, ArmSummary]] = {}
    for summary in report.arms:
        by_tau.setdefault(summary.tau, {})[summary.arm] = summary
    between_by = {(tau, tier): res for tau, tier, res in report.between}

    for tau in report.taus:
        arms_here = by_tau.get(tau, {})
        arm_names = sorted(arms_here)
        lines.append("")
        lines.append(f"tau = {tau:g}")
        header = ["tier".ljust(6)] + [a.ljust(24) for a in arm_names]
        if len(arm_names) == 2:
            header.append("difference".ljust(24))
        lines.append("  ".join(header).rstrip())
        num_tiers = report.door.num_tiers
        for tier in range(1, num_tiers + 1):
            row = [f"{tier}".ljust(6)]
            for a in arm_names:
                s = arms_here[a]
                row.append(
                    _cell(s.rmst[tier - 1], s.ci_low[tier - 1], s.ci_high[tier - 1]).ljust(24)
                )
            res = between_by.get((tau, tier))
            if res is not None:
                row.append(_cell(res.estimate, res.ci_low, res.ci_high).ljust(24))
            lines.append("  ".join(row).rstrip())
        for wtau, res in report.wald:
            if wtau == tau:
                crit = chi_square_critical(report.alpha, res.df)
                verdict = "reject" if res.reject else "fail to reject"
                lines.append(
                    f"overall chi-square = {res.statistic:.3f} on {res.df} df "
                    f"(critical {crit:.3f} at alpha={report.alpha:g}, p={res.p_value:.4f}): {verdict}"
                )
        for stau, arm, tier, res in report.single:
            if stau == tau:
                lines.append(
                    f"single {arm} tier {tier} vs {res.null_value:g}: "
                    f"{_cell(res.estimate, res.ci_low, res.ci_high)} p={res.p_value:.4f}"
                )
        for wtau, arm, a, b, res in report.within:
            if wtau == tau:
                lines.append(
                    f"within {arm} tier {b} minus tier {a}: "
                    f"{_cell(res.estimate, res.ci_low, res.ci_high)} p={res.p_value:.4f}"
                )
    lines.append("")
    return "\n".join(lines)


@contextlib.contextmanager
def _as_stream(path_or_file):
    if hasattr(path_or_file, "write"):
        yield path_or_file
    else:
        with open(path_or_file, "w", newline="") as fh:
            yield fh


def write_estimates_csv(report: AnalysisReport, path) -> None:
    with _as_stream(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(("tau", "arm", "tier", "rmst", "std_error", "ci_low", "ci_high"))
        for s in report.arms:
            for tier in range(1, len(s.rmst) + 1):
                writer.writerow(
                    (
                        repr(s.tau),
                        s.arm,
                        tier,
                        repr(s.rmst[tier - 1]),
                        repr(s.std_error[tier - 1]),
                        repr(s.ci_low[tier - 1]),
                        repr(s.ci_high[tier - 1]),
                    )
                )


def write_tests_csv(report: AnalysisReport, path) -> None:
    with _as_stream(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(
            (
                "tau", "test", "arm", "tier_a", "tier_b", "estimate", "std_error",
                "ci_low", "ci_high", "statistic", "df", "p_value",
            )
        )

        def put(tau, test, arm, tier_a, tier_b, res: InferenceResult):
            writer.writerow(
                (
                    repr(tau), test, arm, tier_a, tier_b,
                    "" if res.estimate is None else repr(res.estimate),
                    "" if res.std_error is None else repr(res.std_error),
                    "" if res.ci_low is None else repr(res.ci_low),
                    "" if res.ci_high is None else repr(res.ci_high),
                    repr(res.statistic),
                    "" if res.df is None else res.df,
                    repr(res.p_value),
                )
            )

        for tau, arm, tier, res in report.single:
            put(tau, res.test_type, arm, tier, "", res)
        for tau, tier, res in report.between:
            put(tau, BETWEEN_ARMS, "", tier, "", res)
        for tau, arm, a, b, res in report.within:
            put(tau, res.test_type, arm, a, b, res)
        for tau, res in report.wald:
            put(tau, WALD_OVERALL, "", "", "", res)
