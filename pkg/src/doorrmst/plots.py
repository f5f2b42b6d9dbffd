"""Static SVG figures: survival staircases and power curves."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_TIER_COLORS = ("#1f5fa8", "#2e8b57", "#b8860b", "#a0422d", "#6a3d9a", "#444444")


def km_staircase_figure(curves, path, tau=None) -> None:
    """Per-arm staircases of every tier's survival curve.

    ``curves`` maps (arm, tier) to a fitted curve. The area between
    adjacent tier curves is shaded: it is the expected time spent at
    exactly that outcome depth, which is what the tier means difference
    into. A vertical line marks the restriction horizon when given.
    """
    arms = sorted({arm for arm, _ in curves})
    tiers = sorted({tier for _, tier in curves})
    fig, axes = plt.subplots(
        1, len(arms), figsize=(5.2 * len(arms), 4.0), sharey=True, squeeze=False
    )
    for ax, arm in zip(axes[0], arms):
        t_end = max(curves[(arm, tier)].support_max for tier in tiers)
        if tau is not None:
            t_end = max(t_end, tau)
        grid = np.unique(
            np.concatenate(
                [curves[(arm, tier)].times for tier in tiers] + [np.array([0.0, t_end])]
            )
        )
        prev = np.ones_like(grid)
        for tier in tiers:
            curve = curves[(arm, tier)]
            vals = curve.evaluate(grid)
            ax.step(
                np.concatenate(([0.0], grid)),
                np.concatenate(([1.0], vals)),
                where="post",
                color=_TIER_COLORS[(tier - 1) % len(_TIER_COLORS)],
                label=f"tier {tier}",
                linewidth=1.4,
            )
            ax.fill_between(
                grid, vals, prev, step="post", alpha=0.12,
                color=_TIER_COLORS[(tier - 1) % len(_TIER_COLORS)],
            )
            prev = vals
        if tau is not None:
            ax.axvline(tau, color="#666666", linestyle=":", linewidth=1.0)
        ax.set_title(arm)
        ax.set_xlabel("time")
        ax.set_ylim(0.0, 1.02)
        ax.set_xlim(left=0.0)
        ax.legend(loc="lower left", fontsize=8)
    axes[0][0].set_ylabel("survival (tier not yet reached)")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def power_figure(rows, path, title="rejection rate") -> None:
    """Rejection rate against arm size, one line per test, one panel per tau."""
    taus = sorted({r.tau for r in rows})
    tests = sorted({r.test for r in rows})
    fig, axes = plt.subplots(
        1, len(taus), figsize=(4.2 * len(taus), 3.6), sharey=True, squeeze=False
    )
    for ax, tau in zip(axes[0], taus):
        for k, test in enumerate(tests):
            pts = sorted(
                (r.n_per_arm, r.rejection_rate) for r in rows if r.tau == tau and r.test == test
            )
            ax.plot(
                [p[0] for p in pts],
                [p[1] for p in pts],
                marker="o",
                markersize=3.5,
                linewidth=1.3,
                color=_TIER_COLORS[k % len(_TIER_COLORS)],
                label=test,
            )
        ax.set_title(f"tau = {tau:g}")
        ax.set_xlabel("subjects per arm")
        ax.set_ylim(0.0, 1.02)
    axes[0][0].set_ylabel(title)
    axes[0][-1].legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
