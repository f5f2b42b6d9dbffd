"""Vectorized numpy implementations of the hot kernels.

The numba backend mirrors these routines step for step; both consume the
same uniform layout and keep the same summation order. Survival estimates
agree bit for bit; simulated times agree to a couple of ulp (the two
backends link different log1p implementations). Any fixed seed is exactly
reproducible within one backend.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

# Per-subject uniform budget: columns 0..3 hold the exit-time draws for
# process states 1..4, columns 4..6 the next-state draws for states 1..3,
# column 7 is reserved for the caller's censoring draw.
U_COLS = 8
NUM_TIERS = 4


def event_times(u: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """True tiered event times for the five-state progression process.

    States: 1 initial, 2 one event, 3 two events, 4 disability, 5 death.
    ``rates`` holds the nine constant hazards in the order
    (1>2, 1>4, 1>5, 2>3, 2>4, 2>5, 3>4, 3>5, 4>5).

    Tier time j is the first entry into state j+1 or any worse state, on a
    clock accumulated over the visited states: subjects that never make a
    transition of tier j take that tier's time at their absorbing move
    (disability or death), so times are nondecreasing across tiers.

    Parameters
    ----------
    u : (n, 8) float64
        Uniforms in [0, 1); see ``U_COLS`` for the column layout.
    rates : (9,) float64

    Returns
    -------
    (n, 4) float64, tier j in column j - 1.
    """
    r12, r14, r15, r23, r24, r25, r34, r35, _r45 = (float(v) for v in rates)
    exit1 = r12 + r14 + r15
    exit2 = r23 + r24 + r25
    exit3 = r34 + r35
    exit4 = float(rates[8])

    # Inverse-CDF exponentials; a zero exit rate only occurs for states the
    # branch draws never route to, so the inf/nan lanes are discarded below.
    with np.errstate(divide="ignore", invalid="ignore"):
        gap1 = -np.log1p(-u[:, 0]) / exit1
        gap2 = -np.log1p(-u[:, 1]) / exit2
        gap3 = -np.log1p(-u[:, 2]) / exit3
        gap4 = -np.log1p(-u[:, 3]) / exit4

    p12 = r12 / exit1
    p14 = r14 / exit1
    p23 = r23 / exit2 if exit2 > 0.0 else 0.0
    p24 = r24 / exit2 if exit2 > 0.0 else 0.0
    p34 = r34 / exit3 if exit3 > 0.0 else 0.0

    b1 = u[:, 4]
    b2 = u[:, 5]
    b3 = u[:, 6]
    to_event1 = b1 < p12
    to_dis_from1 = ~to_event1 & (b1 < p12 + p14)
    to_event2 = to_event1 & (b2 < p23)
    to_dis_from2 = to_event1 & ~to_event2 & (b2 < p23 + p24)
    to_dis_from3 = to_event2 & (b3 < p34)
    disabled = to_dis_from1 | to_dis_from2 | to_dis_from3

    t1 = gap1
    t2 = t1 + np.where(to_event1, gap2, 0.0)
    t3 = t2 + np.where(to_event2, gap3, 0.0)
    t4 = t3 + np.where(disabled, gap4, 0.0)
    out = np.empty((u.shape[0], NUM_TIERS))
    out[:, 0] = t1
    out[:, 1] = t2
    out[:, 2] = t3
    out[:, 3] = t4
    return out


def tier_estimate(x: np.ndarray, d: np.ndarray, tau: float):
    """Product-limit restricted mean and influence values for one tier.

    Ties are resolved events first: at a shared time the event count is
    removed from the same risk set that the censored subjects still belong
    to. Times are compared exactly.

    Parameters
    ----------
    x : (n,) float64
        Observed times, all nonnegative.
    d : (n,) uint8
        Event indicators (1 event, 0 censored).
    tau : float
        Restriction time; the caller guarantees somebody is at risk there.

    Returns
    -------
    area : float
        Integral of the survival step function over [0, tau].
    psi : (n,) float64
        Per-subject influence values; they sum to zero.
    jump_times : (m,) float64
        Event times at or below tau.
    jump_g : (m,) float64
        Minus the remaining survival area past each jump time,
        ``-integral_s^tau S`` evaluated at the jump times.
    """
    n = x.shape[0]
    order = np.argsort(x, kind="quicksort")
    xs = x[order]
    es = (d[order] != 0).astype(np.int64)

    grid, start = np.unique(xs, return_index=True)
    m = grid.shape[0]
    at_risk = (n - start).astype(np.float64)
    events = np.add.reduceat(es, start).astype(np.float64)

    surv = np.cumprod(1.0 - events / at_risk)
    surv_before = np.concatenate((np.ones(1), surv[:-1]))
    widths = np.diff(np.concatenate((np.zeros(1), grid)))
    integral = np.cumsum(surv_before * widths)

    clipped = np.minimum(grid, tau)
    clip_widths = np.diff(np.concatenate((np.zeros(1), clipped)))
    area = float(np.cumsum(surv_before * clip_widths)[-1])
    area += float(surv[m - 1]) * (tau - float(clipped[m - 1]))

    mm = int(np.searchsorted(grid, tau, side="right"))
    if mm == 0:
        psi = np.zeros(n)
        return area, psi, np.empty(0), np.empty(0)

    g = integral[:mm] - area
    weight = g * (n / at_risk[:mm])
    compensator = np.cumsum(weight * events[:mm] / at_risk[:mm])

    pos = np.searchsorted(grid[:mm], x, side="right") - 1
    comp_term = np.where(pos >= 0, compensator[np.maximum(pos, 0)], 0.0)
    hit = (d != 0) & (x <= tau)
    loc = np.searchsorted(grid[:mm], x, side="left")
    jump_term = np.where(hit, weight[np.minimum(loc, mm - 1)], 0.0)
    psi = jump_term - comp_term

    keep = events[:mm] > 0
    return area, psi, grid[:mm][keep].copy(), g[keep].copy()
