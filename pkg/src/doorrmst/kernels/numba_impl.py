"""Numba nopython twins of the numpy kernels.

Same uniform layout, same summation order, loop form instead of vector
form. Compiled lazily on first call; results are cached on disk so repeat
runs skip compilation. No fastmath: reassociation would break the
cross-backend agreement the tests pin down.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .numpy_impl import NUM_TIERS, U_COLS  # noqa: F401  (shared layout constants)

NAME = "numba"


@njit(cache=True, nogil=True)
def event_times(u, rates):
    r12 = rates[0]
    r14 = rates[1]
    r23 = rates[3]
    r24 = rates[4]
    r34 = rates[6]
    exit1 = rates[0] + rates[1] + rates[2]
    exit2 = rates[3] + rates[4] + rates[5]
    exit3 = rates[6] + rates[7]
    exit4 = rates[8]

    p12 = r12 / exit1
    p14 = r14 / exit1
    p23 = r23 / exit2 if exit2 > 0.0 else 0.0
    p24 = r24 / exit2 if exit2 > 0.0 else 0.0
    p34 = r34 / exit3 if exit3 > 0.0 else 0.0

    n = u.shape[0]
    out = np.empty((n, NUM_TIERS))
    for i in range(n):
        t1 = -np.log1p(-u[i, 0]) / exit1
        t2 = t1
        t3 = t1
        disabled = False
        b1 = u[i, 4]
        if b1 < p12:
            t2 = t1 + (-np.log1p(-u[i, 1]) / exit2)
            t3 = t2
            b2 = u[i, 5]
            if b2 < p23:
                t3 = t2 + (-np.log1p(-u[i, 2]) / exit3)
                if u[i, 6] < p34:
                    disabled = True
            elif b2 < p23 + p24:
                disabled = True
        elif b1 < p12 + p14:
            disabled = True
        t4 = t3
        if disabled:
            t4 = t3 + (-np.log1p(-u[i, 3]) / exit4)
        out[i, 0] = t1
        out[i, 1] = t2
        out[i, 2] = t3
        out[i, 3] = t4
    return out


@njit(cache=True, nogil=True)
def tier_estimate(x, d, tau):
    n = x.shape[0]
    order = np.argsort(x)

    # run-length encode the sorted times into the distinct-time grid
    grid = np.empty(n)
    at_risk = np.empty(n)
    events = np.empty(n)
    m = 0
    i = 0
    while i < n:
        t = x[order[i]]
        k = i
        ev = 0
        while k < n and x[order[k]] == t:
            if d[order[k]] != 0:
                ev += 1
            k += 1
        grid[m] = t
        at_risk[m] = n - i
        events[m] = ev
        m += 1
        i = k

    surv = np.empty(m)
    integral = np.empty(m)
    s = 1.0
    acc = 0.0
    prev = 0.0
    for k in range(m):
        acc += s * (grid[k] - prev)
        integral[k] = acc
        s = s * (1.0 - events[k] / at_risk[k])
        surv[k] = s
        prev = grid[k]

    area = 0.0
    sprev = 1.0
    prev = 0.0
    for k in range(m):
        tk = grid[k] if grid[k] < tau else tau
        area += sprev * (tk - prev)
        prev = tk
        sprev = surv[k]
    area += surv[m - 1] * (tau - prev)

    mm = int(np.searchsorted(grid[:m], tau, side="right"))
    psi = np.zeros(n)
    if mm == 0:
        return area, psi, np.empty(0), np.empty(0)

    weight = np.empty(mm)
    compensator = np.empty(mm)
    run = 0.0
    for k in range(mm):
        gk = integral[k] - area
        wk = gk * (n / at_risk[k])
        weight[k] = wk
        run += wk * events[k] / at_risk[k]
        compensator[k] = run

    for i in range(n):
        xi = x[i]
        pos = int(np.searchsorted(grid[:mm], xi, side="right")) - 1
        comp_term = compensator[pos] if pos >= 0 else 0.0
        jump_term = 0.0
        if d[i] != 0 and xi <= tau:
            loc = int(np.searchsorted(grid[:mm], xi, side="left"))
            jump_term = weight[loc]
        psi[i] = jump_term - comp_term

    n_jump = 0
    for k in range(mm):
        if events[k] > 0:
            n_jump += 1
    jump_times = np.empty(n_jump)
    jump_g = np.empty(n_jump)
    p = 0
    for k in range(mm):
        if events[k] > 0:
            jump_times[p] = grid[k]
            jump_g[p] = integral[k] - area
            p += 1
    return area, psi, jump_times, jump_g
