"""Timing comparison of the two kernel backends.

Runs the event-time generator and the per-tier estimator kernel on the
same inputs under the numpy implementation and, when importable, the
compiled one, and prints microseconds per call. Invoke as

    python benchmarks/bench_backends.py [--subjects N] [--repeat K]
"""

import argparse
import time

import numpy as np

from doorrmst.kernels import load_backend, numpy_impl
from doorrmst.simulate import TransitionRates

RATES = TransitionRates.from_sequence(
    (0.5, 0.2, 0.1, 1.0, 0.4, 0.2, 0.6, 0.3, 0.3)
).as_array()


def timed(fn, repeat):
    fn()  # warm up: triggers any deferred compilation
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def backend_or_none(name):
    try:
        return load_backend(name)
    except Exception as exc:
        print(f"{name}: unavailable ({exc})")
        return None


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--subjects", type=int, default=200_000,
                        help="cohort size for event_times")
    parser.add_argument("--arm", type=int, default=400,
                        help="arm size for tier_estimate")
    parser.add_argument("--repeat", type=int, default=7,
                        help="timed repetitions; best is reported")
    args = parser.parse_args()

    backends = [b for b in (backend_or_none("numpy"), backend_or_none("numba")) if b]
    rng = np.random.default_rng(0)

    reference = backends[0]
    u = rng.random((args.subjects, numpy_impl.U_COLS))
    times = reference.event_times(u, RATES)
    censor = rng.uniform(0.0, 4.0, args.subjects)
    x1 = np.minimum(times[: args.arm, 0], censor[: args.arm])
    d1 = (times[: args.arm, 0] <= censor[: args.arm]).astype(np.uint8)
    order = np.argsort(x1, kind="stable")
    x1, d1 = x1[order], np.ascontiguousarray(d1[order])

    print(f"event_times: {args.subjects} subjects x {numpy_impl.U_COLS} uniforms")
    for backend in backends:
        seconds = timed(lambda: backend.event_times(u, RATES), args.repeat)
        rate = args.subjects / seconds / 1e6
        print(f"  {backend.name:6s} {seconds * 1e3:9.2f} ms  ({rate:.1f}M subjects/s)")

    print(f"tier_estimate: one tier, {args.arm} subjects")
    for backend in backends:
        seconds = timed(lambda: backend.tier_estimate(x1, d1, 2.0), args.repeat)
        print(f"  {backend.name:6s} {seconds * 1e6:9.1f} us per call")

    for backend in backends[1:]:
        a = reference.tier_estimate(x1, d1, 2.0)
        b = backend.tier_estimate(x1, d1, 2.0)
        for left, right in zip(a, b):
            np.testing.assert_array_equal(np.asarray(left), np.asarray(right))
    print("outputs agree across backends")


if __name__ == "__main__":
    main()
