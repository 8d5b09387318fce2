#!/usr/bin/env python3
"""Time the hot selection kernels under both backends.

Generates one large random bundle, runs the greedy cover ordering and the
cumulative fault-union count with the pure-numpy and (when importable)
numba implementations, and prints a comparison table.  JIT compilation is
excluded by a warm-up call.
"""

import argparse
import time

import numpy as np

from testyield import kernels


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tests", type=int, default=1500)
    parser.add_argument("--units", type=int, default=12000)
    parser.add_argument("--faults", type=int, default=400)
    parser.add_argument("--density", type=float, default=0.02)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    cov = (rng.random((args.tests, args.units)) < args.density).astype(np.uint8)
    faults = (rng.random((args.tests, args.faults)) < 0.05).astype(np.uint8)
    order = rng.permutation(args.tests).astype(np.int64)

    print(f"matrix: {args.tests} tests x {args.units} units "
          f"(density {args.density}), {args.faults} faults")
    print(f"backends: {', '.join(kernels.available_backends())}\n")

    impls = kernels.implementations()
    results = {}
    for name, (greedy, cumulative) in impls.items():
        greedy(cov[:64])  # warm-up / JIT compile
        cumulative(faults, order[:64])
        results[name] = (
            best_of(greedy, (cov,), args.repeats),
            best_of(cumulative, (faults, order), args.repeats),
        )

    header = f"{'kernel':<24}" + "".join(f"{n:>12}" for n in results)
    if len(results) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for i, kernel in enumerate(("greedy_order", "cumulative_detected")):
        line = f"{kernel:<24}"
        times = [results[n][i] for n in results]
        for t in times:
            line += f"{t:>11.4f}s"
        if len(times) == 2:
            line += f"{times[0] / times[1]:>9.1f}x"
        print(line)

    # both flavors must agree before their timings mean anything
    if len(impls) == 2:
        o_np, g_np = impls["numpy"][0](cov)
        o_nb, g_nb = impls["numba"][0](cov)
        assert np.array_equal(o_np, o_nb) and np.array_equal(g_np, g_nb)
        assert np.array_equal(
            impls["numpy"][1](faults, order), impls["numba"][1](faults, order)
        )
        print("\nbackend outputs identical")


if __name__ == "__main__":
    main()
