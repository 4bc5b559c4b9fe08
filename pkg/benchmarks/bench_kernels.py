"""Compare the compiled kernel backend against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import time

import numpy as np

from cookiewalk.kernels import _pure, make_rng

try:
    from cookiewalk.kernels import _core
except ImportError:
    _core = None

PROBS = np.array([0.9], dtype=np.float64)
TAIL = 0.8


def cases(steps):
    return {
        "walk_positions": lambda m, rng: m.walk_positions(
            PROBS, TAIL, steps, rng),
        "walk_final_position": lambda m, rng: m.walk_final_position(
            PROBS, TAIL, steps, rng),
        "walk_left_profiles": lambda m, rng: m.walk_left_profiles(
            PROBS, TAIL, 100, 100_000, max(1, steps // 1000), rng),
        "sample_failures": lambda m, rng: m.sample_failures(
            PROBS, TAIL, 4, steps // 4, rng),
        "chain_paths": lambda m, rng: m.chain_paths(
            PROBS, TAIL, 0, 20, steps // 100, rng),
        "chain_occupation": lambda m, rng: m.chain_occupation(
            PROBS, TAIL, 0, steps, steps // 10, 65536, rng),
        "coupled_chain_paths": lambda m, rng: m.coupled_chain_paths(
            PROBS, 0.8, 4, steps // 4, rng),
    }


def bench(fn, module, repeat):
    best = float("inf")
    for r in range(repeat):
        rng = make_rng(12345 + r)
        t0 = time.perf_counter()
        fn(module, rng)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled backend not available; benchmarking pure only")

    print(f"{'kernel':<24}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, fn in cases(args.steps).items():
        t_pure = bench(fn, _pure, args.repeat)
        if _core is not None:
            t_core = bench(fn, _core, args.repeat)
            print(f"{name:<24}{t_pure:>12.4f}{t_core:>14.4f}"
                  f"{t_pure / t_core:>9.1f}x")
        else:
            print(f"{name:<24}{t_pure:>12.4f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
