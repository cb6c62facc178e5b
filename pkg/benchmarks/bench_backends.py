#!/usr/bin/env python3
"""Benchmark the compiled simulation kernel against the pure-Python
fallback on identical workloads, verifying bit-identical outputs.

Usage:
    python benchmarks/bench_backends.py [--n 20] [--slots 1000000]
                                        [--policy rrp] [--repeat 3]
"""

import argparse
import time

import numpy as np

from aoi_harq import _kernel_py
from aoi_harq.policies import policy_code

try:
    from aoi_harq import _kernel
except ImportError:
    _kernel = None


def workload(n):
    p0 = [(i + 1) / n for i in range(n)]
    weights = [1.0 / n] * n
    scores = [1.0 / (1.0 + i / n) for i in range(n)]
    return p0, weights, scores


def run_backend(simulate, as_numpy, kind, policy, n, slots, seed):
    p0, weights, scores = workload(n)
    if as_numpy:
        p0, weights, scores = map(np.asarray, (p0, weights, scores))
    started = time.perf_counter()
    out = simulate(kind, 0.5, p0, policy, weights, scores, slots, 0, seed, 32)
    return time.perf_counter() - started, out


def same_output(a, b):
    return a[0] == b[0] and all(list(x) == list(y) for x, y in zip(a[1:], b[1:]))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20)
    parser.add_argument("--slots", type=int, default=1_000_000)
    parser.add_argument("--policy", default="rrp")
    parser.add_argument("--kind", type=int, default=0, choices=(0, 1))
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    policy = policy_code(args.policy)

    print(f"workload: N={args.n} slots={args.slots} policy={args.policy} kind={args.kind}")
    py_best, py_out = min(
        (
            run_backend(_kernel_py.simulate, False, args.kind, policy, args.n, args.slots, args.seed)
            for _ in range(args.repeat)
        ),
        key=lambda pair: pair[0],
    )
    print(f"python   kernel: {py_best:8.3f} s   {args.slots / py_best / 1e6:7.2f} Mslots/s")

    if _kernel is None:
        print("compiled kernel: not built (install with Cython to compare)")
        return
    cy_best, cy_out = min(
        (
            run_backend(_kernel.simulate, True, args.kind, policy, args.n, args.slots, args.seed)
            for _ in range(args.repeat)
        ),
        key=lambda pair: pair[0],
    )
    print(f"compiled kernel: {cy_best:8.3f} s   {args.slots / cy_best / 1e6:7.2f} Mslots/s")
    print(f"speedup: {py_best / cy_best:.1f}x")
    print(f"outputs bit-identical: {same_output(py_out, cy_out)}")


if __name__ == "__main__":
    main()
