"""Compare the compiled and numpy tree kernels.

    python3 benchmarks/bench_tree.py [--trees 20] [--depth 6]

Fits single trees and a small forest on the default synthetic dataset with
each available kernel, checks that both kernels grow identical trees, and
prints median wall times.
"""
import argparse
import statistics
import time

import numpy as np

from gemmperf.learn.forest import bootstrap_indices
from gemmperf.learn.multi import prepare_training_data
from gemmperf.learn.tree import KERNELS, fit_tree
from gemmperf.synth import SynthSpec, generate


def timed(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trees", type=int, default=20)
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    Z, Y, _, _ = prepare_training_data(generate(SynthSpec(seed=7)))
    y = Y[:, 0]
    samples = [bootstrap_indices(len(y), 0, i) for i in range(args.trees)]
    print(f"data: {Z.shape[0]} rows x {Z.shape[1]} features, depth={args.depth}, trees={args.trees}")

    results = {}
    for name in KERNELS:
        single = timed(lambda: fit_tree(Z, y, max_depth=args.depth, kernel=name), args.repeat)
        forest = timed(lambda: [fit_tree(Z[s], y[s], max_depth=args.depth, kernel=name) for s in samples], 1)
        deep = timed(lambda: fit_tree(Z, y, kernel=name), 1)
        results[name] = (single, forest, deep)
        print(f"{name:>7}: tree {single * 1e3:8.2f} ms   {args.trees} trees {forest:7.3f} s   "
              f"unlimited depth {deep * 1e3:8.2f} ms")

    if "cython" in results:
        ref = fit_tree(Z, y, max_depth=args.depth, kernel="python")
        same = ref.same_as(fit_tree(Z, y, max_depth=args.depth, kernel="cython"))
        print(f"identical trees: {same}")
        ratio = np.array(results["python"]) / np.array(results["cython"])
        print("speedup (python / cython): " + "  ".join(f"{r:.1f}x" for r in ratio))
    else:
        print("compiled kernel not built; only the numpy kernel was timed")


if __name__ == "__main__":
    main()
