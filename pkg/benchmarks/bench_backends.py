#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot loops (Gibbs chain updates and the coordinate-descent
solver) on harness-sized workloads and prints a speedup table. The Gibbs
outputs are also checked for bit-identity between backends.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import math
import time

import numpy as np

from unelisa._kernels import _pure

try:
    from unelisa._kernels import _fast
except ImportError:
    _fast = None

from unelisa.gibbs import _csr
from unelisa.harness import d0_for, generate_graph
from unelisa.model import degree_stats


def time_call(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def gibbs_workload(p, d0, seed=0):
    spec = generate_graph(p, d0, "high", seed)
    _, _, _, d_marg_max = degree_stats(spec)
    n = math.ceil(30 * d_marg_max * math.log(p))
    k = p + 1
    edges = dict(spec.edges)
    indptr, indices, weights = _csr(k, edges)
    fields = np.zeros(k)
    thin = 2 * k
    n_burn = 1000 * k
    total = n_burn + n * thin
    uniforms = np.random.Generator(np.random.PCG64(seed)).random(total)
    order = np.arange(k, dtype=np.int32)

    def runner(impl):
        def run():
            state = np.ones(k, dtype=np.int8)
            out = np.empty((n, k), dtype=np.int8)
            impl.gibbs_chain(
                indptr, indices, weights, fields, state, order, uniforms, n_burn, thin, out
            )
            return out

        return run

    return runner, n, total


def cd_workload(p, n, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    base = rng.choice([-1.0, 1.0], size=n)
    cols = [np.where(rng.random(n) < 0.3, -base, base) for _ in range(p - 1)]
    x = np.column_stack(cols)
    mu = x.T @ base / n
    lam = 2 * math.sqrt(math.log(p) / n)

    def runner(impl):
        return lambda: impl.cd_lasso_logistic(x, mu, lam, 1e-6, 10_000)

    return runner


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    if _fast is None:
        print("compiled kernels not built; showing pure-Python timings only")

    sizes = [(25, 5), (49, 7)] if args.quick else [(25, 5), (49, 7), (81, 9)]
    print(f"{'workload':<42}{'pure':>10}{'compiled':>10}{'speedup':>9}")
    print("-" * 71)

    for p, d0 in sizes:
        runner, n, total = gibbs_workload(p, d0)
        t_pure = time_call(runner(_pure), repeats=1 if total > 2_000_000 else 3)
        label = f"gibbs chain p={p} ({total / 1e6:.2f}M site updates)"
        if _fast is not None:
            t_fast = time_call(runner(_fast))
            assert np.array_equal(runner(_fast)(), runner(_pure)())
            print(f"{label:<42}{t_pure:>9.3f}s{t_fast:>9.3f}s{t_pure / t_fast:>8.1f}x")
        else:
            print(f"{label:<42}{t_pure:>9.3f}s{'-':>10}{'-':>9}")

    for p, n in [(25, 600), (49, 1500)] + ([] if args.quick else [(81, 4500)]):
        runner = cd_workload(p, n)
        t_pure = time_call(runner(_pure))
        label = f"cd solver p={p} n={n}"
        if _fast is not None:
            t_fast = time_call(runner(_fast))
            print(f"{label:<42}{t_pure:>9.3f}s{t_fast:>9.3f}s{t_pure / t_fast:>8.1f}x")
        else:
            print(f"{label:<42}{t_pure:>9.3f}s{'-':>10}{'-':>9}")


if __name__ == "__main__":
    main()
