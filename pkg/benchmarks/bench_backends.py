#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure numpy fallback.

Each workload runs on identical inputs through both backends; results are
asserted equal before timings are reported. First numba calls compile (or
load the on-disk cache); warmup keeps that out of the numbers.

    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sfast._kernels import numpy_impl  # noqa: E402

try:
    from sfast._kernels import numba_impl
except ImportError:
    numba_impl = None


def random_tournament(rng, n):
    adj = np.zeros((n, n), dtype=bool)
    upper = np.triu(rng.random((n, n)) < 0.5, 1)
    lower = np.triu(~upper & ~np.eye(n, dtype=bool), 1).T
    adj = np.triu(upper, 1) | lower
    return adj


def timed(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_counts(impl, adj, is_term, orders):
    def run():
        total = 0
        for order in orders:
            nb, na = impl.count_backward_affected(adj, is_term, order)
            total += nb + na
        return total
    return run


def bench_scc(impl, digraphs):
    def run():
        acc = 0
        for g in digraphs:
            acc += int(impl.scc_labels(g).max())
        return acc
    return run


def bench_subset(impl, adj, is_term, tails, heads, size):
    def run():
        return impl.find_feedback_subset(adj, is_term, tails, heads, size)[2]
    return run


def bench_best_order(impl, adj, is_term):
    def run():
        c, p = impl.best_order(adj, is_term)
        return (c, tuple(int(v) for v in p))
    return run


def bench_hill(impl, adj, is_term, order):
    def run():
        return tuple(int(v) for v in impl.hill_climb(adj, is_term, order.copy()))
    return run


def bench_regularize(impl, adj, is_term, order):
    def run():
        out, moves = impl.regularize_order(adj, is_term, order.copy())
        return (tuple(int(v) for v in out), moves)
    return run


def build_workloads(quick):
    rng = np.random.default_rng(2024)
    scale = 0.25 if quick else 1.0

    n_count = 160
    adj_count = random_tournament(rng, n_count)
    term_count = rng.random(n_count) < 0.2
    orders = [rng.permutation(n_count).astype(np.int64)
              for _ in range(int(400 * scale) or 40)]

    digraphs = []
    for _ in range(max(int(120 * scale), 12)):
        g = random_tournament(rng, 120)
        g &= ~(rng.random((120, 120)) < 0.3)
        digraphs.append(np.ascontiguousarray(g))

    n_sub = 11
    adj_sub = random_tournament(rng, n_sub)
    term_sub = np.zeros(n_sub, dtype=bool)
    term_sub[:3] = True
    tails, heads = np.nonzero(adj_sub)
    lex = np.lexsort((heads, tails))
    tails = tails[lex].astype(np.int64)
    heads = heads[lex].astype(np.int64)

    n_best = 7 if quick else 8
    adj_best = random_tournament(rng, n_best)
    term_best = rng.random(n_best) < 0.4

    n_hill = 48 if quick else 72
    adj_hill = random_tournament(rng, n_hill)
    term_hill = rng.random(n_hill) < 0.15
    order_hill = rng.permutation(n_hill).astype(np.int64)

    n_reg = 64 if quick else 96
    adj_reg = random_tournament(rng, n_reg)
    term_reg = rng.random(n_reg) < 0.1
    order_reg = rng.permutation(n_reg).astype(np.int64)

    return [
        (f"backward/affected counts (n={n_count}, {len(orders)} orders)",
         lambda impl: bench_counts(impl, adj_count, term_count, orders)),
        (f"scc labels ({len(digraphs)} digraphs, n=120)",
         lambda impl: bench_scc(impl, digraphs)),
        (f"feedback-subset scan (n={n_sub}, size 3 exhausted)",
         lambda impl: bench_subset(impl, adj_sub, term_sub, tails, heads, 3)),
        (f"best order over {n_best}! permutations",
         lambda impl: bench_best_order(impl, adj_best, term_best)),
        (f"hill climb (n={n_hill})",
         lambda impl: bench_hill(impl, adj_hill, term_hill, order_hill)),
        (f"regularize (n={n_reg})",
         lambda impl: bench_regularize(impl, adj_reg, term_reg, order_reg)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()

    if numba_impl is None:
        print("numba is not installed; only the numpy backend can run")
        return 1

    workloads = build_workloads(args.quick)

    # warm the JIT cache outside the timings
    tiny = random_tournament(np.random.default_rng(0), 6)
    tiny_term = np.array([True] + [False] * 5)
    tiny_order = np.arange(6, dtype=np.int64)
    numba_impl.count_backward_affected(tiny, tiny_term, tiny_order)
    numba_impl.scc_labels(tiny)
    numba_impl.best_order(tiny, tiny_term)
    tt, th = np.nonzero(tiny)
    numba_impl.find_feedback_subset(tiny, tiny_term, tt.astype(np.int64),
                                    th.astype(np.int64), 1)
    numba_impl.hill_climb(tiny, tiny_term, tiny_order.copy())
    numba_impl.regularize_order(tiny, tiny_term, tiny_order.copy())

    width = max(len(name) for name, _ in workloads)
    print(f"{'workload':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, make in workloads:
        t_np, r_np = timed(make(numpy_impl))
        t_nb, r_nb = timed(make(numba_impl))
        assert r_np == r_nb, f"backend results differ on: {name}"
        print(f"{name:<{width}}  {t_np * 1e3:>8.1f}ms  {t_nb * 1e3:>8.1f}ms  "
              f"{t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
