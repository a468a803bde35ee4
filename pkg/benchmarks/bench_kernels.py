"""Compare the numba and numpy flavours of every hot kernel.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 3]

Each kernel runs once untimed (to compile), then ``--repeat`` times per
flavour. The outputs of the two flavours are checked for equality first.
"""
import argparse
import time

import numpy as np

from osncensus import kernels
from osncensus.graphmetrics import build_graph
from osncensus.synth import SynthConfig, generate_ba, generate_population


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--sources", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    n, m = args.n, args.m
    rng = np.random.default_rng(0)
    store = generate_population(SynthConfig(n=n, seed=0))
    edges = generate_ba(n, m, seed=0)
    g = build_graph(store, edges)
    src = rng.choice(n, min(args.sources, n), replace=False).astype(np.int64)
    u_ba = rng.random(int(1.25 * (n - m) * m) + 1024)
    _, ages, genders, _ = store.columns
    pairs = store.positions(edges.pairs.ravel()).reshape(-1, 2)
    u_swap = rng.random((len(pairs), 4))

    cases = [
        ("bfs", "bfs (1 source)", lambda f: f(g.indptr, g.indices, 0)),
        ("source_path_sums", f"source_path_sums ({src.size} sources)",
         lambda f: f(g.indptr, g.indices, src)),
        ("ba_attach", "ba_attach", lambda f: f(n, m, u_ba)),
        ("metropolis_swaps", "metropolis_swaps (1 sweep)",
         lambda f: f(pairs.copy(), n, genders, ages.astype(np.float64),
                     np.log(0.7), np.log(0.3), 0.2, u_swap)),
    ]

    print(f"graph: BA n={n} m={m}, {g.m} edges")
    print(f"{'kernel':<34}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for base, label, call in cases:
        fast = getattr(kernels, f"{base}_numba")
        slow = getattr(kernels, f"{base}_numpy")
        a, b = call(fast), call(slow)
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            assert np.array_equal(x, y), f"{label}: flavours disagree"
        t_fast = best_of(lambda: call(fast), args.repeat)
        t_slow = best_of(lambda: call(slow), args.repeat)
        print(f"{label:<34}{t_fast:>10.4f}{t_slow:>10.4f}{t_slow / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
