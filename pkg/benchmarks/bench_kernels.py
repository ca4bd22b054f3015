"""Compare the numba kernels with the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 100000] [--repeat 5]

Both paths live in the same module, so one process times both; the env flag
INCASCADE_DISABLE_NUMBA only chooses which one the library uses by default.
"""
import argparse
import time

import numpy as np

from incascade import _kernels
from incascade.degree import DegreeDistribution
from incascade.simulator import generate_configuration_model


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    ks = np.arange(3, 274)
    w = ks.astype(float) ** -2.5
    dist = DegreeDistribution(dict(zip(ks.tolist(), (w / w.sum()).tolist())))
    g = generate_configuration_model(dist, args.n, seed=1)
    rng = np.random.default_rng(2)
    deg = g.degrees
    threshold = np.where(rng.random(g.n) < 0.3, 0, np.maximum(1, np.ceil(0.5 * deg))).astype(np.int64)
    intent = rng.random(g.n) < 0.5

    n = ks - 1
    m = np.ceil(0.5 * ks).astype(np.int64)

    rows = []
    if _kernels.HAS_NUMBA:
        _kernels.cascade_rounds(g.indptr, g.indices, threshold, intent)  # compile
        _kernels.tails(n, m, 0.4)
        rows.append(("cascade_rounds", best_of(lambda: _kernels.cascade_rounds(g.indptr, g.indices, threshold, intent), args.repeat),
                     best_of(lambda: _kernels._cascade_rounds_np(g.indptr, g.indices, threshold, intent), args.repeat)))
        rows.append(("tails x1000", best_of(lambda: [_kernels.tails(n, m, p) for p in np.linspace(0, 1, 1000)], args.repeat),
                     best_of(lambda: [_kernels._tails_np(n, m, p) for p in np.linspace(0, 1, 1000)], args.repeat)))
    else:
        print("numba unavailable or disabled; timing the numpy path only")
        rows.append(("cascade_rounds", float("nan"), best_of(lambda: _kernels._cascade_rounds_np(g.indptr, g.indices, threshold, intent), args.repeat)))
        rows.append(("tails x1000", float("nan"), best_of(lambda: [_kernels._tails_np(n, m, p) for p in np.linspace(0, 1, 1000)], args.repeat)))

    print(f"graph: n={g.n} edges={g.edge_count}")
    print(f"{'kernel':<16}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, fast, slow in rows:
        print(f"{name:<16}{fast:>12.4f}{slow:>12.4f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
