"""Compiled vs pure-Python hull kernel on random classical point sets.

    python benchmarks/bench_hull.py --sizes 256 512 1024 --repeat 3
"""
import argparse
import time

import numpy as np

from gvd.dataset import DataSet, assemble_system, make_sites
from gvd.hull import (BACKENDS, choose_bounding_box, feasible_point,
                      halfspace_intersection, normalize_slice)


def system_for(n, seed):
    P = np.random.default_rng(seed).random((n, 2))
    ds = DataSet.from_sites(make_sites(P))
    box = choose_bounding_box(ds)
    system = normalize_slice(assemble_system(ds, box), box)
    y, _ = feasible_point(system)
    return system, y


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024, 2048])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"backends available: {', '.join(BACKENDS)}")
    print(f"{'n':>6} " + " ".join(f"{b:>10}" for b in BACKENDS) + "   speedup  same")
    for n in args.sizes:
        system, y = system_for(n, args.seed + n)
        row, results = [], []
        for b in BACKENDS:
            t, p = best_of(lambda: halfspace_intersection(system, y, backend=b), args.repeat)
            row.append(t)
            results.append(p)
        same = all(len(r.vertices) == len(results[0].vertices)
                   and set(r.tight) == set(results[0].tight) for r in results)
        speed = f"{row[-1] / row[0]:8.1f}x" if len(row) > 1 else "       -"
        print(f"{n:>6} " + " ".join(f"{t:10.3f}" for t in row) + f"  {speed}  {same}")


if __name__ == "__main__":
    main()
