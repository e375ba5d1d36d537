#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --trace-sizes 1e5 1e6 1e7 --grid 400 --json out.json
"""
import argparse
import json
import time

import numpy as np

from rdrmesh import _kernels
from rdrmesh.meshcore import build_adjacency
from rdrmesh.meshio import generate_synthetic
from rdrmesh.smoothing import trace_iteration


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_reuse(backends, sizes, alphabet, repeat, fallback_limit):
    rows = []
    rng = np.random.default_rng(0)
    for n in sizes:
        trace = rng.integers(0, alphabet, size=n)
        _, dense = np.unique(trace, return_inverse=True)
        for name, mod in backends.items():
            if name == "python" and n > fallback_limit:
                continue
            t = best_of(lambda: mod.reuse_distances(dense, alphabet), repeat)
            rows.append({"kernel": "reuse_distances", "backend": name, "size": n, "seconds": t})
    return rows


def bench_sweeps(backends, grid, repeat):
    m = generate_synthetic(grid, grid, 0.3, 1)
    adj = build_adjacency(m)
    interior = m.interior()
    rows = []
    for name, mod in backends.items():
        xy = m.xy.copy()
        out = xy.copy()
        t = best_of(lambda: mod.jacobi_sweep(xy, out, interior, adj.indptr, adj.indices), repeat)
        rows.append({"kernel": "jacobi_sweep", "backend": name, "size": len(interior), "seconds": t})
        t = best_of(lambda: mod.gauss_seidel_sweep(xy, interior, adj.indptr, adj.indices), repeat)
        rows.append({"kernel": "gauss_seidel_sweep", "backend": name, "size": len(interior), "seconds": t})
    trace = trace_iteration(m, adj)
    _, dense = np.unique(trace, return_inverse=True)
    for name, mod in backends.items():
        t = best_of(lambda: mod.reuse_distances(dense, m.n_vertices), repeat)
        rows.append({"kernel": "reuse_distances(mesh trace)", "backend": name, "size": len(trace), "seconds": t})
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--trace-sizes", type=float, nargs="+", default=[1e4, 1e5, 1e6])
    p.add_argument("--alphabet", type=int, default=10_000)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--fallback-limit", type=float, default=1e6,
                   help="skip the pure-Python reuse kernel above this trace length")
    p.add_argument("--json", help="also write results here")
    args = p.parse_args()

    backends = {"python": _kernels.fallback}
    if _kernels.compiled is not None:
        backends["cython"] = _kernels.compiled
    else:
        print("compiled kernels not built; timing the fallback only")

    rows = bench_reuse(backends, [int(s) for s in args.trace_sizes], args.alphabet, args.repeat,
                       args.fallback_limit)
    rows += bench_sweeps(backends, args.grid, args.repeat)

    base = {(r["kernel"], r["size"]): r["seconds"] for r in rows if r["backend"] == "python"}
    print(f"{'kernel':<28} {'size':>10} {'backend':>8} {'seconds':>10} {'speedup':>8}")
    for r in rows:
        ref = base.get((r["kernel"], r["size"]))
        speed = f"{ref / r['seconds']:.1f}x" if ref and r["backend"] != "python" else ""
        print(f"{r['kernel']:<28} {r['size']:>10} {r['backend']:>8} {r['seconds']:>10.4f} {speed:>8}")
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2)


if __name__ == "__main__":
    main()
