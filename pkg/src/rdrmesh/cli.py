"""Command-line driver: generate, quality, reorder, compare."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .cachemodel import CacheSpec, access_cost, model_misses
from .meshcore import Mesh, build_adjacency, global_quality, vertex_qualities
from .meshio import generate_synthetic, read_mesh, save_mesh
from .ordering import STRATEGIES, apply_ordering, checksum, compute_ordering, write_ordering
from .reuse import mean_distance, quantile, reuse_distances, windowed_means
from .smoothing import SCHEMES, SmoothingConfig, run_smoothing, trace_iteration

QUANTILES = (0.5, 0.75, 0.9, 1.0)
QUANTILE_KEYS = ("q50", "q75", "q90", "q100")


class CLIError(Exception):
    pass


@dataclass
class RunSpec:
    mesh: Mesh
    mesh_name: str
    orderings: list
    smoothing: SmoothingConfig
    cache: CacheSpec
    out_dir: Path
    seed: int = 0
    bfs_seed: int = 0
    profile_iterations: int = 1
    windows: int = 100

    def __post_init__(self):
        if not self.orderings:
            raise CLIError("select at least one ordering")


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RxC, got {text!r}") from None


def _parse_latencies(text: str) -> tuple[float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected c2,c3,cm")
    return vals


def _add_source(p):
    g = p.add_argument_group("mesh source")
    g.add_argument("--node", help="Triangle .node file")
    g.add_argument("--ele", help="Triangle .ele file")
    g.add_argument("--synthetic", type=_parse_grid, metavar="RxC", help="jittered unit-square grid")
    g.add_argument("--jitter", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0, help="seed for synthetic meshes and random ordering")


def _load(args) -> tuple[Mesh, str]:
    if args.synthetic is not None:
        if args.node or args.ele:
            raise CLIError("use either --synthetic or --node/--ele, not both")
        r, c = args.synthetic
        return generate_synthetic(r, c, args.jitter, args.seed), f"grid{r}x{c}"
    if not (args.node and args.ele):
        raise CLIError("need --node and --ele, or --synthetic RxC")
    return read_mesh(args.node, args.ele), Path(args.node).stem


def _write_prefix(mesh: Mesh, prefix: str):
    save_mesh(mesh, f"{prefix}.node", f"{prefix}.ele")


def _print_json(obj):
    print(json.dumps(obj, indent=2))


def cmd_generate(args) -> int:
    if args.synthetic is None:
        raise CLIError("generate needs --synthetic RxC")
    r, c = args.synthetic
    mesh = generate_synthetic(r, c, args.jitter, args.seed)
    _write_prefix(mesh, args.output)
    _print_json({"vertices": mesh.n_vertices, "triangles": mesh.n_triangles,
                 "node": f"{args.output}.node", "ele": f"{args.output}.ele"})
    return 0


def quality_summary(mesh: Mesh) -> dict:
    adj = build_adjacency(mesh)
    q = vertex_qualities(mesh, adj)
    hist, edges = np.histogram(q, bins=10, range=(0.0, 1.0))
    return {
        "vertices": mesh.n_vertices,
        "triangles": mesh.n_triangles,
        "interior": int((~mesh.boundary).sum()),
        "global_quality": global_quality(mesh, adj),
        "min_vertex_quality": float(q.min()),
        "max_vertex_quality": float(q.max()),
        "histogram": {"edges": edges.tolist(), "counts": hist.tolist()},
    }


def cmd_quality(args) -> int:
    mesh, _ = _load(args)
    _print_json(quality_summary(mesh))
    return 0


def cmd_reorder(args) -> int:
    mesh, _ = _load(args)
    adj = build_adjacency(mesh)
    perm = compute_ordering(args.ordering, mesh, adj, seed=args.seed, bfs_seed=args.bfs_seed)
    _write_prefix(apply_ordering(mesh, perm), args.output)
    if args.perm_out:
        Path(args.perm_out).write_text(write_ordering(perm))
    _print_json({"ordering": args.ordering, "checksum": checksum(perm),
                 "node": f"{args.output}.node", "ele": f"{args.output}.ele"})
    return 0


def _analyze(mesh: Mesh, strategy: str, spec: RunSpec, base_qualities) -> tuple[dict, list, float]:
    t0 = time.perf_counter()
    adj = build_adjacency(mesh)
    perm = compute_ordering(strategy, mesh, adj, seed=spec.seed, bfs_seed=spec.bfs_seed,
                            qualities=base_qualities)
    ordered = apply_ordering(mesh, perm)
    oadj = build_adjacency(ordered)
    trace = trace_iteration(ordered, oadj)
    profile = reuse_distances(trace)
    model = model_misses(profile, spec.cache)
    report = run_smoothing(ordered, spec.smoothing, oadj)

    rows = []
    if spec.profile_iterations > 0 and len(trace):
        it = len(trace)
        multi = reuse_distances(np.tile(trace, spec.profile_iterations))
        windows = min(spec.windows, it)
        for k in range(spec.profile_iterations):
            sub = type(multi)(multi.distances[k * it:(k + 1) * it])
            for w, m in enumerate(windowed_means(sub, windows)):
                rows.append((k + 1, w, m))

    finite = len(profile.finite) > 0
    entry = {
        "checksum": checksum(perm),
        "iterations": report.iterations_run,
        "stop_reason": report.stop_reason,
        "initial_quality": report.quality_per_iteration[0],
        "final_quality": report.quality_per_iteration[-1],
        "n_accesses": profile.n_accesses,
        "mean_distance": mean_distance(profile) if finite else None,
        "quantiles": {k: (quantile(profile, q) if finite else None)
                      for k, q in zip(QUANTILE_KEYS, QUANTILES)},
        "miss_model": model.to_dict(spec.cache),
        "cost_cycles": access_cost(model, spec.cache),
    }
    if spec.out_dir is not None:
        _write_prefix(ordered, str(spec.out_dir / f"mesh_{strategy}"))
    return entry, rows, time.perf_counter() - t0


def _ratio(a, b):
    if a is None or b is None:
        return None
    if b == 0:
        return 1.0 if a == 0 else None
    return a / b


def _ratios(entry: dict, base: dict) -> dict:
    out = {"mean_distance": _ratio(entry["mean_distance"], base["mean_distance"]),
           "cost_cycles": _ratio(entry["cost_cycles"], base["cost_cycles"])}
    for k in QUANTILE_KEYS:
        out[k] = _ratio(entry["quantiles"][k], base["quantiles"][k])
    for k in ("n1", "n2", "n3"):
        out[k] = _ratio(entry["miss_model"][k], base["miss_model"][k])
    return out


def compare(spec: RunSpec) -> dict:
    """Run every selected ordering and write the report files."""
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    adj = build_adjacency(spec.mesh)
    base_q = vertex_qualities(spec.mesh, adj)
    results, profiles, timings = {}, {}, {}
    for strategy in spec.orderings:
        results[strategy], profiles[strategy], timings[strategy] = _analyze(spec.mesh, strategy, spec, base_q)
    if "ori" in results:
        base = results["ori"]
    else:
        keep, spec.out_dir = spec.out_dir, None
        try:
            base, _, _ = _analyze(spec.mesh, "ori", spec, base_q)
        finally:
            spec.out_dir = keep
    for entry in results.values():
        entry["ratios_vs_ori"] = _ratios(entry, base)

    iters = {r["iterations"] for r in results.values()}
    report = {
        "mesh": spec.mesh_name,
        "vertices": spec.mesh.n_vertices,
        "triangles": spec.mesh.n_triangles,
        "smoothing": {"scheme": spec.smoothing.scheme, "epsilon": spec.smoothing.convergence_epsilon,
                      "max_iterations": spec.smoothing.max_iterations,
                      "goal_quality": spec.smoothing.goal_quality},
        "cache": dict(zip(("e1", "e2", "e3"), spec.cache.capacities()))
        | {"element_bytes": spec.cache.element_bytes,
           "latencies": [spec.cache.c2, spec.cache.c3, spec.cache.cm]},
        "iterations_consistent": len(iters) == 1,
        "orderings": results,
    }
    out = spec.out_dir
    (out / "comparison.json").write_text(json.dumps(report, indent=2) + "\n")
    with open(out / "quantiles.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["mesh", "ordering", *QUANTILE_KEYS, "n_accesses"])
        for s, r in results.items():
            w.writerow([spec.mesh_name, s, *(r["quantiles"][k] for k in QUANTILE_KEYS), r["n_accesses"]])
    for s, rows in profiles.items():
        with open(out / f"profile_{s}.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["iteration", "window", "mean_distance"])
            w.writerows(rows)
    (out / "timing.json").write_text(json.dumps(
        {"backend": _kernels.BACKEND, "seconds": timings}, indent=2) + "\n")
    return report


def cmd_compare(args) -> int:
    mesh, name = _load(args)
    smoothing = SmoothingConfig(goal_quality=args.goal, convergence_epsilon=args.epsilon,
                                max_iterations=args.max_iters, scheme=args.scheme,
                                thread_count=args.threads)
    c2, c3, cm = args.lat
    cache = CacheSpec(args.l1, args.l2, args.l3, args.elem_bytes, c2, c3, cm)
    orderings = list(dict.fromkeys(args.ordering or STRATEGIES))
    spec = RunSpec(mesh, name, orderings, smoothing, cache, Path(args.out), seed=args.seed,
                   bfs_seed=args.bfs_seed, profile_iterations=args.profile_iterations,
                   windows=args.windows)
    report = compare(spec)
    for s, r in report["orderings"].items():
        q = r["quantiles"]
        print(f"{s:>7}  iters={r['iterations']:<4} q50={q['q50']} q90={q['q90']} "
              f"max={q['q100']} cost={r['cost_cycles']:.0f}")
    print(f"wrote {spec.out_dir}/comparison.json", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rdrmesh", description=__doc__)
    p.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic jittered grid")
    _add_source(g)
    g.add_argument("-o", "--output", required=True, help="output prefix (writes PREFIX.node/.ele)")
    g.set_defaults(func=cmd_generate)

    q = sub.add_parser("quality", help="print mesh quality summary as JSON")
    _add_source(q)
    q.set_defaults(func=cmd_quality)

    r = sub.add_parser("reorder", help="apply a vertex ordering and write the mesh")
    _add_source(r)
    r.add_argument("--ordering", required=True, choices=STRATEGIES)
    r.add_argument("--bfs-seed", type=int, default=0)
    r.add_argument("-o", "--output", required=True, help="output prefix")
    r.add_argument("--perm-out", help="also write the permutation (old indices, one per line)")
    r.set_defaults(func=cmd_reorder)

    c = sub.add_parser("compare", help="compare orderings: quantiles, miss model, cost")
    _add_source(c)
    c.add_argument("--ordering", action="append", choices=STRATEGIES,
                   help="repeatable; default all four")
    c.add_argument("--bfs-seed", type=int, default=0)
    c.add_argument("--epsilon", type=float, default=0.000005)
    c.add_argument("--max-iters", type=int, default=100)
    c.add_argument("--goal", type=float, default=1.0)
    c.add_argument("--scheme", choices=SCHEMES, default="jacobi")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--l1", type=int, default=32768)
    c.add_argument("--l2", type=int, default=262144)
    c.add_argument("--l3", type=int, default=25165824)
    c.add_argument("--elem-bytes", type=int, default=66)
    c.add_argument("--lat", type=_parse_latencies, default=(10.0, 38.0, 175.0), metavar="c2,c3,cm")
    c.add_argument("--profile-iterations", type=int, default=1,
                   help="iterations of the trace to profile in profile_<ordering>.csv")
    c.add_argument("--windows", type=int, default=100)
    c.add_argument("--out", default="results")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, ValueError, OSError, ArithmeticError) as exc:
        if args.json_errors:
            print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        else:
            print(f"rdrmesh: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
