"""Command-line interface: generate, separate, validate, oracle, bench, svg.

Exit codes: 0 success, 1 validation failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from gmpy2 import mpq

from .geom import ColoredSegmentInstance, intersection_graph
from .instance_io import InstanceError, parse_instance, serialize
from .polygons import PolygonError, PolygonInstance, inflate_segments, polygon_intersection_graph, \
    polygon_star_separator
from .stars import StarSeparator, segment_star_separator, validate_star_separator
from .strings import AbstractGraph, StrategyError, string_star_separator

BENCH_HEADER = ["n", "c", "kind", "frag_count", "seph_size", "star_count", "build_ns", "valid", "ratio",
                "table_entries"]


class InputError(Exception):
    pass


def _seed(args):
    env = os.environ.get("STARSEP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"STARSEP_SEED must be an integer, got {env!r}")
    return args.seed


def _read(path, perturb=False):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    return parse_instance(data, perturb=perturb)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def adjacency_of(inst) -> dict:
    if isinstance(inst, ColoredSegmentInstance):
        return intersection_graph(inst)
    if isinstance(inst, PolygonInstance):
        return polygon_intersection_graph(inst.polygons)
    return inst.adjacency()


def normalized_weights(inst):
    if isinstance(inst, ColoredSegmentInstance):
        w = {s.id: mpq(1, inst.n) if s.weight is None else mpq(s.weight) for s in inst.segments}
    elif isinstance(inst, PolygonInstance):
        w = inst.weights()
    elif inst.weights is not None:
        w = {v: mpq(x) for v, x in enumerate(inst.weights)}
    else:
        return None
    total = sum(w.values(), mpq(0))
    if total == 0:
        return None
    return {k: v / total for k, v in w.items()}


def run_separator(inst, mode=None, perturb=False, stage2="bfs-fm"):
    """Returns (StarSeparator, fragment set or None)."""
    if mode is None:
        mode = {ColoredSegmentInstance: "segments", PolygonInstance: "polygons"}.get(type(inst), "strings")
    if mode == "segments":
        if not isinstance(inst, ColoredSegmentInstance):
            raise InputError("--mode segments needs a segments file")
        if perturb:
            run = polygon_star_separator(inflate_segments(inst))
            return run.separator, None
        run = segment_star_separator(inst)
        return run.separator, run.fragments
    if mode == "polygons":
        if isinstance(inst, ColoredSegmentInstance):
            inst = inflate_segments(inst)
        if not isinstance(inst, PolygonInstance):
            raise InputError("--mode polygons needs a polygons or segments file")
        return polygon_star_separator(inst).separator, None
    if mode == "strings":
        g = inst
        if not isinstance(g, AbstractGraph):
            from .oracle import graph_of
            adj = adjacency_of(inst)
            g = graph_of(adj)
            ids = sorted(adj)
            sep = string_star_separator(g, stage2)
            back = lambda v: ids[v]
            from .stars import Star
            return StarSeparator([Star(back(s.center), frozenset(back(x) for x in s.leaves)) for s in sep.stars],
                                 {back(v) for v in sep.A}, {back(v) for v in sep.B}, sep.stats), None
        return string_star_separator(g, stage2), None
    raise InputError(f"unknown mode {mode!r}")


# ------------------------------------------------------------ commands


def cmd_generate(args):
    from .generators import GeneratorSpec, generate
    from .strings import random_string_graph
    spec = GeneratorSpec(args.kind, args.n, args.c, _seed(args), args.box)
    if args.kind == "random-strings" and args.string_mode != "polylines":
        inst = random_string_graph(args.n, spec.seed, args.string_mode)
    else:
        inst = generate(spec)
    _write(args.output, serialize(inst))
    return 0


def cmd_separate(args):
    inst = _read(args.input, perturb=args.perturb)
    sep, frags = run_separator(inst, args.mode, args.perturb, args.stage2)
    rep = validate_star_separator(adjacency_of(inst), sep, normalized_weights(inst))
    _write(args.output, json.dumps(sep.to_json()) + "\n")
    if args.svg:
        from .svg import render_svg
        _write(args.svg, render_svg(inst, frags, sep))
    if not rep.ok:
        print(f"invalid separator: {rep.problems[0]}", file=sys.stderr)
        return 1
    print(f"ok: n={rep.n} stars={rep.size} ratio={rep.ratio:.3f}", file=sys.stderr)
    return 0


def cmd_validate(args):
    inst = _read(args.input, perturb=True)
    try:
        with open(args.separator) as fh:
            sep = StarSeparator.from_json(json.load(fh))
    except OSError as e:
        raise InputError(f"cannot read {args.separator}: {e.strerror}")
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"malformed separator file: {e}")
    rep = validate_star_separator(adjacency_of(inst), sep, normalized_weights(inst))
    if rep.ok:
        print(f"valid: n={rep.n} stars={rep.size} ratio={rep.ratio:.3f}")
        return 0
    for p in rep.problems:
        print(p)
    return 1


def _oracle_setup(inst, separator):
    from .oracle import default_separator_fn, graph_of, polygon_separator_fn, segment_separator_fn
    adj = adjacency_of(inst)
    if isinstance(inst, AbstractGraph):
        return inst, default_separator_fn
    g = graph_of(adj)
    if separator == "strings":
        return g, default_separator_fn
    if isinstance(inst, ColoredSegmentInstance):
        return g, segment_separator_fn(inst)
    return g, polygon_separator_fn(inst)


def cmd_oracle(args):
    from .oracle import INF, DistanceOracle, OracleError, build_oracle, query, verify_oracle
    if args.action == "build":
        inst = _read(args.input)
        g, fn = _oracle_setup(inst, args.separator)
        t0 = time.perf_counter()
        o = build_oracle(g, fn)
        dt = time.perf_counter() - t0
        _write(args.output, json.dumps(o.to_json()) + "\n")
        print(f"oracle: n={g.n} depth={o.depth()} table_entries={o.table_entries()} "
              f"bound={20 * g.n ** 1.5:.0f} build_s={dt:.2f}", file=sys.stderr)
        return 0
    o = _load_oracle(args.oracle, DistanceOracle)
    if args.action == "query":
        try:
            r = query(o, args.s, args.t)
        except KeyError as e:
            raise InputError(str(e))
        print("inf" if r >= INF else r)
        return 0
    inst = _read(args.input)
    g, _ = _oracle_setup(inst, "strings")
    try:
        st = verify_oracle(o, g, None if args.sample == 0 else args.sample, _seed(args))
    except OracleError as e:
        print(f"oracle violation: {e}", file=sys.stderr)
        return 1
    print(json.dumps({"pairs": st.pairs, "histogram": st.histogram, "max_error": st.max_error,
                      "table_entries": st.table_entries}))
    return 0


def _load_oracle(path, cls):
    try:
        with open(path) as fh:
            return cls.from_json(json.load(fh))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    except (ValueError, KeyError, TypeError, IndexError) as e:
        raise InputError(f"malformed oracle file: {e}")


def bench_row(kind, n, c, seed, repeats=5, oracle=False):
    from .generators import GeneratorSpec, generate
    inst = generate(GeneratorSpec(kind, n, c, seed))
    times, sep = [], None
    frag = seph = ""
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        if isinstance(inst, ColoredSegmentInstance):
            run = segment_star_separator(inst)
            sep = run.separator
        elif isinstance(inst, PolygonInstance):
            sep = polygon_star_separator(inst).separator
        else:
            sep = string_star_separator(inst)
        times.append(time.perf_counter_ns() - t0)
    frag = sep.stats.get("frag_count", "")
    seph = sep.stats.get("seph_size", "")
    nn = inst.n
    adj = adjacency_of(inst)
    rep = validate_star_separator(adj, sep)
    entries = ""
    if oracle:
        from .oracle import build_oracle
        g, fn = _oracle_setup(inst, None)
        entries = build_oracle(g, fn).table_entries()
    return [nn, c, kind, frag, seph, sep.size, int(statistics.median(times)), int(rep.ok),
            f"{sep.size / math.sqrt(nn):.4f}" if nn else "0", entries]


def _bench_job(job):
    return bench_row(*job)


def cmd_bench(args):
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--sizes must be a comma-separated list of integers, got {args.sizes!r}")
    seed = _seed(args)
    jobs = [(args.kind, n, args.c, seed, args.repeats, args.oracle) for n in sizes]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_bench_job, jobs))
    else:
        rows = [_bench_job(j) for j in jobs]
    fh = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0 if all(r[7] for r in rows) else 1


def cmd_svg(args):
    from .svg import render_svg
    inst = _read(args.input, perturb=True)
    sep = frags = None
    if args.separator:
        with open(args.separator) as fh:
            sep = StarSeparator.from_json(json.load(fh))
    if args.fragments and isinstance(inst, ColoredSegmentInstance):
        from .fragmenter import compute_active_fragments
        frags = compute_active_fragments(inst)
    if isinstance(inst, AbstractGraph):
        raise InputError("svg needs a geometric instance")
    _write(args.output, render_svg(inst, frags, sep))
    return 0


def build_parser():
    from .generators import KINDS
    p = argparse.ArgumentParser(prog="starsep", description="Star-based separators for intersection graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded instance")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True, help="size (k for grid, m for chain)")
    g.add_argument("--c", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--box", type=int, default=10 ** 6)
    g.add_argument("--string-mode", choices=("polylines", "gnp"), default="polylines")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("separate", help="compute a star-based separator")
    s.add_argument("input")
    s.add_argument("--mode", choices=("segments", "polygons", "strings"))
    s.add_argument("--perturb", action="store_true", help="inflate degenerate segments into polygons first")
    s.add_argument("--stage2", default="bfs-fm", help="bfs-fm | brute | external:<path>")
    s.add_argument("-o", "--output")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_separate)

    v = sub.add_parser("validate", help="check a separator against an instance")
    v.add_argument("input")
    v.add_argument("separator")
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="distance oracle")
    osub = o.add_subparsers(dest="action", required=True)
    ob = osub.add_parser("build")
    ob.add_argument("input")
    ob.add_argument("--separator", choices=("geometric", "strings"), default="geometric")
    ob.add_argument("-o", "--output")
    oq = osub.add_parser("query")
    oq.add_argument("oracle")
    oq.add_argument("s", type=int)
    oq.add_argument("t", type=int)
    ov = osub.add_parser("verify")
    ov.add_argument("oracle")
    ov.add_argument("input")
    ov.add_argument("--sample", type=int, default=2000, help="pairs to sample for n > 300 (0 = all pairs)")
    ov.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="CSV benchmark rows")
    b.add_argument("--kind", choices=KINDS, default="random-cdir")
    b.add_argument("--sizes", required=True)
    b.add_argument("--c", type=int, default=2)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--oracle", action="store_true", help="also build the distance oracle for table_entries")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)

    sv = sub.add_parser("svg", help="render an instance")
    sv.add_argument("input")
    sv.add_argument("--separator")
    sv.add_argument("--fragments", action="store_true")
    sv.add_argument("-o", "--output")
    sv.set_defaults(func=cmd_svg)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        return args.func(args)
    except (InputError, InstanceError, PolygonError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except StrategyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
