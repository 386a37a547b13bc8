"""Step 3: lift the contact-graph separator to disjoint stars in the segment
intersection graph, assign the remaining segments to parts, and validate."""
from __future__ import annotations

import math
import time
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass, field

from gmpy2 import mpq

from .contact_graph import build_contact_graph
from .fragmenter import INTERNAL, compute_active_fragments
from .geom import ColoredSegmentInstance, apply_map, frame_matrix, intersection_graph, relaxed_gc
from .planar_separator import planar_separator


@dataclass
class Star:
    center: int
    leaves: frozenset = frozenset()

    def nodes(self):
        return {self.center} | set(self.leaves)


@dataclass
class StarSeparator:
    stars: list
    A: set
    B: set
    stats: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.stars)

    def star_nodes(self):
        out = set()
        for s in self.stars:
            out |= s.nodes()
        return out

    def to_json(self):
        n = self.stats.get("n")
        return {"version": 1,
                "stars": [{"center": s.center, "leaves": sorted(s.leaves)} for s in self.stars],
                "A": sorted(self.A), "B": sorted(self.B),
                "stats": {"n": n, "size": self.size,
                          "ratio": (self.size / math.sqrt(n)) if n else 0.0,
                          **{k: v for k, v in self.stats.items() if k not in ("n", "size", "ratio")}}}

    @classmethod
    def from_json(cls, doc):
        stars = [Star(int(s["center"]), frozenset(int(x) for x in s["leaves"])) for s in doc["stars"]]
        return cls(stars, {int(x) for x in doc["A"]}, {int(x) for x in doc["B"]}, dict(doc.get("stats", {})))


# ------------------------------------------------------------ lifting


def lift_to_stars(sep, fs, graph) -> list:
    """Star centers (segment ids): seg(f) for an End fragment in S_H, and
    seg(f), seg(g), seg(g') for an Internal fragment connecting g and g'."""
    frags = fs.fragments
    centers = set()
    for node in sep.S:
        f = frags[graph.payload[node]]
        centers.add(f.segment_id)
        if f.kind == INTERNAL:
            if f.connects is None:
                raise ValueError(f"fragment {f.id} has no connects pair")
            for g in f.connects:
                if not 0 <= g < len(frags):
                    raise ValueError(f"fragment {f.id} connects to unknown fragment {g}")
                centers.add(frags[g].segment_id)
    return sorted(centers)


def _pairs_between(inst, xs, ys, hor_color):
    """All (x, y) id pairs with x in xs (segments of class ``hor_color``) and y
    in ys (one other class) that intersect.  Both classes are families of
    parallel segments, so after rotating xs horizontal the ys keep a static
    order by their intercept with the x-axis."""
    if not xs or not ys:
        return []
    m = frame_matrix(inst.colors[hor_color])
    events = []
    inv = None
    for s in ys:
        a, b = apply_map(m, s.p), apply_map(m, s.q)
        if a.y < b.y:
            a, b = b, a
        if inv is None:
            inv = mpq(a.x - b.x) / (a.y - b.y)
        key = a.x - a.y * inv
        events.append((a.y, 0, key, s.id))
        events.append((b.y, 2, key, s.id))
    for s in xs:
        a, b = apply_map(m, s.p), apply_map(m, s.q)
        lo, hi = min(a.x, b.x), max(a.x, b.x)
        events.append((a.y, 1, (lo - a.y * inv, hi - a.y * inv), s.id))
    # top-down; at equal height insert before query before delete (closed ranges)
    events.sort(key=lambda e: (-e[0], e[1]))
    active = []
    out = []
    for y, kind, key, sid in events:
        if kind == 0:
            insort(active, (key, sid))
        elif kind == 2:
            active.pop(bisect_left(active, (key, sid)))
        else:
            lo, hi = key
            i = bisect_left(active, (lo, -1))
            j = bisect_right(active, (hi, float("inf")))
            out.extend((sid, t) for _, t in active[i:j])
    return out


def materialize_stars(centers, inst: ColoredSegmentInstance) -> list:
    """Disjoint stars around the given centers.  Centers are never leaves; a
    non-center segment joins the first center (by color, then id) that meets it."""
    centers = sorted(set(centers))
    cset = set(centers)
    by_id = inst.by_id()
    by_color = {}
    for s in inst.segments:
        by_color.setdefault(s.color, []).append(s)
    cand = {cid: [] for cid in centers}
    center_segs = {}
    for cid in centers:
        center_segs.setdefault(by_id[cid].color, []).append(by_id[cid])
    for i, cs in center_segs.items():
        for j, ys in by_color.items():
            if j == i:
                continue
            ys = [s for s in ys if s.id not in cset]
            for cid, t in _pairs_between(inst, cs, ys, i):
                cand[cid].append(t)
    claimed = set(cset)
    stars = []
    for cid in sorted(centers, key=lambda k: (by_id[k].color, k)):
        leaves = sorted(t for t in set(cand[cid]) if t not in claimed)
        claimed.update(leaves)
        stars.append(Star(cid, frozenset(leaves)))
    return stars


def assign_parts(sep, fs, graph, stars, inst) -> tuple:
    node_of = {fid: k for k, fid in enumerate(graph.payload)}
    in_star = set()
    for s in stars:
        in_star |= s.nodes()
    A, B = set(), set()
    for seg in inst.segments:
        if seg.id in in_star:
            continue
        node = node_of[fs.representative[seg.id]]
        if node in sep.A:
            A.add(seg.id)
        elif node in sep.B:
            B.add(seg.id)
        else:
            raise AssertionError(f"representative of segment {seg.id} is in S_H but the segment is in no star")
    return A, B


# ---------------------------------------------------------- validation


@dataclass
class StarReport:
    problems: list
    size: int
    ratio: float
    n: int

    @property
    def ok(self):
        return not self.problems


def validate_star_separator(adj, sep: StarSeparator, weights=None) -> StarReport:
    """Check a star separator against an adjacency map {node: set of nodes}.

    ``weights`` (node -> rational) switches the balance check from node
    counts to weights: weight(A), weight(B) <= 2/3."""
    problems = []
    nodes = set(adj)
    n = len(nodes)
    seen = set()
    centers = set()
    for st in sep.stars:
        if st.center in centers:
            problems.append(f"duplicate center {st.center}")
        centers.add(st.center)
        if st.center in st.leaves:
            problems.append(f"center {st.center} is its own leaf")
        for v in st.nodes():
            if v not in nodes:
                problems.append(f"unknown node {v} in star {st.center}")
            elif v in seen:
                problems.append(f"node {v} in two stars")
            seen.add(v)
        for leaf in st.leaves:
            if leaf in nodes and leaf not in adj[st.center]:
                problems.append(f"leaf {leaf} not adjacent to center {st.center}")
    A, B = set(sep.A), set(sep.B)
    if A & B or (A | B) & seen:
        problems.append("parts overlap")
    if A | B | seen != nodes:
        problems.append(f"{len(nodes - (A | B | seen))} nodes missing from the partition")
    cap = (2 * n) // 3
    # weighted balance replaces the cardinality cap when weights are given
    if weights is None and (len(A) > cap or len(B) > cap):
        problems.append(f"unbalanced: |A|={len(A)}, |B|={len(B)}, cap {cap}")
    for a in A:
        bad = adj[a] & B
        if bad:
            problems.append(f"edge {a}-{min(bad)} joins A and B")
            break
    if weights is not None:
        two3 = mpq(2, 3)
        wa = sum((mpq(weights[v]) for v in A), mpq(0))
        wb = sum((mpq(weights[v]) for v in B), mpq(0))
        if wa > two3 or wb > two3:
            problems.append(f"weighted imbalance: w(A)={wa}, w(B)={wb}")
    size = len(sep.stars)
    return StarReport(problems, size, size / math.sqrt(n) if n else 0.0, n)


# ------------------------------------------------------------ pipeline


@dataclass
class SegmentRun:
    separator: StarSeparator
    fragments: object
    graph: object
    planar: object
    centers: list
    timings: dict


@relaxed_gc()
def segment_star_separator(inst: ColoredSegmentInstance, weights=None, check=True) -> SegmentRun:
    """Full pipeline for a c-oriented segment instance in general position."""
    t0 = time.perf_counter_ns()
    fs = compute_active_fragments(inst, weights, check=check)
    t1 = time.perf_counter_ns()
    g = build_contact_graph(fs)
    t2 = time.perf_counter_ns()
    sep = planar_separator(g)
    t3 = time.perf_counter_ns()
    centers = lift_to_stars(sep, fs, g)
    stars = materialize_stars(centers, inst)
    A, B = assign_parts(sep, fs, g, stars, inst)
    t4 = time.perf_counter_ns()
    n = inst.n
    stats = {"n": n, "frag_count": len(fs.active()), "seph_size": len(sep.S), "star_count": len(stars),
             "build_ns": t4 - t0}
    timings = {"fragments": t1 - t0, "contact": t2 - t1, "planar": t3 - t2, "stars": t4 - t3}
    return SegmentRun(StarSeparator(stars, A, B, stats), fs, g, sep, centers, timings)


def segment_adjacency(inst: ColoredSegmentInstance) -> dict:
    return intersection_graph(inst)
