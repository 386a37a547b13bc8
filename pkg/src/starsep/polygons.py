"""Star-based separators for c-oriented polygons, and the inflation path for
segment inputs that are not in general position.

Each polygon contributes its sides, one vertical connecting segment per hole
and one vertical containment segment.  The segment pipeline runs on that set
(vertical class first), and star centers are lifted back to polygons.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from gmpy2 import mpq

from .geom import (ColoredSegmentInstance, Direction, Point, Segment, canon, direction_of,
                   intersecting_pairs, linf_point_segment, orient, relaxed_gc, segment_intersection)

MAX_EDGES = 64
VERTICAL = Direction(0, 1)


class PolygonError(ValueError):
    pass


@dataclass
class Polygon:
    id: int
    outer: list
    holes: list = field(default_factory=list)
    weight: Optional[object] = None

    def rings(self):
        return [self.outer] + list(self.holes)

    def sides(self):
        out = []
        for ring in self.rings():
            k = len(ring)
            out.extend((ring[i], ring[(i + 1) % k]) for i in range(k))
        return out

    def bbox(self):
        xs = [p.x for p in self.outer]
        ys = [p.y for p in self.outer]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass
class PolygonInstance:
    polygons: list
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.polygons)

    def weights(self):
        n = len(self.polygons)
        return {p.id: (mpq(1, n) if p.weight is None else mpq(p.weight)) for p in self.polygons}


# ------------------------------------------------------------- rings


def area2(ring):
    s = 0
    k = len(ring)
    for i in range(k):
        a, b = ring[i], ring[(i + 1) % k]
        s += a.x * b.y - a.y * b.x
    return s


def _ring_edges(ring):
    k = len(ring)
    return [(ring[i], ring[(i + 1) % k]) for i in range(k)]


def ring_is_simple(ring) -> bool:
    k = len(ring)
    if k < 3 or len(set(ring)) != k:
        return False
    edges = _ring_edges(ring)
    for i in range(k):
        for j in range(i + 1, k):
            hit = segment_intersection(edges[i], edges[j])
            if not hit:
                continue
            adjacent = j == i + 1 or (i == 0 and j == k - 1)
            if not adjacent or hit.kind == "overlap":
                return False
    return area2(ring) != 0


def point_in_ring(p, ring) -> int:
    """+1 strictly inside, 0 on the boundary, -1 outside (exact)."""
    inside = False
    k = len(ring)
    for i in range(k):
        a, b = ring[i], ring[(i + 1) % k]
        if orient(a, b, p) == 0 and min(a.x, b.x) <= p.x <= max(a.x, b.x) \
                and min(a.y, b.y) <= p.y <= max(a.y, b.y):
            return 0
        if (a.y > p.y) != (b.y > p.y):
            # x of the edge at height p.y compared without division
            lhs = (p.x - a.x) * (b.y - a.y)
            rhs = (b.x - a.x) * (p.y - a.y)
            if (b.y - a.y) > 0:
                if lhs < rhs:
                    inside = not inside
            elif lhs > rhs:
                inside = not inside
    return 1 if inside else -1


def point_in_polygon(p, poly: Polygon) -> bool:
    """Closed-region membership: in the outer ring and not strictly in a hole."""
    if point_in_ring(p, poly.outer) < 0:
        return False
    return all(point_in_ring(p, h) <= 0 for h in poly.holes)


def normalize_polygon(poly: Polygon, max_edges=MAX_EDGES, allow_vertical=True) -> Polygon:
    """Validated copy with ccw outer ring, cw holes and collinear vertices removed."""
    rings = []
    for ring in poly.rings():
        ring = [Point(*p) for p in ring]
        ring = _drop_collinear(ring)
        rings.append(ring)
    outer, holes = rings[0], rings[1:]
    for ring in rings:
        if not ring_is_simple(ring):
            raise PolygonError(f"polygon {poly.id}: ring is not simple")
    if area2(outer) < 0:
        outer = outer[::-1]
    holes = [h if area2(h) < 0 else h[::-1] for h in holes]
    p = Polygon(poly.id, outer, holes, poly.weight)
    edges = p.sides()
    if len(edges) > max_edges:
        raise PolygonError(f"polygon {poly.id}: {len(edges)} edges exceed the cap {max_edges}")
    if not allow_vertical and any(a.x == b.x for a, b in edges):
        raise PolygonError(f"polygon {poly.id}: vertical edge")
    for h in holes:
        if any(point_in_ring(v, outer) <= 0 for v in h) or _rings_touch(h, outer):
            raise PolygonError(f"polygon {poly.id}: hole containment violated")
    for i in range(len(holes)):
        for j in range(i + 1, len(holes)):
            a, b = holes[i], holes[j]
            if _rings_touch(a, b) or point_in_ring(a[0], b) >= 0 or point_in_ring(b[0], a) >= 0:
                raise PolygonError(f"polygon {poly.id}: holes overlap")
    return p


def _drop_collinear(ring):
    out = list(ring)
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if orient(a, b, c) == 0:
                out.pop(i)
                changed = True
                break
    return out


def _rings_touch(r1, r2) -> bool:
    for e in _ring_edges(r1):
        for f in _ring_edges(r2):
            if segment_intersection(e, f):
                return True
    return False


# ------------------------------------------------- vertical decomposition


@dataclass
class VTrap:
    owner: int
    xl: object
    xr: object
    bottom: tuple  # edge (a, b) with a.x < b.x
    top: tuple

    def y_bottom(self, x):
        return _y_on(self.bottom, x)

    def y_top(self, x):
        return _y_on(self.top, x)


def _y_on(edge, x):
    a, b = edge
    if x == a.x:
        return a.y
    if x == b.x:
        return b.y
    return canon(a.y + mpq(b.y - a.y) * (x - a.x) / (b.x - a.x))


def vertical_decomposition(poly: Polygon) -> list:
    """Trapezoids with vertical sides whose union is the polygon region.

    Slabs between consecutive vertex x-coordinates are cut by the edges that
    span them; neighboring slab pieces with the same bottom and top edge merge.
    """
    edges = []
    for a, b in poly.sides():
        if a.x == b.x:
            raise PolygonError(f"polygon {poly.id}: vertical edge")
        edges.append((a, b) if a.x < b.x else (b, a))
    xs = sorted({p.x for ring in poly.rings() for p in ring})
    out = []
    open_traps = {}
    for x0, x1 in zip(xs, xs[1:]):
        xm = mpq(x0 + x1) / 2
        span = [e for e in edges if e[0].x <= x0 and e[1].x >= x1]
        span.sort(key=lambda e: _y_on(e, xm))
        nxt = {}
        for k in range(0, len(span) - 1, 2):
            bot, top = span[k], span[k + 1]
            key = (bot, top)
            t = open_traps.get(key)
            if t is not None and t.xr == x0:
                t.xr = x1
            else:
                t = VTrap(poly.id, x0, x1, bot, top)
                out.append(t)
            nxt[key] = t
        open_traps = nxt
    return out


# ---------------------------------------------------- auxiliary segments


def connecting_segments(poly: Polygon) -> list:
    """(h, h') per hole: from the hole's topmost (then leftmost) vertex straight
    up to the first point of another hole or the outer ring."""
    out = []
    for hi, hole in enumerate(poly.holes):
        top = max(hole, key=lambda p: (p.y, -p.x))
        best = None
        for ri, ring in enumerate(poly.rings()):
            if ri == hi + 1:
                continue
            for a, b in _ring_edges(ring):
                lo, hi_x = min(a.x, b.x), max(a.x, b.x)
                if not lo <= top.x <= hi_x:
                    continue
                if a.x == b.x:
                    y = min(y for y in (a.y, b.y) if y > top.y) if max(a.y, b.y) > top.y else None
                else:
                    y = _y_on((a, b) if a.x < b.x else (b, a), top.x)
                if y is not None and y > top.y and (best is None or y < best):
                    best = y
        if best is None:
            raise PolygonError(f"polygon {poly.id}: connecting ray escapes the outer ring")
        out.append((top, Point(top.x, best)))
    return out


class _MaxTree:
    """Prefix-max over a fixed number of slots; empty slots hold None."""

    def __init__(self, n):
        size = 1
        while size < max(n, 1):
            size *= 2
        self.size = size
        self.t = [None] * (2 * size)

    def set(self, i, val):
        i += self.size
        self.t[i] = val
        i //= 2
        while i:
            a, b = self.t[2 * i], self.t[2 * i + 1]
            self.t[i] = a if b is None or (a is not None and a >= b) else b
            i //= 2

    def prefix_max(self, n):
        """Max over slots [0, n)."""
        best = None
        lo, hi = self.size, self.size + n
        while lo < hi:
            if lo & 1:
                v = self.t[lo]
                if v is not None and (best is None or v > best):
                    best = v
                lo += 1
            if hi & 1:
                hi -= 1
                v = self.t[hi]
                if v is not None and (best is None or v > best):
                    best = v
            lo //= 2
            hi //= 2
        return best


def _slope(edge):
    a, b = edge
    return mpq(b.y - a.y) / (b.x - a.x)


def highest_exits(traps, queries) -> list:
    """For each query point, (y, owner) of the highest first-exit point over all
    polygons whose region contains it, or None.

    Trapezoids are grouped by (bottom slope, top slope).  Within a group a
    left-to-right sweep keeps the live trapezoids in a prefix-max tree keyed
    by the bottom line's intercept alpha; a point lies in a live trapezoid iff
    alpha <= alpha(point) and beta >= beta(point), and the one with the
    largest beta has the highest top edge at the point's x.
    """
    groups = {}
    for t in traps:
        groups.setdefault((_slope(t.bottom), _slope(t.top)), []).append(t)
    best = [None] * len(queries)
    for (su, sw), ts in groups.items():
        alpha = [t.bottom[0].y - su * t.bottom[0].x for t in ts]
        beta = [t.top[0].y - sw * t.top[0].x for t in ts]
        order = sorted(range(len(ts)), key=lambda k: (alpha[k], k))
        slot = {k: i for i, k in enumerate(order)}
        sorted_alpha = [alpha[k] for k in order]
        tree = _MaxTree(len(ts))
        events = []
        for k, t in enumerate(ts):
            events.append((t.xl, 0, k))
            events.append((t.xr, 2, k))
        for qi, (x, y) in enumerate(queries):
            events.append((x, 1, qi))
        events.sort(key=lambda e: (e[0], e[1]))
        from bisect import bisect_right
        for x, kind, k in events:
            if kind == 0:
                tree.set(slot[k], (beta[k], ts[k].owner))
            elif kind == 2:
                tree.set(slot[k], None)
            else:
                qx, qy = queries[k]
                a_star = qy - su * qx
                m = tree.prefix_max(bisect_right(sorted_alpha, a_star))
                if m is None or m[0] < qy - sw * qx:
                    continue
                top_y = canon(m[0] + sw * qx)
                if best[k] is None or (top_y, -m[1]) > (best[k][0], -best[k][1]):
                    best[k] = (top_y, m[1])
    return best


def _fractions():
    yield mpq(1, 2)
    d = 3
    while True:
        for num in range(1, d):
            if math.gcd(num, d) == 1:
                yield mpq(num, d)
        d += 1


def _spanning_y(sides_arr, sides, x):
    """Exact y-values of all sides strictly spanning the vertical line at x."""
    fx = float(x)
    lo, hi = sides_arr[:, 0], sides_arr[:, 1]
    idx = np.nonzero((lo < fx + 1e-6) & (hi > fx - 1e-6))[0]
    ys = set()
    for i in idx.tolist():
        a, b = sides[i]
        if a.x < x < b.x:
            ys.add(_y_on((a, b), x))
    return ys


def containment_points(polys, traps_by_poly, forbidden_x, sides) -> list:
    """One interior point per polygon, with pairwise distinct x-coordinates that
    avoid every forbidden x, and not on any side."""
    sides = [(a, b) if a.x < b.x else (b, a) for a, b in sides]
    arr = np.array([[float(a.x), float(b.x)] for a, b in sides]).reshape(-1, 2)
    used = set()
    out = []
    for poly in polys:
        traps = sorted(traps_by_poly[poly.id], key=lambda t: (-(t.xr - t.xl), t.xl))
        t = traps[0]
        found = None
        for f in _fractions():
            x = canon(t.xl + (t.xr - t.xl) * f)
            if x in used or x in forbidden_x:
                continue
            on = _spanning_y(arr, sides, x)
            yb, yt = t.y_bottom(x), t.y_top(x)
            for g in _fractions():
                y = canon(yb + (yt - yb) * g)
                if y not in on:
                    found = Point(x, y)
                    break
            if found:
                break
        used.add(found.x)
        out.append(found)
    return out


# ------------------------------------------------------------- pipeline


@dataclass
class AuxSegments:
    instance: ColoredSegmentInstance
    owner: dict  # segment id -> polygon id
    kind: dict  # segment id -> "side" | "connecting" | "containment"
    target: dict  # containment segment id -> polygon id j*
    rep_side: dict  # polygon id -> segment id
    shear: int


def shear_polygons(polys):
    """Integer shear x -> x + s*y making every edge non-vertical (s = 0 if none is)."""
    dirs = set()
    for p in polys:
        for a, b in p.sides():
            dirs.add(direction_of(a, b))
    s = 0
    while any(d.dx + s * d.dy == 0 for d in dirs):
        s += 1
    if s == 0:
        return 0, list(polys)
    f = lambda q: Point(q.x + s * q.y, q.y)
    return s, [Polygon(p.id, [f(q) for q in p.outer], [[f(q) for q in h] for h in p.holes], p.weight)
               for p in polys]


def build_aux_segments(inst: PolygonInstance) -> AuxSegments:
    s, polys = shear_polygons(inst.polygons)
    weights = PolygonInstance(polys).weights()
    total = sum(weights.values(), mpq(0))
    pairs, owner, kind, target = [], [], [], {}
    rep_side = {}
    for p in polys:
        low = min((q for q in p.outer), key=lambda q: (q.y, q.x))
        first = len(pairs)
        for a, b in p.sides():
            if p.id not in rep_side and low in (a, b):
                rep_side[p.id] = len(pairs)
            pairs.append((a, b))
            owner.append(p.id)
            kind.append("side")
        for a, b in connecting_segments(p):
            pairs.append((a, b))
            owner.append(p.id)
            kind.append("connecting")
    traps = {p.id: vertical_decomposition(p) for p in polys}
    all_traps = [t for p in polys for t in traps[p.id]]
    sides = [pr for pr, k in zip(pairs, kind) if k == "side"]
    forbidden = {q.x for p in polys for ring in p.rings() for q in ring}
    for a, b in pairs:
        if kind and a.x == b.x:
            forbidden.add(a.x)
    side_idx = [i for i, k in enumerate(kind) if k == "side"]
    for i, j in intersecting_pairs([pairs[k] for k in side_idx]):
        hit = segment_intersection(pairs[side_idx[i]], pairs[side_idx[j]])
        if hit.kind == "point":
            forbidden.add(hit.p.x)
    xs = containment_points(polys, traps, forbidden, sides)
    exits = highest_exits(all_traps, xs)
    for p, x, ex in zip(polys, xs, exits):
        if ex is None:
            raise PolygonError(f"polygon {p.id}: containment point not inside any polygon")
        target[len(pairs)] = ex[1]
        pairs.append((x, Point(x.x, ex[0])))
        owner.append(p.id)
        kind.append("containment")
    # vertical class first, then polygon edge orientations in first-seen order
    colors = [VERTICAL]
    index = {VERTICAL: 0}
    segs = []
    for k, (a, b) in enumerate(pairs):
        d = direction_of(a, b)
        if d not in index:
            index[d] = len(colors)
            colors.append(d)
        w = mpq(0)
        if kind[k] == "side" and rep_side.get(owner[k]) == k:
            w = weights[owner[k]] / total
        segs.append(Segment(k, Point(*a), Point(*b), index[d], w))
    assert len(segs) <= aux_size_bound(polys), "auxiliary set exceeds K*n"
    ci = ColoredSegmentInstance(segs, colors, {"kind": "polygon-aux", "polygons": len(polys)})
    return AuxSegments(ci, dict(enumerate(owner)), dict(enumerate(kind)), target, rep_side, s)


@dataclass
class PolygonRun:
    separator: object
    aux: AuxSegments
    segment_run: object
    segment_parts: tuple


@relaxed_gc()
def polygon_star_separator(inst: PolygonInstance, adjacency=None) -> PolygonRun:
    from .stars import (Star, StarSeparator, assign_parts, lift_to_stars, materialize_stars,
                        segment_star_separator)
    aux = build_aux_segments(inst)
    weights = {s.id: s.weight for s in aux.instance.segments}
    if sum(weights.values()) == 0:
        weights = None
    run = segment_star_separator(aux.instance, weights=weights)
    centers = set()
    for v in run.centers:
        if aux.kind[v] == "containment":
            centers.add(aux.target[v])
        else:
            centers.add(aux.owner[v])
    adj = adjacency if adjacency is not None else polygon_intersection_graph(inst.polygons)
    claimed = set(centers)
    stars = []
    for c in sorted(centers):
        leaves = sorted(v for v in adj[c] if v not in claimed)
        claimed.update(leaves)
        stars.append(Star(c, frozenset(leaves)))
    node_of = {fid: k for k, fid in enumerate(run.graph.payload)}
    A, B = set(), set()
    for p in inst.polygons:
        if p.id in claimed:
            continue
        node = node_of[run.fragments.representative[aux.rep_side[p.id]]]
        if node in run.planar.A:
            A.add(p.id)
        elif node in run.planar.B:
            B.add(p.id)
        else:
            raise AssertionError(f"polygon {p.id}: representative side in S_H but polygon in no star")
    seg_sep = run.separator
    stats = {"n": inst.n, "frag_count": seg_sep.stats["frag_count"], "seph_size": seg_sep.stats["seph_size"],
             "star_count": len(stars), "aux_segments": aux.instance.n, "shear": aux.shear,
             "build_ns": seg_sep.stats["build_ns"]}
    return PolygonRun(StarSeparator(stars, A, B, stats), aux, run, (seg_sep.A, seg_sep.B))


# ------------------------------------------------------------ oracles


def polygon_intersection_graph(polys) -> dict:
    """Adjacency of the closed-region intersection graph, by brute force:
    boundary crossings plus containment tests in both directions."""
    adj = {p.id: set() for p in polys}
    sides, own = [], []
    for p in polys:
        for e in p.sides():
            sides.append(e)
            own.append(p.id)
    for i, j in intersecting_pairs(sides):
        a, b = own[i], own[j]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    boxes = np.array([[float(v) for v in p.bbox()] for p in polys]).reshape(-1, 4)
    for i, p in enumerate(polys):
        inside = np.nonzero((boxes[:, 0] <= boxes[i, 0]) & (boxes[:, 1] <= boxes[i, 1])
                            & (boxes[:, 2] >= boxes[i, 2]) & (boxes[:, 3] >= boxes[i, 3]))[0]
        for j in inside.tolist():
            q = polys[j]
            if j == i or q.id in adj[p.id]:
                continue
            if point_in_polygon(p.outer[0], q):
                adj[p.id].add(q.id)
                adj[q.id].add(p.id)
    return adj


def polygons_intersect(p: Polygon, q: Polygon) -> bool:
    for e in p.sides():
        for f in q.sides():
            if segment_intersection(e, f):
                return True
    return point_in_polygon(p.outer[0], q) or point_in_polygon(q.outer[0], p)


# ------------------------------------------------------------ inflation


def compute_d_min(segments) -> object:
    """Smallest l-infinity distance between two non-intersecting segments
    (None stands for +infinity when every pair intersects)."""
    pairs = [(s.p, s.q) if isinstance(s, Segment) else (Point(*s[0]), Point(*s[1])) for s in segments]
    n = len(pairs)
    if n < 2:
        return None
    meet = intersecting_pairs(pairs)
    box = np.array([[float(min(p.x, q.x)), float(min(p.y, q.y)), float(max(p.x, q.x)), float(max(p.y, q.y))]
                    for p, q in pairs]).reshape(-1, 4)
    best = None
    # float gap between boxes is a lower bound on the l-infinity distance
    for i in range(n):
        gx = np.maximum(0.0, np.maximum(box[:, 0] - box[i, 2], box[i, 0] - box[:, 2]))
        gy = np.maximum(0.0, np.maximum(box[:, 1] - box[i, 3], box[i, 1] - box[:, 3]))
        gap = np.maximum(gx, gy)
        order = np.argsort(gap[i + 1:], kind="stable") + i + 1
        for j in order.tolist():
            if best is not None and gap[j] > float(best) * (1 + 1e-9) + 1e-9:
                break
            if (i, j) in meet:
                continue
            a, b = pairs[i], pairs[j]
            d = min(linf_point_segment(a[0], *b), linf_point_segment(a[1], *b),
                    linf_point_segment(b[0], *a), linf_point_segment(b[1], *a))
            if best is None or d < best:
                best = d
    return best


def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and orient(h[-2], h[-1], p) <= 0:
                h.pop()
            h.append(p)
        return h
    lower, upper = half(pts), half(pts[::-1])
    return lower[:-1] + upper[:-1]


def inflate_segments(inst: ColoredSegmentInstance) -> PolygonInstance:
    """Replace every segment v_i by the l-infinity ball of radius eps_i around it,
    eps_i = (d_min/2) * (i+1)/(2n+2).  Coordinates are scaled by a common
    integer factor so the polygons have integer vertices; scaling does not
    change any intersection."""
    segs = inst.segments
    n = len(segs)
    d = compute_d_min(segs)
    d = mpq(2) if d is None else mpq(d)
    den = 2 * (2 * n + 2)
    scale = int(den * d.denominator)
    polys = []
    for i, s in enumerate(segs):
        eps = int(d.numerator) * (i + 1)  # eps_i * scale
        p = Point(s.p.x * scale, s.p.y * scale)
        q = Point(s.q.x * scale, s.q.y * scale)
        corners = [Point(c.x + dx * eps, c.y + dy * eps) for c in (p, q) for dx in (-1, 1) for dy in (-1, 1)]
        ring = _hull(corners)
        w = s.weight
        polys.append(Polygon(s.id, ring, [], w))
    return PolygonInstance(polys, {"kind": "inflated", "scale": scale, "d_min": str(d)})


# ------------------------------------------------------------ generator

HEX_DIRS = ((1, 0), (1, 1), (1, -1))


def hexagon(cx, cy, a, h, hole=False):
    """Hexagon with horizontal top/bottom and 45-degree flanks (needs a > h)."""
    pts = [Point(cx - a, cy), Point(cx - a + h, cy - h), Point(cx + a - h, cy - h),
           Point(cx + a, cy), Point(cx + a - h, cy + h), Point(cx - a + h, cy + h)]
    return pts[::-1] if hole else pts


def nested_polygons(n: int, seed: int, c: int = 3, levels: int = 4) -> PolygonInstance:
    """Clusters of nested hexagons: each level sits in the hole of the one
    around it, small polygons sit in the solid part (containment-only edges),
    and a few random polygons cross cluster boundaries."""
    rng = random.Random(f"nested:{n}:{seed}:{c}")
    polys = []
    placed = _Placed()
    cells = max(1, math.ceil(math.sqrt(max(1, n / (levels + 3)))))
    cell = 10 ** 6
    attempts = 0
    while len(polys) < n:
        attempts += 1
        if attempts > 200 * n + 500:
            raise RuntimeError("nested-polygons: could not place polygons in general position")
        k = len(polys)
        cx0 = rng.randrange(cells) * cell + cell // 2
        cy0 = rng.randrange(cells) * cell + cell // 2
        mode = rng.random()
        if mode < 0.35:
            # nested chain around one cell center
            depth = rng.randrange(levels)
            a = cell // 2 - depth * cell // (2 * levels + 2) - rng.randrange(1, 997)
            h = a // 2 + rng.randrange(1, 991)
            outer = hexagon(cx0 + rng.randrange(-97, 97), cy0 + rng.randrange(-97, 97), a, h)
            ia = a - cell // (4 * levels + 4) - rng.randrange(1, 499)
            ih = ia // 2 - rng.randrange(1, 499)
            holes = [hexagon(cx0 + rng.randrange(-97, 97), cy0 + rng.randrange(-97, 97), ia, ih, hole=True)] \
                if ia > ih > 10 else []
            poly = Polygon(k, outer, holes)
        elif mode < 0.55:
            # small polygon somewhere (often inside a solid ring: containment only)
            a = rng.randrange(cell // 60, cell // 25)
            h = a // 2 + rng.randrange(1, 97)
            poly = Polygon(k, hexagon(rng.randrange(cells * cell), rng.randrange(cells * cell), a, h))
        else:
            # larger polygon crossing cluster boundaries
            a = rng.randrange(cell // 4, cell)
            h = a // 3 + rng.randrange(1, 97)
            poly = Polygon(k, hexagon(rng.randrange(cells * cell), rng.randrange(cells * cell), a, h))
        try:
            poly = normalize_polygon(poly, allow_vertical=False)
        except PolygonError:
            continue
        if placed.try_add(poly):
            polys.append(poly)
    return PolygonInstance(polys, {"kind": "nested-polygons", "n": n, "seed": seed})


class _Placed:
    """Incremental general-position filter for generated polygons: distinct
    vertex coordinates across polygons and no touching or triple points."""

    def __init__(self):
        self.xs, self.ys = set(), set()
        self.sides = []
        self.crossings = set()

    def try_add(self, poly):
        vs = [p for r in poly.rings() for p in r]
        if any(p.x in self.xs or p.y in self.ys for p in vs):
            return False
        new_pts = []
        mine = poly.sides()
        for e in mine:
            ex0, ex1 = min(e[0].x, e[1].x), max(e[0].x, e[1].x)
            ey0, ey1 = min(e[0].y, e[1].y), max(e[0].y, e[1].y)
            for f, box in self.sides:
                if box[0] > ex1 or box[2] < ex0 or box[1] > ey1 or box[3] < ey0:
                    continue
                hit = segment_intersection(e, f)
                if not hit:
                    continue
                if hit.kind == "overlap" or hit.p in (e[0], e[1], f[0], f[1]) or hit.p in self.crossings:
                    return False
                new_pts.append(hit.p)
        if len(set(new_pts)) != len(new_pts):
            return False
        xs = {p.x for p in new_pts}
        if xs & self.xs or any(p.x in xs for p in vs):
            return False
        self.crossings.update(new_pts)
        self.xs.update(p.x for p in vs)
        self.ys.update(p.y for p in vs)
        for f in mine:
            self.sides.append((f, (min(f[0].x, f[1].x), min(f[0].y, f[1].y), max(f[0].x, f[1].x), max(f[0].y, f[1].y))))
        return True


def nesting_depth(polys) -> int:
    """Longest chain P_1, P_2, ... where each polygon lies inside a hole of the previous one."""
    inside = {}
    for p in polys:
        inside[p.id] = [q.id for q in polys if q.id != p.id
                        and any(point_in_ring(p.outer[0], h) > 0 and all(point_in_ring(v, h) > 0 for v in p.outer)
                                for h in q.holes)]
    memo = {}

    def depth(i):
        if i not in memo:
            memo[i] = 1 + max((depth(j) for j in inside[i]), default=0)
        return memo[i]
    return max((depth(p.id) for p in polys), default=0)


def check_side_membership(run: PolygonRun) -> list:
    """Every polygon in A (or B) has all sides and connecting segments in the
    segment-level A_V (or B_V)."""
    A_V, B_V = run.segment_parts
    problems = []
    for part, seg_part, name in ((run.separator.A, A_V, "A"), (run.separator.B, B_V, "B")):
        for sid, owner in run.aux.owner.items():
            if owner in part and run.aux.kind[sid] != "containment" and sid not in seg_part:
                problems.append(f"polygon {owner} in {name} but segment {sid} is not in {name}_V")
    return problems


def aux_size_bound(polys) -> int:
    """K*n with K = max edges + max holes + 1 over the input."""
    if not polys:
        return 0
    k = max(len(p.sides()) for p in polys) + max(len(p.holes) for p in polys) + 1
    return k * len(polys)
