"""Exact geometric primitives and the c-oriented segment data model.

All coordinates are exact rationals.  Input coordinates are Python ints;
derived points (crossings, fragment endpoints) are ``gmpy2.mpq`` values.
Both compare and hash consistently, so they can be mixed freely.
"""
from __future__ import annotations

import gc
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from math import gcd
from typing import NamedTuple, Optional, Sequence

import numpy as np
from gmpy2 import mpq

Coordinate = mpq  # ints are accepted wherever a Coordinate is expected


@contextmanager
def relaxed_gc(threshold=100_000):
    """Raise the young-generation GC threshold for allocation-heavy phases.
    The pipelines build large, mostly acyclic record sets, and the default
    threshold spends about a fifth of the run in collections."""
    old = gc.get_threshold()
    gc.set_threshold(max(threshold, old[0]), *old[1:])
    try:
        yield
    finally:
        gc.set_threshold(*old)


def Q(value, den=1):
    """Exact rational from an int, a ``"num/den"`` string, or a numerator/denominator pair."""
    if isinstance(value, str):
        value = value.strip()
        if "/" in value:
            num, d = value.split("/")
            return mpq(int(num), int(d)) / den
        return mpq(int(value), den)
    return mpq(value, den) if den != 1 else mpq(value)


def canon(x):
    """Collapse integral rationals to int (keeps hashing and JSON output tidy)."""
    if isinstance(x, int):
        return x
    if x.denominator == 1:
        return int(x.numerator)
    return x


def format_coord(x) -> object:
    x = canon(x)
    if isinstance(x, int):
        return x
    return f"{int(x.numerator)}/{int(x.denominator)}"


class Point(NamedTuple):
    x: object
    y: object

    def __sub__(self, other):
        return Point(self.x - other.x, self.y - other.y)

    def __add__(self, other):
        return Point(self.x + other.x, self.y + other.y)

    def scaled(self, k):
        return Point(self.x * k, self.y * k)


def as_point(p) -> Point:
    return p if isinstance(p, Point) else Point(p[0], p[1])


class Direction(NamedTuple):
    dx: int
    dy: int

    @classmethod
    def of(cls, dx: int, dy: int) -> "Direction":
        """Canonical direction: gcd-reduced, pointing right (or straight up)."""
        dx, dy = int(dx), int(dy)
        if dx == 0 and dy == 0:
            raise ValueError("zero-length segment has no direction")
        g = gcd(abs(dx), abs(dy))
        dx, dy = dx // g, dy // g
        if dx < 0 or (dx == 0 and dy < 0):
            dx, dy = -dx, -dy
        return cls(dx, dy)


def direction_of(p, q) -> Direction:
    """Direction of the segment pq; requires p - q to be an integer multiple of a lattice vector."""
    ddx, ddy = q[0] - p[0], q[1] - p[1]
    if ddx == 0 and ddy == 0:
        raise ValueError("zero-length segment")
    if isinstance(ddx, int) and isinstance(ddy, int):
        return Direction.of(ddx, ddy)
    # rational difference: clear denominators first
    ddx, ddy = mpq(ddx), mpq(ddy)
    den = ddx.denominator * ddy.denominator
    return Direction.of(int(ddx * den), int(ddy * den))


@dataclass(frozen=True)
class Segment:
    id: int
    p: Point
    q: Point
    color: int
    weight: Optional[object] = None

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError(f"segment {self.id}: zero-length segment")
        if self.weight is not None and self.weight < 0:
            raise ValueError(f"segment {self.id}: negative weight")

    def point_at(self, t) -> Point:
        if t == 0:
            return self.p
        if t == 1:
            return self.q
        return Point(canon(self.p.x + (self.q.x - self.p.x) * t),
                     canon(self.p.y + (self.q.y - self.p.y) * t))


@dataclass
class ColoredSegmentInstance:
    segments: list
    colors: list
    meta: dict = field(default_factory=dict)

    @property
    def c(self) -> int:
        return len(self.colors)

    @property
    def n(self) -> int:
        return len(self.segments)

    def __post_init__(self):
        self.colors = [Direction.of(*d) for d in self.colors]
        if len(set(self.colors)) != len(self.colors):
            raise ValueError("two color classes share a direction")
        for s in self.segments:
            if not 0 <= s.color < len(self.colors):
                raise ValueError(f"segment {s.id}: color {s.color} out of range")
            if direction_of(s.p, s.q) != self.colors[s.color]:
                raise ValueError(f"segment {s.id}: direction does not match color {s.color}")
        ids = [s.id for s in self.segments]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate segment ids")

    def by_id(self) -> dict:
        return {s.id: s for s in self.segments}

    def weights(self) -> dict:
        n = len(self.segments)
        return {s.id: (mpq(1, n) if s.weight is None else mpq(s.weight)) for s in self.segments}

    @classmethod
    def auto_colored(cls, pairs, weights=None, meta=None) -> "ColoredSegmentInstance":
        """Group raw (p, q) pairs into color classes by direction, in first-seen order."""
        colors: list = []
        index: dict = {}
        segments = []
        for i, (p, q) in enumerate(pairs):
            d = direction_of(p, q)
            if d not in index:
                index[d] = len(colors)
                colors.append(d)
            w = None if weights is None else weights[i]
            segments.append(Segment(i, as_point(p), as_point(q), index[d], w))
        return cls(segments, colors, meta or {})


# ---------------------------------------------------------------- predicates


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


def orient(p, q, r) -> int:
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


@dataclass(frozen=True)
class Intersection:
    kind: str  # "empty" | "point" | "overlap"
    p: Optional[Point] = None
    q: Optional[Point] = None

    def __bool__(self):
        return self.kind != "empty"


EMPTY = Intersection("empty")


def _ends(s):
    if isinstance(s, Segment):
        return s.p, s.q
    return as_point(s[0]), as_point(s[1])


def segment_intersection(a, b) -> Intersection:
    """Exact intersection of two closed segments (Segment objects or point pairs)."""
    p1, p2 = _ends(a)
    p3, p4 = _ends(b)
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = p4[0] - p3[0], p4[1] - p3[1]
    wx, wy = p3[0] - p1[0], p3[1] - p1[1]
    d = cross(rx, ry, sx, sy)
    if d != 0:
        tn = cross(wx, wy, sx, sy)
        un = cross(wx, wy, rx, ry)
        if d < 0:
            d, tn, un = -d, -tn, -un
        if 0 <= tn <= d and 0 <= un <= d:
            t = mpq(tn, d)
            return Intersection("point", Point(canon(p1[0] + rx * t), canon(p1[1] + ry * t)))
        return EMPTY
    if cross(wx, wy, rx, ry) != 0:
        return EMPTY
    rr = rx * rx + ry * ry
    t3 = mpq(wx * rx + wy * ry, 1) / rr
    t4 = mpq((p4[0] - p1[0]) * rx + (p4[1] - p1[1]) * ry, 1) / rr
    lo, hi = max(mpq(0), min(t3, t4)), min(mpq(1), max(t3, t4))
    if lo > hi:
        return EMPTY
    a_pt = Point(canon(p1[0] + rx * lo), canon(p1[1] + ry * lo))
    if lo == hi:
        return Intersection("point", a_pt)
    b_pt = Point(canon(p1[0] + rx * hi), canon(p1[1] + ry * hi))
    return Intersection("overlap", a_pt, b_pt)


def point_on_segment(r, p, q) -> bool:
    if orient(p, q, r) != 0:
        return False
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


# ------------------------------------------------------------- frame change


def frame_matrix(d: Direction):
    """Integer map sending direction d to the positive x-axis (scaled by |d|^2)."""
    return ((d.dx, d.dy), (-d.dy, d.dx))


def apply_map(m, p) -> Point:
    (a, b), (c, e) = m
    return Point(a * p[0] + b * p[1], c * p[0] + e * p[1])


def invert_map(m):
    (a, b), (c, e) = m
    det = mpq(a * e - b * c)
    return ((e / det, -b / det), (-c / det, a / det))


def rotate_frame(inst: ColoredSegmentInstance, color: int):
    """Map the instance so that class ``color`` becomes horizontal.

    Returns ``(matrix, mapped_instance)``; the map is linear and invertible over
    the rationals, so incidences and crossings are preserved exactly.
    """
    if not 0 <= color < inst.c:
        raise ValueError("color out of range")
    m = frame_matrix(inst.colors[color])
    segs = [replace(s, p=apply_map(m, s.p), q=apply_map(m, s.q)) for s in inst.segments]
    colors = [Direction.of(*apply_map(m, d)) for d in inst.colors]
    return m, ColoredSegmentInstance(segs, colors, dict(inst.meta))


# ------------------------------------------------------------ validation


@dataclass
class Violation:
    kind: str
    ids: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    ties: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def summary(self) -> str:
        if self.ok:
            return "ok"
        counts = defaultdict(int)
        for v in self.violations:
            counts[v.kind] += 1
        return ", ".join(f"{k}: {c}" for k, c in sorted(counts.items()))


def _bbox_array(pairs):
    arr = np.array([[float(p[0]), float(p[1]), float(q[0]), float(q[1])] for p, q in pairs],
                   dtype=float).reshape(-1, 4)
    lo = np.minimum(arr[:, :2], arr[:, 2:])
    hi = np.maximum(arr[:, :2], arr[:, 2:])
    return lo, hi


def candidate_pairs(pairs, block: int = 512):
    """Index pairs (i < j) whose bounding boxes overlap (with a small float margin)."""
    n = len(pairs)
    if n < 2:
        return []
    lo, hi = _bbox_array(pairs)
    eps = 1e-9 * max(1.0, float(np.abs(np.concatenate([lo, hi])).max()))
    lo, hi = lo - eps, hi + eps
    out = []
    for start in range(0, n, block):
        stop = min(n, start + block)
        ov = ((lo[start:stop, None, 0] <= hi[None, :, 0]) & (lo[None, :, 0] <= hi[start:stop, None, 0])
              & (lo[start:stop, None, 1] <= hi[None, :, 1]) & (lo[None, :, 1] <= hi[start:stop, None, 1]))
        ii, jj = np.nonzero(ov)
        ii = ii + start
        keep = ii < jj
        out.extend(zip(ii[keep].tolist(), jj[keep].tolist()))
    return out


def validate_general_position(inst: ColoredSegmentInstance, shared_endpoint_groups=None) -> ValidationReport:
    """Report every general-position violation of the instance.

    ``shared_endpoint_groups`` optionally maps segment id -> group key; two
    segments of the same group may share an endpoint (polygon sides).
    """
    rep = ValidationReport()
    segs = inst.segments
    pairs = [(s.p, s.q) for s in segs]
    points = defaultdict(set)
    for i, j in candidate_pairs(pairs):
        a, b = segs[i], segs[j]
        hit = segment_intersection(a, b)
        if not hit:
            continue
        ids = (a.id, b.id)
        if hit.kind == "overlap":
            rep.violations.append(Violation("overlap", ids, f"{hit.p}-{hit.q}"))
            continue
        if a.color == b.color:
            rep.violations.append(Violation("same-color-intersection", ids, str(hit.p)))
        shared = hit.p in (a.p, a.q) and hit.p in (b.p, b.q)
        grouped = (shared and shared_endpoint_groups is not None
                   and shared_endpoint_groups.get(a.id) == shared_endpoint_groups.get(b.id))
        if not grouped and (hit.p in (a.p, a.q) or hit.p in (b.p, b.q)):
            rep.violations.append(Violation("endpoint-on-segment", ids, str(hit.p)))
        points[hit.p].update(ids)
    for p, ids in points.items():
        if len(ids) >= 3:
            if shared_endpoint_groups is not None and len({shared_endpoint_groups.get(i) for i in ids}) == 1:
                continue
            rep.violations.append(Violation("triple-point", tuple(sorted(ids)), str(p)))
    # sweep ties: distinct endpoints at equal height in some class frame
    for color, d in enumerate(inst.colors):
        m = frame_matrix(d)
        seen = defaultdict(set)
        for s in segs:
            for p in (s.p, s.q):
                mp = apply_map(m, p)
                seen[mp[1]].add(mp)
        ties = sum(len(v) - 1 for v in seen.values() if len(v) > 1)
        if ties:
            rep.ties.append((color, ties))
    rep.stats["n"] = len(segs)
    return rep


# ----------------------------------------------------- brute-force oracles


def _int64_ok(values, limit=2 ** 29) -> bool:
    return all(isinstance(v, int) and -limit < v < limit for v in values)


def _scaled_int_coords(pairs):
    """Integer coordinates for the pairs after clearing denominators, or None."""
    den = 1
    for p, q in pairs:
        for v in (p[0], p[1], q[0], q[1]):
            if not isinstance(v, int):
                den = den * mpq(v).denominator // gcd(den, int(mpq(v).denominator))
    coords = []
    for p, q in pairs:
        row = []
        for v in (p[0], p[1], q[0], q[1]):
            w = v * den
            w = int(w) if isinstance(w, int) else int(mpq(w).numerator)
            row.append(w)
        coords.append(row)
    flat = [v for row in coords for v in row]
    if not _int64_ok(flat):
        return None
    return np.array(coords, dtype=np.int64).reshape(-1, 4)


def _sign(a):
    return np.sign(a).astype(np.int8)


def _sweep_candidates(lox, hix, loy, hiy):
    """Index pairs whose bounding boxes overlap, via a sort on the x-extent."""
    order = np.argsort(lox, kind="stable")
    slo, shi = lox[order], hix[order]
    end = np.searchsorted(slo, shi, side="right")
    counts = end - np.arange(len(order)) - 1
    counts = np.maximum(counts, 0)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    first = np.repeat(np.arange(len(order)), counts)
    starts = np.cumsum(counts) - counts
    offs = np.arange(total) - np.repeat(starts, counts)
    second = first + 1 + offs
    I, J = order[first], order[second]
    keep = (loy[I] <= hiy[J]) & (loy[J] <= hiy[I])
    return I[keep], J[keep]


def intersecting_pairs(pairs, block: int = 1 << 20) -> set:
    """All index pairs (i < j) of closed segments that intersect, by brute force.

    Uses exact int64 arithmetic when coordinates are small enough and falls
    back to exact rational tests otherwise.
    """
    n = len(pairs)
    if n < 2:
        return set()
    arr = _scaled_int_coords(pairs)
    if arr is None:
        return {(i, j) for i, j in candidate_pairs(pairs) if segment_intersection(pairs[i], pairs[j])}
    px, py, qx, qy = arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]
    I, J = _sweep_candidates(np.minimum(px, qx), np.maximum(px, qx), np.minimum(py, qy), np.maximum(py, qy))
    out = set()
    for s in range(0, len(I), block):
        i, j = I[s:s + block], J[s:s + block]
        ax, ay, rx, ry = px[i], py[i], qx[i] - px[i], qy[i] - py[i]
        bx, by, sx, sy = px[j], py[j], qx[j] - px[j], qy[j] - py[j]
        o1 = _sign(rx * (by - ay) - ry * (bx - ax))
        o2 = _sign(rx * (by + sy - ay) - ry * (bx + sx - ax))
        o3 = _sign(sx * (ay - by) - sy * (ax - bx))
        o4 = _sign(sx * (ay + ry - by) - sy * (ax + rx - bx))
        hit = (o1 * o2 <= 0) & (o3 * o4 <= 0)
        a, b = i[hit], j[hit]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        out.update(zip(lo.tolist(), hi.tolist()))
    return out


def intersection_graph(inst: ColoredSegmentInstance) -> dict:
    """Adjacency (by segment id) of the closed-segment intersection graph."""
    segs = inst.segments
    adj = {s.id: set() for s in segs}
    for i, j in intersecting_pairs([(s.p, s.q) for s in segs]):
        adj[segs[i].id].add(segs[j].id)
        adj[segs[j].id].add(segs[i].id)
    return adj


def linf_point_segment(p, a, b):
    """Exact l-infinity distance from point p to the closed segment ab."""
    # piecewise-linear convex function of t; minimum at a breakpoint
    dx, dy = b[0] - a[0], b[1] - a[1]
    cands = {mpq(0), mpq(1)}
    ux, uy = p[0] - a[0], p[1] - a[1]
    if dx != 0:
        cands.add(mpq(ux) / dx)
    if dy != 0:
        cands.add(mpq(uy) / dy)
    # where |ux - t dx| == |uy - t dy|
    for sgn in (1, -1):
        den = dx - sgn * dy
        if den != 0:
            cands.add(mpq(ux - sgn * uy) / den)
    best = None
    for t in cands:
        if 0 <= t <= 1:
            v = max(abs(ux - t * dx), abs(uy - t * dy))
            if best is None or v < best:
                best = v
    return canon(best)


def linf_segment_distance(a, b):
    """Exact l-infinity distance between two closed segments (0 if they meet)."""
    if segment_intersection(a, b):
        return 0
    p1, p2 = _ends(a)
    p3, p4 = _ends(b)
    return min(linf_point_segment(p1, p3, p4), linf_point_segment(p2, p3, p4),
               linf_point_segment(p3, p1, p2), linf_point_segment(p4, p1, p2))


def angle_key(dx, dy):
    """Exact sort key for the counter-clockwise angle of (dx, dy) in [0, 2pi)."""
    if dy == 0 and dx > 0:
        return (0, 0)
    if dy > 0 or (dy == 0 and dx < 0):
        # upper half: angle increases as dx/dy decreases
        return (1, -mpq(dx) / dy) if dy != 0 else (2, 0)
    return (3, -mpq(dx) / dy)


def relative_angle_key(ref, vec):
    """Angle key of vec measured counter-clockwise from ref."""
    rx, ry = ref
    vx, vy = vec
    return angle_key(vx * rx + vy * ry, vy * rx - vx * ry)
