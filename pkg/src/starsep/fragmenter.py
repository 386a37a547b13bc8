"""Step 1: cut segments into fragments and choose the active ones.

Colors are handled in order.  Color 0 contributes its segments whole.  For a
later color i the frame is rotated so that V_i is horizontal, and a single
top-down sweep over L_i (active fragments of earlier colors plus all
endpoints of V_{>=i}) builds the horizontal decomposition while reporting,
for every v in V_i, the fragments it crosses and the trapezoid each internal
piece lies in.  The first piece to reach a bounded trapezoid is activated;
later pieces in that trapezoid are inactive and point at it.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Optional

from gmpy2 import mpq

from .geom import ColoredSegmentInstance, Point, apply_map, canon, format_coord, frame_matrix

END, INTERNAL = "end", "internal"


class DegeneracyError(ValueError):
    """Input violates general position in a way the sweep cannot absorb."""


@dataclass(slots=True)
class Fragment:
    id: int
    segment_id: int
    color: int
    t0: object
    t1: object
    p0: Point
    p1: Point
    kind: str
    active: bool = True
    connects: Optional[tuple] = None
    equivalent: Optional[int] = None
    trapezoid: Optional[int] = None
    degenerate: bool = False
    contacts: list = field(default_factory=list)  # (other fragment id, contact point)

    def to_json(self):
        return {"id": self.id, "segment": self.segment_id, "color": self.color, "kind": self.kind,
                "active": self.active, "connects": list(self.connects) if self.connects else None,
                "equivalent": self.equivalent,
                "p0": [format_coord(self.p0.x), format_coord(self.p0.y)],
                "p1": [format_coord(self.p1.x), format_coord(self.p1.y)]}


@dataclass
class Trapezoid:
    left: Optional[int]
    right: Optional[int]
    top: object  # None = +infinity
    bottom: object = None  # None = -infinity
    empty: bool = False  # zero height, discarded

    @property
    def bounded(self) -> bool:
        return self.left is not None and self.right is not None


@dataclass
class HorizontalDecomposition:
    trapezoids: list

    def live(self):
        return [t for t in self.trapezoids if not t.empty]

    def __len__(self):
        return len(self.live())


@dataclass
class FragmentSet:
    fragments: list
    n: int
    c: int
    representative: dict = field(default_factory=dict)  # segment id -> fragment id
    weight: dict = field(default_factory=dict)  # fragment id -> rational (representatives only)
    layer_stats: list = field(default_factory=list)
    degenerate_pieces: int = 0

    def active(self):
        return [f for f in self.fragments if f.active]

    def inactive(self):
        return [f for f in self.fragments if not f.active]

    def by_color(self, color, active=True):
        return [f for f in self.fragments if f.color == color and f.active == active]

    def to_json(self):
        return {"version": 1, "n": self.n, "c": self.c,
                "fragments": [f.to_json() for f in self.fragments],
                "representative": {str(k): v for k, v in sorted(self.representative.items())},
                "weight": {str(k): format_coord(v) for k, v in sorted(self.weight.items())}}


# ------------------------------------------------------------------ sweep


class _Elem:
    """A non-horizontal fragment of L_i in the rotated frame."""
    __slots__ = ("fid", "tx", "ty", "bx", "by", "inv", "k", "kf", "invf", "order")

    def __init__(self, fid, a, b):
        if a.y < b.y:
            a, b = b, a
        if a.y == b.y:
            raise DegeneracyError(f"fragment {fid} is parallel to the sweep line")
        self.fid = fid
        self.tx, self.ty, self.bx, self.by = a.x, a.y, b.x, b.y
        self.inv = mpq(a.x - b.x) / (a.y - b.y)
        self.k = a.x - a.y * self.inv  # x at y = 0
        self.kf, self.invf = float(self.k), float(self.inv)
        self.order = (-self.inv, fid)  # left-to-right just below a shared vertex

    def x_at(self, y):
        return self.k + y * self.inv


def _side(e, x, y):
    """Sign of e.x_at(y) - x."""
    d = e.k + y * e.inv - x
    return (d > 0) - (d < 0)


def _locate(status, x, y, right=False, xf=None, yf=None):
    """bisect_left (or bisect_right) of x among status fragments at height y.

    A float search finds the neighborhood; exact steps then settle the
    boundary, so the result is exact whatever the rounding."""
    if xf is None:
        xf, yf = float(x), float(y)
    lo, hi = 0, len(status)
    while lo < hi:
        mid = (lo + hi) >> 1
        e = status[mid]
        v = e.kf + yf * e.invf
        if v < xf or (right and v == xf):
            lo = mid + 1
        else:
            hi = mid
    stop = 1 if right else 0  # move left past values >= x (left) or > x (right)
    while lo > 0 and _side(status[lo - 1], x, y) >= stop:
        lo -= 1
    while lo < len(status) and _side(status[lo], x, y) < stop:
        lo += 1
    return lo


class _Sweep:
    """Top-down construction of the horizontal decomposition of a set of
    pairwise non-crossing fragments and points (touching allowed)."""

    def __init__(self, elems, points):
        self.vertices = {}  # y -> x -> [starting elems, ending elems]
        for e in elems:
            self._vertex(e.tx, e.ty)[0].append(e)
            self._vertex(e.bx, e.by)[1].append(e)
        for p in points:
            self._vertex(p[0], p[1])
        self.status = []
        # trapezoid records as parallel lists: left, right, top, bottom, empty
        self.tl, self.tr, self.ttop, self.tbot, self.tempty = [None], [None], [None], [None], [False]
        self.gaps = [0]

    def _vertex(self, x, y):
        row = self.vertices.get(y)
        if row is None:
            row = self.vertices[y] = {}
        v = row.get(x)
        if v is None:
            v = row[x] = ([], [])
        return v

    def heights(self, extra=()):
        return sorted(set(self.vertices) | set(extra), reverse=True)


    def advance(self, y):
        """Process every vertex at height y; returns (sorted xs, ended elems by x)."""
        row = self.vertices.get(y)
        if not row:
            return [], {}
        xs = sorted(row)
        ended = {}
        status, gaps = self.status, self.gaps
        tl, tr, ttop, tbot, tempty = self.tl, self.tr, self.ttop, self.tbot, self.tempty
        yf = float(y)
        for x in xs:
            start, end = row[x]
            xf = float(x)
            lo = _locate(status, x, y, False, xf, yf)
            # only the few fragments through this vertex compare equal to x
            hi, top = lo, len(status)
            while hi < top and _side(status[hi], x, y) == 0:
                hi += 1
            if hi == lo and not start and not end:
                # bare endpoint: close the gap's trapezoid and reopen it below
                tid = gaps[lo]
                if ttop[tid] == y:
                    tempty[tid] = True
                tbot[tid] = y
                gaps[lo] = len(tl)
                tl.append(status[lo - 1].fid if lo > 0 else None)
                tr.append(status[lo].fid if lo < top else None)
                ttop.append(y)
                tbot.append(None)
                tempty.append(False)
                continue
            for k in range(lo, hi + 1):
                tid = gaps[k]
                if ttop[tid] == y:
                    tempty[tid] = True
                tbot[tid] = y
            if end:
                ended[x] = end
                gone = set(map(id, end))
                group = [e for e in status[lo:hi] if id(e) not in gone]
                if len(group) + len(end) != hi - lo:
                    raise DegeneracyError(f"fragment ends at ({x}, {y}) but is not in the sweep status")
            else:
                group = status[lo:hi]
            group = group + start
            group.sort(key=lambda e: e.order)
            status[lo:hi] = group
            base = len(tl)
            stop = lo + len(group) + 1
            for k in range(lo, stop):
                tl.append(status[k - 1].fid if k > 0 else None)
                tr.append(status[k].fid if k < len(status) else None)
            ttop.extend([y] * (stop - lo))
            tbot.extend([None] * (stop - lo))
            tempty.extend([False] * (stop - lo))
            gaps[lo:hi + 1] = range(base, base + stop - lo)
        return xs, ended

    def counts(self):
        """(number of trapezoids, number of bounded ones), zero-height ones excluded."""
        live = bounded = 0
        for a, b, e in zip(self.tl, self.tr, self.tempty):
            if not e:
                live += 1
                bounded += a is not None and b is not None
        return live, bounded

    def finish(self):
        return HorizontalDecomposition([Trapezoid(*t) for t in zip(self.tl, self.tr, self.ttop, self.tbot, self.tempty)])


def build_horizontal_decomposition(items) -> HorizontalDecomposition:
    """Horizontal decomposition of fragments and points given as (p, q) pairs
    (p == q for a point) in a frame where no fragment is horizontal."""
    elems, points = [], []
    for k, (p, q) in enumerate(items):
        p, q = Point(*p), Point(*q)
        if p == q:
            points.append(p)
        else:
            elems.append(_Elem(k, p, q))
    sw = _Sweep(elems, points)
    for y in sw.heights():
        sw.advance(y)
    return sw.finish()


# -------------------------------------------------------------- Step 1


def compute_active_fragments(inst: ColoredSegmentInstance, weights=None, check=True) -> FragmentSet:
    segs = inst.segments
    n, c = len(segs), inst.c
    frags: list = []
    for s in segs:
        if s.color == 0:
            frags.append(Fragment(len(frags), s.id, 0, mpq(0), mpq(1), s.p, s.q, END))
    fs = FragmentSet(frags, n, c)
    prev_active = len(frags)
    fs.layer_stats.append({"color": 0, "active": prev_active, "inactive": 0, "trapezoids": 0})
    for color in range(1, c):
        stats = _process_color(inst, color, fs)
        cur = sum(1 for f in frags if f.active)
        bound = 4 * prev_active + 8 * n + 1 + stats["degenerate"]
        if check and cur > bound:
            raise AssertionError(f"fragment recurrence violated at color {color}: {cur} > {bound}")
        stats["active_total"] = cur
        fs.layer_stats.append(stats)
        fs.degenerate_pieces += stats["degenerate"]
        prev_active = cur
    pick_representatives(fs, inst, weights)
    return fs


def _process_color(inst, color, fs):
    frags = fs.fragments
    m = frame_matrix(inst.colors[color])
    elems = [_Elem(f.id, apply_map(m, f.p0), apply_map(m, f.p1)) for f in frags if f.active]
    points, rows = [], {}
    for s in inst.segments:
        if s.color < color:
            continue
        a, b = apply_map(m, s.p), apply_map(m, s.q)
        points.append(a)
        points.append(b)
        if s.color == color:
            rows.setdefault(a.y, []).append((min(a.x, b.x), max(a.x, b.x), s, a.x, b.x))
    sweep = _Sweep(elems, points)
    n_l = len(elems) + len(points)
    claimed = {}
    degenerate = 0
    created = 0
    for y in sweep.heights():
        xs, ended = sweep.advance(y)
        row = rows.get(y)
        if not row:
            continue
        row.sort(key=lambda r: (r[0], r[2].id))
        status = sweep.status
        for xa, xb, s, xp, xq in row:
            lo = _locate(status, xa, y)
            hi = _locate(status, xb, y, right=True)
            hits, pos = {}, {}
            for k in range(lo, hi):
                e = status[k]
                x = e.x_at(y)
                if x in hits:
                    hits[x].append(e.fid)
                else:
                    hits[x] = [e.fid]
                    pos[x] = k
            for x in xs[bisect_left(xs, xa):bisect_right(xs, xb)]:
                for e in ended.get(x, ()):
                    hits.setdefault(x, []).append(e.fid)
            cuts = sorted(x for x in hits if xa < x < xb)
            bounds = [xa] + cuts + [xb]
            span = mpq(xq - xp)
            # parameter and original-frame point of every cut, computed once
            ts = [canon((x - xp) / span) for x in bounds]
            pts = [s.point_at(t) for t in ts]
            pieces = []
            for k in range(len(bounds) - 1):
                xl, xr = bounds[k], bounds[k + 1]
                if ts[k] < ts[k + 1]:
                    t0, t1, q0, q1 = ts[k], ts[k + 1], pts[k], pts[k + 1]
                else:
                    t0, t1, q0, q1 = ts[k + 1], ts[k], pts[k + 1], pts[k]
                kind = END if k == 0 or k == len(bounds) - 2 else INTERNAL
                f = Fragment(len(frags), s.id, color, t0, t1, q0, q1, kind)
                left, right = hits.get(xl, []), hits.get(xr, [])
                if kind == INTERNAL:
                    f.connects = (left[0], right[0])
                    dirty = len(left) > 1 or len(right) > 1
                    if not dirty:
                        j = bisect_left(xs, xl)
                        dirty = j < len(xs) and xs[j] <= xr
                    if dirty:
                        f.degenerate = True
                        degenerate += 1
                    else:
                        idx = pos.get(xl)
                        if idx is None:
                            idx = _locate(status, xl, y)
                        if idx >= len(status) or status[idx].fid != left[0]:
                            raise DegeneracyError(f"segment {s.id}: crossed fragment missing from status")
                        tid = sweep.gaps[idx + 1]
                        f.trapezoid = tid
                        if tid in claimed:
                            f.active = False
                            f.equivalent = claimed[tid]
                        else:
                            claimed[tid] = f.id
                frags.append(f)
                created += 1
                pieces.append((f, pts[k], pts[k + 1], left, right))
            for f, pl, pr, left, right in pieces:
                if not f.active:
                    continue
                for pt, others in ((pl, left), (pr, right)):
                    if not others:
                        continue
                    for g in others:
                        f.contacts.append((g, pt))
                        frags[g].contacts.append((f.id, pt))
    n_trap, n_bounded = sweep.counts()
    if n_trap > 3 * n_l + 1:
        raise AssertionError(f"color {color}: {n_trap} trapezoids exceed 3|L|+1 = {3 * n_l + 1}")
    active = sum(1 for f in frags[len(frags) - created:] if f.active)
    return {"color": color, "L": n_l, "trapezoids": n_trap, "bounded": n_bounded,
            "active": active, "inactive": created - active, "degenerate": degenerate}


def pick_representatives(fs: FragmentSet, inst: ColoredSegmentInstance, weights=None) -> FragmentSet:
    """Mark the End fragment at each segment's lowest (then leftmost) endpoint
    and give it the segment's normalized weight."""
    w = inst.weights() if weights is None else {k: mpq(v) for k, v in weights.items()}
    total = sum(w.values(), mpq(0))
    if total <= 0:
        raise ValueError("total weight must be positive")
    ends = {}
    for f in fs.fragments:
        if f.kind == END:
            if f.t0 == 0:
                ends[(f.segment_id, 0)] = f.id
            if f.t1 == 1:
                ends[(f.segment_id, 1)] = f.id
    fs.representative, fs.weight = {}, {}
    for s in inst.segments:
        low = 0 if (s.p.y, s.p.x) < (s.q.y, s.q.x) else 1
        fid = ends.get((s.id, low))
        if fid is None:
            raise AssertionError(f"segment {s.id} has no end fragment")
        fs.representative[s.id] = fid
        fs.weight[fid] = w[s.id] / total
    return fs
