"""Seeded instance generators.  Every generator is a pure function of its
arguments: the same arguments give identical instances."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .geom import ColoredSegmentInstance, Direction, Point, Segment

DIRECTIONS = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2),
              (3, 1), (1, 3), (3, -1), (1, -3), (3, 2), (2, 3), (3, -2), (2, -3)]
MAX_COLORS = len(DIRECTIONS)
KINDS = ("random-cdir", "grid", "chain", "biclique", "nested-polygons", "random-strings")


@dataclass
class GeneratorSpec:
    kind: str
    n: int
    c: int = 2
    seed: int = 0
    box: int = 10 ** 6


def generate(spec: GeneratorSpec):
    if spec.n < 1:
        raise ValueError("n must be at least 1")
    if spec.kind == "random-cdir":
        return random_cdir(spec.n, spec.c, spec.seed, spec.box)
    if spec.kind == "grid":
        return grid(spec.n)
    if spec.kind == "chain":
        return chain(spec.n)
    if spec.kind == "biclique":
        return biclique(spec.n, spec.seed)
    if spec.kind == "nested-polygons":
        from .polygons import nested_polygons
        return nested_polygons(spec.n, spec.seed, spec.c)
    if spec.kind == "random-strings":
        from .strings import random_string_graph
        return random_string_graph(spec.n, spec.seed)
    raise ValueError(f"unsupported generator kind {spec.kind!r}")


class _Grid:
    """Uniform bucket grid over bounding boxes, for rejection sampling."""

    def __init__(self, cell):
        self.cell = cell
        self.buckets = {}

    def _cells(self, p, q):
        c = self.cell
        x0, x1 = sorted((p[0] // c, q[0] // c))
        y0, y1 = sorted((p[1] // c, q[1] // c))
        for i in range(x0, x1 + 1):
            for j in range(y0, y1 + 1):
                yield i, j

    def near(self, p, q):
        out = set()
        for key in self._cells(p, q):
            out.update(self.buckets.get(key, ()))
        return out

    def add(self, k, p, q):
        for key in self._cells(p, q):
            self.buckets.setdefault(key, []).append(k)


def random_cdir(n: int, c: int, seed: int, box: int = 10 ** 6, length_scale: float = 6.0,
                weights: bool = False) -> ColoredSegmentInstance:
    """n random segments in general position over c fixed directions.

    Lengths are about ``length_scale * box / sqrt(n)`` so the expected degree
    stays roughly constant as n grows.
    """
    if not 1 <= c <= MAX_COLORS:
        raise ValueError(f"c must be in 1..{MAX_COLORS}")
    rng = random.Random(f"random-cdir:{n}:{c}:{seed}")
    dirs = [Direction.of(*d) for d in DIRECTIONS[:c]]
    base = length_scale * box / math.sqrt(max(n, 1))
    grid = _Grid(max(1, int(base)))
    segs, boxes, crossings = [], [], set()
    attempts = 0
    while len(segs) < n:
        attempts += 1
        if attempts > 200 * n + 1000:
            raise RuntimeError("random-cdir: rejection sampling did not converge")
        color = len(segs) % c
        d = dirs[color]
        steps = max(1, int(base * rng.uniform(0.25, 1.0) / math.hypot(*d)))
        px, py = rng.randrange(box), rng.randrange(box)
        p, q = Point(px, py), Point(px + steps * d.dx, py + steps * d.dy)
        new_pts = _crossings_or_none(p, q, color, grid.near(p, q), segs, boxes, crossings)
        if new_pts is None:
            continue
        crossings.update(new_pts)
        grid.add(len(segs), p, q)
        boxes.append((min(p.x, q.x), max(p.x, q.x), min(p.y, q.y), max(p.y, q.y)))
        w = None
        segs.append(Segment(len(segs), p, q, color, w))
    inst = ColoredSegmentInstance(segs, dirs, {"kind": "random-cdir", "n": n, "c": c, "seed": seed})
    if weights:
        inst = with_random_weights(inst, seed)
    return inst


def _crossings_or_none(p, q, color, near, segs, boxes, crossings):
    """Exact crossing points of pq with nearby segments (as reduced integer
    triples), or None when pq would break general position."""
    out = []
    rx, ry = q.x - p.x, q.y - p.y
    x0, x1 = min(p.x, q.x), max(p.x, q.x)
    y0, y1 = min(p.y, q.y), max(p.y, q.y)
    for k in near:
        bx0, bx1, by0, by1 = boxes[k]
        if bx1 < x0 or bx0 > x1 or by1 < y0 or by0 > y1:
            continue
        t = segs[k]
        sx, sy = t.q.x - t.p.x, t.q.y - t.p.y
        wx, wy = t.p.x - p.x, t.p.y - p.y
        d = rx * sy - ry * sx
        if d == 0:
            if wx * ry - wy * rx != 0:
                continue
            # collinear: reject unless the projections are disjoint
            rr = rx * rx + ry * ry
            a = wx * rx + wy * ry
            b = (t.q.x - p.x) * rx + (t.q.y - p.y) * ry
            if max(a, b) >= 0 and min(a, b) <= rr:
                return None
            continue
        tn = wx * sy - wy * sx
        un = wx * ry - wy * rx
        if d < 0:
            d, tn, un = -d, -tn, -un
        if not (0 <= tn <= d and 0 <= un <= d):
            continue
        if t.color == color or tn in (0, d) or un in (0, d):
            return None
        X, Y = p.x * d + rx * tn, p.y * d + ry * tn
        g = math.gcd(math.gcd(X, Y), d)
        key = (X // g, Y // g, d // g)
        if key in crossings:
            return None
        out.append(key)
    if len(set(out)) != len(out):
        return None
    return out


def with_random_weights(inst: ColoredSegmentInstance, seed: int) -> ColoredSegmentInstance:
    """Same instance with random positive integer weights, normalized to sum 1."""
    from gmpy2 import mpq
    rng = random.Random(f"weights:{seed}")
    raw = [rng.randint(1, 1000) for _ in inst.segments]
    total = sum(raw)
    segs = [Segment(s.id, s.p, s.q, s.color, mpq(w, total)) for s, w in zip(inst.segments, raw)]
    return ColoredSegmentInstance(segs, inst.colors, dict(inst.meta))


def grid(k: int) -> ColoredSegmentInstance:
    """k spanning horizontals (ids 0..k-1) and k spanning verticals: K_{k,k}."""
    segs = [Segment(i, Point(0, 2 * i + 1), Point(2 * k, 2 * i + 1), 0) for i in range(k)]
    segs += [Segment(k + j, Point(2 * j + 1, 0), Point(2 * j + 1, 2 * k), 1) for j in range(k)]
    return ColoredSegmentInstance(segs, [(1, 0), (0, 1)], {"kind": "grid", "k": k})


def chain(m: int) -> ColoredSegmentInstance:
    """m alternating horizontal/vertical segments forming a path."""
    segs = []
    for i in range(m):
        a = 2 * i
        if i % 2 == 0:
            segs.append(Segment(i, Point(a - 3, a), Point(a + 3, a), 0))
        else:
            segs.append(Segment(i, Point(a, a - 3), Point(a, a + 3), 1))
    return ColoredSegmentInstance(segs, [(1, 0), (0, 1)], {"kind": "chain", "m": m})


def biclique(n: int, seed: int = 0) -> ColoredSegmentInstance:
    """K_{floor(n/2), ceil(n/2)} from horizontals and verticals with jittered ends."""
    rng = random.Random(f"biclique:{n}:{seed}")
    a, b = n // 2, n - n // 2
    segs = []
    for i in range(a):
        segs.append(Segment(len(segs), Point(-2 * rng.randint(1, 5), 2 * i + 1),
                            Point(2 * b + 2 * rng.randint(1, 5), 2 * i + 1), 0))
    for j in range(b):
        segs.append(Segment(len(segs), Point(2 * j + 1, -2 * rng.randint(1, 5)),
                            Point(2 * j + 1, 2 * a + 2 * rng.randint(1, 5)), 1))
    colors = [(1, 0), (0, 1)] if a and b else [(1, 0) if a else (0, 1)]
    if not a:
        segs = [Segment(s.id, s.p, s.q, 0) for s in segs]
    return ColoredSegmentInstance(segs, colors, {"kind": "biclique", "n": n, "seed": seed})


def overlapping_instance(n: int, seed: int, c: int = 2, box: int = 10 ** 4) -> ColoredSegmentInstance:
    """Random c-oriented segments with forced collinear overlaps and touching
    endpoints (input for the perturbation path)."""
    rng = random.Random(f"overlap:{n}:{c}:{seed}")
    dirs = [Direction.of(*d) for d in DIRECTIONS[:c]]
    segs = []
    base = max(2, int(3 * box / math.sqrt(max(n, 1))))
    while len(segs) < n:
        color = rng.randrange(c)
        d = dirs[color]
        if segs and rng.random() < 0.3:
            t = segs[rng.randrange(len(segs))]
            d = Direction.of(t.q.x - t.p.x, t.q.y - t.p.y)
            color = t.color
            k = rng.randint(0, max(1, (t.q.x - t.p.x) // d.dx if d.dx else (t.q.y - t.p.y) // d.dy))
            p = Point(t.p.x + k * d.dx, t.p.y + k * d.dy)
        else:
            p = Point(rng.randrange(box), rng.randrange(box))
        steps = max(1, int(base * rng.uniform(0.3, 1.0) / math.hypot(*d)))
        q = Point(p.x + steps * d.dx, p.y + steps * d.dy)
        segs.append(Segment(len(segs), p, q, color))
    return ColoredSegmentInstance(segs, dirs, {"kind": "overlap", "n": n, "seed": seed})
