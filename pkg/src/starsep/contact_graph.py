"""Step 2a: the contact graph H of the active fragments, with a rotation
system read off the geometry."""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .fragmenter import FragmentSet
from .geom import orient, relative_angle_key


@dataclass
class EmbeddedPlanarGraph:
    """Node-weighted graph with a rotation system (neighbors in
    counter-clockwise order around each node)."""
    n: int
    rot: list
    weight: list = None
    payload: list = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.weight is None:
            self.weight = [mpq(0)] * self.n
        if self.payload is None:
            self.payload = list(range(self.n))

    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.rot[u] if u < v]

    def num_edges(self):
        return sum(len(r) for r in self.rot) // 2

    def adjacency(self):
        return [set(r) for r in self.rot]

    def is_simple(self) -> bool:
        for u, r in enumerate(self.rot):
            if u in r or len(set(r)) != len(r):
                return False
            for v in r:
                if u not in self.rot[v]:
                    return False
        return True

    def components(self):
        comp = [-1] * self.n
        out = []
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            comp[s] = len(out)
            nodes, stack = [s], [s]
            while stack:
                u = stack.pop()
                for v in self.rot[u]:
                    if comp[v] < 0:
                        comp[v] = comp[s]
                        nodes.append(v)
                        stack.append(v)
            out.append(nodes)
        return out


def face_count(g: EmbeddedPlanarGraph, nodes=None) -> int:
    """Number of faces traced from the rotation system (over ``nodes`` if given)."""
    nodes = range(g.n) if nodes is None else nodes
    pos = {}
    for u in nodes:
        for k, v in enumerate(g.rot[u]):
            pos[(u, v)] = k
    seen = set()
    faces = 0
    for start in pos:
        if start in seen:
            continue
        faces += 1
        d = start
        while d not in seen:
            seen.add(d)
            u, v = d
            r = g.rot[v]
            d = (v, r[(pos[(v, u)] - 1) % len(r)])
    return faces


def euler_check(g: EmbeddedPlanarGraph) -> bool:
    """True iff every connected component satisfies V - E + F = 2."""
    if not g.is_simple():
        return False
    for comp in g.components():
        if len(comp) == 1:
            continue
        e = sum(len(g.rot[u]) for u in comp) // 2
        if len(comp) - e + face_count(g, comp) != 2:
            return False
    return True


def _contact_key(f, other, pt):
    """Position of a contact on the counter-clockwise boundary walk around the
    thickened fragment f: right side (t ascending), cap at p1, left side (t
    descending), cap at p0.  Cap angles start from the side just walked, so
    a tip leaving backwards along that side sorts first."""
    p0, p1 = f.p0, f.p1
    dx, dy = p1.x - p0.x, p1.y - p0.y
    if pt == other.p0:
        away = (other.p1.x - pt.x, other.p1.y - pt.y)
    elif pt == other.p1:
        away = (other.p0.x - pt.x, other.p0.y - pt.y)
    else:
        away = None
    if pt == p1:
        w = away if away is not None else (dx, dy)
        return (1, relative_angle_key((-dx, -dy), w), other.id)
    if pt == p0:
        w = away if away is not None else (-dx, -dy)
        return (3, relative_angle_key((dx, dy), w), other.id)
    if away is None:
        raise ValueError(f"fragments {f.id} and {other.id} cross properly")
    t = mpq(pt.x - p0.x) / dx if dx != 0 else mpq(pt.y - p0.y) / dy
    side = orient(p0, p1, (pt.x + away[0], pt.y + away[1]))
    if side < 0:
        return (0, t, relative_angle_key((dx, dy), away), other.id)
    return (2, -t, relative_angle_key((dx, dy), away), other.id)


def build_contact_graph(fs: FragmentSet) -> EmbeddedPlanarGraph:
    frags = fs.fragments
    active = [f for f in frags if f.active]
    index = {f.id: k for k, f in enumerate(active)}
    rot = []
    for f in active:
        keyed = {}
        for gid, pt in f.contacts:
            g = frags[gid]
            if not g.active or g.segment_id == f.segment_id:
                continue
            if gid in keyed:
                raise ValueError(f"fragments {f.id} and {gid} touch twice (degenerate input, try --perturb)")
            keyed[gid] = _contact_key(f, g, pt)
        rot.append([index[g] for g in sorted(keyed, key=keyed.get)])
    weight = [fs.weight.get(f.id, mpq(0)) for f in active]
    g = EmbeddedPlanarGraph(len(active), rot, weight, [f.id for f in active])
    n, m = g.n, g.num_edges()
    if n >= 3 and m > 3 * n - 6:
        raise AssertionError(f"contact graph has {m} edges > 3N-6")
    return g
