"""Almost-exact hop-distance oracle from recursive star-based separators.

Each level stores, for every star C of its separator and every node v of the
level's subgraph, the hop distance from v to the nearest node of C.  A query
takes the minimum of d(s, C) + d(t, C) over the stars met while descending;
the result r satisfies d(s, t) - 2 <= r <= d(s, t).
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .geom import relaxed_gc
from .stars import Star, StarSeparator, validate_star_separator
from .strings import AbstractGraph, string_star_separator

INF = (1 << 62) - 1
LEAF_SIZE = 8


class OracleError(RuntimeError):
    pass


@dataclass
class Leaf:
    nodes: list
    table: list  # table[i][j] = hop distance inside the leaf subgraph

    def entries(self):
        return len(self.nodes) ** 2


@dataclass
class Level:
    nodes: list
    stars: list  # Star objects in original ids
    side: dict  # node -> "A" | "B" | star index
    index: dict  # node -> position in tables
    tables: list  # tables[k][index[v]] = d(v, star k)
    children: dict = field(default_factory=dict)  # "A"/"B" -> Level | Leaf

    def entries(self):
        return len(self.stars) * len(self.nodes)


@dataclass
class DistanceOracle:
    n: int
    root: object

    def walk(self):
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            if isinstance(node, Level):
                for key in ("B", "A"):
                    if key in node.children:
                        stack.append((node.children[key], depth + 1))

    def table_entries(self) -> int:
        return sum(node.entries() for node, _ in self.walk())

    def depth(self) -> int:
        return max((d for _, d in self.walk()), default=0)

    def to_json(self):
        levels, leaves = [], []

        def enc(x):
            return "inf" if x >= INF else x

        def emit(node):
            if isinstance(node, Leaf):
                leaves.append({"id": len(leaves), "nodes": node.nodes,
                               "table": [[enc(x) for x in row] for row in node.table]})
                return ["leaf", len(leaves) - 1]
            k = len(levels)
            doc = {"id": k, "nodes": node.nodes,
                   "stars": [{"center": s.center, "leaves": sorted(s.leaves)} for s in node.stars],
                   "sides": {str(v): node.side[v] for v in node.nodes},
                   "tables": [[enc(x) for x in t] for t in node.tables], "children": {}}
            levels.append(doc)
            for key, child in sorted(node.children.items()):
                doc["children"][key] = emit(child)
            return ["level", k]
        root = emit(self.root)
        return {"version": 1, "n": self.n, "root": root, "levels": levels, "leaf_tables": leaves}

    @classmethod
    def from_json(cls, doc):
        dec = lambda x: INF if x == "inf" else int(x)
        leaves = [Leaf(list(d["nodes"]), [[dec(x) for x in row] for row in d["table"]])
                  for d in doc["leaf_tables"]]
        levels = []
        for d in doc["levels"]:
            nodes = list(d["nodes"])
            stars = [Star(int(s["center"]), frozenset(s["leaves"])) for s in d["stars"]]
            side = {int(v): s for v, s in d["sides"].items()}
            levels.append(Level(nodes, stars, side, {v: i for i, v in enumerate(nodes)},
                                [[dec(x) for x in t] for t in d["tables"]]))
        pick = lambda ref: leaves[ref[1]] if ref[0] == "leaf" else levels[ref[1]]
        for d, lv in zip(doc["levels"], levels):
            lv.children = {k: pick(ref) for k, ref in d["children"].items()}
        return cls(int(doc["n"]), pick(doc["root"]))


# ------------------------------------------------------------ BFS


def multi_source_bfs(adj, sources, allowed):
    dist = {s: 0 for s in sources}
    q = deque(sources)
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v in allowed and v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def exact_distance(g: AbstractGraph, s: int, t: int) -> int:
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise KeyError(f"unknown node in ({s}, {t})")
    if s == t:
        return 0
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in g.adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                if v == t:
                    return dist[v]
                q.append(v)
    return INF


# ------------------------------------------------------------ build


def default_separator_fn(sub: AbstractGraph, ids) -> StarSeparator:
    return string_star_separator(sub)


@relaxed_gc()
def build_oracle(g: AbstractGraph, separator_fn=default_separator_fn, leaf_size=LEAF_SIZE) -> DistanceOracle:
    """``separator_fn(subgraph, ids)`` returns a star separator of the induced
    subgraph in local ids (``ids[local] = original``)."""
    def build(nodes):
        allowed = set(nodes)
        if len(nodes) <= leaf_size:
            table = []
            for s in nodes:
                d = multi_source_bfs(g.adj, [s], allowed)
                table.append([d.get(t, INF) for t in nodes])
            return Leaf(list(nodes), table)
        sub, back = g.induced(nodes)
        local = separator_fn(sub, back)
        rep = validate_star_separator(sub.adjacency(), local)
        if not rep.ok:
            raise OracleError(f"separator on {len(nodes)} nodes is invalid: {rep.problems[0]}")
        stars = [Star(back[s.center], frozenset(back[x] for x in s.leaves)) for s in local.stars]
        side = {back[v]: "A" for v in local.A}
        side.update({back[v]: "B" for v in local.B})
        tables = []
        index = {v: i for i, v in enumerate(back)}
        for k, st in enumerate(stars):
            for v in st.nodes():
                side[v] = k
            d = multi_source_bfs(g.adj, sorted(st.nodes()), allowed)
            tables.append([d.get(v, INF) for v in back])
        lv = Level(list(back), stars, side, index, tables)
        for key, part in (("A", local.A), ("B", local.B)):
            if part:
                lv.children[key] = build(sorted(back[v] for v in part))
        return lv
    return DistanceOracle(g.n, build(list(range(g.n))))


# ------------------------------------------------------------ query


def query_trace(o: DistanceOracle, s: int, t: int):
    """(reported distance, depth at which the descent stopped)."""
    if not (0 <= s < o.n and 0 <= t < o.n):
        raise KeyError(f"unknown node in ({s}, {t})")
    best = INF
    node, depth = o.root, 0
    while True:
        if isinstance(node, Leaf):
            i, j = node.nodes.index(s), node.nodes.index(t)
            return min(best, node.table[i][j]), depth
        i, j = node.index[s], node.index[t]
        for tab in node.tables:
            a, b = tab[i], tab[j]
            if a < INF and b < INF and a + b < best:
                best = a + b
        ss, st = node.side[s], node.side[t]
        if ss != st or not isinstance(ss, str):
            return best, depth
        if ss not in node.children:
            return best, depth
        node, depth = node.children[ss], depth + 1


def query(o: DistanceOracle, s: int, t: int) -> int:
    return query_trace(o, s, t)[0]


@dataclass
class ErrorStats:
    pairs: int
    histogram: dict
    max_error: int
    table_entries: int


def verify_oracle(o: DistanceOracle, g: AbstractGraph, sample_size=2000, seed=0) -> ErrorStats:
    """Check 0 <= exact - reported <= 2 on all pairs (n <= 300 or sample_size
    None) or on a seeded sample."""
    n = g.n
    if n <= 300 or sample_size is None:
        pairs = [(s, t) for s in range(n) for t in range(s, n)]
    else:
        rng = random.Random(f"verify:{n}:{seed}")
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(sample_size)]
    by_src = {}
    for s, t in pairs:
        by_src.setdefault(s, []).append(t)
    hist = {0: 0, 1: 0, 2: 0}
    worst = 0
    everyone = set(range(n))
    for s, ts in sorted(by_src.items()):
        d = multi_source_bfs(g.adj, [s], everyone)
        for t in ts:
            exact = d.get(t, INF)
            r, depth = query_trace(o, s, t)
            if exact >= INF or r >= INF:
                err = 0 if exact == r else -1
            else:
                err = exact - r
            if not 0 <= err <= 2:
                raise OracleError(f"pair ({s}, {t}) at depth {depth}: exact {exact}, reported {r}")
            hist[err] += 1
            worst = max(worst, err)
    return ErrorStats(len(pairs), hist, worst, o.table_entries())


# ------------------------------------------------- geometric separators


def segment_separator_fn(inst):
    """Separator function running the segment pipeline on the sub-instance;
    node i of the graph is inst.segments[i]."""
    from .geom import ColoredSegmentInstance, Segment
    from .stars import segment_star_separator

    def fn(sub, ids):
        segs = [inst.segments[i] for i in ids]
        local = ColoredSegmentInstance([Segment(k, s.p, s.q, s.color, None) for k, s in enumerate(segs)],
                                       inst.colors, {})
        return segment_star_separator(local).separator
    return fn


def polygon_separator_fn(pinst):
    from .polygons import Polygon, PolygonInstance, polygon_star_separator

    def fn(sub, ids):
        polys = [pinst.polygons[i] for i in ids]
        local = PolygonInstance([Polygon(k, p.outer, p.holes, None) for k, p in enumerate(polys)])
        return polygon_star_separator(local, adjacency=sub.adjacency()).separator
    return fn


def graph_of(adj_dict, ids=None) -> AbstractGraph:
    """AbstractGraph on positions 0..n-1 from an adjacency dict keyed by ids."""
    ids = sorted(adj_dict) if ids is None else list(ids)
    pos = {v: k for k, v in enumerate(ids)}
    return AbstractGraph(len(ids), [sorted(pos[w] for w in adj_dict[v]) for v in ids])
