"""Star-based separators for abstract string graphs: greedy star peeling
followed by a node separator on the low-degree residual graph."""
from __future__ import annotations

import heapq
import itertools
import json
import math
import random
import subprocess
from collections import deque
from dataclasses import dataclass

from .geom import Point, intersecting_pairs, relaxed_gc
from .planar_separator import SeparatorResult, pack
from .stars import Star, StarSeparator, validate_star_separator


class StrategyError(RuntimeError):
    pass


@dataclass
class AbstractGraph:
    n: int
    adj: list
    weights: list = None

    @classmethod
    def from_edges(cls, n, edges, weights=None):
        nb = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                continue
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            nb[u].add(v)
            nb[v].add(u)
        return cls(n, [sorted(s) for s in nb], weights)

    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def adjacency(self) -> dict:
        return {u: set(self.adj[u]) for u in range(self.n)}

    def induced(self, nodes):
        """(subgraph, list mapping local id -> original id)."""
        nodes = sorted(nodes)
        loc = {v: k for k, v in enumerate(nodes)}
        adj = [[loc[w] for w in self.adj[v] if w in loc] for v in nodes]
        return AbstractGraph(len(nodes), adj), nodes

    def to_json(self):
        return {"version": 1, "n": self.n, "edges": [list(e) for e in self.edges()]}


def theta(n: int) -> float:
    if n <= 2:
        return 1.0
    return n ** (1 / 3) / math.log2(n) ** (2 / 3)


def components(g: AbstractGraph, alive=None):
    alive = set(range(g.n)) if alive is None else set(alive)
    seen = set()
    out = []
    for s in sorted(alive):
        if s in seen:
            continue
        seen.add(s)
        comp, q = [s], [s]
        while q:
            u = q.pop()
            for v in g.adj[u]:
                if v in alive and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    q.append(v)
        out.append(comp)
    return out


# ------------------------------------------------------------ stage 1


def greedy_peel(g: AbstractGraph):
    """Remove star(v) for a maximum-degree v (smallest id on ties) while
    deg(v) >= theta(n), n fixed to the input size.  Returns (stars, residual node set)."""
    th = theta(g.n)
    alive = [True] * g.n
    deg = [len(a) for a in g.adj]
    heap = [(-deg[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    stars = []
    while heap:
        d, v = heapq.heappop(heap)
        if not alive[v] or -d != deg[v]:
            continue
        if deg[v] < th:
            break
        leaves = [w for w in g.adj[v] if alive[w]]
        removed = [v] + leaves
        for x in removed:
            alive[x] = False
        for x in removed:
            for y in g.adj[x]:
                if alive[y]:
                    deg[y] -= 1
                    heapq.heappush(heap, (-deg[y], y))
        stars.append(Star(v, frozenset(leaves)))
    return stars, {v for v in range(g.n) if alive[v]}


# ------------------------------------------------------------ stage 2


def _cap(m):
    return (2 * m) // 3


def _pack_components(g, removed):
    alive = set(range(g.n)) - set(removed)
    pieces = [(len(c), c) for c in components(g, alive)]
    return pack(pieces)


def _bfs_levels(g, comp_set, src):
    dist = {src: 0}
    order = [src]
    q = deque([src])
    while q:
        u = q.popleft()
        for v in g.adj[u]:
            if v in comp_set and v not in dist:
                dist[v] = dist[u] + 1
                order.append(v)
                q.append(v)
    return dist, order


def _refine(g, S, A, B, cap):
    """Move separator nodes into a part when none of their neighbors lies in
    the other part (gain 1), as long as the part stays within cap."""
    improved = True
    while improved:
        improved = False
        for s in sorted(S):
            nb = g.adj[s]
            if not any(v in B for v in nb) and len(A) < cap:
                S.discard(s)
                A.add(s)
                improved = True
            elif not any(v in A for v in nb) and len(B) < cap:
                S.discard(s)
                B.add(s)
                improved = True
    return S, A, B


def bfs_fm_separator(g: AbstractGraph, starts=6, seed=0) -> SeparatorResult:
    """BFS-level cut of the heavy component, best over a few start nodes,
    then greedy local refinement."""
    m = g.n
    cap = _cap(m)
    comps = components(g)
    heavy = max(comps, key=len) if comps else []
    if len(heavy) <= cap:
        A, B = _pack_components(g, ())
        return SeparatorResult(set(), A, B)
    comp_set = set(heavy)
    rng = random.Random(seed)
    # pseudo-peripheral start by double sweep, plus a few random nodes
    _, order = _bfs_levels(g, comp_set, min(heavy))
    cands = [order[-1]]
    _, order2 = _bfs_levels(g, comp_set, order[-1])
    cands.append(order2[-1])
    cands += rng.sample(heavy, min(len(heavy), max(0, starts - 2)))
    best = None
    for src in dict.fromkeys(cands):
        dist, order = _bfs_levels(g, comp_set, src)
        h = max(dist.values())
        size = [0] * (h + 1)
        for v in order:
            size[dist[v]] += 1
        pre = list(itertools.accumulate(size))
        for lv in range(h + 1):
            before = pre[lv] - size[lv]
            after = len(heavy) - pre[lv]
            if before <= cap and after <= cap:
                key = (size[lv], abs(before - after))
                if best is None or key < best[0]:
                    best = (key, {v for v in heavy if dist[v] == lv})
    S = best[1]
    A, B = _pack_components(g, S)
    S, A, B = _refine(g, set(S), A, B, cap)
    return SeparatorResult(S, A, B)


def _balanced_split(sizes, cap):
    """Subset of indices with total <= cap whose complement is also <= cap, or None."""
    total = sum(sizes)
    reach = {0: ()}
    for i, s in enumerate(sizes):
        nxt = dict(reach)
        for t, idx in reach.items():
            if t + s <= cap and t + s not in nxt:
                nxt[t + s] = idx + (i,)
        reach = nxt
    for t, idx in sorted(reach.items()):
        if total - t <= cap:
            return idx
    return None


def brute_force_min_separator(g: AbstractGraph) -> SeparatorResult:
    """Minimum-size balanced node separator by exhaustive search (n <= 14)."""
    if g.n > 14:
        raise ValueError(f"brute force needs n <= 14, got {g.n}")
    cap = _cap(g.n)
    nodes = range(g.n)
    for k in range(g.n + 1):
        for S in itertools.combinations(nodes, k):
            comps = components(g, set(nodes) - set(S))
            idx = _balanced_split([len(c) for c in comps], cap)
            if idx is None:
                continue
            A = set()
            for i in idx:
                A.update(comps[i])
            B = set(nodes) - set(S) - A
            return SeparatorResult(set(S), A, B)
    raise AssertionError("unreachable: S = V is always valid")


def external_separator(path):
    def run(g: AbstractGraph) -> SeparatorResult:
        proc = subprocess.run([path], input=json.dumps(g.to_json()), capture_output=True, text=True)
        if proc.returncode != 0:
            raise StrategyError(f"external strategy {path} exited with {proc.returncode}: {proc.stderr.strip()}")
        try:
            doc = json.loads(proc.stdout)
            return SeparatorResult({int(x) for x in doc["S"]}, {int(x) for x in doc["A"]}, {int(x) for x in doc["B"]})
        except (ValueError, KeyError, TypeError) as e:
            raise StrategyError(f"external strategy {path} produced unreadable output: {e}")
    return run


@dataclass
class NodeSeparatorStrategy:
    name: str
    procedure: object

    @classmethod
    def parse(cls, spec: str):
        if spec == "bfs-fm":
            return cls(spec, bfs_fm_separator)
        if spec == "brute":
            return cls(spec, brute_force_min_separator)
        if spec.startswith("external:"):
            return cls(spec, external_separator(spec[len("external:"):]))
        raise ValueError(f"unknown stage-2 strategy {spec!r}")


def check_node_separator(g: AbstractGraph, res: SeparatorResult) -> list:
    problems = []
    S, A, B = set(res.S), set(res.A), set(res.B)
    if S & A or S & B or A & B or S | A | B != set(range(g.n)):
        problems.append("S, A, B do not partition the nodes")
    cap = _cap(g.n)
    if len(A) > cap or len(B) > cap:
        problems.append(f"unbalanced: |A|={len(A)}, |B|={len(B)}, cap {cap}")
    for a in A:
        if any(v in B for v in g.adj[a]):
            problems.append(f"edge from {a} joins A and B")
            break
    return problems


@relaxed_gc()
def string_star_separator(g: AbstractGraph, strategy="bfs-fm") -> StarSeparator:
    strat = strategy if isinstance(strategy, NodeSeparatorStrategy) else NodeSeparatorStrategy.parse(strategy)
    stars, residual = greedy_peel(g)
    sub, back = g.induced(residual)
    res = strat.procedure(sub)
    bad = check_node_separator(sub, res)
    if bad:
        raise StrategyError(f"strategy {strat.name}: {bad[0]}")
    S2 = {back[v] for v in res.S}
    stars = stars + [Star(v, frozenset()) for v in sorted(S2)]
    A = {back[v] for v in res.A}
    B = {back[v] for v in res.B}
    out = StarSeparator(stars, A, B, {"n": g.n, "stage1_stars": len(stars) - len(S2), "stage2_size": len(S2),
                                      "residual_n": sub.n, "theta": theta(g.n), "strategy": strat.name})
    rep = validate_star_separator(g.adjacency(), out)
    if not rep.ok:
        raise StrategyError(f"strategy {strat.name}: {rep.problems[0]}")
    return out


# ------------------------------------------------------------ generator


def random_string_graph(n: int, seed: int, mode: str = "polylines", pieces: int = 3) -> AbstractGraph:
    """Intersection graph of random polylines (``pieces`` segments each) or,
    with mode="gnp", an Erdos-Renyi graph of expected degree 6."""
    rng = random.Random(f"random-strings:{mode}:{n}:{seed}")
    if mode == "gnp":
        p = min(1.0, 6.0 / max(1, n - 1))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        return AbstractGraph.from_edges(n, edges)
    if mode != "polylines":
        raise ValueError(f"unknown string mode {mode!r}")
    box = 10 ** 6
    step = int(1.2 * box / math.sqrt(max(n, 1)))
    segs, owner = [], []
    for i in range(n):
        x, y = rng.randrange(box), rng.randrange(box)
        for _ in range(pieces):
            nx = x + rng.randrange(-step, step + 1)
            ny = y + rng.randrange(-step, step + 1)
            if (nx, ny) == (x, y):
                nx += 1
            segs.append((Point(x, y), Point(nx, ny)))
            owner.append(i)
            x, y = nx, ny
    edges = {(owner[a], owner[b]) for a, b in intersecting_pairs(segs) if owner[a] != owner[b]}
    return AbstractGraph.from_edges(n, edges)
