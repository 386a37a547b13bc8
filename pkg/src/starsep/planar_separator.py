"""Weighted planar node separator (Lipton-Tarjan) on an embedded graph.

Given node weights summing to at most 1, returns S, A, B with no A-B edge,
weight(A), weight(B) <= 2/3 and |S| = O(sqrt(N)).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from gmpy2 import mpq

from .contact_graph import EmbeddedPlanarGraph

TWO_THIRDS = mpq(2, 3)


@dataclass
class SeparatorResult:
    S: set
    A: set
    B: set

    def to_json(self):
        return {"S": sorted(self.S), "A": sorted(self.A), "B": sorted(self.B)}


def size_bound(n: int) -> int:
    return 4 * math.isqrt(max(n - 1, 0)) + 4 + 10 if n > 0 else 10


def check_separator(g: EmbeddedPlanarGraph, res: SeparatorResult, size_check=True) -> list:
    """Independent validity check; returns a list of problems (empty if valid)."""
    problems = []
    S, A, B = res.S, res.A, res.B
    if S & A or S & B or A & B:
        problems.append("parts overlap")
    if S | A | B != set(range(g.n)):
        problems.append("parts do not cover all nodes")
    for u, v in g.edges():
        if (u in A and v in B) or (u in B and v in A):
            problems.append(f"edge {u}-{v} joins A and B")
            break
    wa = sum((g.weight[v] for v in A), mpq(0))
    wb = sum((g.weight[v] for v in B), mpq(0))
    if wa > TWO_THIRDS or wb > TWO_THIRDS:
        problems.append(f"unbalanced: weight(A)={wa}, weight(B)={wb}")
    if size_check and len(S) > size_bound(g.n):
        problems.append(f"|S|={len(S)} exceeds 4*ceil(sqrt(N))+10")
    return problems


# --------------------------------------------------------------- darts


class DartGraph:
    """Half-edge view of a rotation system.  Edge e owns darts 2e and 2e+1;
    ``rnext``/``rprev`` give the counter-clockwise neighbors of a dart around
    its tail."""

    def __init__(self, n, rot):
        self.n = n
        self.tail = []
        self.rnext = []
        self.rprev = []
        self.first = [-1] * n
        self.adj = [set() for _ in range(n)]
        index = {}
        for u in range(n):
            for v in rot[u]:
                if u < v:
                    d = len(self.tail)
                    self.tail += [u, v]
                    index[(u, v)], index[(v, u)] = d, d + 1
                    self.adj[u].add(v)
                    self.adj[v].add(u)
        self.rnext = [0] * len(self.tail)
        self.rprev = [0] * len(self.tail)
        for u in range(n):
            ds = [index[(u, v)] for v in rot[u]]
            if ds:
                self.first[u] = ds[0]
            for k, d in enumerate(ds):
                self.rnext[d] = ds[(k + 1) % len(ds)]
                self.rprev[d] = ds[k - 1]
        self.synthetic = len(self.tail)  # darts from here on are triangulation edges

    def head(self, d):
        return self.tail[d ^ 1]

    def face_next(self, d):
        return self.rprev[d ^ 1]

    def out_darts(self, u):
        d0 = self.first[u]
        if d0 < 0:
            return []
        out, d = [d0], self.rnext[d0]
        while d != d0:
            out.append(d)
            d = self.rnext[d]
        return out

    def rotation(self):
        return [[self.head(d) for d in self.out_darts(u)] for u in range(self.n)]

    def add_chord(self, di, dj):
        """Split the face containing darts di and dj by an edge tail(di)-tail(dj)."""
        a, b = self.tail[di], self.tail[dj]
        n = len(self.tail)
        self.tail += [a, b]
        self.rnext += [0, 0]
        self.rprev += [0, 0]
        for d, after in ((n, di), (n + 1, dj)):
            nxt = self.rnext[after]
            self.rnext[d], self.rprev[d] = nxt, after
            self.rprev[nxt] = d
            self.rnext[after] = d
        self.adj[a].add(b)
        self.adj[b].add(a)
        return n

    def faces(self):
        """Face id per dart, and the number of faces."""
        face = [-1] * len(self.tail)
        nf = 0
        for s in range(len(self.tail)):
            if face[s] >= 0:
                continue
            d = s
            while face[d] < 0:
                face[d] = nf
                d = self.face_next(d)
            nf += 1
        return face, nf


def triangulate_darts(dg: DartGraph) -> int:
    """Add chords until every face is a triangle.  Returns the number of
    chords added.  Chords never duplicate an existing edge unless a face
    offers no other choice (then a parallel chord is used as a last resort)."""
    added = 0
    seen = [False] * len(dg.tail)
    for s in range(len(dg.tail)):
        if seen[s]:
            continue
        walk = []
        d = s
        while not seen[d]:
            seen[d] = True
            walk.append(d)
            d = dg.face_next(d)
        if len(walk) <= 3:
            continue
        added += _triangulate_face(dg, walk)
    return added


def _ear_ok(dg, da, db):
    a, c = dg.tail[da], dg.head(db)
    return a != c and c not in dg.adj[a]


def _clip(dg, da, db):
    """Chord cutting the triangle (da, db) off its face; returns the chord dart
    that stays on the remaining face."""
    return dg.add_chord(da, dg.face_next(db))


def _triangulate_face(dg, walk) -> int:
    added = 0
    stack = []
    for d in walk:
        stack.append(d)
        while len(stack) >= 2 and _ear_ok(dg, stack[-2], stack[-1]):
            db = stack.pop()
            da = stack.pop()
            stack.append(_clip(dg, da, db))
            added += 1
    ring = deque(_face_walk(dg, stack[-1]))
    stall = 0
    while len(ring) > 3:
        if stall > len(ring):
            # no ear between consecutive darts: split with any simple chord
            di, dj = _fallback_pair(dg, list(ring))
            nd = dg.add_chord(di, dj)
            added += 1
            for start in (nd, nd + 1):
                face = _face_walk(dg, start)
                if len(face) > 3:
                    added += _triangulate_face(dg, face)
            return added
        da, db = ring[0], ring[1]
        if _ear_ok(dg, da, db):
            ring.popleft()
            ring.popleft()
            ring.appendleft(_clip(dg, da, db))
            added += 1
            ring.rotate(1)
            stall = 0
        else:
            ring.rotate(-1)
            stall += 1
    return added


def _face_walk(dg, d0):
    out, d = [d0], dg.face_next(d0)
    while d != d0:
        out.append(d)
        d = dg.face_next(d)
    return out


def _fallback_pair(dg, walk):
    k = len(walk)
    for i in range(k):
        a = dg.tail[walk[i]]
        for j in range(i + 2, k if i > 0 else k - 1):
            b = dg.tail[walk[j]]
            if a != b and b not in dg.adj[a]:
                return walk[i], walk[j]
    # no simple chord exists; a parallel chord still makes progress and the
    # separator only needs triangular faces, not a simple graph
    for i in range(k):
        j = (i + 2) % k
        if dg.tail[walk[i]] != dg.tail[walk[j]]:
            return walk[i], walk[j]
    raise ValueError("cannot triangulate face")


def triangulate_embedded(g: EmbeddedPlanarGraph):
    """Triangulated copy of g plus the list of synthetic edges."""
    if len(g.components()) > 1:
        raise ValueError("triangulate_embedded needs a connected graph")
    dg = DartGraph(g.n, g.rot)
    base = len(dg.tail)
    if g.n >= 3:
        triangulate_darts(dg)
    added = [(dg.tail[d], dg.tail[d + 1]) for d in range(base, len(dg.tail), 2)]
    return EmbeddedPlanarGraph(g.n, dg.rotation(), list(g.weight), list(g.payload)), added


# ----------------------------------------------------------- separator


def pack(pieces):
    """Put pieces (weight, nodes) into two bins, heaviest first into the
    lighter bin.  Each piece <= 2/3 and total <= 1 keeps both bins <= 2/3."""
    A, B = set(), set()
    wa = wb = 0
    for w, nodes in sorted(pieces, key=lambda p: (-p[0], min(p[1]) if p[1] else -1)):
        if wa <= wb:
            A.update(nodes)
            wa += w
        else:
            B.update(nodes)
            wb += w
    return A, B


def integer_weights(weights):
    """Scale rational weights to integers with a common denominator D."""
    D = 1
    for x in weights:
        d = int(mpq(x).denominator)
        D = D * d // math.gcd(D, d)
    return [int(mpq(x) * D) for x in weights], D


def planar_separator(g: EmbeddedPlanarGraph) -> SeparatorResult:
    if any(x < 0 for x in g.weight):
        raise ValueError("negative node weight")
    # exact integer arithmetic from here on: a part is too heavy iff 3*w > 2*D
    w, D = integer_weights(g.weight)
    if sum(w) > D:
        raise ValueError("node weights sum to more than 1")
    comps = g.components()
    cw = [sum(w[v] for v in c) for c in comps]
    heavy = [k for k, x in enumerate(cw) if 3 * x > 2 * D]
    S = set()
    pieces = [(cw[k], set(c)) for k, c in enumerate(comps) if k not in heavy]
    for k in heavy:
        s, parts = _separate_component(g, w, D, comps[k], cw[k])
        S |= s
        pieces.extend(parts)
    A, B = pack(pieces)
    return SeparatorResult(S, A, B)


def _separate_component(g, w, D, comp, cweight):
    if len(comp) == 1:
        return set(comp), []
    root = min(comp)
    level = {root: 0}
    parent = {root: -1}
    order = [root]
    for u in order:
        for v in g.rot[u]:
            if v not in level:
                level[v] = level[u] + 1
                parent[v] = u
                order.append(v)
    h = level[order[-1]]
    levels = [[] for _ in range(h + 1)]
    for v in order:
        levels[level[v]].append(v)
    lw = [sum(w[v] for v in L) for L in levels]
    acc, l1 = 0, 0
    for l1 in range(h + 1):
        acc += lw[l1]
        if 2 * acc >= cweight:
            break
    N = len(comp)
    k = sum(len(levels[i]) for i in range(l1 + 1))
    size = lambda i: len(levels[i]) if 0 <= i <= h else 0
    # bounding levels: minimize |L(l)| + 2*distance, which meets the
    # 2*sqrt(k) and 2*sqrt(N-k) bounds of the classic argument
    l0 = min(range(-1, l1 + 1), key=lambda i: (size(i) + 2 * (l1 - i), -i))
    l2 = min(range(l1 + 1, h + 2), key=lambda i: (size(i) + 2 * (i - l1 - 1), i))
    S = set()
    if 0 <= l0:
        S.update(levels[l0])
    if l2 <= h:
        S.update(levels[l2])
    low = [v for i in range(0, max(l0, 0)) for v in levels[i]]
    high = [v for i in range(l2 + 1, h + 1) for v in levels[i]]
    band = [v for i in range(l0 + 1, min(l2, h + 1)) for v in levels[i]]
    pieces = []
    for part in (low, high):
        if part:
            pieces.append((sum(w[v] for v in part), set(part)))
    bw = sum(w[v] for v in band)
    if 3 * bw <= 2 * D:
        if band:
            pieces.append((bw, set(band)))
        return S, pieces
    if len(band) <= 2:
        S.update(band)
        return S, pieces
    cyc, sides = _cycle_split(g, w, levels, level, parent, l0, l2, band)
    S.update(cyc)
    for side in sides:
        if side:
            pieces.append((sum(w[v] for v in side), side))
    return S, pieces


def _contracted_band(g, levels, level, parent, l0, l2, band):
    """Band subgraph with levels <= l0 contracted into a super root (local id 0
    when l0 >= 0).  Returns (local rotation, local->global map, tree parent)."""
    loc = {}
    glob = [-1] if l0 >= 0 else []
    for v in band:
        loc[v] = len(glob)
        glob.append(v)
    rot = [None] * len(glob)
    keep = {}
    if l0 >= 0:
        rot[0] = []
        for v, u in _walk_around_tree(g, levels, level, parent, l0):
            if v not in keep:
                keep[v] = u
                rot[0].append(loc[v])
    for v in band:
        r = []
        for u in g.rot[v]:
            lu = level.get(u, -2)
            if l0 < lu < l2:
                r.append(loc[u])
            elif keep.get(v) == u:
                # the one surviving copy of the parallel edges into the root
                r.append(0)
        rot[loc[v]] = r
    tpar = [-1] * len(glob)
    for v in band:
        if level[v] == l0 + 1:
            tpar[loc[v]] = 0 if l0 >= 0 else -1
        else:
            tpar[loc[v]] = loc[parent[v]]
    return rot, glob, tpar


def _walk_around_tree(g, levels, level, parent, l0):
    """Edges (outside node, inside node) leaving the BFS subtree on levels
    <= l0, in the cyclic order met by walking around that subtree."""
    rot = g.rot
    root = levels[0][0]
    out = []
    stack = [[root, 0, 0, len(rot[root])]]
    while stack:
        fr = stack[-1]
        u, s, i, cnt = fr
        if i >= cnt:
            stack.pop()
            continue
        fr[2] += 1
        r = rot[u]
        v = r[(s + i) % len(r)]
        lv = level.get(v)
        if lv is None:
            continue
        if lv <= l0 and parent.get(v) == u:
            rv = rot[v]
            stack.append([v, rv.index(u) + 1, 0, len(rv) - 1])
        elif lv == l0 + 1 and level[u] == l0:
            out.append((v, u))
    return out


def _cycle_split(g, w, levels, level, parent, l0, l2, band):
    rot, glob, tpar = _contracted_band(g, levels, level, parent, l0, l2, band)
    n = len(glob)
    wt = [0 if v < 0 else w[v] for v in glob]
    dg = DartGraph(n, rot)
    triangulate_darts(dg)
    root = 0
    # tree darts: child -> parent
    up = [-1] * n
    for d in range(len(dg.tail)):
        u, v = dg.tail[d], dg.tail[d ^ 1]
        if tpar[u] == v and up[u] < 0:
            up[u] = d
    tree_edge = set()
    for u in range(n):
        if u != root:
            if up[u] < 0:
                raise AssertionError("BFS tree edge missing from band graph")
            tree_edge.add(up[u] >> 1)
    face, nf = dg.faces()
    # vertex weight goes to the face on the left of its parent dart
    vface = [0] * n
    for u in range(n):
        vface[u] = face[up[u]] if u != root else face[dg.first[u]]
    fw = [0] * nf
    for u in range(n):
        fw[vface[u]] += wt[u]
    # dual spanning tree over non-tree edges
    fadj = [[] for _ in range(nf)]
    nontree = []
    for e in range(len(dg.tail) // 2):
        if e in tree_edge:
            continue
        nontree.append(e)
        fa, fb = face[2 * e], face[2 * e + 1]
        fadj[fa].append((fb, e))
        fadj[fb].append((fa, e))
    fpar_edge = [-1] * nf
    tin, tout = [0] * nf, [0] * nf
    sub = list(fw)
    visited = [False] * nf
    visited[0] = True
    order = []
    stack = [0]
    clock = 0
    while stack:
        f = stack.pop()
        tin[f] = clock
        clock += 1
        order.append(f)
        for f2, e in fadj[f]:
            if not visited[f2]:
                visited[f2] = True
                fpar_edge[f2] = e
                stack.append(f2)
    # subtree intervals from preorder with explicit sizes
    size = [1] * nf
    fparent = [-1] * nf
    for f in order[1:]:
        e = fpar_edge[f]
        fa, fb = face[2 * e], face[2 * e + 1]
        fparent[f] = fa if fb == f else fb
    for f in reversed(order[1:]):
        size[fparent[f]] += size[f]
        sub[fparent[f]] += sub[f]
    # preorder from the stack-based DFS is a valid preorder, so [tin, tin+size)
    for f in range(nf):
        tout[f] = tin[f] + size[f]
    # tree depths, prefix weights, binary lifting
    depth = [0] * n
    pref = list(wt)
    bfs = [root]
    children = [[] for _ in range(n)]
    for u in range(n):
        if u != root:
            children[tpar[u]].append(u)
    for u in bfs:
        for v in children[u]:
            depth[v] = depth[u] + 1
            pref[v] = pref[u] + wt[v]
            bfs.append(v)
    LOG = max(1, (max(depth) + 1).bit_length())
    anc = [[(tpar[u] if tpar[u] >= 0 else root) for u in range(n)]]
    for j in range(1, LOG):
        prev = anc[-1]
        anc.append([prev[prev[u]] for u in range(n)])

    def lca(a, b):
        if depth[a] < depth[b]:
            a, b = b, a
        diff = depth[a] - depth[b]
        j = 0
        while diff:
            if diff & 1:
                a = anc[j][a]
            diff >>= 1
            j += 1
        if a == b:
            return a
        for j in range(LOG - 1, -1, -1):
            if anc[j][a] != anc[j][b]:
                a, b = anc[j][a], anc[j][b]
        return tpar[a]

    W = sum(wt)
    best = None
    best_w = None
    tail = dg.tail
    for e in nontree:  # increasing e, so strict < keeps the smallest e on ties
        u, v = tail[2 * e], tail[2 * e + 1]
        c = lca(u, v)
        fa, fb = face[2 * e], face[2 * e + 1]
        child = fa if fparent[fa] >= 0 and fpar_edge[fa] == e else fb
        wu = pref[u] - pref[c]
        wv = pref[v] - pref[c]
        lca_in = tin[child] <= tin[vface[c]] < tout[child]
        # side L lies left of dart v->u (dart 2e+1), side R left of u->v (dart 2e)
        if child == fb:
            wl = sub[child] - wu - (wt[c] if lca_in else 0)
            wr = W - sub[child] - wv - (0 if lca_in else wt[c])
        else:
            wr = sub[child] - wv - (wt[c] if lca_in else 0)
            wl = W - sub[child] - wu - (0 if lca_in else wt[c])
        m = wl if wl > wr else wr
        if best_w is None or m < best_w:
            best_w = m
            best = (e, u, v, c, child)
    (e, u, v, c, child) = best
    cycle = set()
    for x in (u, v):
        while x != c:
            cycle.add(x)
            x = tpar[x]
    cycle.add(c)
    side_in, side_out = set(), set()
    for x in range(n):
        if x in cycle or glob[x] < 0:
            continue
        f = vface[x]
        (side_in if tin[child] <= tin[f] < tout[child] else side_out).add(glob[x])
    return {glob[x] for x in cycle if glob[x] >= 0}, [side_in, side_out]
