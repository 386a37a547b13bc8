import itertools

from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from starsep.contact_graph import EmbeddedPlanarGraph, build_contact_graph, euler_check, face_count
from starsep.fragmenter import compute_active_fragments
from starsep.generators import random_cdir
from starsep.planar_separator import SeparatorResult, check_separator, planar_separator, size_bound, \
    triangulate_embedded


def cycle(n, w=None):
    rot = [[(v + 1) % n, (v - 1) % n] for v in range(n)]
    return EmbeddedPlanarGraph(n, rot, w or [mpq(1, n)] * n)


def path(n, w=None):
    rot = [[u for u in (v + 1, v - 1) if 0 <= u < n] for v in range(n)]
    return EmbeddedPlanarGraph(n, rot, w or [mpq(1, n)] * n)


def grid_graph(a, b):
    idx = lambda i, j: i * b + j
    rot = []
    for i in range(a):
        for j in range(b):
            # counter-clockwise: right, up, left, down
            nb = [(i, j + 1), (i + 1, j), (i, j - 1), (i - 1, j)]
            rot.append([idx(x, y) for x, y in nb if 0 <= x < a and 0 <= y < b])
    n = a * b
    return EmbeddedPlanarGraph(n, rot, [mpq(1, n)] * n)


def test_triangulate_small():
    tri = EmbeddedPlanarGraph(3, [[1, 2], [2, 0], [0, 1]])
    g, added = triangulate_embedded(tri)
    assert not added
    # both faces of a 4-cycle are quadrilaterals; with no parallel edges
    # allowed, each gets its own chord and the result is K_4
    g, added = triangulate_embedded(cycle(4))
    assert len(added) == 2 and euler_check(g) and g.num_edges() == 6
    g, added = triangulate_embedded(path(3))
    assert len(added) == 1 and g.num_edges() == 3


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 150), st.integers(2, 3), st.integers(0, 10 ** 6))
def test_triangulation_all_faces_triangles(n, c, seed):
    g = build_contact_graph(compute_active_fragments(random_cdir(n, c, seed)))
    big = max(g.components(), key=len)
    if len(big) < 3:
        return
    sub = EmbeddedPlanarGraph(len(big), [[big.index(v) for v in g.rot[u]] for u in big])
    t, _ = triangulate_embedded(sub)
    assert t.is_simple() and euler_check(t)
    assert 2 * t.num_edges() == 3 * face_count(t)


def test_single_node_weight_one():
    g = EmbeddedPlanarGraph(1, [[]], [mpq(1)])
    res = planar_separator(g)
    assert res.S == {0} and not res.A and not res.B


def test_path_three_half_weights():
    g = path(3, [mpq(1, 2), mpq(0), mpq(1, 2)])
    res = planar_separator(g)
    assert check_separator(g, res) == []


def brute_min_cycle_separator(n):
    g = cycle(n)
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            rest = [v for v in range(n) if v not in S]
            # arcs of the cycle minus S
            arcs, cur = [], []
            for v in range(n):
                if v in S:
                    if cur:
                        arcs.append(cur)
                    cur = []
                else:
                    cur.append(v)
            if cur:
                if arcs and 0 not in S and arcs[0][0] == 0:
                    arcs[0] = cur + arcs[0]
                else:
                    arcs.append(cur)
            for mask in range(1 << len(arcs)):
                A = {v for i, a in enumerate(arcs) if mask >> i & 1 for v in a}
                B = set(rest) - A
                if check_separator(g, SeparatorResult(set(S), A, B), size_check=False) == []:
                    return k
    return n


def test_nine_cycle():
    assert brute_min_cycle_separator(9) == 2
    g = cycle(9)
    res = planar_separator(g)
    assert check_separator(g, res) == []


def test_check_separator_catches_cross_edge():
    g = path(3)
    assert check_separator(g, SeparatorResult(set(), {0}, {1, 2}))


def test_grids_and_paths():
    for g in (grid_graph(10, 10), grid_graph(3, 40), path(200), cycle(150)):
        res = planar_separator(g)
        assert check_separator(g, res) == []
        assert len(res.S) <= size_bound(g.n)


@settings(max_examples=30, deadline=None)
@given(st.integers(10, 300), st.integers(2, 4), st.integers(0, 10 ** 6))
def test_pipeline_contact_graphs(n, c, seed):
    g = build_contact_graph(compute_active_fragments(random_cdir(n, c, seed)))
    res = planar_separator(g)
    assert check_separator(g, res) == []


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=60))
def test_random_weights_on_paths(ws):
    total = sum(ws) or 1
    w = [mpq(x, total) for x in ws]
    g = path(len(ws), w)
    assert check_separator(g, planar_separator(g)) == []
