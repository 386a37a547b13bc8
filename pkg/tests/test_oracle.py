import json

from hypothesis import given, settings
from hypothesis import strategies as st

from starsep.generators import chain, grid, random_cdir
from starsep.geom import intersection_graph
from starsep.oracle import (INF, DistanceOracle, Level, OracleError, build_oracle, exact_distance, graph_of,
                            multi_source_bfs, query, query_trace, segment_separator_fn, verify_oracle)
from starsep.strings import AbstractGraph, random_string_graph


def seg_oracle(inst, **kw):
    g = graph_of(intersection_graph(inst))
    return g, build_oracle(g, segment_separator_fn(inst), **kw)


def test_exact_distance_examples():
    g = graph_of(intersection_graph(chain(5)))
    assert exact_distance(g, 0, 4) == 4
    assert exact_distance(g, 2, 2) == 0
    two = AbstractGraph.from_edges(4, [(0, 1), (2, 3)])
    assert exact_distance(two, 0, 3) == INF


def test_chain_tables_match_bfs():
    g, o = seg_oracle(chain(5), leaf_size=2)
    root = o.root
    assert isinstance(root, Level)
    for k, st in enumerate(root.stars):
        d = multi_source_bfs(g.adj, sorted(st.nodes()), set(root.nodes))
        assert root.tables[k] == [d.get(v, INF) for v in root.nodes]
    r = query(o, 0, 4)
    assert 2 <= r <= 4
    assert query(o, 3, 3) == 0


def test_edgeless():
    g = AbstractGraph.from_edges(20, [])
    o = build_oracle(g)
    st = verify_oracle(o, g)
    assert st.max_error == 0
    assert query(o, 0, 19) == INF


def test_biclique_grid():
    g, o = seg_oracle(grid(6))
    for node, _ in o.walk():
        if isinstance(node, Level):
            # K_{k,k} has diameter 2
            assert all(x in (0, 1, 2) for t in node.tables for x in t)
    # two horizontals: exact distance 2
    r = query(o, 0, 1)
    assert exact_distance(g, 0, 1) == 2 and r in (0, 1, 2)
    assert verify_oracle(o, g).max_error <= 2


def test_two_components():
    g = AbstractGraph.from_edges(30, [(i, i + 1) for i in range(14)] + [(i, i + 1) for i in range(15, 29)])
    o = build_oracle(g)
    assert query(o, 0, 29) == INF
    verify_oracle(o, g)


def test_unknown_node():
    g = AbstractGraph.from_edges(3, [(0, 1)])
    o = build_oracle(g)
    try:
        query(o, 0, 7)
    except KeyError:
        pass
    else:
        raise AssertionError


def test_json_round_trip_and_inf():
    g = random_string_graph(120, 3)
    o = build_oracle(g)
    doc = json.loads(json.dumps(o.to_json()))
    assert "inf" in json.dumps(doc) or all(exact_distance(g, 0, t) < INF for t in range(g.n))
    back = DistanceOracle.from_json(doc)
    assert all(query(back, s, t) == query(o, s, t) for s in range(0, g.n, 5) for t in range(g.n))


def test_random_cdir_400():
    g, o = seg_oracle(random_cdir(400, 2, 1))
    st = verify_oracle(o, g, sample_size=3000, seed=1)
    assert st.max_error <= 2
    assert st.table_entries <= 20 * g.n ** 1.5


def test_verify_reports_violation():
    g = graph_of(intersection_graph(chain(12)))
    o = build_oracle(g)
    # corrupt one table entry so some query underestimates by more than 2
    lv = o.root
    lv.tables[0] = [0] * len(lv.tables[0])
    try:
        verify_oracle(o, g)
    except OracleError as e:
        assert "depth" in str(e)
    else:
        raise AssertionError


def test_descent_running_min_never_increases():
    g, o = seg_oracle(random_cdir(200, 3, 4))
    for s, t in [(0, 50), (3, 199), (10, 11)]:
        best = INF
        node = o.root
        while isinstance(node, Level):
            i, j = node.index[s], node.index[t]
            cand = min([a + b for a, b in ((tb[i], tb[j]) for tb in node.tables) if a < INF and b < INF],
                       default=INF)
            assert min(best, cand) <= best
            best = min(best, cand)
            if node.side[s] != node.side[t] or not isinstance(node.side[s], str):
                break
            node = node.children.get(node.side[s])
        assert query(o, s, t) <= best


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 150), st.integers(0, 10 ** 6), st.sampled_from(["polylines", "gnp"]))
def test_error_window_property(n, seed, mode):
    g = random_string_graph(n, seed, mode)
    o = build_oracle(g)
    st = verify_oracle(o, g)
    assert 0 <= st.max_error <= 2
    import math
    assert o.depth() <= math.ceil(math.log(max(n, 2), 1.5)) + 1
