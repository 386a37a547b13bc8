import itertools
import random
import sys

from hypothesis import given, settings
from hypothesis import strategies as st

from starsep.strings import (AbstractGraph, StrategyError, bfs_fm_separator, brute_force_min_separator,
                             check_node_separator, greedy_peel, random_string_graph, string_star_separator,
                             theta)
from starsep.stars import validate_star_separator


def star_graph(k):
    return AbstractGraph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def grid_graph(a, b):
    idx = lambda i, j: i * b + j
    edges = [(idx(i, j), idx(i, j + 1)) for i in range(a) for j in range(b - 1)]
    edges += [(idx(i, j), idx(i + 1, j)) for i in range(a - 1) for j in range(b)]
    return AbstractGraph.from_edges(a * b, edges)


def test_theta_values():
    assert theta(2) == 1.0
    assert 1 < theta(51) < 1.5 and 1 < theta(100) < 1.7


def test_peel_star():
    stars, residual = greedy_peel(star_graph(50))
    assert len(stars) == 1 and stars[0].center == 0 and not residual
    sep = string_star_separator(star_graph(50))
    assert sep.size == 1 and not sep.A and not sep.B


def test_peel_matching_idle():
    g = AbstractGraph.from_edges(100, [(2 * i, 2 * i + 1) for i in range(50)])
    stars, residual = greedy_peel(g)
    assert stars == [] and residual == set(range(100))


def test_peel_empty():
    assert greedy_peel(AbstractGraph(0, [])) == ([], set())


def test_grid_peels_to_degree_one():
    g = grid_graph(10, 10)
    stars, residual = greedy_peel(g)
    assert stars
    assert all(sum(1 for w in g.adj[v] if w in residual) < theta(100) for v in residual)
    sep = string_star_separator(g)
    assert validate_star_separator(g.adjacency(), sep).ok


def test_two_k20():
    edges = list(itertools.combinations(range(20), 2)) + list(itertools.combinations(range(20, 40), 2))
    g = AbstractGraph.from_edges(40, edges)
    assert validate_star_separator(g.adjacency(), string_star_separator(g)).ok


def test_brute_examples():
    path7 = AbstractGraph.from_edges(7, [(i, i + 1) for i in range(6)])
    assert len(brute_force_min_separator(path7).S) == 1
    k4 = AbstractGraph.from_edges(4, list(itertools.combinations(range(4), 2)))
    assert len(brute_force_min_separator(k4).S) == 2
    assert brute_force_min_separator(AbstractGraph.from_edges(6, [])).S == set()
    try:
        brute_force_min_separator(AbstractGraph.from_edges(15, []))
    except ValueError:
        pass
    else:
        raise AssertionError


def test_default_within_three_of_brute():
    for s in range(60):
        rng = random.Random(s)
        n = rng.randrange(4, 14)
        p = rng.choice([0.15, 0.3, 0.5])
        g = AbstractGraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])
        a, b = bfs_fm_separator(g), brute_force_min_separator(g)
        assert check_node_separator(g, a) == [] and check_node_separator(g, b) == []
        assert len(a.S) <= 3 * len(b.S)


def test_brute_strategy_and_external(tmp_path):
    g = random_string_graph(30, 1)
    assert validate_star_separator(g.adjacency(), string_star_separator(g, "brute")).ok
    script = tmp_path / "sep.py"
    script.write_text("#!" + sys.executable + "\n"
                      "import json, sys\n"
                      "d = json.load(sys.stdin)\n"
                      "print(json.dumps({'S': list(range(d['n'])), 'A': [], 'B': []}))\n")
    script.chmod(0o755)
    sep = string_star_separator(g, f"external:{script}")
    assert validate_star_separator(g.adjacency(), sep).ok
    bad = tmp_path / "bad.py"
    bad.write_text("#!" + sys.executable + "\n"
                   "import json, sys\n"
                   "d = json.load(sys.stdin)\n"
                   "print(json.dumps({'S': [], 'A': list(range(d['n'])), 'B': []}))\n")
    bad.chmod(0o755)
    g2 = AbstractGraph.from_edges(200, [(2 * i, 2 * i + 1) for i in range(100)])  # nothing peeled
    try:
        string_star_separator(g2, f"external:{bad}")
    except StrategyError:
        pass
    else:
        raise AssertionError


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 400), st.integers(0, 10 ** 6), st.sampled_from(["polylines", "gnp"]))
def test_string_separator_valid(n, seed, mode):
    g = random_string_graph(n, seed, mode)
    stars, residual = greedy_peel(g)
    th = theta(n)
    assert all(sum(1 for w in g.adj[v] if w in residual) < th for v in residual)
    covered = set()
    for s in stars:
        assert not (s.nodes() & covered)
        covered |= s.nodes()
    assert validate_star_separator(g.adjacency(), string_star_separator(g)).ok


def test_generator_deterministic():
    assert random_string_graph(200, 4).adj == random_string_graph(200, 4).adj
