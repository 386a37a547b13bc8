from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from starsep.contact_graph import build_contact_graph
from starsep.fragmenter import INTERNAL, compute_active_fragments
from starsep.generators import chain, grid, random_cdir, with_random_weights
from starsep.geom import ColoredSegmentInstance, Point, Segment, intersection_graph
from starsep.planar_separator import SeparatorResult
from starsep.stars import Star, StarSeparator, assign_parts, lift_to_stars, materialize_stars, \
    segment_star_separator, validate_star_separator


def cross2():
    return ColoredSegmentInstance([Segment(0, Point(0, 0), Point(4, 0), 0),
                                   Segment(1, Point(2, -1), Point(2, 1), 1)], [(1, 0), (0, 1)])


def setup(inst):
    fs = compute_active_fragments(inst)
    return fs, build_contact_graph(fs)


def test_lift_end_fragment():
    fs, g = setup(cross2())
    node = next(k for k, f in enumerate(g.payload) if fs.fragments[f].segment_id == 1)
    assert lift_to_stars(SeparatorResult({node}, set(), set()), fs, g) == [1]
    assert lift_to_stars(SeparatorResult(set(), set(), set()), fs, g) == []


def test_lift_internal_fragment_gives_three_centers():
    inst = ColoredSegmentInstance(
        [Segment(0, Point(0, -10), Point(0, 10), 0), Segment(1, Point(20, -10), Point(20, 10), 0),
         Segment(2, Point(-5, 5), Point(25, 5), 1), Segment(3, Point(-5, 0), Point(25, 0), 1),
         Segment(4, Point(-5, -5), Point(25, -5), 1)], [(0, 1), (1, 0)])
    fs, g = setup(inst)
    node = next(k for k, f in enumerate(g.payload) if fs.fragments[f].kind == INTERNAL)
    h = fs.fragments[g.payload[node]].segment_id
    assert lift_to_stars(SeparatorResult({node}, set(), set()), fs, g) == sorted({h, 0, 1})


def test_materialize_grid3():
    inst = grid(3)  # horizontals 0..2, verticals 3..5
    stars = materialize_stars([0], inst)
    assert stars == [Star(0, frozenset({3, 4, 5}))]
    stars = {s.center: s for s in materialize_stars([0, 3], inst)}
    assert stars[0].leaves == {4, 5} and stars[3].leaves == {1, 2}
    assert materialize_stars([], inst) == []


def test_assign_parts_grid3_single_star():
    inst = grid(3)
    fs, g = setup(inst)
    stars = materialize_stars([0], inst)
    nodes = set(range(g.n))
    A, B = assign_parts(SeparatorResult(set(), nodes, set()), fs, g, stars, inst)
    assert A == {1, 2} and B == set()


def test_chain_middle_star_two_sides():
    inst = chain(5)
    fs, g = setup(inst)
    stars = materialize_stars([2], inst)
    assert stars == [Star(2, frozenset({1, 3}))]
    seg = lambda k: fs.fragments[g.payload[k]].segment_id
    S = {k for k in range(g.n) if seg(k) == 2}
    A = {k for k in range(g.n) if seg(k) < 2}
    B = {k for k in range(g.n) if seg(k) > 2}
    A, B = assign_parts(SeparatorResult(S, A, B), fs, g, stars, inst)
    assert A == {0} and B == {4}
    sep = StarSeparator(stars, A, B)
    assert validate_star_separator(intersection_graph(inst), sep).ok


def test_validator_flags_cross_edge():
    adj = intersection_graph(cross2())
    rep = validate_star_separator(adj, StarSeparator([], {0}, {1}))
    assert not rep.ok and any("joins A and B" in p for p in rep.problems)


def test_validator_grid_single_star_passes():
    k = 4
    adj = intersection_graph(grid(k))
    sep = StarSeparator([Star(0, frozenset(range(k, 2 * k)))], set(range(1, k)), set())
    assert validate_star_separator(adj, sep).ok


def test_validator_catches_bad_stars():
    adj = intersection_graph(grid(3))
    sep = StarSeparator([Star(0, frozenset({1}))], set(range(2, 6)), set())
    probs = validate_star_separator(adj, sep).problems
    assert any("not adjacent" in p for p in probs)
    sep = StarSeparator([Star(0, frozenset({3})), Star(4, frozenset({3}))], {1, 2, 5}, set())
    assert any("two stars" in p for p in validate_star_separator(adj, sep).problems)


def test_pipeline_n500_seed1():
    inst = random_cdir(500, 2, 1)
    run = segment_star_separator(inst)
    assert validate_star_separator(intersection_graph(inst), run.separator).ok


def test_separator_json_round_trip():
    sep = segment_star_separator(random_cdir(200, 3, 2)).separator
    back = StarSeparator.from_json(sep.to_json())
    assert back.stars == sep.stars and back.A == sep.A and back.B == sep.B


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 250), st.integers(1, 4), st.integers(0, 10 ** 6))
def test_pipeline_always_valid(n, c, seed):
    inst = random_cdir(n, c, seed)
    run = segment_star_separator(inst)
    rep = validate_star_separator(intersection_graph(inst), run.separator)
    assert rep.ok, rep.problems


@settings(max_examples=10, deadline=None)
@given(st.integers(10, 200), st.integers(0, 10 ** 6))
def test_weighted_balance(n, seed):
    inst = with_random_weights(random_cdir(n, 2, seed), seed)
    w = {s.id: s.weight for s in inst.segments}
    assert sum(w.values()) == 1
    run = segment_star_separator(inst)
    assert validate_star_separator(intersection_graph(inst), run.separator, w).ok


def test_weighted_validation_uses_weights_not_counts():
    # path 0-1-2-3-4 with node 4 carrying most of the weight
    adj = {0: {1}, 1: {0, 2}, 2: {1, 3}, 3: {2, 4}, 4: {3}}
    w = {0: mpq(1, 10), 1: mpq(1, 10), 2: mpq(1, 10), 3: mpq(1, 10), 4: mpq(6, 10)}
    light = StarSeparator([Star(4, frozenset())], {0, 1, 2, 3}, set())
    assert validate_star_separator(adj, light, w).ok  # w(A) = 2/5
    assert not validate_star_separator(adj, light).ok  # |A| = 4 > floor(10/3)
    heavy = StarSeparator([Star(0, frozenset())], {1, 2, 3, 4}, set())
    assert not validate_star_separator(adj, heavy, w).ok  # w(A) = 9/10
