import json
import random
from collections import Counter

import pytest

from hforest.graph import (
    Arc,
    Digraph,
    InvalidSize,
    NotAHypercube,
    ParseError,
    add_diagonals,
    base_graph,
    cartesian_product,
    complete_bipartite_strong,
    complete_graph,
    diagonals_via_strong_product,
    edgeless,
    graph_from_json,
    graph_to_json,
    hypercube,
    hypercube_with_diagonals,
    random_digraph,
    single_vertex,
    strong_product_k2,
)
from hforest.poly import Var


def test_complete_graph_weights():
    k2 = complete_graph(2, 1)
    assert k2.n_vertices == 2
    assert {(a.tail, a.head, a.weight) for a in k2.arcs} == {(0, 1, Var("x", (1, 1))), (1, 0, Var("x", (1, 0)))}
    assert complete_graph(1, 1).n_arcs == 0
    k3 = complete_graph(3, 1)
    assert k3.n_arcs == 6
    assert all(a.weight == Var("x", (1, a.head)) for a in k3.arcs)


def test_hypercube_sizes():
    assert hypercube(0).n_vertices == 1
    for n in range(1, 5):
        g = hypercube(n)
        assert (g.n_vertices, g.n_arcs) == (2**n, n * 2**n)


def test_hypercube_arc_tags():
    g = hypercube(3)
    for a in g.arcs:
        flipped = a.tail ^ a.head
        # coordinate 1 is the most significant bit
        assert flipped == 1 << (3 - a.direction)
        assert a.spin == int(g.labels[a.head][a.direction - 1])
        assert a.weight == Var("x", (a.direction, a.spin))


def test_hypercube_one_is_k2():
    sig = lambda g: sorted((a.tail, a.head, a.weight) for a in g.arcs)
    assert sig(hypercube(1)) == sig(complete_graph(2, 1))


def test_diagonal_counts():
    assert hypercube_with_diagonals(1).n_arcs == 4
    assert hypercube_with_diagonals(2).n_arcs == 12
    assert hypercube_with_diagonals(3).n_arcs == 32
    for a in hypercube_with_diagonals(3).arcs:
        if a.diagonal:
            assert a.tail ^ a.head == 7 and a.direction == 0 and a.weight == Var("y")


def test_add_diagonals_rejects_non_cubes():
    with pytest.raises(NotAHypercube):
        add_diagonals(complete_graph(3, 1))
    with pytest.raises(NotAHypercube):
        add_diagonals(hypercube(0))


def test_invalid_sizes():
    with pytest.raises(InvalidSize):
        hypercube(-1)
    with pytest.raises(InvalidSize):
        complete_bipartite_strong(3, 3)
    with pytest.raises(InvalidSize):
        complete_bipartite_strong(2, 2)


def test_cartesian_product_counts():
    g = cartesian_product(complete_graph(3, 1), complete_graph(2, 2))
    assert (g.n_vertices, g.n_arcs) == (6, 18)


def test_iterated_k2_product_is_hypercube():
    g = complete_graph(2, 1)
    for i in (2, 3):
        g = cartesian_product(g, complete_graph(2, i))
    sig = lambda h: Counter((a.tail, a.head, a.weight) for a in h.arcs)
    assert sig(g) == sig(hypercube(3))


def test_strong_product_counts():
    assert strong_product_k2(single_vertex()).n_arcs == 2
    h = strong_product_k2(base_graph("arc"))
    kinds = Counter("v" if a.vertical else "d" if a.diagonal else "s" for a in h.arcs)
    assert (h.n_vertices, kinds) == (4, Counter(s=2, d=2, v=4))
    assert strong_product_k2(complete_graph(3, 1)).n_arcs == 30


def test_vertical_arcs_point_to_their_spin():
    h = strong_product_k2(base_graph("k3"))
    for a in h.arcs:
        if a.vertical:
            assert a.head == 2 * (a.tail // 2) + a.spin
            assert a.weight == Var("x", (0, a.spin))


def test_bipartite_strong():
    g, forced = complete_bipartite_strong(2, 0)
    assert (g.n_vertices, g.n_arcs, forced) == (4, 8, [])
    g, forced = complete_bipartite_strong(3, 2)
    assert forced == [(0, 1), (2, 3)]
    # bipartite: every arc joins layer 0 and layer 1
    assert all(a.tail % 2 != a.head % 2 for a in g.arcs)
    assert g.n_arcs == 18


def test_diagonals_via_strong_product_matches_dn():
    for n in (2, 3):
        sig = lambda h: Counter((a.tail, a.head, a.weight) for a in h.arcs)
        assert sig(diagonals_via_strong_product(n)) == sig(hypercube_with_diagonals(n))


def test_json_round_trip():
    rng = random.Random(7)
    graphs = [hypercube(2), hypercube_with_diagonals(2), strong_product_k2(base_graph("p3")), edgeless(3)]
    graphs += [random_digraph(rng, 4, 2, symbolic=i % 2 == 0) for i in range(10)]
    for g in graphs:
        back = graph_from_json(graph_to_json(g))
        assert back == g
        assert graph_to_json(back) == graph_to_json(g)


def test_json_hand_written_k2():
    text = json.dumps(
        {"n_vertices": 2, "arcs": [{"from": 0, "to": 1, "weight": "x1_1"}, {"from": 1, "to": 0, "weight": "x1_0"}]}
    )
    g = graph_from_json(text)
    assert sorted((a.tail, a.head, a.weight) for a in g.arcs) == [(0, 1, Var("x", (1, 1))), (1, 0, Var("x", (1, 0)))]


@pytest.mark.parametrize(
    "text, where",
    [
        ("{}", "$.n_vertices"),
        ("[]", "$"),
        ('{"n_vertices": 2, "arcs": [{"from": 0, "to": 5, "weight": 1}]}', "$.arcs[0].to"),
        ('{"n_vertices": 2, "arcs": [{"from": 0, "to": 1, "weight": "zz"}]}', "$.arcs[0].weight"),
        ('{"n_vertices": 2, "arcs": [{"from": 0, "to": 0, "weight": 1}]}', "$"),
        ("{\n  oops", "line 2"),
    ],
)
def test_json_errors_have_locations(text, where):
    with pytest.raises(ParseError, match=where.replace("[", r"\[").replace("$", r"\$")):
        graph_from_json(text)


def test_loops_need_opt_in():
    with pytest.raises(ValueError):
        Digraph(1, [Arc(0, 0, 1)])
    assert Digraph(1, [Arc(0, 0, 1)], allow_loops=True).n_arcs == 1
