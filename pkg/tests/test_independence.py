import json
from collections import Counter

import pytest

from hforest.enumerate import class_statistics
from hforest.graph import InvalidSize, base_graph, cartesian_product, complete_graph, single_vertex
from hforest.independence import (
    analyse_class,
    factorizes,
    first_violation,
    marginals_of,
    search_subforest_counterexample,
    verify_bipartite_forced,
    verify_multispin_independence,
    verify_spin_independence,
)


def test_factorization_helpers():
    uniform = Counter({(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1})
    assert factorizes(uniform, marginals_of(uniform, 2), 4)
    # correlated: both equal
    tied = Counter({(0, 0): 1, (1, 1): 1})
    margs = marginals_of(tied, 2)
    assert margs == [Counter({0: 1, 1: 1}), Counter({0: 1, 1: 1})]
    assert not factorizes(tied, margs, 2)
    v = first_violation(tied, margs, 2)
    assert v == {"record": [0, 0], "joint_times_size_pow": 2, "product_of_marginals": 1}
    # a product law that is not uniform still factorizes
    skew = Counter({(0, 0): 4, (0, 1): 2, (1, 0): 2, (1, 1): 1})
    assert factorizes(skew, marginals_of(skew, 2), 9)
    rep = analyse_class(None, skew, (0, 1), True)
    assert rep.independent and rep.uniform is False


def test_unobserved_tuples_count():
    # (0,1) and (1,0) never occur, so the law cannot factor even though marginals look fine
    joint = Counter({(0, 0): 2, (1, 1): 2})
    assert not factorizes(joint, marginals_of(joint, 2), 4)


def test_single_vertex_spin():
    rep = verify_spin_independence(single_vertex(), "single")
    assert rep.verdict == "PASS"
    vertical = [c for c in rep.classes if c.support]
    assert len(vertical) == 1 and vertical[0].joint == Counter({(0,): 1, (1,): 1})


@pytest.mark.parametrize("name", ["single", "arc", "p3", "triangle", "k2", "k3", "double"])
def test_spin_independence_catalog(name):
    rep = verify_spin_independence(base_graph(name), name)
    assert rep.verdict == "PASS" and not rep.violations
    assert rep.extra["sizes_divisible"]
    for c in rep.classes:
        assert sum(c.joint.values()) == c.size
        assert marginals_of(c.joint, len(c.support)) == c.marginals


def test_spin_classes_are_not_all_trivial():
    rep = verify_spin_independence(base_graph("k3"), "k3")
    assert max(len(c.support) for c in rep.classes) == 3


def test_four_cycle_class_in_cartesian_product():
    h = cartesian_product(complete_graph(2, 1), complete_graph(2, 0), vertical=True)
    stats = class_statistics(h, "spin")
    for key, joint in stats.items():
        rep = analyse_class(key, joint, key.support, True)
        assert rep.independent and rep.uniform


def test_bipartite_forced():
    rep = verify_bipartite_forced(2, 1)
    (cls,) = rep.classes
    assert cls.marginals[0][0] == cls.marginals[0][1] >= 1
    assert rep.verdict == "PASS"
    for p, m in [(3, 1), (3, 2)]:
        assert verify_bipartite_forced(p, m).verdict == "PASS"
    joint = verify_bipartite_forced(3, 2).classes[0].joint
    assert set(joint) == {(0, 0), (0, 1), (1, 0), (1, 1)} and len(set(joint.values())) == 1
    with pytest.raises(InvalidSize):
        verify_bipartite_forced(2, 2)


def test_multispin_experiment():
    for name in ("single", "arc", "k2"):
        rep = verify_multispin_independence(base_graph(name), 3, name)
        assert rep.experimental
        assert rep.verdict == "PASS"
        assert all(c.uniform is None for c in rep.classes)


def test_counterexample_search():
    rep = search_subforest_counterexample()
    assert rep.extra["dependent_classes"] >= 1
    assert rep.extra["dependent_classes_multispin_independent"] == rep.extra["dependent_classes"]
    w = rep.witness
    assert w["multispin"]["independent"] is True
    assert w["class"]["independent"] is False
    v = w["violation"]
    assert v["joint_times_size_pow"] != v["product_of_marginals"]


def test_report_json_is_reproducible():
    a = verify_spin_independence(base_graph("p3"), "p3").to_json()
    b = verify_spin_independence(base_graph("p3"), "p3").to_json()
    assert a == b
    data = json.loads(a)
    assert set(data) >= {"graph", "classes", "verdict", "experimental"}
    cls = data["classes"][0]
    assert set(cls) >= {"key", "size", "marginals", "joint", "independent", "uniform"}


def test_report_json_same_across_threads():
    one = verify_spin_independence(base_graph("k2"), "k2", threads=1).to_json()
    two = verify_spin_independence(base_graph("k2"), "k2", threads=2).to_json()
    assert one == two
