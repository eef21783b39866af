"""The desk-scale verification suite behind ``hforest verify-all``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import formulas
from .enumerate import BudgetExceeded, brute_force_enumerator
from .formulas import Sides, det_enumerator
from .graph import (
    CATALOG_BASES,
    base_graph,
    cartesian_product,
    complete_graph,
    complete_graph_product,
    hypercube,
    hypercube_with_diagonals,
    random_digraph,
    reindex_directions,
    strong_product_k2,
    with_unit_weights,
)
from .independence import (
    search_subforest_counterexample,
    verify_bipartite_forced,
    verify_multispin_independence,
    verify_spin_independence,
)
from .laplacian import kronecker_sum_check, product_resultant_sides
from .poly import canonical_string


class CheckFailed(AssertionError):
    def __init__(self, message: str, lhs: Optional[str] = None, rhs: Optional[str] = None, diff: Optional[str] = None):
        super().__init__(message)
        self.lhs = lhs
        self.rhs = rhs
        self.diff = diff


@dataclass
class Outcome:
    name: str
    status: str  # PASS | FAIL | SKIPPED(budget)
    seconds: float
    detail: dict
    experimental: bool = False


def require(sides: Sides, label: str):
    if not sides.ok:
        raise CheckFailed(
            label, canonical_string(sides.lhs), canonical_string(sides.rhs), canonical_string(sides.lhs - sides.rhs)
        )


def catalog_graphs():
    """Every family at desk scale, with names."""
    out = [(f"base:{b}", base_graph(b)) for b in CATALOG_BASES]
    out += [(f"hypercube({n})", hypercube(n)) for n in range(4)]
    out += [(f"hypercube-diag({n})", hypercube_with_diagonals(n)) for n in range(1, 4)]
    out += [(f"complete({p})", complete_graph(p, 1)) for p in range(1, 5)]
    out += [(f"strongk2({b})", strong_product_k2(base_graph(b))) for b in ("single", "arc", "k2", "triangle")]
    out += [("k3 x k2", cartesian_product(complete_graph(3, 1), complete_graph(2, 2)))]
    return out


def random_catalog(count: int = 50, seed: int = 20240601):
    rng = random.Random(seed)
    return [random_digraph(rng, 5, 2, symbolic=i % 2 == 0) for i in range(count)]


# -- individual checks --------------------------------------------------------
# Each takes (budget, threads) and returns a detail dict or raises CheckFailed.


def check_count(budget, threads, fault=False):
    expected = {1: 1, 2: 4, 3: 384, 4: 42467328}
    got = {n: formulas.spanning_count_cn(n) for n in expected}
    if fault:
        got[3] += 1
    if got != expected:
        raise CheckFailed("spanning-tree counts", str(got), str(expected))
    for n in (1, 2, 3):
        if formulas.spanning_count_from_det(n) != expected[n]:
            raise CheckFailed(f"det route n={n}")
        brute = formulas.unit_weights(brute_force_enumerator(hypercube(n), budget, threads))
        if brute.coefficient_of(formulas.T, 1).constant_value() != expected[n] << n:
            raise CheckFailed(f"brute route n={n}")
    return {"counts": got}


def check_matrix_tree(budget, threads, fault=False):
    graphs = catalog_graphs() + [(f"random[{i}]", g) for i, g in enumerate(random_catalog())]
    for name, g in graphs:
        require(Sides(brute_force_enumerator(g, budget, threads), det_enumerator(g)), f"matrix-tree on {name}")
    return {"graphs": len(graphs)}


def check_cube(budget, threads, fault=False):
    for n in range(4):
        sides = formulas.cube_sides(n)
        if fault and n == 2:
            sides = Sides(sides.lhs + formulas.t(), sides.rhs)
        require(sides, f"cube n={n}")
    return {"n": [0, 1, 2, 3]}


def check_diagonals(budget, threads, fault=False):
    for n in (1, 2, 3):
        require(formulas.diagonals_sides(n), f"diagonals n={n}")
        for mask in range(1 << n):
            S = [i + 1 for i in range(n) if mask >> i & 1]
            if not formulas.verify_root_vanishing(n, S):
                raise CheckFailed(f"root vanishing n={n} S={S}")
    return {"n": [1, 2, 3]}


def check_spin(budget, threads, fault=False):
    for b in CATALOG_BASES:
        rep = verify_spin_independence(base_graph(b), b, budget, threads)
        if rep.verdict != "PASS" or not rep.extra["sizes_divisible"]:
            raise CheckFailed(f"spin independence on {b}")
    return {"bases": list(CATALOG_BASES)}


def check_collapse_induction(budget, threads, fault=False):
    for b in CATALOG_BASES:
        g = base_graph(b)
        require(formulas.collapse_sides(strong_product_k2(g)), f"collapse on strongk2({b})")
        require(formulas.k2_induction_sides(g), f"k2 induction on {b}")
    return {"bases": list(CATALOG_BASES)}


def check_complete_products(budget, threads, fault=False):
    cases = [[2], [3], [4], [2, 2], [2, 3], [3, 3]]
    for pl in cases:
        det = formulas.shift_spins(det_enumerator(complete_graph_product(pl)), 1)
        require(Sides(formulas.complete_product(pl), det), f"complete product {pl}")
    for p in (1, 2, 3, 4):
        require(Sides(formulas.cayley_formula(p), formulas.complete_product([p])), f"cayley p={p}")
    return {"cases": cases}


def kronecker_pairs():
    names = ["single", "arc", "k2", "k3", "triangle", "double"]
    return [(a, b) for a in names for b in names]


def check_kronecker(budget, threads, fault=False):
    for a, b in kronecker_pairs():
        if not kronecker_sum_check(base_graph(a), base_graph(b)):
            raise CheckFailed(f"kronecker sum {a} x {b}")
    return {"pairs": len(kronecker_pairs())}


def resultant_factor(name: str, index: int):
    """Catalog base with K_p arcs on direction ``index``; 3-vertex factors unit-weighted."""
    g = reindex_directions(base_graph(name), index)
    return with_unit_weights(g) if g.n_vertices >= 3 else g


def resultant_cases():
    names = ["single", "arc", "double", "k2", "p3", "triangle", "k3"]
    return [(f"{a} x {b}", resultant_factor(a, 1), resultant_factor(b, 2)) for a in names for b in names]


def check_product_resultant(budget, threads, fault=False):
    for name, g, h in resultant_cases():
        require(Sides(*product_resultant_sides(g, h)), f"resultant form {name}")
    return {"cases": [c[0] for c in resultant_cases()]}


def check_rooted_and_degree(budget, threads, fault=False):
    for n in (1, 2, 3):
        verts = [format(i, f"0{n}b") for i in range(1 << n)]
        for u in verts:
            require(Sides(formulas.rooted_at_v(n, u), formulas.rooted_at_v_det(n, u)), f"rooted at {u}")
            for v in verts:
                lhs = formulas.rooted_at_v(n, u) * _root_monomial(v)
                rhs = formulas.rooted_at_v(n, v) * _root_monomial(u)
                require(Sides(lhs, rhs), f"change of root {u}->{v}")
        total = sum((formulas.rooted_at_v(n, v) for v in verts), formulas.Polynomial())
        require(Sides(total, formulas.cube_product(n).coefficient_of(formulas.T, 1)), f"sum over roots n={n}")
        closed = formulas.degree_enumerator_closed(n)
        rebuilt = formulas.degree_enumerator_from_rooted(n, formulas.rooted_at_v_det(n, "0" * n))
        require(Sides(rebuilt, closed), f"degree enumerator by substitution n={n}")
        if n <= 2:
            require(Sides(formulas.degree_enumerator_direct(n), closed), f"degree enumerator direct n={n}")
    return {"n": [1, 2, 3]}


def _root_monomial(v: str):
    out = formulas.Polynomial.const(1)
    for i, b in enumerate(v, start=1):
        out = out * formulas.x(i, int(b))
    return out


def check_bipartite(budget, threads, fault=False):
    for p, m in [(2, 1), (3, 1), (3, 2)]:
        if verify_bipartite_forced(p, m, budget).verdict != "PASS":
            raise CheckFailed(f"bipartite p={p} m={m}")
    return {"cases": [[2, 1], [3, 1], [3, 2]]}


def check_counterexample(budget, threads, fault=False):
    rep = search_subforest_counterexample(budget, threads)
    if rep.extra["dependent_classes_multispin_independent"] != rep.extra["dependent_classes"]:
        raise CheckFailed("a dependent-subforest class also fails multispin independence")
    return {"dependent_classes": rep.extra["dependent_classes"], "violation": rep.witness["violation"]}


def check_multispin(budget, threads, fault=False):
    verdicts = {}
    for b in ("single", "arc", "k2", "k3"):
        verdicts[b] = verify_multispin_independence(base_graph(b), 3, b, budget, threads).verdict
    if any(v != "PASS" for v in verdicts.values()):
        raise CheckFailed(f"multispin independence failed (multispin counterexample): {verdicts}")
    return {"verdicts": verdicts}


SUITE: list[tuple[str, Callable, bool]] = [
    ("count", check_count, False),
    ("matrix-tree", check_matrix_tree, False),
    ("cube", check_cube, False),
    ("diagonals", check_diagonals, False),
    ("spin-independence", check_spin, False),
    ("collapse+k2-induction", check_collapse_induction, False),
    ("complete-product", check_complete_products, False),
    ("kronecker", check_kronecker, False),
    ("product-resultant", check_product_resultant, False),
    ("rooted+degree", check_rooted_and_degree, False),
    ("bipartite", check_bipartite, False),
    ("subforest-counterexample", check_counterexample, False),
    ("multispin", check_multispin, True),
]


def run_suite(budget: Optional[int] = None, threads: int = 1, fault: Optional[str] = None, only=None):
    outcomes = []
    for name, fn, experimental in SUITE:
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            detail = fn(budget, threads, fault == name)
            status = "PASS"
        except BudgetExceeded as exc:
            detail = {"assignments": exc.count, "budget": exc.budget}
            status = "SKIPPED(budget)"
        except CheckFailed as exc:
            detail = {"message": str(exc), "lhs": exc.lhs, "rhs": exc.rhs, "diff": exc.diff}
            status = "FAIL"
        outcomes.append(Outcome(name, status, time.perf_counter() - start, detail, experimental))
    return outcomes
