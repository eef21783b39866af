"""Exhaustive checks of spin independence inside projection classes.

All checks are integer identities.  For a class of size N whose records range
over k base vertices, independence means

    joint(r_1, ..., r_k) * N^(k-1) == marginal_1(r_1) * ... * marginal_k(r_k)

for every tuple in the product of the marginal supports, unobserved tuples
included (their joint count is 0).
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Optional

from .enumerate import ProductLayout, ProjectionKey, class_statistics, enumerate_forests
from .graph import Digraph, base_graph, cartesian_product, complete_bipartite_strong, complete_graph, strong_product_k2


class NotFound(RuntimeError):
    pass


@dataclass
class ClassReport:
    key: Optional[ProjectionKey]
    size: int
    support: tuple[int, ...]
    marginals: list[Counter]
    joint: Counter
    independent: bool
    uniform: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "key": None if self.key is None else self.key.to_json(),
            "size": self.size,
            "support": list(self.support),
            "marginals": {
                str(u): [[_jsonable(v), c] for v, c in sorted(m.items())] for u, m in zip(self.support, self.marginals)
            },
            "joint": [[[_jsonable(v) for v in rec], c] for rec, c in sorted(self.joint.items())],
            "independent": self.independent,
            "uniform": self.uniform,
        }


@dataclass
class IndependenceReport:
    graph: str
    classes: list[ClassReport]
    experimental: bool = False
    witness: Optional[dict] = None
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        ok = all(c.independent and c.uniform is not False for c in self.classes)
        return "PASS" if ok else "FAIL"

    @property
    def violations(self) -> list[ClassReport]:
        return [c for c in self.classes if not c.independent or c.uniform is False]

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "graph": self.graph,
            "classes": [c.to_dict() for c in self.classes],
            "verdict": self.verdict,
            "experimental": self.experimental,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def marginals_of(joint: Counter, k: int) -> list[Counter]:
    margs = [Counter() for _ in range(k)]
    for rec, c in joint.items():
        for i, v in enumerate(rec):
            margs[i][v] += c
    return margs


def factorizes(joint: Counter, margs: list[Counter], size: int) -> bool:
    k = len(margs)
    if k <= 1:
        return True
    scale = size ** (k - 1)
    for combo in itertools.product(*[sorted(m) for m in margs]):
        if joint.get(combo, 0) * scale != math.prod(m[v] for m, v in zip(margs, combo)):
            return False
    return True


def first_violation(joint: Counter, margs: list[Counter], size: int) -> Optional[dict]:
    k = len(margs)
    scale = size ** (k - 1)
    for combo in itertools.product(*[sorted(m) for m in margs]):
        lhs = joint.get(combo, 0) * scale
        rhs = math.prod(m[v] for m, v in zip(margs, combo))
        if lhs != rhs:
            return {"record": _jsonable(combo), "joint_times_size_pow": lhs, "product_of_marginals": rhs}
    return None


def _is_uniform_binary(m: Counter) -> bool:
    return set(m) == {0, 1} and m[0] == m[1]


def analyse_class(key: Optional[ProjectionKey], joint: Counter, support, check_uniform: bool) -> ClassReport:
    size = sum(joint.values())
    margs = marginals_of(joint, len(support))
    uniform = all(_is_uniform_binary(m) for m in margs) if check_uniform else None
    return ClassReport(key, size, tuple(support), margs, joint, factorizes(joint, margs, size), uniform)


def verify_spin_independence(
    base: Digraph, name: str = "base", budget: Optional[int] = None, threads: int = 1
) -> IndependenceReport:
    """Spins of vertical arcs in every projection class of base boxtimes K_2."""
    h = strong_product_k2(base)
    stats = class_statistics(h, "spin", budget, threads)
    classes = [analyse_class(key, joint, key.support, True) for key, joint in stats.items()]
    divisible = all(c.size % (1 << len(c.support)) == 0 for c in classes)
    return IndependenceReport(f"strong_product_k2({name})", classes, extra={"sizes_divisible": divisible})


def verify_bipartite_forced(p: int, m: int, budget: Optional[int] = None) -> IndependenceReport:
    """Spins of the forced edges {i, i'} (i < m) over rooted spanning trees of K_{p,p}.

    Spin 0 means the edge is oriented toward its black endpoint (i, 0).
    """
    h, forced = complete_bipartite_strong(p, m)
    pair_arcs = []
    for black, white in forced:
        into_black = next(i for i, a in enumerate(h.arcs) if a.vertical and a.tail == white and a.head == black)
        into_white = next(i for i, a in enumerate(h.arcs) if a.vertical and a.tail == black and a.head == white)
        pair_arcs.append((into_black, into_white))
    joint: Counter = Counter()
    for f in enumerate_forests(h, budget):
        if sum(aid is None for aid in f) != 1:
            continue
        chosen = set(f)
        rec = []
        for into_black, into_white in pair_arcs:
            if into_black in chosen:
                rec.append(0)
            elif into_white in chosen:
                rec.append(1)
            else:
                break
        else:
            joint[tuple(rec)] += 1
    cls = analyse_class(None, joint, tuple(range(m)), True)
    return IndependenceReport(f"K_{{{p},{p}}} forced m={m}", [cls])


def product_with_complete(base: Digraph, p: int) -> Digraph:
    """base x K_p with the K_p arcs tagged vertical (spin = head layer, 0-based)."""
    return cartesian_product(base, complete_graph(p, 0), vertical=True)


def verify_multispin_independence(
    base: Digraph, p: int, name: str = "base", budget: Optional[int] = None, threads: int = 1
) -> IndependenceReport:
    """Factorization of the joint multispin law in every class of base x K_p.

    Uniformity is not part of the claim and is left unasserted.
    """
    h = product_with_complete(base, p)
    stats = class_statistics(h, "multispin", budget, threads)
    classes = [analyse_class(key, joint, key.support, False) for key, joint in stats.items()]
    return IndependenceReport(f"{name} x K_{p}", classes, experimental=True)


def search_subforest_counterexample(budget: Optional[int] = None, threads: int = 1) -> IndependenceReport:
    """Find a class of K_3 x K_3 whose vertical subforests are dependent.

    The witness is the first such class in key order.  Every reported class
    is also re-checked at the multispin level.
    """
    base = base_graph("k3")
    h = product_with_complete(base, 3)
    layout = ProductLayout(h)
    stats = class_statistics(h, "subforest", budget, threads)
    classes = []
    dependent = []
    for key, joint in stats.items():
        rep = analyse_class(key, joint, key.support, False)
        if not rep.independent:
            dependent.append((rep, joint))
        classes.append(rep)
    if not dependent:
        raise NotFound("no projection class of K_3 x K_3 has dependent vertical subforests")
    multispin_ok = []
    for rep, joint in dependent:
        ms: Counter = Counter()
        for rec, c in joint.items():
            ms[layout.multispin_of(rec)] += c
        multispin_ok.append(analyse_class(rep.key, ms, rep.support, False).independent)
    witness_rep, witness_joint = dependent[0]
    witness_ms: Counter = Counter()
    for rec, c in witness_joint.items():
        witness_ms[layout.multispin_of(rec)] += c
    witness = {
        "class": witness_rep.to_dict(),
        "violation": first_violation(witness_joint, witness_rep.marginals, witness_rep.size),
        "multispin": analyse_class(witness_rep.key, witness_ms, witness_rep.support, False).to_dict(),
    }
    report = IndependenceReport(
        "K_3 x K_3 (vertical subforests)",
        classes,
        experimental=False,
        witness=witness,
        extra={
            "dependent_classes": len(dependent),
            "dependent_classes_multispin_independent": sum(multispin_ok),
        },
    )
    return report
