"""Closed-form forest enumerators and the identities relating them.

Hypercube directions are 1-based, and spins on hypercube arcs are 0/1.  The
complete-graph formulas index the vertices of K_p by 1..p as in the usual
statement of Cayley's formula, while ``graph.complete_graph`` numbers them
from 0; ``shift_spins`` converts between the two.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterable, NamedTuple, Sequence, Union

from .enumerate import rooted_trees
from .graph import (
    Digraph,
    cartesian_product,
    complete_graph,
    hypercube,
    hypercube_with_diagonals,
)
from .laplacian import forest_enumerator_det as _det_enumerator
from .laplacian import rooted_tree_enumerator_det
from .poly import T, Polynomial, Var, q, t, x, y, yv

MAX_SYMBOLIC_N = 4


class Sides(NamedTuple):
    """Both sides of an identity; ``ok`` is exact equality."""

    lhs: Polynomial
    rhs: Polynomial

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


@lru_cache(maxsize=64)
def det_enumerator(g: Digraph) -> Polynomial:
    """Memoized matrix-tree enumerator; symbolic 8x8 determinants are not free."""
    return _det_enumerator(g)


def _subsets(n: int) -> Iterable[list[int]]:
    for mask in range(1 << n):
        yield [i + 1 for i in range(n) if mask >> i & 1]


def _direction_sum(S: Sequence[int]) -> Polynomial:
    total = Polynomial()
    for i in S:
        total = total + x(i, 0) + x(i, 1)
    return total


def _check_n(n: int, lo: int = 0):
    if n < lo:
        raise ValueError(f"n must be >= {lo}, got {n}")
    if n > MAX_SYMBOLIC_N:
        raise ValueError(f"symbolic expansion is limited to n <= {MAX_SYMBOLIC_N}")


def cube_product(n: int) -> Polynomial:
    """Product over S of (t + sum over i in S of x(i,0) + x(i,1))."""
    _check_n(n)
    out = Polynomial.const(1)
    for S in _subsets(n):
        out = out * (t() + _direction_sum(S))
    return out


def dn_product(n: int) -> Polynomial:
    """As ``cube_product`` with an extra 2y in every factor with |S| odd."""
    _check_n(n)
    out = Polynomial.const(1)
    for S in _subsets(n):
        factor = t() + _direction_sum(S)
        if len(S) % 2:
            factor = factor + 2 * y()
        out = out * factor
    return out


def spanning_count_cn(n: int) -> int:
    """Number of spanning trees of the n-cube: 2^-n * prod (2i)^C(n,i)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    num = 1
    for i in range(1, n + 1):
        num *= (2 * i) ** comb(n, i)
    value, rem = divmod(num, 1 << n)
    assert rem == 0
    return value


def cayley_formula(p: int) -> Polynomial:
    """t (t + x(1,1) + ... + x(1,p))^(p-1)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    inner = t()
    for j in range(1, p + 1):
        inner = inner + x(1, j)
    return t() * inner ** (p - 1)


def complete_product(p_list: Sequence[int]) -> Polynomial:
    """Forest enumerator of K_{p_1} x ... x K_{p_n}, with 1-based vertex labels."""
    if not p_list or any(p < 1 for p in p_list):
        raise ValueError("every p_i must be >= 1")
    sums = []
    for i, p in enumerate(p_list, start=1):
        total = Polynomial()
        for j in range(1, p + 1):
            total = total + x(i, j)
        sums.append(total)
    out = Polynomial.const(1)
    for v in itertools.product(*[range(1, p + 1) for p in p_list]):
        factor = t()
        for i, vi in enumerate(v):
            if vi != 1:
                factor = factor + sums[i]
        out = out * factor
    return out


def shift_spins(p: Polynomial, offset: int) -> Polynomial:
    """Rename every x(i, e) to x(i, e + offset)."""
    bindings = {v: x(v.index[0], v.index[1] + offset) for v in p.variables() if v.kind == "x"}
    return p.substitute(bindings)


def _as_bits(n: int, v) -> tuple[int, ...]:
    bits = tuple(int(c) for c in v) if isinstance(v, str) else tuple(v)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"vertex {v!r} is not in {{0,1}}^{n}")
    return bits


def _big_subset_product(n: int) -> Polynomial:
    out = Polynomial.const(1)
    for S in _subsets(n):
        if len(S) >= 2:
            out = out * _direction_sum(S)
    return out


def rooted_at_v(n: int, v: Union[str, Sequence[int]]) -> Polynomial:
    """Spanning trees of C_n rooted at v, by the closed form."""
    _check_n(n, 1)
    bits = _as_bits(n, v)
    lead = Polynomial.const(1)
    for i, b in enumerate(bits, start=1):
        lead = lead * x(i, b)
    return lead * _big_subset_product(n)


def rooted_at_v_det(n: int, v: Union[str, Sequence[int]]) -> Polynomial:
    """The same count from the principal minor of the Laplacian."""
    bits = _as_bits(n, v)
    idx = int("".join(map(str, bits)), 2) if n else 0
    return rooted_tree_enumerator_det(hypercube(n), idx)


def degree_enumerator_closed(n: int) -> Polynomial:
    """Closed form of the spanning-tree enumerator by edge direction and side degrees."""
    _check_n(n, 1)
    big = 2**n - 1
    out = Polynomial.const(1)
    for i in range(1, n + 1):
        out = out * q(i) * yv(i, 0) ** big * yv(i, 1) ** big
    ratio = {i: yv(i, 0) * yv(i, 1) ** -1 + yv(i, 1) * yv(i, 0) ** -1 for i in range(1, n + 1)}
    for S in _subsets(n):
        if len(S) >= 2:
            total = Polynomial()
            for i in S:
                total = total + q(i) * ratio[i]
            out = out * total
    return out


def degree_substitution(n: int) -> dict[Var, Polynomial]:
    """x(i, e) -> q(i) * yv(i, e) / yv(i, 1 - e)."""
    return {
        Var("x", (i, e)): q(i) * yv(i, e) * yv(i, 1 - e) ** -1 for i in range(1, n + 1) for e in (0, 1)
    }


def degree_enumerator_from_rooted(n: int, rooted: Polynomial) -> Polynomial:
    """Rebuild the degree enumerator from trees rooted at 0...0."""
    pre = Polynomial.const(1)
    for i in range(1, n + 1):
        pre = pre * yv(i, 0) ** (2**n - 2) * yv(i, 1) ** (2**n)
    return pre * rooted.substitute(degree_substitution(n))


def degree_enumerator_direct(n: int) -> Polynomial:
    """Sum over unrooted spanning trees of C_n, degrees read off each tree."""
    g = hypercube(n)
    total = Polynomial()
    # an unrooted tree is counted once by fixing its root at vertex 0
    for tree in rooted_trees(g, root=0):
        exps: dict[Var, int] = {}
        degree = [0] * g.n_vertices
        for aid in tree:
            if aid is None:
                continue
            a = g.arcs[aid]
            qv = Var("q", (a.direction,))
            exps[qv] = exps.get(qv, 0) + 1
            degree[a.tail] += 1
            degree[a.head] += 1
        for v, d in enumerate(degree):
            label = g.labels[v]
            for i in range(1, n + 1):
                key = Var("yv", (i, int(label[i - 1])))
                exps[key] = exps.get(key, 0) + d
        total = total + Polynomial.from_terms([(exps, 1)])
    return total


# -- identities checked through the determinant enumerator -------------------


def collapse_sides(g: Digraph, direction: int = 0) -> Sides:
    f = det_enumerator(g)
    collapsed = f.substitute({Var("x", (direction, 0)): x(direction, 0) + x(direction, 1), Var("x", (direction, 1)): 0})
    return Sides(f, collapsed)


def verify_collapse(g_product: Digraph, direction: int = 0) -> bool:
    """Enumerator unchanged by (x(d,0), x(d,1)) -> (x(d,0) + x(d,1), 0)."""
    return collapse_sides(g_product, direction).ok


def k2_induction_sides(g: Digraph) -> Sides:
    h = cartesian_product(g, complete_graph(2, 0), vertical=True)
    fg = det_enumerator(g)
    shifted = fg.substitute({T: t() + x(0, 0) + x(0, 1)})
    return Sides(det_enumerator(h), fg * shifted)


def verify_k2_induction(g: Digraph) -> bool:
    """F(g x K_2) = F_g(t) * F_g(t + x(0,0) + x(0,1))."""
    return k2_induction_sides(g).ok


def root_value(S: Iterable[int]) -> Polynomial:
    S = list(S)
    value = -_direction_sum(S)
    if len(S) % 2:
        value = value - 2 * y()
    return value


def verify_root_vanishing(n: int, S: Iterable[int]) -> bool:
    """F_{D_n} vanishes at t = -2y[|S| odd] - sum over S of (x(i,0) + x(i,1))."""
    if n > 3:
        raise ValueError("root vanishing is checked for n <= 3")
    S = sorted(set(S))
    if any(not 1 <= i <= n for i in S):
        raise ValueError(f"S must be a subset of 1..{n}")
    f = det_enumerator(hypercube_with_diagonals(n))
    return not f.substitute({T: root_value(S)})


def cube_sides(n: int) -> Sides:
    return Sides(cube_product(n), det_enumerator(hypercube(n)))


def diagonals_sides(n: int) -> Sides:
    return Sides(dn_product(n), det_enumerator(hypercube_with_diagonals(n)))


def unit_weights(p: Polynomial) -> Polynomial:
    """Set every variable except t to 1."""
    return p.substitute({v: 1 for v in p.variables() if v != T})


def spanning_count_from_det(n: int) -> int:
    rooted = unit_weights(det_enumerator(hypercube(n))).coefficient_of(T, 1).constant_value()
    value, rem = divmod(rooted, 1 << n)
    assert rem == 0
    return value
