"""Weighted digraphs, the graph families used throughout, and products."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Optional, Sequence, Union

from .poly import Polynomial, Var, parse_var

Weight = Union[Var, int]


class InvalidSize(ValueError):
    pass


class NotAHypercube(ValueError):
    pass


class ParseError(ValueError):
    """Malformed graph JSON; the message names the offending location."""


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    weight: Weight
    direction: Optional[int] = None
    spin: Optional[int] = None
    diagonal: bool = False
    vertical: bool = False
    base_arc: Optional[int] = None

    def weight_poly(self) -> Polynomial:
        if isinstance(self.weight, Var):
            return Polynomial.var(self.weight)
        return Polynomial.const(self.weight)

    def signature(self) -> tuple:
        """Everything except the provenance id, for isomorphism checks."""
        return (self.tail, self.head, self.weight, self.direction, self.spin, self.diagonal, self.vertical)


@dataclass(frozen=True)
class Digraph:
    n_vertices: int
    arcs: tuple[Arc, ...] = ()
    labels: Optional[tuple] = None
    allow_loops: bool = False
    _out: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise InvalidSize("a digraph needs at least one vertex")
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.n_vertices:
                raise ValueError("one label per vertex required")
            object.__setattr__(self, "labels", labels)
        out: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, a in enumerate(self.arcs):
            if not (0 <= a.tail < self.n_vertices and 0 <= a.head < self.n_vertices):
                raise ValueError(f"arc {i} has an endpoint outside the vertex range")
            if a.tail == a.head and not self.allow_loops:
                raise ValueError(f"arc {i} is a loop")
            out[a.tail].append(i)
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))

    def out_arcs(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    def label(self, v: int):
        return v if self.labels is None else self.labels[v]


def single_vertex() -> Digraph:
    return Digraph(1)


def edgeless(n: int) -> Digraph:
    return Digraph(n)


def complete_graph(p: int, weight_index: int) -> Digraph:
    """K_p with every arc into vertex j weighted x(weight_index, j)."""
    if p < 1:
        raise InvalidSize(f"complete graph needs p >= 1, got {p}")
    arcs = []
    for u in range(p):
        for v in range(p):
            if u != v:
                arcs.append(Arc(u, v, Var("x", (weight_index, v)), direction=weight_index, spin=v))
    return Digraph(p, arcs, labels=tuple(range(p)))


def _bitstring(idx: int, n: int) -> str:
    return format(idx, f"0{n}b") if n else ""


def hypercube(n: int) -> Digraph:
    """C_n on {0,1}^n; coordinate 1 is the most significant bit of the index.

    The arc flipping coordinate i to value eps has weight x(i, eps).
    """
    if n < 0:
        raise InvalidSize(f"hypercube dimension must be >= 0, got {n}")
    size = 1 << n
    arcs = []
    for v in range(size):
        for i in range(1, n + 1):
            bit = 1 << (n - i)
            u = v ^ bit
            eps = 1 if u & bit else 0
            arcs.append(Arc(v, u, Var("x", (i, eps)), direction=i, spin=eps))
    return Digraph(size, arcs, labels=tuple(_bitstring(v, n) for v in range(size)))


def _dimension_of(g: Digraph) -> int:
    n = g.n_vertices.bit_length() - 1
    if g.n_vertices != 1 << n:
        raise NotAHypercube("vertex count is not a power of two")
    return n


def add_diagonals(g: Digraph) -> Digraph:
    """D_n: the hypercube plus an arc of weight y from each vertex to its antipode."""
    n = _dimension_of(g)
    cube = hypercube(n)
    if [a.signature() for a in g.arcs] != [a.signature() for a in cube.arcs]:
        raise NotAHypercube("graph is not hypercube(n)")
    if n == 0:
        raise NotAHypercube("C_0 has no antipodal pairs")
    full = (1 << n) - 1
    diag = [Arc(v, v ^ full, Var("y"), direction=0, diagonal=True) for v in range(1 << n)]
    return Digraph(g.n_vertices, g.arcs + tuple(diag), labels=g.labels)


def hypercube_with_diagonals(n: int) -> Digraph:
    return add_diagonals(hypercube(n))


def cartesian_product(g: Digraph, h: Digraph, *, vertical: bool = False) -> Digraph:
    """G x H with vertex (u, w) at index u * |H| + w.

    Copies of g-arcs come first (for each g-arc, one per h-vertex), then copies
    of h-arcs.  Every copy keeps its source tags and records ``base_arc``.
    With ``vertical=True`` the h-copies are marked vertical with spin equal to
    their head in h, which is how G x K_p is set up for projection classes.
    """
    p, q = g.n_vertices, h.n_vertices
    arcs = []
    for ai, a in enumerate(g.arcs):
        for wv in range(q):
            arcs.append(replace(a, tail=a.tail * q + wv, head=a.head * q + wv, base_arc=ai))
    for bi, b in enumerate(h.arcs):
        for u in range(p):
            c = replace(b, tail=u * q + b.tail, head=u * q + b.head, base_arc=bi)
            if vertical:
                c = replace(c, vertical=True, spin=b.head)
            arcs.append(c)
    labels = tuple((u, wv) for u in range(p) for wv in range(q))
    return Digraph(p * q, arcs, labels=labels)


def strong_product_k2(
    g: Digraph,
    *,
    vertical_index: int = 0,
    straight: Optional[Iterable[int]] = None,
    diagonal: Optional[Iterable[int]] = None,
    diagonal_weights: Optional[dict[int, Weight]] = None,
) -> Digraph:
    """G boxtimes K_2 with vertex (u, eps) at index 2u + eps.

    ``straight`` / ``diagonal`` restrict which base arcs get straight or
    diagonal copies (default: all).  Diagonal copies of base arc ``a`` weigh
    ``wd(a)`` unless overridden.  The vertical arc of spin eps at u goes from
    (u, 1-eps) to (u, eps) with weight x(vertical_index, eps).
    """
    keep_straight = set(range(g.n_arcs)) if straight is None else set(straight)
    keep_diagonal = set(range(g.n_arcs)) if diagonal is None else set(diagonal)
    dweights = diagonal_weights or {}
    arcs = []
    for ai, a in enumerate(g.arcs):
        if ai in keep_straight:
            for eps in (0, 1):
                arcs.append(
                    replace(a, tail=2 * a.tail + eps, head=2 * a.head + eps, diagonal=False, base_arc=ai)
                )
        if ai in keep_diagonal:
            wt = dweights.get(ai, Var("wd", (ai,)))
            for eps in (0, 1):
                arcs.append(
                    Arc(2 * a.tail + eps, 2 * a.head + 1 - eps, wt, direction=0, diagonal=True, base_arc=ai)
                )
    for u in range(g.n_vertices):
        for eps in (0, 1):
            arcs.append(
                Arc(
                    2 * u + 1 - eps,
                    2 * u + eps,
                    Var("x", (vertical_index, eps)),
                    direction=vertical_index,
                    spin=eps,
                    vertical=True,
                )
            )
    labels = tuple((u, eps) for u in range(g.n_vertices) for eps in (0, 1))
    return Digraph(2 * g.n_vertices, arcs, labels=labels)


def complete_bipartite_strong(p: int, m: int) -> tuple[Digraph, list[tuple[int, int]]]:
    """K_{p,p} as K_p boxtimes K_2 without straight arcs, plus the forced pairs.

    Black vertex i is (i, 0) and white vertex i' is (i, 1); the forced pairs
    are the vertex-index pairs of the edges {i, i'} for i < m.
    """
    if p < 1 or not 0 <= m < p:
        raise InvalidSize(f"need 0 <= m < p, got p={p}, m={m}")
    h = strong_product_k2(complete_graph(p, 1), straight=())
    return h, [(2 * i, 2 * i + 1) for i in range(m)]


def complete_graph_product(p_list: Sequence[int]) -> Digraph:
    """K_{p_1} x ... x K_{p_n}, the i-th factor weighted with direction index i."""
    if not p_list:
        raise InvalidSize("need at least one factor")
    g = complete_graph(p_list[0], 1)
    for i, p in enumerate(p_list[1:], start=2):
        g = cartesian_product(g, complete_graph(p, i))
    return g


def diagonals_via_strong_product(n: int) -> Digraph:
    """D_n rebuilt from D_{n-1} boxtimes K_2.

    Diagonal arcs of D_{n-1} keep only their diagonal copies (weight y) and
    the other arcs keep only their straight copies; the verticals become the
    direction-n arcs.
    """
    if n < 2:
        raise InvalidSize("needs n >= 2")
    prev = hypercube_with_diagonals(n - 1)
    diag = [i for i, a in enumerate(prev.arcs) if a.diagonal]
    plain = [i for i, a in enumerate(prev.arcs) if not a.diagonal]
    return strong_product_k2(
        prev, vertical_index=n, straight=plain, diagonal=diag, diagonal_weights={i: Var("y") for i in diag}
    )


# -- catalog of small bases ---------------------------------------------------


def _generic(n: int, pairs: Sequence[tuple[int, int]]) -> Digraph:
    return Digraph(n, [Arc(u, v, Var("w", (i,))) for i, (u, v) in enumerate(pairs)])


def base_graph(name: str) -> Digraph:
    """Small named bases: single, arc, p3, triangle, k2, k3, double."""
    if name == "single":
        return single_vertex()
    if name == "arc":
        return _generic(2, [(0, 1)])
    if name == "p3":
        return _generic(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    if name == "triangle":
        return _generic(3, [(0, 1), (1, 2), (2, 0)])
    if name == "k2":
        return complete_graph(2, 1)
    if name == "k3":
        return complete_graph(3, 1)
    if name == "double":
        return _generic(2, [(0, 1), (0, 1)])
    raise KeyError(f"unknown base graph {name!r}")


CATALOG_BASES = ("single", "arc", "p3", "triangle", "k2", "k3", "double")


def random_digraph(rng, max_vertices: int = 5, max_parallel: int = 2, symbolic: bool = True) -> Digraph:
    """Loopless random digraph; ``rng`` is a ``random.Random``.

    Symbolic graphs weigh arc i with w(i); otherwise weights are drawn from
    1..3.
    """
    n = rng.randint(1, max_vertices)
    arcs = []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            for _ in range(rng.choice([0, 0, 1, 1, max_parallel])):
                idx = len(arcs)
                arcs.append(Arc(u, v, Var("w", (idx,)) if symbolic else rng.randint(1, 3)))
    return Digraph(n, arcs)


def with_unit_weights(g: Digraph) -> Digraph:
    return Digraph(g.n_vertices, [replace(a, weight=1) for a in g.arcs], labels=g.labels)


def reindex_directions(g: Digraph, index: int) -> Digraph:
    """Move every x(i, e) weight to x(index, e) and retag the direction."""
    arcs = []
    for a in g.arcs:
        if isinstance(a.weight, Var) and a.weight.kind == "x":
            a = replace(a, weight=Var("x", (index, a.weight.index[1])), direction=index)
        arcs.append(a)
    return Digraph(g.n_vertices, arcs, labels=g.labels, allow_loops=g.allow_loops)


# -- JSON ---------------------------------------------------------------------


def _weight_to_json(wt: Weight):
    return wt.name if isinstance(wt, Var) else wt


def _label_to_json(label):
    if isinstance(label, tuple):
        return [_label_to_json(x) for x in label]
    return label


def _label_from_json(label):
    if isinstance(label, list):
        return tuple(_label_from_json(x) for x in label)
    return label


def graph_to_dict(g: Digraph) -> dict:
    arcs = []
    for a in g.arcs:
        arcs.append(
            {
                "from": a.tail,
                "to": a.head,
                "weight": _weight_to_json(a.weight),
                "tags": {
                    "direction": a.direction,
                    "spin": a.spin,
                    "diagonal": a.diagonal,
                    "vertical": a.vertical,
                    "base_arc": a.base_arc,
                },
            }
        )
    out: dict[str, Any] = {"n_vertices": g.n_vertices, "arcs": arcs}
    if g.labels is not None:
        out["labels"] = [_label_to_json(lb) for lb in g.labels]
    if g.allow_loops:
        out["allow_loops"] = True
    return out


def graph_to_json(g: Digraph) -> str:
    return json.dumps(graph_to_dict(g), sort_keys=True)


def _expect(cond: bool, where: str, what: str):
    if not cond:
        raise ParseError(f"{where}: {what}")


def _int_field(obj: dict, key: str, where: str, optional: bool = False):
    val = obj.get(key)
    if val is None and optional:
        return None
    _expect(isinstance(val, int) and not isinstance(val, bool), f"{where}.{key}", "expected an integer")
    return val


def graph_from_dict(data: Any) -> Digraph:
    _expect(isinstance(data, dict), "$", "expected an object")
    n = _int_field(data, "n_vertices", "$")
    _expect(n >= 1, "$.n_vertices", "must be >= 1")
    raw_arcs = data.get("arcs")
    _expect(isinstance(raw_arcs, list), "$.arcs", "expected a list")
    arcs = []
    for i, ra in enumerate(raw_arcs):
        where = f"$.arcs[{i}]"
        _expect(isinstance(ra, dict), where, "expected an object")
        tail = _int_field(ra, "from", where)
        head = _int_field(ra, "to", where)
        _expect(0 <= tail < n, f"{where}.from", "vertex out of range")
        _expect(0 <= head < n, f"{where}.to", "vertex out of range")
        wt = ra.get("weight")
        if isinstance(wt, str):
            try:
                wt = parse_var(wt)
            except ValueError as exc:
                raise ParseError(f"{where}.weight: {exc}") from None
        else:
            _expect(isinstance(wt, int) and not isinstance(wt, bool), f"{where}.weight", "expected a name or integer")
        tags = ra.get("tags") or {}
        _expect(isinstance(tags, dict), f"{where}.tags", "expected an object")
        for flag in ("diagonal", "vertical"):
            _expect(isinstance(tags.get(flag, False), bool), f"{where}.tags.{flag}", "expected a boolean")
        arcs.append(
            Arc(
                tail,
                head,
                wt,
                direction=_int_field(tags, "direction", f"{where}.tags", optional=True),
                spin=_int_field(tags, "spin", f"{where}.tags", optional=True),
                diagonal=tags.get("diagonal", False),
                vertical=tags.get("vertical", False),
                base_arc=_int_field(tags, "base_arc", f"{where}.tags", optional=True),
            )
        )
    labels = data.get("labels")
    if labels is not None:
        _expect(isinstance(labels, list) and len(labels) == n, "$.labels", f"expected a list of {n} labels")
        labels = tuple(_label_from_json(lb) for lb in labels)
    try:
        return Digraph(n, arcs, labels=labels, allow_loops=bool(data.get("allow_loops", False)))
    except ValueError as exc:
        raise ParseError(f"$: {exc}") from None


def graph_from_json(text: str) -> Digraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return graph_from_dict(data)
