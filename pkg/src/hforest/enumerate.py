"""Exhaustive rooted-forest enumeration and projection-class statistics.

An out-arc assignment gives every vertex one digit in a mixed-radix counter:
digit 0 makes the vertex a root, digit j >= 1 picks its j-th outgoing arc.
Vertex 0 is the most significant digit.  Forests are produced in increasing
counter order; a partial assignment that already closes a cycle is skipped
together with all its completions, which yields exactly the acyclic
assignments of the full scan, in the same order.

Parallel runs split the counter space into contiguous ranges of the leading
digits and merge the per-range results in range order.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

from .graph import Digraph
from .poly import T, Polynomial, Var, _pack

Forest = tuple  # per-vertex arc id, or None for a root

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"{count} assignments exceed the budget of {budget}")
        self.count = count
        self.budget = budget


class MissingTags(ValueError):
    pass


def default_budget() -> int:
    return int(os.environ.get("HFOREST_BUDGET", DEFAULT_BUDGET))


def default_threads() -> int:
    return max(1, int(os.environ.get("HFOREST_THREADS", 1)))


def assignment_count(g: Digraph) -> int:
    return math.prod(g.out_degree(v) + 1 for v in range(g.n_vertices))


def check_budget(g: Digraph, budget: Optional[int] = None) -> int:
    budget = default_budget() if budget is None else budget
    count = assignment_count(g)
    if count > budget:
        raise BudgetExceeded(count, budget)
    return count


def _options(g: Digraph) -> list[list[tuple[Optional[int], int]]]:
    return [[(None, -1)] + [(aid, g.arcs[aid].head) for aid in g.out_arcs(v)] for v in range(g.n_vertices)]


def iter_assignments(g: Digraph) -> Iterator[Forest]:
    """Every out-arc assignment, cyclic or not, in counter order."""
    return itertools.product(*[[aid for aid, _ in opts] for opts in _options(g)])


def is_forest(g: Digraph, assignment: Sequence[Optional[int]]) -> bool:
    """True iff following out-arcs from every vertex reaches a root."""
    n = g.n_vertices
    stamp = [-1] * n
    done = [False] * n
    for start in range(n):
        v = start
        while not done[v]:
            if stamp[v] == start:
                return False
            stamp[v] = start
            aid = assignment[v]
            if aid is None:
                break
            v = g.arcs[aid].head
        v = start
        while not done[v]:
            done[v] = True
            aid = assignment[v]
            if aid is None:
                break
            v = g.arcs[aid].head
    return True


def _prefix_ok(opts, prefix: Sequence[int], nxt: list[int]) -> bool:
    for v, d in enumerate(prefix):
        aid, h = opts[v][d]
        if aid is not None:
            x = h
            while x < v and nxt[x] >= 0:
                x = nxt[x]
            if x == v:
                return False
        nxt[v] = h if aid is not None else -1
    return True


def _dfs(opts, prefix: Sequence[int]) -> Iterator[Forest]:
    n = len(opts)
    out: list[Optional[int]] = [None] * n
    nxt = [-1] * n
    if not _prefix_ok(opts, prefix, nxt):
        return
    k = len(prefix)
    for v, d in enumerate(prefix):
        out[v] = opts[v][d][0]
    if k == n:
        yield tuple(out)
        return
    pos = [0] * n
    v = k
    while v >= k:
        ov = opts[v]
        if pos[v] >= len(ov):
            v -= 1
            if v >= k:
                pos[v] += 1
            continue
        aid, h = ov[pos[v]]
        if aid is not None:
            x = h
            while x < v and nxt[x] >= 0:
                x = nxt[x]
            if x == v:
                pos[v] += 1
                continue
            nxt[v] = h
        else:
            nxt[v] = -1
        out[v] = aid
        if v == n - 1:
            yield tuple(out)
            pos[v] += 1
        else:
            v += 1
            pos[v] = 0


def _prefix_ranges(g: Digraph, pieces: int) -> list[list[tuple[int, ...]]]:
    """Split the counter space into contiguous ranges of leading digits."""
    radix = [g.out_degree(v) + 1 for v in range(g.n_vertices)]
    k, total = 0, 1
    while k < len(radix) and total < 4 * pieces:
        total *= radix[k]
        k += 1
    prefixes = list(itertools.product(*[range(r) for r in radix[:k]]))
    size = -(-len(prefixes) // pieces)
    return [prefixes[i : i + size] for i in range(0, len(prefixes), size)]


def enumerate_forests(g: Digraph, budget: Optional[int] = None) -> Iterator[Forest]:
    """Every rooted forest of ``g`` exactly once, in counter order."""
    check_budget(g, budget)
    return _dfs(_options(g), ())


def _forests_in(g: Digraph, prefixes) -> Iterator[Forest]:
    opts = _options(g)
    for prefix in prefixes:
        yield from _dfs(opts, prefix)


def parallel_reduce(
    g: Digraph,
    task: Callable[[Digraph, list], object],
    merge: Callable[[list], object],
    threads: int = 1,
    budget: Optional[int] = None,
):
    """Run ``task(g, prefixes)`` over disjoint counter ranges and merge.

    ``task`` must be a module-level function so worker processes can import it.
    Results reach ``merge`` in range order, so the outcome does not depend on
    scheduling.
    """
    check_budget(g, budget)
    if threads <= 1:
        return merge([task(g, [()])])
    ranges = _prefix_ranges(g, threads)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(task, [g] * len(ranges), ranges))
    return merge(parts)


# -- the brute-force forest enumerator --------------------------------------


def _arc_factors(g: Digraph) -> list[tuple[int, int]]:
    """Per arc: (packed monomial, integer coefficient)."""
    out = []
    for a in g.arcs:
        if isinstance(a.weight, Var):
            out.append((_pack({a.weight: 1}), 1))
        else:
            out.append((0, a.weight))
    return out


def _enumerator_task(g: Digraph, prefixes) -> Polynomial:
    factors = _arc_factors(g)
    t_mono = _pack({T: 1})
    acc: dict[int, int] = {}
    for forest in _forests_in(g, prefixes):
        mono = 0
        coef = 1
        for aid in forest:
            if aid is None:
                mono += t_mono
            else:
                m, c = factors[aid]
                mono += m
                if c != 1:
                    coef *= c
        if coef:
            acc[mono] = acc.get(mono, 0) + coef
    # packed keys are only meaningful in this process; the Polynomial pickles
    # itself structurally on the way back from a worker
    return Polynomial({k: c for k, c in acc.items() if c})


def _sum_polys(parts: list) -> Polynomial:
    total = Polynomial()
    for p in parts:
        total = total + p
    return total


def brute_force_enumerator(g: Digraph, budget: Optional[int] = None, threads: int = 1) -> Polynomial:
    """Sum over rooted forests F of t^(number of roots) times the weight of F."""
    return parallel_reduce(g, _enumerator_task, _sum_polys, threads, budget)


def forest_count(g: Digraph, budget: Optional[int] = None) -> int:
    return sum(1 for _ in enumerate_forests(g, budget))


def rooted_trees(g: Digraph, root: Optional[int] = None, budget: Optional[int] = None) -> Iterator[Forest]:
    """Spanning trees (single root), optionally with a prescribed root."""
    for f in enumerate_forests(g, budget):
        roots = [v for v, aid in enumerate(f) if aid is None]
        if len(roots) == 1 and (root is None or roots[0] == root):
            yield f


# -- projections and spins ----------------------------------------------------


class ProjectionKey(NamedTuple):
    """Per base arc: straight and diagonal copy counts; per base vertex: vertical count."""

    straight: tuple[int, ...]
    diagonal: tuple[int, ...]
    vertical: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(u for u, c in enumerate(self.vertical) if c)

    def to_json(self) -> dict:
        return {"straight": list(self.straight), "diagonal": list(self.diagonal), "vertical": list(self.vertical)}


class ProductLayout:
    """How each arc of a product graph projects onto its base graph."""

    def __init__(self, g: Digraph):
        if g.labels is None or not all(isinstance(lb, tuple) and len(lb) == 2 for lb in g.labels):
            raise MissingTags("product vertices must be labelled (base vertex, layer)")
        self.base_vertex = [lb[0] for lb in g.labels]
        self.n_base = max(self.base_vertex) + 1
        n_arcs = 0
        for i, a in enumerate(g.arcs):
            if not a.vertical:
                if a.base_arc is None:
                    raise MissingTags(f"arc {i} has neither a vertical tag nor a base_arc tag")
                n_arcs = max(n_arcs, a.base_arc + 1)
        self.n_base_arcs = n_arcs
        # per arc: (0 straight | 1 diagonal | 2 vertical, slot, spin)
        self.kind = []
        for a in g.arcs:
            if a.vertical:
                self.kind.append((2, self.base_vertex[a.tail], a.spin))
            elif a.diagonal:
                self.kind.append((1, a.base_arc, None))
            else:
                self.kind.append((0, a.base_arc, None))

    def key(self, forest: Forest) -> ProjectionKey:
        straight = [0] * self.n_base_arcs
        diagonal = [0] * self.n_base_arcs
        vertical = [0] * self.n_base
        kind = self.kind
        for aid in forest:
            if aid is None:
                continue
            k, slot, _ = kind[aid]
            if k == 0:
                straight[slot] += 1
            elif k == 1:
                diagonal[slot] += 1
            else:
                vertical[slot] += 1
        return ProjectionKey(tuple(straight), tuple(diagonal), tuple(vertical))

    def vertical_arcs(self, forest: Forest) -> dict[int, list[int]]:
        """Base vertex -> sorted vertical arc ids of the forest there."""
        out: dict[int, list[int]] = {}
        for aid in forest:
            if aid is not None and self.kind[aid][0] == 2:
                out.setdefault(self.kind[aid][1], []).append(aid)
        return {u: sorted(v) for u, v in out.items()}

    def spin_record(self, forest: Forest, mode: str = "spin") -> tuple:
        """Tuple over the vertical support, in base-vertex order.

        ``spin``: the single spin at u (products with K_2); ``multispin``: the
        sorted head layers at u; ``subforest``: the vertical arc ids at u.
        """
        verts = self.vertical_arcs(forest)
        rec = []
        for u in sorted(verts):
            arcs = verts[u]
            if mode == "subforest":
                rec.append(tuple(arcs))
            elif mode == "multispin":
                rec.append(tuple(sorted(self.kind[a][2] for a in arcs)))
            elif mode == "spin":
                if len(arcs) != 1:
                    raise ValueError("spin records need at most one vertical arc per base vertex")
                rec.append(self.kind[arcs[0]][2])
            else:
                raise ValueError(f"unknown record mode {mode!r}")
        return tuple(rec)

    def multispin_of(self, subforest_record: tuple) -> tuple:
        return tuple(tuple(sorted(self.kind[a][2] for a in arcs)) for arcs in subforest_record)


def projection_classes(g_product: Digraph, budget: Optional[int] = None) -> dict[ProjectionKey, list[Forest]]:
    layout = ProductLayout(g_product)
    classes: dict[ProjectionKey, list[Forest]] = {}
    for f in enumerate_forests(g_product, budget):
        classes.setdefault(layout.key(f), []).append(f)
    return dict(sorted(classes.items()))


def spin_distribution(g_product: Digraph, forests: Sequence[Forest], mode: str = "spin") -> Counter:
    layout = ProductLayout(g_product)
    return Counter(layout.spin_record(f, mode) for f in forests)


def _class_stats_task(args_g, prefixes):
    g, mode = args_g
    layout = ProductLayout(g)
    stats: dict = {}
    for f in _forests_in(g, prefixes):
        key = layout.key(f)
        rec = layout.spin_record(f, mode)
        c = stats.get(key)
        if c is None:
            c = stats[key] = Counter()
        c[rec] += 1
    return stats


def _merge_stats(parts: list) -> dict:
    merged: dict = {}
    for part in parts:
        for key, cnt in part.items():
            merged.setdefault(key, Counter()).update(cnt)
    return dict(sorted(merged.items()))


def class_statistics(
    g_product: Digraph, mode: str = "spin", budget: Optional[int] = None, threads: int = 1
) -> dict[ProjectionKey, Counter]:
    """Projection key -> Counter of spin records, streamed (forests are not kept)."""
    ProductLayout(g_product)  # fail fast on missing tags
    check_budget(g_product, budget)
    if threads <= 1:
        return _merge_stats([_class_stats_task((g_product, mode), [()])])
    ranges = _prefix_ranges(g_product, threads)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_class_stats_task, [(g_product, mode)] * len(ranges), ranges))
    return _merge_stats(parts)
