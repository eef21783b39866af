"""Symbolic Laplacians, fraction-free determinants and the matrix-tree enumerator."""

from __future__ import annotations

from typing import Sequence

from .graph import Digraph, cartesian_product
from .poly import T, Polynomial, Var, resultant

__all__ = [
    "PolyMatrix",
    "laplacian",
    "det_bareiss",
    "forest_enumerator_det",
    "rooted_tree_enumerator_det",
    "kronecker_sum",
    "kronecker_sum_check",
    "product_resultant_sides",
    "product_resultant_check",
]

S = Var("s")


class PolyMatrix:
    """Square matrix of polynomials; treated as immutable once built."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        rows = [[Polynomial.coerce(e) for e in r] for r in rows]
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("PolyMatrix must be square")
        self.rows = rows

    @classmethod
    def zeros(cls, dim: int) -> "PolyMatrix":
        return cls([[0] * dim for _ in range(dim)])

    @classmethod
    def identity(cls, dim: int, scalar=1) -> "PolyMatrix":
        return cls([[scalar if i == j else 0 for j in range(dim)] for i in range(dim)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.rows == other.rows

    def kron(self, other: "PolyMatrix") -> "PolyMatrix":
        p, q = self.dim, other.dim
        out = [[Polynomial()] * (p * q) for _ in range(p * q)]
        for i in range(p):
            for j in range(p):
                a = self.rows[i][j]
                if not a:
                    continue
                for k in range(q):
                    for l in range(q):
                        b = other.rows[k][l]
                        if b:
                            out[i * q + k][j * q + l] = a * b
        return PolyMatrix(out)

    def minor(self, drop: int) -> "PolyMatrix":
        return PolyMatrix([[e for j, e in enumerate(r) if j != drop] for i, r in enumerate(self.rows) if i != drop])

    def __repr__(self) -> str:
        return "PolyMatrix(" + repr([[str(e) for e in r] for r in self.rows]) + ")"


def laplacian(g: Digraph) -> PolyMatrix:
    """L[i][j] = -w(i,j) off the diagonal, L[i][i] = total weight leaving i.

    Parallel arcs add their weights; a loop would enter both the diagonal sum
    and w(i,i), so it cancels and is skipped outright.
    """
    n = g.n_vertices
    rows = [[Polynomial()] * n for _ in range(n)]
    for a in g.arcs:
        if a.tail == a.head:
            continue
        wt = a.weight_poly()
        rows[a.tail][a.head] = rows[a.tail][a.head] - wt
        rows[a.tail][a.tail] = rows[a.tail][a.tail] + wt
    return PolyMatrix(rows)


def det_bareiss(m: PolyMatrix) -> Polynomial:
    """Fraction-free Gaussian elimination; every division is exact."""
    n = m.dim
    if n == 0:
        return Polynomial.const(1)
    a = [list(r) for r in m.rows]
    sign = 1
    prev = Polynomial.const(1)
    for k in range(n - 1):
        if not a[k][k]:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Polynomial()
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            lead = row_i[k]
            for j in range(k + 1, n):
                num = row_i[j] * pivot
                if lead and row_k[j]:
                    num = num - lead * row_k[j]
                row_i[j] = num.exact_div(prev) if num else num
            row_i[k] = Polynomial()
        prev = pivot
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def forest_enumerator_det(g: Digraph) -> Polynomial:
    """det(L(g) + t*I): the rooted-forest enumerator by the matrix-tree theorem."""
    n = g.n_vertices
    return det_bareiss(laplacian(g) + PolyMatrix.identity(n, Polynomial.var(T)))


def rooted_tree_enumerator_det(g: Digraph, root: int) -> Polynomial:
    """Weighted count of spanning trees directed toward ``root``."""
    return det_bareiss(laplacian(g).minor(root))


def kronecker_sum(lg: PolyMatrix, lh: PolyMatrix) -> PolyMatrix:
    return lg.kron(PolyMatrix.identity(lh.dim)) + PolyMatrix.identity(lg.dim).kron(lh)


def kronecker_sum_check(g: Digraph, h: Digraph) -> bool:
    return laplacian(cartesian_product(g, h)) == kronecker_sum(laplacian(g), laplacian(h))


def product_resultant_sides(g: Digraph, h: Digraph) -> tuple[Polynomial, Polynomial]:
    """(det enumerator of g x h, resultant form built from F_g and F_h)."""
    lhs = forest_enumerator_det(cartesian_product(g, h))
    fg = forest_enumerator_det(g)
    fh = forest_enumerator_det(h)
    s = Polynomial.var(S)
    t = Polynomial.var(T)
    # monic in s with roots at the Laplacian eigenvalues of g
    a = fg.substitute({T: -s})
    if g.n_vertices % 2:
        a = -a
    b = fh.substitute({T: t + s})
    return lhs, resultant(a, b, S)


def product_resultant_check(g: Digraph, h: Digraph) -> bool:
    lhs, rhs = product_resultant_sides(g, h)
    return lhs == rhs
