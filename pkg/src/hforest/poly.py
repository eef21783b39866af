"""Sparse multivariate Laurent polynomials with integer coefficients.

Internally a monomial is packed into one Python int: the exponent of the
variable interned at slot ``s`` occupies a signed digit of width ``_W`` bits
at position ``s``.  Monomial multiplication is then integer addition, and
comparing packed ints is a lex order on slots (highest slot first), which is a
valid monomial order for exact division.  Rendering and every public view
decode back to structured ``Var`` objects, so slot numbering never leaks.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Var",
    "Monomial",
    "Polynomial",
    "NonInvertibleBinding",
    "DegenerateResultant",
    "t",
    "x",
    "y",
    "w",
    "wd",
    "q",
    "yv",
    "s",
    "add",
    "mul",
    "substitute",
    "coefficient_of",
    "resultant",
    "canonical_string",
    "parse_var",
]

_W = 32
_BASE = 1 << _W
_HALF = 1 << (_W - 1)
_MASK = _BASE - 1


class NonInvertibleBinding(ValueError):
    """A variable with a negative exponent was bound to a non-unit."""


class DegenerateResultant(ValueError):
    """Both operands of a resultant are constant in the eliminated variable."""


# Kinds in canonical order after ``t``; the order here only matters for ties
# in the rendered output, it is fixed once and for all.
_KINDS = ("t", "s", "q", "w", "wd", "x", "y", "yv")


@dataclass(frozen=True, order=False)
class Var:
    """Structured variable symbol, e.g. ``Var("x", (1, 0))`` renders ``x1_0``."""

    kind: str
    index: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @property
    def sort_key(self) -> tuple:
        if self.kind == "t":
            return (0, "", ())
        return (1, self.kind, self.index)

    def __lt__(self, other: "Var") -> bool:
        return self.sort_key < other.sort_key

    @property
    def name(self) -> str:
        if not self.index:
            return self.kind
        return self.kind + "_".join(str(i) for i in self.index)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Var({self.name})"


_VAR_RE = re.compile(r"^(t|s|y|q|w|wd|x|yv)(\d+(?:_\d+)*)?$")
_ARITY = {"t": 0, "s": 0, "y": 0, "q": 1, "w": 1, "wd": 1, "x": 2, "yv": 2}


def parse_var(name: str) -> Var:
    """Inverse of ``Var.name``."""
    m = _VAR_RE.match(name)
    if not m:
        raise ValueError(f"not a variable name: {name!r}")
    kind, rest = m.group(1), m.group(2)
    index = tuple(int(p) for p in rest.split("_")) if rest else ()
    if len(index) != _ARITY[kind]:
        raise ValueError(f"not a variable name: {name!r}")
    return Var(kind, index)


# Append-only intern table.  Each process builds its own; pickling goes
# through the structured form (see Polynomial.__reduce__).
_SLOT: dict[Var, int] = {}
_SLOT_VARS: list[Var] = []


def _slot(v: Var) -> int:
    try:
        return _SLOT[v]
    except KeyError:
        _SLOT[v] = len(_SLOT_VARS)
        _SLOT_VARS.append(v)
        return _SLOT[v]


def _pack(exps: Mapping[Var, int]) -> int:
    m = 0
    for v, e in exps.items():
        if e:
            if not -_HALF <= e < _HALF:
                raise OverflowError("exponent out of range")
            m += e << (_W * _slot(v))
    return m


def _unpack(m: int) -> list[tuple[int, int]]:
    out = []
    slot = 0
    while m:
        d = m & _MASK
        if d >= _HALF:
            d -= _BASE
        if d:
            out.append((slot, d))
        m = (m - d) >> _W
        slot += 1
    return out


def _exponent(m: int, slot: int) -> int:
    shift = _W * slot
    if shift:
        low = m & ((1 << shift) - 1)
        if low >= 1 << (shift - 1):
            low -= 1 << shift
        m = (m - low) >> shift
    d = m & _MASK
    return d - _BASE if d >= _HALF else d


class Monomial(Mapping):
    """Read-only view of a monomial as ``Var -> exponent`` (zeros omitted)."""

    __slots__ = ("_packed", "_items")

    def __init__(self, exps: Union[Mapping[Var, int], None] = None, *, _packed=None):
        if _packed is None:
            _packed = _pack(exps or {})
        self._packed = _packed
        self._items = {_SLOT_VARS[sl]: e for sl, e in _unpack(_packed)}

    def __getitem__(self, v: Var) -> int:
        return self._items[v]

    def __iter__(self) -> Iterator[Var]:
        return iter(sorted(self._items))

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return hash(frozenset(self._items.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, Monomial):
            return self._items == other._items
        return NotImplemented

    def __repr__(self) -> str:
        return _monomial_str(self._items) or "1"


Coercible = Union["Polynomial", int]


class Polynomial:
    """Immutable element of Z[vars, vars^-1]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[int, int], None] = None):
        # ``terms`` maps packed monomials to nonzero ints; callers inside this
        # module guarantee canonical form.
        self._terms: dict[int, int] = dict(terms) if terms else {}
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls({0: c} if c else None)

    @classmethod
    def var(cls, v: Var, exp: int = 1) -> "Polynomial":
        return cls({_pack({v: exp}): 1})

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Mapping[Var, int], int]]) -> "Polynomial":
        acc: dict[int, int] = {}
        for exps, c in terms:
            if c:
                k = _pack(exps)
                acc[k] = acc.get(k, 0) + c
        return cls({k: c for k, c in acc.items() if c})

    @staticmethod
    def coerce(value: Coercible) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, int):
            return Polynomial.const(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to Polynomial")

    def __reduce__(self):
        return (Polynomial.from_terms, ([(dict(m), c) for m, c in self.terms()],))

    # -- inspection -------------------------------------------------------

    def terms(self) -> list[tuple[Monomial, int]]:
        return [(Monomial(_packed=k), c) for k, c in self._terms.items()]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get(0, 0)

    def variables(self) -> list[Var]:
        slots = set()
        for k in self._terms:
            slots.update(sl for sl, _ in _unpack(k))
        return sorted(_SLOT_VARS[sl] for sl in slots)

    def degree(self, v: Var) -> int:
        """Largest exponent of ``v`` (0 for the zero polynomial)."""
        sl = _slot(v)
        return max((_exponent(k, sl) for k in self._terms), default=0)

    def min_degree(self, v: Var) -> int:
        sl = _slot(v)
        return min((_exponent(k, sl) for k in self._terms), default=0)

    def coefficient_of(self, v: Var, k: int) -> "Polynomial":
        sl = _slot(v)
        shift = k << (_W * sl)
        out = {}
        for m, c in self._terms.items():
            if _exponent(m, sl) == k:
                out[m - shift] = c
        return Polynomial(out)

    def coefficients_in(self, v: Var) -> dict[int, "Polynomial"]:
        sl = _slot(v)
        buckets: dict[int, dict[int, int]] = {}
        for m, c in self._terms.items():
            e = _exponent(m, sl)
            buckets.setdefault(e, {})[m - (e << (_W * sl))] = c
        return {e: Polynomial(d) for e, d in buckets.items()}

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Coercible) -> "Polynomial":
        other = Polynomial.coerce(other)
        if len(other._terms) > len(self._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: Coercible) -> "Polynomial":
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other: Coercible) -> "Polynomial":
        return Polynomial.coerce(other) + (-self)

    def __mul__(self, other: Coercible) -> "Polynomial":
        if isinstance(other, int):
            if not other:
                return Polynomial()
            return Polynomial({k: c * other for k, c in self._terms.items()})
        other = Polynomial.coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial()
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Polynomial({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            if len(self._terms) != 1:
                raise ValueError("negative power of a non-monomial")
            ((k, c),) = self._terms.items()
            if c not in (1, -1):
                raise ValueError("negative power of a non-unit monomial")
            return Polynomial({k * e: c ** (-e)})
        result = Polynomial.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div(self, divisor: Coercible) -> "Polynomial":
        """Quotient of an exact division; raises ArithmeticError otherwise."""
        divisor = Polynomial.coerce(divisor)
        if not divisor:
            raise ZeroDivisionError("polynomial division by zero")
        dt = divisor._terms
        if len(dt) == 1:
            ((kd, cd),) = dt.items()
            out = {}
            for k, c in self._terms.items():
                qc, r = divmod(c, cd)
                if r:
                    raise ArithmeticError("inexact division")
                out[k - kd] = qc
            return Polynomial(out)
        lead = max(dt)
        lead_c = dt[lead]
        rest = [(k - lead, c) for k, c in dt.items() if k != lead]
        if not self._terms:
            return Polynomial()
        floor = min(self._terms) - min(dt)
        rem = dict(self._terms)
        heap = [-k for k in rem]
        heapq.heapify(heap)
        quot = {}
        while rem:
            k = -heapq.heappop(heap)
            c = rem.pop(k, 0)
            if not c:
                continue
            qc, r = divmod(c, lead_c)
            if r:
                raise ArithmeticError("inexact division")
            qk = k - lead
            if qk < floor:
                # Laurent division never stalls, so detect inexactness by bound
                raise ArithmeticError("inexact division")
            quot[qk] = qc
            for off, dc in rest:
                nk = k + off
                v = rem.get(nk, 0) - qc * dc
                if v:
                    if nk not in rem:
                        heapq.heappush(heap, -nk)
                    rem[nk] = v
                else:
                    rem.pop(nk, None)
        return Polynomial(quot)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- substitution -----------------------------------------------------

    def substitute(self, bindings: Mapping[Var, Coercible]) -> "Polynomial":
        """Image under the ring map sending each bound variable to its value."""
        if not bindings:
            return self
        bound = {_slot(v): Polynomial.coerce(p) for v, p in bindings.items()}
        cache: dict[tuple[int, int], Polynomial] = {}

        def power(sl: int, e: int) -> Polynomial:
            key = (sl, e)
            if key not in cache:
                val = bound[sl]
                if e < 0:
                    if len(val._terms) != 1 or next(iter(val._terms.values())) not in (1, -1):
                        raise NonInvertibleBinding(
                            f"{_SLOT_VARS[sl].name} has a negative exponent "
                            f"but is bound to {canonical_string(val)}"
                        )
                cache[key] = val**e
            return cache[key]

        acc: dict[int, int] = {}
        groups: dict[tuple, dict[int, int]] = {}
        for m, c in self._terms.items():
            free = m
            sig = []
            for sl, e in _unpack(m):
                if sl in bound:
                    free -= e << (_W * sl)
                    sig.append((sl, e))
            if not sig:
                acc[m] = acc.get(m, 0) + c
                continue
            g = groups.setdefault(tuple(sig), {})
            g[free] = g.get(free, 0) + c
        result = Polynomial({k: c for k, c in acc.items() if c})
        for sig, free_terms in groups.items():
            image = Polynomial.const(1)
            for sl, e in sig:
                image = image * power(sl, e)
            result = result + image * Polynomial({k: c for k, c in free_terms.items() if c})
        return result

    # -- rendering --------------------------------------------------------

    def __str__(self) -> str:
        return canonical_string(self)

    def __repr__(self) -> str:
        return f"Polynomial({canonical_string(self)!r})"


def _monomial_str(items: Mapping[Var, int]) -> str:
    parts = []
    for v in sorted(items):
        e = items[v]
        parts.append(v.name if e == 1 else f"{v.name}^{e}")
    return "*".join(parts)


def canonical_string(p: Polynomial) -> str:
    """Deterministic rendering: descending lex on exponent vectors, t first.

    >>> canonical_string((Polynomial.var(t) + 1) ** 2)
    't^2 + 2*t + 1'
    """
    if not p._terms:
        return "0"
    decoded = [({_SLOT_VARS[sl]: e for sl, e in _unpack(k)}, c) for k, c in p._terms.items()]
    allvars = sorted({v for items, _ in decoded for v in items})
    decoded.sort(key=lambda ic: tuple(-ic[0].get(v, 0) for v in allvars))
    out = []
    for i, (items, c) in enumerate(decoded):
        mono = _monomial_str(items)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# -- variable helpers -------------------------------------------------------

T = Var("t")
_slot(T)  # t always owns slot 0


def t() -> Polynomial:
    return Polynomial.var(T)


def x(i: int, eps: int) -> Polynomial:
    return Polynomial.var(Var("x", (i, eps)))


def y() -> Polynomial:
    return Polynomial.var(Var("y"))


def w(a: int) -> Polynomial:
    return Polynomial.var(Var("w", (a,)))


def wd(a: int) -> Polynomial:
    return Polynomial.var(Var("wd", (a,)))


def q(i: int) -> Polynomial:
    return Polynomial.var(Var("q", (i,)))


def yv(i: int, eps: int) -> Polynomial:
    return Polynomial.var(Var("yv", (i, eps)))


def s() -> Polynomial:
    return Polynomial.var(Var("s"))


# -- functional API ---------------------------------------------------------


def add(a: Coercible, b: Coercible) -> Polynomial:
    return Polynomial.coerce(a) + b


def mul(a: Coercible, b: Coercible) -> Polynomial:
    return Polynomial.coerce(a) * b


def substitute(p: Polynomial, bindings: Mapping[Var, Coercible]) -> Polynomial:
    return p.substitute(bindings)


def coefficient_of(p: Polynomial, v: Var, k: int) -> Polynomial:
    return p.coefficient_of(v, k)


def sylvester_matrix(a: Polynomial, b: Polynomial, v: Var) -> list[list[Polynomial]]:
    if a.min_degree(v) < 0 or b.min_degree(v) < 0:
        raise ValueError(f"negative exponent of {v.name} in resultant operand")
    m, n = a.degree(v), b.degree(v)
    if m == 0 and n == 0:
        raise DegenerateResultant(f"both operands are constant in {v.name}")
    ca, cb = a.coefficients_in(v), b.coefficients_in(v)
    zero = Polynomial()
    # rows hold coefficients from the highest power down
    acoef = [ca.get(m - j, zero) for j in range(m + 1)]
    bcoef = [cb.get(n - j, zero) for j in range(n + 1)]
    size = m + n
    rows = []
    for r in range(n):
        rows.append([zero] * r + acoef + [zero] * (size - m - 1 - r))
    for r in range(m):
        rows.append([zero] * r + bcoef + [zero] * (size - n - 1 - r))
    return rows


def resultant(a: Polynomial, b: Polynomial, v: Var) -> Polynomial:
    """Determinant of the Sylvester matrix of ``a`` and ``b`` in ``v``."""
    from .laplacian import PolyMatrix, det_bareiss

    rows = sylvester_matrix(a, b, v)
    if not rows:
        return Polynomial.const(1)
    return det_bareiss(PolyMatrix(rows))
