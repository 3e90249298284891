"""Free semigroup combinatorics, symmetrized monomials and a Fock-space oracle.

Words are tuples of letters in ``1..d``. A multi-index ``n`` labels the
symmetrized monomial ``L^(n)``, the sum of ``L_w`` over all words ``w`` whose
letter count is ``n``. The identity ``I`` is ``L^(0)``.

The product ``L^(n)* L^(m)`` of two symmetrized monomials is again a multiple
of a single symmetrized monomial or its adjoint (:func:`sym_product`), which is
what makes the span of the ``L^(n)`` and their adjoints an operator system.
:func:`fock_build` and :func:`fock_evaluate` give an independent matrix model
on truncated Fock space to check that rule against.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from ._config import check_basis_size

MultiIndex = tuple[int, ...]
Word = tuple[int, ...]

_INT64_MAX = 2**63 - 1


def _as_index(n: Iterable[int]) -> MultiIndex:
    out = tuple(int(x) for x in n)
    if any(x < 0 for x in out):
        raise ValueError(f"multi-index entries must be nonnegative: {out}")
    return out


def letter_count(w: Sequence[int], d: int) -> MultiIndex:
    """Number of occurrences of each letter ``1..d`` in ``w``.

    >>> letter_count((1, 2, 1, 1), 2)
    (3, 1)
    """
    counts = [0] * d
    for letter in w:
        if not 1 <= letter <= d:
            raise ValueError(f"letter {letter} outside 1..{d}")
        counts[letter - 1] += 1
    return tuple(counts)


@lru_cache(maxsize=4096)
def orbit_size(n: MultiIndex) -> int:
    """Number of words with letter count ``n``, the multinomial ``|n|!/n!``.

    Raises
    ------
    OverflowError
        If the count does not fit in a signed 64-bit integer.
    """
    n = _as_index(n)
    value = factorial(sum(n))
    for x in n:
        value //= factorial(x)
    if value > _INT64_MAX:
        raise OverflowError(f"orbit size of {n} exceeds 64-bit range; reduce the degree")
    return value


def index_leq(n: MultiIndex, m: MultiIndex) -> bool:
    """Componentwise order ``n <= m``."""
    return all(a <= b for a, b in zip(n, m))


def words(d: int, max_len: int) -> list[Word]:
    """All words of length ``<= max_len``, shortlex ordered."""
    out: list[Word] = []
    for k in range(max_len + 1):
        out.extend(itertools.product(range(1, d + 1), repeat=k))
    return out


def words_with_count(n: MultiIndex) -> Iterator[Word]:
    """Enumerate the words ``w`` with ``letter_count(w) == n``."""
    n = list(_as_index(n))
    total = sum(n)

    def rec(prefix):
        if len(prefix) == total:
            yield tuple(prefix)
            return
        for j, left in enumerate(n):
            if left:
                n[j] -= 1
                prefix.append(j + 1)
                yield from rec(prefix)
                prefix.pop()
                n[j] += 1

    yield from rec([])


@dataclass(frozen=True)
class SymElement:
    """Finite combination ``sum_n plus[n] L^(n) + sum_n minus[n] L^(n)*``.

    The identity lives only in ``plus`` under the zero index. Coefficients are
    never pruned implicitly; call :meth:`prune` for that.
    """

    d: int
    plus: Mapping[MultiIndex, complex] = field(default_factory=dict)
    minus: Mapping[MultiIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        plus = {}
        for n, c in dict(self.plus).items():
            n = _as_index(n)
            if len(n) != self.d:
                raise ValueError(f"index {n} has wrong dimension for d={self.d}")
            plus[n] = plus.get(n, 0j) + complex(c)
        minus = {}
        for n, c in dict(self.minus).items():
            n = _as_index(n)
            if len(n) != self.d:
                raise ValueError(f"index {n} has wrong dimension for d={self.d}")
            if sum(n) == 0:
                plus[n] = plus.get(n, 0j) + complex(c)
                continue
            minus[n] = minus.get(n, 0j) + complex(c)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    @classmethod
    def identity(cls, d: int, scale: complex = 1.0) -> "SymElement":
        return cls(d, {(0,) * d: scale})

    @classmethod
    def monomial(cls, n: Sequence[int], coeff: complex = 1.0, adjoint: bool = False) -> "SymElement":
        n = _as_index(n)
        if adjoint:
            return cls(len(n), {}, {n: coeff})
        return cls(len(n), {n: coeff})

    @classmethod
    def zero(cls, d: int) -> "SymElement":
        return cls(d)

    @property
    def in_s(self) -> bool:
        """True when there is no adjoint part."""
        return not any(self.minus.values())

    def degree(self) -> int:
        idx = [n for n, c in self.plus.items() if c] + [n for n, c in self.minus.items() if c]
        return max((sum(n) for n in idx), default=0)

    def __add__(self, other: "SymElement") -> "SymElement":
        self._check(other)
        plus = dict(self.plus)
        for n, c in other.plus.items():
            plus[n] = plus.get(n, 0j) + c
        minus = dict(self.minus)
        for n, c in other.minus.items():
            minus[n] = minus.get(n, 0j) + c
        return SymElement(self.d, plus, minus)

    def __neg__(self) -> "SymElement":
        return self.scale(-1.0)

    def __sub__(self, other: "SymElement") -> "SymElement":
        return self + (-other)

    def scale(self, c: complex) -> "SymElement":
        return SymElement(
            self.d,
            {n: c * v for n, v in self.plus.items()},
            {n: c * v for n, v in self.minus.items()},
        )

    def adjoint(self) -> "SymElement":
        plus = {n: np.conj(c) for n, c in self.minus.items()}
        minus = {}
        for n, c in self.plus.items():
            if sum(n) == 0:
                plus[n] = plus.get(n, 0j) + np.conj(c)
            else:
                minus[n] = np.conj(c)
        return SymElement(self.d, plus, minus)

    def prune(self, tol: float = 1e-14) -> "SymElement":
        return SymElement(
            self.d,
            {n: c for n, c in self.plus.items() if abs(c) >= tol},
            {n: c for n, c in self.minus.items() if abs(c) >= tol},
        )

    def close_to(self, other: "SymElement", tol: float = 0.0) -> bool:
        self._check(other)
        for a, b in ((self.plus, other.plus), (self.minus, other.minus)):
            for n in set(a) | set(b):
                if abs(a.get(n, 0j) - b.get(n, 0j)) > tol:
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymElement) or other.d != self.d:
            return NotImplemented
        return self.close_to(other, 0.0)

    __hash__ = None  # mutable-looking mapping fields; equality is by value

    def _check(self, other: "SymElement"):
        if other.d != self.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")

    def to_json(self) -> dict:
        def rows(m):
            return [list(n) + [float(np.real(c)), float(np.imag(c))] for n, c in sorted(m.items())]

        return {"d": self.d, "plus": rows(self.plus), "minus": rows(self.minus)}

    @classmethod
    def from_json(cls, data: Mapping) -> "SymElement":
        d = int(data["d"])

        def parse(rows):
            out = {}
            for row in rows:
                if len(row) != d + 2:
                    raise ValueError(f"row {row} does not have {d} index entries plus re, im")
                out[tuple(int(x) for x in row[:d])] = complex(row[d], row[d + 1])
            return out

        return cls(d, parse(data.get("plus", [])), parse(data.get("minus", [])))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def sym_product(n: Sequence[int], m: Sequence[int]) -> SymElement:
    """The element ``L^(n)* L^(m)``.

    Returns ``(|n|!/n!) L^(m-n)`` when ``n <= m``, ``(|m|!/m!) L^(n-m)*``
    when ``m <= n`` and zero for incomparable indices.

    >>> sym_product((1, 1), (1, 1)).plus
    {(0, 0): (2+0j)}
    """
    n, m = _as_index(n), _as_index(m)
    if len(n) != len(m):
        raise ValueError("indices of different dimension")
    d = len(n)
    if index_leq(n, m):
        diff = tuple(b - a for a, b in zip(n, m))
        return SymElement(d, {diff: float(orbit_size(n))})
    if index_leq(m, n):
        diff = tuple(a - b for a, b in zip(n, m))
        return SymElement(d, {}, {diff: float(orbit_size(m))})
    return SymElement(d)


def sym_element_product(p: SymElement, q: SymElement) -> SymElement:
    """``p(L)* q(L)`` for ``p, q`` in the span of the ``L^(n)``; conjugate-linear in ``p``."""
    p._check(q)
    if not (p.in_s and q.in_s):
        raise ValueError("sym_element_product takes elements without adjoint parts")
    out = SymElement(p.d)
    for n, a in p.plus.items():
        for m, c in q.plus.items():
            if a and c:
                out = out + sym_product(n, m).scale(np.conj(a) * c)
    return out


def vacuum_moment(n: Sequence[int]) -> complex:
    """Vacuum state value on ``L^(n)``: 1 at the zero index, else 0."""
    return 1.0 + 0j if sum(_as_index(n)) == 0 else 0j


@dataclass(frozen=True)
class FockTruncation:
    """Creation operators on words of length ``<= max_len``.

    ``matrices[j]`` is the sparse 0/1 matrix of ``L_{j+1}``; images of
    length ``max_len + 1`` are dropped.
    """

    d: int
    max_len: int
    basis: tuple[Word, ...]
    index: Mapping[Word, int]
    matrices: tuple[sp.csr_matrix, ...]

    @property
    def size(self) -> int:
        return len(self.basis)

    def columns_up_to(self, length: int) -> np.ndarray:
        """Positions of the basis words of length ``<= length``."""
        return np.array([i for i, w in enumerate(self.basis) if len(w) <= length], dtype=np.int64)


def fock_build(d: int, max_len: int) -> FockTruncation:
    """Build the truncated creation operators ``L_1..L_d``."""
    if d < 1 or max_len < 1:
        raise ValueError("need d >= 1 and max_len >= 1")
    size = sum(d**k for k in range(max_len + 1))
    check_basis_size(size, f"Fock truncation d={d}, max_len={max_len}")
    basis = tuple(words(d, max_len))
    index = {w: i for i, w in enumerate(basis)}
    mats = []
    for j in range(1, d + 1):
        rows, cols = [], []
        for i, w in enumerate(basis):
            if len(w) < max_len:
                rows.append(index[(j,) + w])
                cols.append(i)
        mats.append(
            sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(size, size))
        )
    return FockTruncation(d, max_len, basis, index, tuple(mats))


def _fock_monomials(F: FockTruncation, top: int) -> dict[MultiIndex, sp.csr_matrix]:
    """``L^(n)`` for all ``|n| <= top`` through ``L^(n) = sum_j L_j L^(n - e_j)``."""
    d = F.d
    eye = sp.identity(F.size, dtype=np.int64, format="csr")
    table = {(0,) * d: eye}
    for k in range(1, top + 1):
        for n in _indices_of_degree(d, k):
            acc = None
            for j in range(d):
                if n[j]:
                    prev = n[:j] + (n[j] - 1,) + n[j + 1 :]
                    term = F.matrices[j] @ table[prev]
                    acc = term if acc is None else acc + term
            table[n] = acc.tocsr()
    return table


def _indices_of_degree(d: int, k: int) -> list[MultiIndex]:
    from ._basis import _compositions

    return list(_compositions(k, d))


def fock_evaluate(e: SymElement, F: FockTruncation, _table=None) -> sp.csr_matrix:
    """Matrix of ``e`` on the truncated Fock space (complex sparse)."""
    if e.d != F.d:
        raise ValueError("dimension mismatch between element and Fock truncation")
    top = e.degree()
    if top > F.max_len:
        raise ValueError(f"element degree {top} exceeds max_len {F.max_len}")
    table = _table if _table is not None else _fock_monomials(F, top)
    out = sp.csr_matrix((F.size, F.size), dtype=np.complex128)
    for n, c in e.plus.items():
        if c:
            out = out + c * table[n]
    for n, c in e.minus.items():
        if c:
            out = out + c * table[n].T.conj()
    return out.tocsr()


@dataclass
class OracleReport:
    d: int
    max_len: int
    max_degree: int
    pairs: int
    max_abs_error: float
    worst_pair: tuple | None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "maxLen": self.max_len,
            "maxDegree": self.max_degree,
            "pairs": self.pairs,
            "maxAbsError": self.max_abs_error,
            "worstPair": [list(p) for p in self.worst_pair] if self.worst_pair else None,
        }


def fock_oracle(d: int, max_len: int = 6, max_degree: int = 3) -> OracleReport:
    """Compare :func:`sym_product` against Fock matrices for all ``|n|, |m| <= max_degree``.

    Each comparison is made on the columns of words of length
    ``<= max_len - max(|n|, |m|)``, where neither side is affected by the
    truncation of the Fock space.
    """
    F = fock_build(d, max_len)
    table = _fock_monomials(F, max_degree)
    idx = [n for k in range(max_degree + 1) for n in _indices_of_degree(d, k)]
    worst, worst_pair = 0.0, None
    col_cache: dict[int, np.ndarray] = {}
    for n in idx:
        ln_h = table[n].T.conj().tocsr()
        for m in idx:
            top = max(sum(n), sum(m))
            cols = col_cache.setdefault(top, F.columns_up_to(max_len - top))
            lhs = fock_evaluate(sym_product(n, m), F, table)[:, cols]
            rhs = (ln_h @ table[m])[:, cols]
            diff = lhs - rhs
            err = float(abs(diff).max()) if diff.nnz else 0.0
            if err > worst or worst_pair is None:
                worst, worst_pair = max(err, worst), (n, m)
    return OracleReport(d, max_len, max_degree, len(idx) ** 2, worst, worst_pair)
