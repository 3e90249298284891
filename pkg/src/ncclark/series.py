"""Truncated multivariate power series and the Cayley/Herglotz pair.

A :class:`TruncatedSeries` stores a dense coefficient vector aligned with the
graded basis of multi-indices ``|n| <= N``. Truncation is always by total
degree. Products truncate at the smaller of the two degrees.

A :class:`Multiplier` wraps the Taylor table of a contractive multiplier
``b``. Builtin multipliers (see :mod:`ncclark.builtins`) also carry an exact
evaluator, used for point values, and can regenerate their table at any
degree.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from ._basis import MonomialBasis, monomial_basis


class SingularityError(ZeroDivisionError):
    """Division by a series or value that vanishes where it must not."""


class TruncatedSeries:
    """Power series in ``d`` variables truncated at total degree ``N``.

    Parameters
    ----------
    d, N : int
    coeffs : array_like, optional
        Dense vector aligned with ``monomial_basis(d, N)``. Zero when omitted.

    Examples
    --------
    >>> z1 = TruncatedSeries.variable(2, 2, 0)
    >>> ((1 + z1) * (1 - z1)).coefficient((2, 0))
    (-1+0j)
    """

    __slots__ = ("d", "N", "coeffs")
    __array_priority__ = 100

    def __init__(self, d: int, N: int, coeffs=None):
        self.d = int(d)
        self.N = int(N)
        size = len(monomial_basis(self.d, self.N))
        if coeffs is None:
            arr = np.zeros(size, dtype=np.complex128)
        else:
            arr = np.array(coeffs, dtype=np.complex128).reshape(-1)
            if arr.size != size:
                raise ValueError(f"expected {size} coefficients for d={d}, N={N}, got {arr.size}")
        arr.setflags(write=False)
        self.coeffs = arr

    # constructors

    @classmethod
    def constant(cls, d: int, N: int, c: complex) -> "TruncatedSeries":
        v = np.zeros(len(monomial_basis(d, N)), dtype=np.complex128)
        v[0] = c
        return cls(d, N, v)

    @classmethod
    def one(cls, d: int, N: int) -> "TruncatedSeries":
        return cls.constant(d, N, 1.0)

    @classmethod
    def variable(cls, d: int, N: int, j: int) -> "TruncatedSeries":
        """The coordinate ``z_{j+1}`` (``j`` is 0-based)."""
        basis = monomial_basis(d, N)
        v = np.zeros(len(basis), dtype=np.complex128)
        if N >= 1:
            v[basis.unit(j)] = 1.0
        return cls(d, N, v)

    @classmethod
    def linear(cls, d: int, N: int, coefficients: Sequence[complex], const: complex = 0.0):
        """``const + sum_j coefficients[j] z_j``."""
        basis = monomial_basis(d, N)
        v = np.zeros(len(basis), dtype=np.complex128)
        v[0] = const
        if N >= 1:
            for j, c in enumerate(coefficients):
                v[basis.unit(j)] = c
        return cls(d, N, v)

    @classmethod
    def from_dict(cls, d: int, N: int, table: Mapping[Sequence[int], complex]) -> "TruncatedSeries":
        basis = monomial_basis(d, N)
        v = np.zeros(len(basis), dtype=np.complex128)
        for n, c in table.items():
            n = tuple(n)
            if len(n) != d:
                raise ValueError(f"index {n} has wrong dimension")
            if sum(n) > N:
                raise ValueError(f"index {n} exceeds truncation degree {N}")
            v[basis.index(n)] += c
        return cls(d, N, v)

    # structure

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(self.d, self.N)

    def coefficient(self, n: Sequence[int]) -> complex:
        n = tuple(n)
        if sum(n) > self.N:
            raise KeyError(f"index {n} beyond truncation degree {self.N}")
        return complex(self.coeffs[self.basis.index(n)])

    def to_dict(self, tol: float = 0.0) -> dict:
        return {
            tuple(int(x) for x in n): complex(c)
            for n, c in zip(self.basis.exps, self.coeffs)
            if abs(c) > tol
        }

    def truncate(self, N: int) -> "TruncatedSeries":
        """Restrict to degree ``N`` (``N`` may exceed the current degree; new terms are zero)."""
        if N == self.N:
            return self
        k = len(monomial_basis(self.d, min(N, self.N)))
        v = np.zeros(len(monomial_basis(self.d, N)), dtype=np.complex128)
        v[:k] = self.coeffs[:k]
        return TruncatedSeries(self.d, N, v)

    def constant_term(self) -> complex:
        return complex(self.coeffs[0])

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    # arithmetic

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.d != self.d:
                raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")
            return other
        if np.isscalar(other):
            return TruncatedSeries.constant(self.d, self.N, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        N = min(self.N, other.N)
        return TruncatedSeries(self.d, N, self.truncate(N).coeffs + other.truncate(N).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.d, self.N, -self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.d, self.N, self.coeffs * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ts_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            if other == 0:
                raise SingularityError("division by zero scalar")
            return TruncatedSeries(self.d, self.N, self.coeffs / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ts_mul(self, ts_reciprocal(other))

    def __rtruediv__(self, other):
        return ts_reciprocal(self) * other

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = TruncatedSeries.one(self.d, self.N)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def conj_coeffs(self) -> "TruncatedSeries":
        """Series with conjugated coefficients (``z -> conj(f(conj z))``)."""
        return TruncatedSeries(self.d, self.N, self.coeffs.conj())

    def __call__(self, z):
        return ts_evaluate(self, z)

    def __repr__(self) -> str:
        nz = int(np.count_nonzero(self.coeffs))
        return f"TruncatedSeries(d={self.d}, N={self.N}, nonzero={nz})"

    # serialization

    def to_json(self) -> dict:
        rows = [
            [int(x) for x in n] + [float(c.real), float(c.imag)]
            for n, c in zip(self.basis.exps, self.coeffs)
            if c != 0
        ]
        return {"d": self.d, "N": self.N, "coeffs": rows}

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncatedSeries":
        d, N = int(data["d"]), int(data["N"])
        table = {}
        for row in data.get("coeffs", []):
            if len(row) != d + 2:
                raise ValueError(f"coefficient row {row} must hold {d} indices plus re, im")
            n = tuple(int(x) for x in row[:d])
            table[n] = table.get(n, 0j) + complex(row[d], row[d + 1])
        return cls.from_dict(d, N, table)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def ts_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(a.N, b.N)``."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    N = min(a.N, b.N)
    a, b = a.truncate(N), b.truncate(N)
    return TruncatedSeries(a.d, N, _kernels.series_mul(a.coeffs, b.coeffs, a.basis))


def ts_reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """``1/a`` solved by total degree.

    Raises
    ------
    SingularityError
        If the constant term is zero.
    """
    if a.coeffs[0] == 0:
        raise SingularityError("series with zero constant term has no reciprocal")
    return TruncatedSeries(a.d, a.N, _kernels.series_reciprocal(a.coeffs, a.basis))


def ts_evaluate(a: TruncatedSeries, z) -> complex | np.ndarray:
    """Partial sum at a point, or at each row of a 2-D array of points."""
    pts = np.asarray(z, dtype=np.complex128)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != a.d:
        raise ValueError(f"points must have {a.d} coordinates")
    vals = _kernels.series_eval(a.coeffs, a.basis.exps, pts)
    return complex(vals[0]) if single else vals


def geometric_tail(r: float, N: int) -> float:
    """Bound ``r**(N+1)/(1-r)`` for the tail of a series with coefficients of modulus <= 1."""
    if r >= 1:
        return float("inf")
    return r ** (N + 1) / (1 - r)


@dataclass
class Multiplier:
    """A contractive multiplier ``b`` given by its Taylor table.

    Parameters
    ----------
    series : TruncatedSeries
    label : str, optional
        Builtin name, if any.
    exact : callable, optional
        ``exact(points) -> values`` evaluating ``b`` without truncation error.
    factory : callable, optional
        ``factory(N) -> TruncatedSeries`` regenerating the table at degree ``N``.
    """

    series: TruncatedSeries
    label: Optional[str] = None
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    factory: Optional[Callable[[int], TruncatedSeries]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.series.d < 1:
            raise ValueError("dimension must be >= 1")
        b0 = self.series.constant_term()
        if not abs(b0) < 1:
            raise ValueError(f"|b(0)| must be < 1, got {abs(b0):.6g}")

    @property
    def d(self) -> int:
        return self.series.d

    @property
    def N(self) -> int:
        return self.series.N

    @property
    def b0(self) -> complex:
        return self.series.constant_term()

    def at_degree(self, N: int) -> "Multiplier":
        """The same multiplier with its table at degree ``N``.

        Builtins regenerate exactly. A user table can only be truncated; asking
        for more degrees than it holds raises ``ValueError``.
        """
        if N == self.N:
            return self
        if self.factory is not None:
            return Multiplier(self.factory(N), self.label, self.exact, self.factory)
        if N > self.N:
            raise ValueError(f"table known to degree {self.N}, degree {N} requested")
        return Multiplier(self.series.truncate(N), self.label)

    def __call__(self, z):
        """Value of ``b`` at a point or at each row of an array of points."""
        pts = np.asarray(z, dtype=np.complex128)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if self.exact is not None:
            vals = np.asarray(self.exact(pts), dtype=np.complex128)
        else:
            vals = ts_evaluate(self.series, pts)
        return complex(vals[0]) if single else vals

    def tail_bound(self, r: float) -> float:
        """Truncation error bound at radius ``r``; zero when an exact evaluator exists."""
        if self.exact is not None:
            return 0.0
        return geometric_tail(r, self.N)

    def to_json(self) -> dict:
        out = self.series.to_json()
        if self.label:
            out["label"] = self.label
        return out


def cayley_herglotz(b: Multiplier, alpha: complex = 1.0) -> TruncatedSeries:
    """``f = (1 + conj(alpha) b) / (1 - conj(alpha) b)`` as a truncated series."""
    _check_unimodular(alpha)
    ab = b.series * np.conj(alpha)
    return (1 + ab) / (1 - ab)


def inverse_cayley(f: TruncatedSeries, label: str | None = None) -> Multiplier:
    """Recover ``b = (f - 1)/(f + 1)``."""
    if abs(f.constant_term() + 1) == 0:
        raise SingularityError("f(0) = -1 has no inverse Cayley transform")
    return Multiplier((f - 1) / (f + 1), label)


def _check_unimodular(alpha: complex, tol: float = 1e-12) -> None:
    if abs(abs(alpha) - 1) > tol:
        raise ValueError(f"alpha must be unimodular, got |alpha| = {abs(alpha):.15g}")


def restriction_warning(b: Multiplier, directions: int = 16, radius: float = 0.95, seed: int = 0) -> bool:
    """Warn when a one-variable slice of ``b`` leaves the closed unit disk.

    Returns True if a warning was issued. This is a necessary condition only.
    A user table is tested as the polynomial it stores.
    """
    rng = np.random.default_rng(seed)
    zeta = rng.normal(size=(directions, b.d)) + 1j * rng.normal(size=(directions, b.d))
    zeta /= np.linalg.norm(zeta, axis=1, keepdims=True)
    theta = np.exp(2j * np.pi * np.arange(64) / 64)
    pts = (radius * theta[:, None, None] * zeta[None, :, :]).reshape(-1, b.d)
    sup = float(np.abs(b(pts)).max())
    if sup > 1 + 1e-8:
        warnings.warn(
            f"multiplier exceeds modulus 1 on a one-variable slice (sup {sup:.6g}); "
            "it is not contractive",
            RuntimeWarning,
            stacklevel=2,
        )
        return True
    return False
