"""Positive functionals on the operator system, at finite degree.

Convention. With ``L^(n)`` the sum of ``L_w`` over words of letter count
``n``, one has ``(zL*)^k = sum_{|n| = k} z^n L^(n)*``, hence

    f(z) - i Im f(0) = mu(I) + 2 sum_{|n| >= 1} z^n mu(L^(n)*)

for the Herglotz function ``f`` of a state ``mu``. Reading off Taylor
coefficients ``a_n`` of ``f`` gives ``mu(I) = Re a_0`` and
``mu(L^(n)) = conj(a_n) / 2``.

Under this convention a measure-induced state satisfies
``mu(L^(n)) = (|n|!/n!) * integral zeta^n dmu``; see :func:`measure_moments`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import builtins as _builtins
from ._basis import monomial_basis
from ._config import check_basis_size
from .freealg import Word, letter_count, orbit_size, words
from .series import Multiplier, TruncatedSeries, _check_unimodular, cayley_herglotz

DEFAULT_QE_THRESHOLD = 1e-6

CONVENTION = {
    "symmetrizedMonomial": "L^(n) = sum over words w with letter count n of L_w",
    "resolvent": "(I - zL*)^-1 = sum_n z^n L^(n)*",
    "momentsFromHerglotz": "mu(I) = Re a_0, mu(L^(n)) = conj(a_n)/2",
    "measureMoments": "mu(L^(n)) = (|n|!/n!) * integral zeta^n dmu",
}


class PreconditionError(ValueError):
    """Input does not meet a mathematical precondition of the operation."""


@dataclass(frozen=True)
class MomentState:
    """Moment table ``n -> mu(L^(n))`` for ``|n| <= N``.

    ``moments`` is a dense vector aligned with ``monomial_basis(d, N)``.
    """

    d: int
    N: int
    moments: np.ndarray
    provenance: str = "explicit"

    def __post_init__(self):
        m = np.array(self.moments, dtype=np.complex128).reshape(-1)
        if m.size != len(monomial_basis(self.d, self.N)):
            raise ValueError("moment vector does not match basis size")
        if abs(m[0].imag) > 1e-12 * max(1.0, abs(m[0])) or m[0].real < 0:
            raise ValueError(f"mu(I) must be real and >= 0, got {m[0]}")
        m[0] = m[0].real
        m.setflags(write=False)
        object.__setattr__(self, "moments", m)

    @property
    def basis(self):
        return monomial_basis(self.d, self.N)

    @property
    def mass(self) -> float:
        return float(self.moments[0].real)

    def moment(self, n: Sequence[int]) -> complex:
        return complex(self.moments[self.basis.index(n)])

    def truncate(self, N: int) -> "MomentState":
        if N > self.N:
            raise ValueError(f"state known to degree {self.N}, degree {N} requested")
        return MomentState(self.d, N, self.moments[: len(monomial_basis(self.d, N))], self.provenance)

    def to_json(self) -> dict:
        rows = [
            [int(x) for x in n] + [float(c.real), float(c.imag)]
            for n, c in zip(self.basis.exps, self.moments)
        ]
        return {"d": self.d, "N": self.N, "moments": rows, "provenance": self.provenance}

    @classmethod
    def from_json(cls, data: Mapping) -> "MomentState":
        d, N = int(data["d"]), int(data["N"])
        basis = monomial_basis(d, N)
        m = np.zeros(len(basis), dtype=np.complex128)
        for row in data["moments"]:
            if len(row) != d + 2:
                raise ValueError(f"moment row {row} must hold {d} indices plus re, im")
            m[basis.index(row[:d])] = complex(row[d], row[d + 1])
        return cls(d, N, m, str(data.get("provenance", "explicit")))


def ac_state(b: Multiplier, alpha: complex = 1.0, N: Optional[int] = None) -> MomentState:
    """Aleksandrov-Clark state ``mu_alpha`` of ``b`` to degree ``N``.

    Parameters
    ----------
    b : Multiplier
        Its table must reach degree ``N`` (builtins regenerate as needed).
    alpha : complex
        Unimodular.
    N : int, optional
        Defaults to the degree of ``b``.
    """
    _check_unimodular(alpha)
    N = b.N if N is None else N
    if b.N < N:
        b = b.at_degree(N)
    elif b.N > N:
        b = b.at_degree(N)
    f = cayley_herglotz(b, alpha)
    m = f.coeffs.conj() / 2
    m[0] = f.coeffs[0].real
    prov = f"acState({b.label or 'table'},alpha={_fmt_alpha(alpha)})"
    return MomentState(b.d, N, m, prov)


def _fmt_alpha(alpha: complex) -> str:
    alpha = complex(alpha)
    return f"{alpha.real:.17g}{alpha.imag:+.17g}j"


def vacuum_state(d: int, N: int) -> MomentState:
    m = np.zeros(len(monomial_basis(d, N)), dtype=np.complex128)
    m[0] = 1.0
    return MomentState(d, N, m, "vacuum")


def measure_moments(points: Sequence[Sequence[complex]], weights: Sequence[float], N: int) -> np.ndarray:
    """Plain moments ``integral zeta^n dmu`` of an atomic measure, aligned with the basis."""
    pts = np.asarray(points, dtype=np.complex128)
    w = np.asarray(weights, dtype=np.float64)
    basis = monomial_basis(pts.shape[1], N)
    mono = np.prod(pts[:, None, :] ** basis.exps[None, :, :], axis=2)
    return w @ mono


def orbit_vector(d: int, N: int) -> np.ndarray:
    """``|n|!/n!`` for each index of ``monomial_basis(d, N)`` as floats."""
    basis = monomial_basis(d, N)
    return np.array([float(orbit_size(tuple(int(x) for x in n))) for n in basis.exps])


def state_from_atoms(points: Sequence[Sequence[complex]], weights: Sequence[float], N: int):
    """State and multiplier of the measure ``sum_k w_k delta_{zeta_k}``.

    Returns
    -------
    (MomentState, Multiplier)
    """
    b = _builtins.atoms(points, weights, N)
    mu = ac_state(b, 1.0, N)
    return MomentState(mu.d, mu.N, mu.moments, "atomicMeasure"), b


def herglotz_from_state(mu: MomentState, imag0: float = 0.0) -> TruncatedSeries:
    """Inverse of the moment extraction: ``f`` with ``Im f(0) = imag0``."""
    a = 2 * mu.moments.conj()
    a[0] = mu.mass + 1j * imag0
    return TruncatedSeries(mu.d, mu.N, a)


# word states


@dataclass(frozen=True)
class WordState:
    """Values ``nu(L_w)`` for words of length ``<= max_len``.

    ``identity_repr`` optionally records how ``[I]`` is written in terms of
    the degree-1-and-up words, which the extended GNS space needs for the
    adjoint of left concatenation at the empty word.
    """

    d: int
    max_len: int
    word_moments: Mapping[Word, complex]
    identity_repr: Mapping[Word, complex] = field(default_factory=dict)
    provenance: str = "explicit"

    def __getitem__(self, w: Sequence[int]) -> complex:
        return self.word_moments[tuple(w)]

    def to_json(self) -> dict:
        def rows(m):
            return [[list(w), float(np.real(c)), float(np.imag(c))] for w, c in sorted(m.items(), key=lambda t: (len(t[0]), t[0]))]

        return {
            "d": self.d,
            "maxLen": self.max_len,
            "wordMoments": rows(self.word_moments),
            "identityRepr": rows(self.identity_repr),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "WordState":
        def parse(rows):
            return {tuple(int(x) for x in r[0]): complex(r[1], r[2]) for r in rows}

        return cls(
            int(data["d"]),
            int(data["maxLen"]),
            parse(data["wordMoments"]),
            parse(data.get("identityRepr", [])),
            str(data.get("provenance", "explicit")),
        )


def extend_to_words(mu: MomentState, max_len: int, gns_degree: Optional[int] = None,
                    threshold: float = DEFAULT_QE_THRESHOLD) -> WordState:
    """Extend a quasi-extreme state from symmetrized monomials to all words.

    With ``w = i_1 ... i_m`` and ``i = i_m``, the value is
    ``nu(L_w) = < S_{i_{m-1}}* ... S_{i_1}* S_i* [L_i], [L_i] >``, computed
    with the GNS tuple at ``gns_degree`` (default ``mu.N // 2``).

    Raises
    ------
    PreconditionError
        If the squared distance from ``[I]`` to the span of the higher
        monomials is not below ``threshold``.
    """
    from .gns import build_gns_space, build_gns_tuple

    n_g = mu.N // 2 if gns_degree is None else gns_degree
    if n_g < 1:
        raise ValueError("extension needs a GNS degree of at least 1")
    check_basis_size(sum(mu.d**k for k in range(max_len + 1)), f"word state d={mu.d}, max_len={max_len}")
    space = build_gns_space(mu, n_g)
    tup = build_gns_tuple(space)
    if not tup.distance_sq < threshold:
        raise PreconditionError(
            f"state is not quasi-extreme at degree {n_g}: squared distance {tup.distance_sq:.6g} "
            f">= threshold {threshold:g}"
        )
    G = space.gram
    basis = space.basis
    d = mu.d
    unit_vecs = []
    for i in range(d):
        e = np.zeros(len(basis), dtype=np.complex128)
        e[basis.unit(i)] = 1.0
        unit_vecs.append(e)
    out: dict[Word, complex] = {(): complex(mu.mass)}
    for i in range(d):
        target = unit_vecs[i]
        start = tup.apply_adjoint(i, target)

        def walk(prefix: tuple, vec: np.ndarray):
            # prefix u = i_1..i_k has been applied; record nu(L_{u i})
            out[prefix + (i + 1,)] = complex(np.vdot(vec, G @ target))
            if len(prefix) + 1 >= max_len:
                return
            for j in range(d):
                walk(prefix + (j + 1,), tup.apply_adjoint(j, vec))

        walk((), start)
    c_words: dict[Word, complex] = {}
    for pos in range(1, len(basis)):
        coeff = tup.identity_coeffs[pos]
        if coeff == 0:
            continue
        n = tuple(int(x) for x in basis.exps[pos])
        for w in _words_with_count(n):
            c_words[w] = complex(coeff)
    return WordState(d, max_len, out, c_words, f"extension({mu.provenance},gnsDegree={n_g})")


def _words_with_count(n):
    from .freealg import words_with_count

    return words_with_count(n)


def word_consistency(nu: WordState, mu: MomentState, max_degree: int = 4) -> float:
    """Max over ``|n| <= max_degree`` of ``|sum_{lambda(w)=n} nu(L_w) - mu(L^(n))|``."""
    totals: dict[tuple, complex] = {}
    for w, v in nu.word_moments.items():
        if len(w) <= max_degree:
            n = letter_count(w, nu.d)
            totals[n] = totals.get(n, 0j) + v
    worst = 0.0
    basis = mu.basis
    for pos in range(basis.up_to(min(max_degree, mu.N, nu.max_len))):
        n = tuple(int(x) for x in basis.exps[pos])
        worst = max(worst, abs(totals.get(n, 0j) - mu.moments[pos]))
    return worst


# disintegration


@dataclass
class DisintegrationReport:
    lhs: complex
    rhs: complex
    error: float
    nodes: int
    z: np.ndarray

    def to_json(self) -> dict:
        return {
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "error": self.error,
            "nodes": self.nodes,
            "z": [[c.real, c.imag] for c in self.z],
        }


def disintegration_check(b: Multiplier, z: Sequence[complex], nodes: int = 512) -> DisintegrationReport:
    """Trapezoid average over the circle of ``alpha -> mu_alpha((I - zL*)^-1)``.

    The integrand is ``(1 - b(z) conj(b0)) / ((1 - conj(alpha) b(z)) (1 - alpha conj(b0)))``.
    The average should equal the vacuum value 1.
    """
    z = np.asarray(z, dtype=np.complex128)
    if not np.linalg.norm(z) < 1:
        raise ValueError("z must lie in the open unit ball")
    if nodes < 1:
        raise ValueError("need at least one quadrature node")
    bz = b(z)
    b0 = b.b0
    alpha = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = (1 - bz * np.conj(b0)) / ((1 - np.conj(alpha) * bz) * (1 - alpha * np.conj(b0)))
    lhs = complex(vals.mean())
    return DisintegrationReport(lhs, 1.0 + 0j, abs(lhs - 1.0), nodes, z)


def disintegration_by_moments(b: Multiplier, z: Sequence[complex], nodes: int = 64, degree: int | None = None) -> complex:
    """Same average, with each ``mu_alpha((I - zL*)^-1) = sum_n z^n conj(mu_alpha(L^(n)))`` from moments."""
    z = np.asarray(z, dtype=np.complex128)
    N = b.N if degree is None else degree
    basis = monomial_basis(b.d, N)
    zpow = np.prod(z[None, :] ** basis.exps, axis=1)
    acc = 0j
    for k in range(nodes):
        alpha = np.exp(2j * np.pi * k / nodes)
        mu = ac_state(b, alpha, N)
        acc += zpow @ mu.moments.conj()
    return acc / nodes
