"""GNS spaces of moment states at finite degree.

Vectors of ``P^2(mu)`` are coefficient vectors ``x`` over the graded monomial
basis; ``x`` stands for the class ``[sum_m x_m L^(m)]``. The Gram matrix
``G[n, m] = mu(L^(n)* L^(m))`` is the metric, ``<x, y> = y^H G x``. It is
usually singular; it is never inverted. Least squares use the regularized
normal equations and metric-relative norms use an eigendecomposition of
``G`` with a floor on the eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from ._basis import MonomialBasis, monomial_basis
from ._config import check_basis_size
from .freealg import Word, words
from .states import DEFAULT_QE_THRESHOLD, MomentState, PreconditionError, WordState, orbit_vector

REG_EPS = 1e-10
# metric eigenvalues below EIG_FLOOR * max(1, largest) count as null
EIG_FLOOR = 1e-8


def cross_gram(mu: MomentState, row_basis: MonomialBasis, col_basis: MonomialBasis) -> np.ndarray:
    """``G[p, q] = mu(L^(n_p)* L^(m_q))`` for two (possibly different) bases."""
    return _kernels.gram_block(
        row_basis.exps,
        col_basis.exps,
        mu.moments,
        mu.basis,
        orbit_vector(row_basis.d, row_basis.N),
        orbit_vector(col_basis.d, col_basis.N),
    )


def gram_matrix(mu: MomentState, N: int) -> np.ndarray:
    basis = monomial_basis(mu.d, N)
    return cross_gram(mu, basis, basis)


@dataclass(frozen=True)
class GnsSpace:
    """``P^2(mu)`` truncated to monomials of degree ``<= N``."""

    mu: MomentState
    N: int
    basis: MonomialBasis
    gram: np.ndarray = field(repr=False)

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        """``<x, y> = y^H G x``."""
        return complex(np.vdot(y, self.gram @ x))

    def norm_sq(self, x: np.ndarray) -> float:
        return float(np.real(np.vdot(x, self.gram @ x)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.gram)[0])

    def to_json(self) -> dict:
        return {
            "d": self.mu.d,
            "N": self.N,
            "basis": self.basis.exps.tolist(),
            "gram": complex_matrix_json(self.gram),
        }


def build_gns_space(mu: MomentState, N: int, require_double: bool = True) -> GnsSpace:
    """Assemble the Gram matrix of ``P^2(mu)`` at degree ``N``.

    Parameters
    ----------
    require_double : bool
        Enforce ``mu.N >= 2N``. The Gram entries only reach degree ``N``;
        the stricter default keeps every downstream check on the same footing.
    """
    if N < 0:
        raise ValueError("degree must be >= 0")
    if require_double and mu.N < 2 * N:
        raise ValueError(f"state has moments to degree {mu.N}; degree {2 * N} needed for N={N}")
    if mu.N < N:
        raise ValueError(f"state has moments to degree {mu.N}; degree {N} needed")
    basis = monomial_basis(mu.d, N)
    check_basis_size(len(basis), f"GNS basis d={mu.d}, N={N}")
    G = gram_matrix(mu, N)
    G = (G + G.conj().T) / 2
    return GnsSpace(mu, N, basis, G)


def project_identity(space: GnsSpace, degree: Optional[int] = None, eps: float = REG_EPS, refine: int = 2):
    """Best approximation of ``[I]`` from monomials of degree ``1..degree``.

    Returns
    -------
    coeffs : ndarray
        Full-basis vector (zero at index 0) of the approximant.
    dist_sq : float
        ``mu(I) - 2 Re(c^H g0) + c^H G0 c`` clamped at zero.
    """
    degree = space.N if degree is None else min(degree, space.N)
    k = space.basis.up_to(degree)
    G = space.gram
    G0 = G[1:k, 1:k]
    g0 = G[1:k, 0]
    out = np.zeros(len(space.basis), dtype=np.complex128)
    if k <= 1:
        return out, float(G[0, 0].real)
    A = G0 + eps * np.eye(k - 1)
    c = np.linalg.solve(A, g0)
    for _ in range(refine):
        # iterative refinement removes the O(eps) bias of the regularized solve
        c = c + np.linalg.solve(A, g0 - G0 @ c)
    dist = G[0, 0].real - 2 * np.real(np.vdot(c, g0)) + np.real(np.vdot(c, G0 @ c))
    out[1:k] = c
    return out, max(0.0, float(dist))


def quasi_extreme_distance(space: GnsSpace, eps: float = REG_EPS) -> float:
    """Squared distance from ``[I]`` to the span of ``[L^(n)]``, ``1 <= |n| <= N``."""
    return project_identity(space, eps=eps)[1]


def distance_curve(mu: MomentState, degrees: Sequence[int], eps: float = REG_EPS) -> list[float]:
    """Squared distances at each degree in ``degrees``, from one Gram at the largest degree."""
    top = max(degrees)
    space = build_gns_space(mu, top, require_double=False)
    return [project_identity(space, n, eps)[1] for n in degrees]


@dataclass(frozen=True)
class GnsTuple:
    """The tuple ``S_j* [p] = P0 [L_j* p(L)]`` in monomial coordinates.

    ``matrices[j]`` acts on full-basis vectors: a column ``m`` with
    ``m_j >= 1, |m| >= 2`` goes to ``m - e_j``, the column ``e_j`` goes to the
    projection of ``[I]`` and the column of ``I`` goes to ``S_j*`` of that
    projection. Restricting rows and columns to ``|m| >= 1`` gives the
    operators on ``P^2_0(mu)``.
    """

    space: GnsSpace
    identity_coeffs: np.ndarray = field(repr=False)
    distance_sq: float
    projection_degree: int
    matrices: tuple = field(repr=False)

    @property
    def d(self) -> int:
        return self.space.mu.d

    @property
    def s0_matrices(self) -> list[np.ndarray]:
        return [A[1:, 1:] for A in self.matrices]

    @property
    def gram0(self) -> np.ndarray:
        return self.space.gram[1:, 1:]

    def apply_adjoint(self, j: int, x: np.ndarray) -> np.ndarray:
        return self.matrices[j] @ x

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.space.N,
            "projectionDegree": self.projection_degree,
            "distanceSq": self.distance_sq,
            "basis": self.space.basis.exps.tolist(),
            "identityCoeffs": [[c.real, c.imag] for c in self.identity_coeffs],
            "matrices": [complex_matrix_json(A) for A in self.matrices],
        }


def build_gns_tuple(space: GnsSpace, projection_degree: Optional[int] = None) -> GnsTuple:
    """Backward-shift tuple on ``P^2(mu)``.

    Parameters
    ----------
    projection_degree : int, optional
        Degree used to project ``[I]``. Defaults to the smallest degree at
        which the squared distance drops below the quasi-extremality
        threshold, or ``space.N`` if it never does. Low-degree projections
        avoid roundoff from large orbit sizes without changing the class.
    """
    basis = space.basis
    K = len(basis)
    d = space.mu.d
    if projection_degree is None:
        projection_degree = space.N
        for n in range(1, space.N + 1):
            if project_identity(space, n)[1] < DEFAULT_QE_THRESHOLD:
                projection_degree = n
                break
    c, dist = project_identity(space, projection_degree)
    mats = []
    for j in range(d):
        A = np.zeros((K, K), dtype=np.complex128)
        if space.N >= 1:
            src = basis.shift_down(j)
            ej = basis.unit(j)
            cols = np.nonzero((src >= 0) & (basis.degrees >= 2))[0]
            A[src[cols], cols] = 1.0
            A[:, ej] = c
            A[:, 0] = A @ c
        mats.append(A)
    return GnsTuple(space, c, dist, projection_degree, tuple(mats))


def metric_frame(G: np.ndarray, floor: float = EIG_FLOOR) -> np.ndarray:
    """Columns ``W`` with ``W^H G W = I`` spanning the non-null part of ``G``.

    Eigenvalues at or below ``floor * max(1, lambda_max)`` are treated as null.
    """
    lam, V = np.linalg.eigh((G + G.conj().T) / 2)
    keep = lam > floor * max(1.0, float(lam[-1]) if lam.size else 1.0)
    return V[:, keep] / np.sqrt(lam[keep])


def metric_norm(D: np.ndarray, G: np.ndarray, floor: float = EIG_FLOOR) -> float:
    """Largest ``|x^H D x| / x^H G x`` over the non-null part of ``G``."""
    W = metric_frame(G, floor)
    if W.shape[1] == 0:
        return 0.0
    M = W.conj().T @ D @ W
    return float(np.abs(np.linalg.eigvalsh((M + M.conj().T) / 2)).max())


def _s0_block(tup: GnsTuple, degree: int) -> np.ndarray:
    return np.arange(1, tup.space.basis.up_to(degree))


def coisometry_defect(tup: GnsTuple, floor: float = EIG_FLOOR) -> float:
    """Norm of ``I - sum_j S_j S_j*`` on ``P^2_0`` vectors of degree ``<= N - 1``."""
    G = tup.space.gram
    idx = _s0_block(tup, tup.space.N - 1)
    if idx.size == 0:
        return 0.0
    D = G[np.ix_(idx, idx)].copy()
    for A in tup.matrices:
        B = A[:, idx]
        D -= B.conj().T @ G @ B
    return metric_norm(D, G[np.ix_(idx, idx)], floor)


def row_contraction_norm(tup: GnsTuple, floor: float = EIG_FLOOR) -> float:
    """Largest eigenvalue of ``sum_j S_j S_j*`` on the truncated ``P^2_0``."""
    G = tup.space.gram
    idx = _s0_block(tup, tup.space.N)
    if idx.size == 0:
        return 0.0
    Gs = G[np.ix_(idx, idx)]
    Q = np.zeros_like(Gs)
    for A in tup.matrices:
        B = A[:, idx]
        Q += B.conj().T @ G @ B
    W = metric_frame(Gs, floor)
    if W.shape[1] == 0:
        return 0.0
    M = W.conj().T @ Q @ W
    return float(np.linalg.eigvalsh((M + M.conj().T) / 2).max())


def gns_vector_state(tup: GnsTuple, n: Sequence[int], threshold: float = DEFAULT_QE_THRESHOLD,
                     _memo: Optional[dict] = None) -> complex:
    """The value ``< S^(n) [I], [I] >`` of the GNS vector state.

    Raises
    ------
    PreconditionError
        If the state is not quasi-extreme at the tuple's projection degree.
    """
    if not tup.distance_sq < threshold:
        raise PreconditionError(
            f"vector-state identity needs a quasi-extreme state; squared distance {tup.distance_sq:.6g}"
        )
    n = tuple(int(x) for x in n)
    if sum(n) > max(tup.space.N - 1, 0):
        raise ValueError(f"|n| must be <= N - 1 = {tup.space.N - 1}")
    memo = {} if _memo is None else _memo
    T = _adjoint_power(tup, n, memo)
    G = tup.space.gram
    return complex(np.conj(G[0] @ T))


def _adjoint_power(tup: GnsTuple, n: tuple, memo: dict) -> np.ndarray:
    # S^(n)* [I] = sum_j S_j* S^(n - e_j)* [I]
    if n in memo:
        return memo[n]
    if sum(n) == 0:
        v = np.zeros(len(tup.space.basis), dtype=np.complex128)
        v[0] = 1.0
    else:
        v = 0
        for j, nj in enumerate(n):
            if nj:
                prev = n[:j] + (nj - 1,) + n[j + 1 :]
                v = v + tup.apply_adjoint(j, _adjoint_power(tup, prev, memo))
    memo[n] = v
    return v


def vector_state_error(tup: GnsTuple, max_degree: Optional[int] = None) -> float:
    """Max ``|<S^(n)[I],[I]> - mu(L^(n))|`` over ``|n| <= max_degree`` (default ``N - 1``)."""
    top = tup.space.N - 1 if max_degree is None else max_degree
    basis = tup.space.basis
    mu = tup.space.mu
    memo: dict = {}
    worst = 0.0
    for pos in range(basis.up_to(top)):
        n = tuple(int(x) for x in basis.exps[pos])
        worst = max(worst, abs(gns_vector_state(tup, n, _memo=memo) - mu.moments[pos]))
    return worst


# extended GNS on words


@dataclass(frozen=True)
class ExtendedGns:
    nu: WordState
    words: tuple
    index: dict = field(repr=False)
    gram: np.ndarray = field(repr=False)
    shifts: tuple = field(repr=False)
    adjoint_shifts: tuple = field(repr=False)

    def inner_words(self, length: int) -> np.ndarray:
        return np.array([i for i, w in enumerate(self.words) if len(w) <= length], dtype=np.int64)


def build_extended_gns(nu: WordState) -> ExtendedGns:
    """Gram of ``Q^2(nu)`` on words and the left-concatenation tuple."""
    ws = tuple(words(nu.d, nu.max_len))
    check_basis_size(len(ws), f"word basis d={nu.d}, max_len={nu.max_len}")
    index = {w: i for i, w in enumerate(ws)}
    K = len(ws)
    G = np.zeros((K, K), dtype=np.complex128)
    for a, v in enumerate(ws):
        for bpos, w in enumerate(ws):
            # G[v, w] = nu(L_v* L_w)
            if w[: len(v)] == v:
                G[a, bpos] = nu.word_moments[w[len(v) :]]
            elif v[: len(w)] == w:
                G[a, bpos] = np.conj(nu.word_moments[v[len(w) :]])
    shifts, adjoints = [], []
    for j in range(1, nu.d + 1):
        U = np.zeros((K, K))
        Us = np.zeros((K, K), dtype=np.complex128)
        for pos, w in enumerate(ws):
            if len(w) < nu.max_len:
                U[index[(j,) + w], pos] = 1.0
            if w and w[0] == j:
                Us[index[w[1:]], pos] = 1.0
        for u, c in nu.identity_repr.items():
            if u and u[0] == j and u[1:] in index:
                Us[index[u[1:]], index[()]] += c
        shifts.append(U)
        adjoints.append(Us)
    return ExtendedGns(nu, ws, index, G, tuple(shifts), tuple(adjoints))


def row_isometry_defect(ext: ExtendedGns) -> float:
    """Max entry of ``U_i^H G U_j - delta_ij G`` on words of length ``<= max_len - 1``."""
    idx = ext.inner_words(ext.nu.max_len - 1)
    G = ext.gram
    sub = G[np.ix_(idx, idx)]
    worst = 0.0
    for i, Ui in enumerate(ext.shifts):
        for j, Uj in enumerate(ext.shifts):
            M = (Ui[:, idx].T @ G @ Uj[:, idx])
            if i == j:
                M = M - sub
            worst = max(worst, float(np.abs(M).max()))
    return worst


def row_unitary_defect(ext: ExtendedGns, floor: float = EIG_FLOOR) -> float:
    """Norm of ``I - sum_j U_j U_j*`` on words of length ``<= max_len - 1``."""
    idx = ext.inner_words(ext.nu.max_len - 1)
    G = ext.gram
    D = G[np.ix_(idx, idx)].copy()
    for Us in ext.adjoint_shifts:
        B = Us[:, idx]
        D -= B.conj().T @ G @ B
    return metric_norm(D, G[np.ix_(idx, idx)], floor)


# export helpers


def complex_matrix_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def complex_matrix_csv(M: np.ndarray) -> str:
    lines = []
    for row in np.asarray(M):
        lines.append(",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row.astype(np.complex128)))
    return "\n".join(lines) + "\n"
