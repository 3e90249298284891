"""Gleason solutions in ``H(b)``, Clark perturbations and boundary checks.

For quasi-extreme ``b`` the functions

    b_j = (1 - conj(b(0))) V_mu (S_j* [I])

solve ``b(z) - b(0) = sum_j z_j b_j(z)`` with ``sum_j ||b_j||^2 = 1 - |b(0)|^2``.
Vectors of ``P^2(mu)`` at a low "projection degree" ``N_g`` carry the exact
algebra; the ``b_j`` are then expanded as series to a tail degree ``T`` for
point evaluation.

All ``H(b)``-side operators act on spans of kernel functions ``k^b_w`` at a
finite sample of points, with the kernel Gram as metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._basis import monomial_basis
from .gns import GnsTuple, build_gns_space, build_gns_tuple, cross_gram, metric_frame, project_identity
from .hbspace import (
    DEFAULT_SAMPLE_RADIUS,
    RADIUS_CAP,
    TransformContext,
    check_radius,
    inner,
    kernel_matrix,
    sample_points,
)
from .series import Multiplier, TruncatedSeries, _check_unimodular, ts_evaluate
from .states import DEFAULT_QE_THRESHOLD, PreconditionError, ac_state

MAX_PROJECTION_DEGREE = 6
PROBE_RADIUS = 0.5


@dataclass
class GleasonData:
    """The ``b_j`` of a multiplier together with the data that produced them.

    Attributes
    ----------
    bj_series : list of TruncatedSeries
        ``b_j`` to the tail degree.
    bj_norm_sq : ndarray
        ``||b_j||^2`` in ``H(b)``.
    quasi_extreme : bool
        True when the ``b_j`` come from the GNS construction; False for
        caller-supplied tables.
    s_vectors : list of ndarray or None
        ``S_j* [I]`` over the projection-degree basis (quasi-extreme only).
    """

    b: Multiplier
    bj_series: list
    bj_norm_sq: np.ndarray
    quasi_extreme: bool
    tail_degree: int
    projection_degree: Optional[int] = None
    distance_sq: Optional[float] = None
    s_vectors: Optional[list] = field(default=None, repr=False)
    tuple_: Optional[GnsTuple] = field(default=None, repr=False)
    ctx: Optional[TransformContext] = field(default=None, repr=False)
    cross: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.b.d

    @property
    def sum_norm_sq(self) -> float:
        return float(np.sum(self.bj_norm_sq))

    def bj_values(self, Z: np.ndarray) -> np.ndarray:
        """``B[i, j] = b_j(Z_i)``."""
        Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
        return np.stack([ts_evaluate(s, Z) for s in self.bj_series], axis=1)

    def kernel_bj_inner(self, W: np.ndarray) -> np.ndarray:
        """``P[i, j] = <k^b_{W_i}, b_j>``.

        Quasi-extreme case: pulled back to ``P^2(mu)``, where ``k^b_w`` is the
        image of ``G_w`` and ``b_j`` that of ``(1 - conj(b(0))) S_j* [I]``.
        Otherwise: the reproducing property ``conj(b_j(w))``.
        """
        W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
        if not self.quasi_extreme:
            return self.bj_values(W).conj()
        Gm = self.ctx.g_matrix(W)
        S = np.stack(self.s_vectors, axis=1)
        return (1 - self.b.b0) * (S.conj().T @ (self.cross @ Gm)).T

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "quasiExtreme": self.quasi_extreme,
            "tailDegree": self.tail_degree,
            "projectionDegree": self.projection_degree,
            "distanceSq": self.distance_sq,
            "bjNormSq": [float(x) for x in self.bj_norm_sq],
            "sumNormSq": self.sum_norm_sq,
            "bj": [s.to_json() for s in self.bj_series],
        }


def find_projection_degree(b: Multiplier, max_degree: int = MAX_PROJECTION_DEGREE,
                           threshold: float = DEFAULT_QE_THRESHOLD):
    """Smallest ``N`` whose squared distance is below ``threshold``, with the curve.

    Returns
    -------
    (degree or None, list of squared distances for N = 1..max_degree)
    """
    mu = ac_state(b.at_degree(2 * max_degree), 1.0, 2 * max_degree)
    space = build_gns_space(mu, max_degree)
    curve = [project_identity(space, n)[1] for n in range(1, max_degree + 1)]
    for n, dist in enumerate(curve, start=1):
        if dist < threshold:
            return n, curve
    return None, curve


def compute_bj(b: Multiplier, projection_degree: Optional[int] = None, radius: float = DEFAULT_SAMPLE_RADIUS,
               tail_degree: Optional[int] = None, bj: Optional[Sequence[TruncatedSeries]] = None,
               bj_norm_sq: Optional[Sequence[float]] = None, threshold: float = DEFAULT_QE_THRESHOLD,
               max_degree: int = MAX_PROJECTION_DEGREE) -> GleasonData:
    """Gleason functions ``b_1..b_d`` of ``b``.

    Parameters
    ----------
    projection_degree : int, optional
        GNS degree at which ``[I]`` is projected. Found by search when omitted.
    radius : float
        Evaluation radius that fixes the tail degree.
    bj, bj_norm_sq : optional
        Caller-supplied tables and norms, used when ``b`` is not quasi-extreme.
        A constant builtin ``b`` gets ``b_j = 0`` without a search.

    Raises
    ------
    PreconditionError
        If ``b`` is not quasi-extreme within ``max_degree`` and no tables were given.
    """
    if bj is not None:
        if bj_norm_sq is None or len(bj) != b.d or len(bj_norm_sq) != b.d:
            raise ValueError("supply d series and d norms for explicit Gleason data")
        T = min(s.N for s in bj)
        return GleasonData(b, [s.truncate(T) for s in bj], np.asarray(bj_norm_sq, dtype=float), False, T)
    if np.abs(b.series.coeffs[1:]).max(initial=0.0) == 0.0 and b.exact is not None:
        # constant b: b_j = 0 solves the Gleason problem
        T = b.N
        return GleasonData(b, [b.series * 0 for _ in range(b.d)], np.zeros(b.d), False, T)
    curve = None
    if projection_degree is None:
        projection_degree, curve = find_projection_degree(b, max_degree, threshold)
        if projection_degree is None:
            raise PreconditionError(
                "b is not quasi-extreme up to degree "
                f"{max_degree} (squared distances {['%.3g' % c for c in curve]}); "
                "supply explicit b_j tables instead"
            )
    ng = projection_degree
    mu_g = ac_state(b.at_degree(2 * ng), 1.0, 2 * ng)
    space = build_gns_space(mu_g, ng)
    tup = build_gns_tuple(space, ng)
    if not tup.distance_sq < threshold:
        raise PreconditionError(
            f"squared distance {tup.distance_sq:.6g} at degree {ng} is not below {threshold:g}"
        )
    s_vecs = [A[:, 0].copy() for A in tup.matrices]
    ctx = TransformContext(b, 1.0, radius, tail_degree)
    low = monomial_basis(b.d, ng)
    cross = cross_gram(ctx.mu, low, ctx.basis)
    one_minus_b = 1 - b.at_degree(ctx.T).series
    b0 = b.b0
    series = []
    for s in s_vecs:
        k = TruncatedSeries(b.d, ctx.T, cross.conj().T @ s)
        series.append((1 - np.conj(b0)) * (one_minus_b * k))
    norms = np.array([abs(1 - b0) ** 2 * space.norm_sq(s) for s in s_vecs])
    return GleasonData(b, series, norms, True, ctx.T, ng, tup.distance_sq, s_vecs, tup, ctx, cross)


def gleason_residual(g: GleasonData, Z: np.ndarray) -> float:
    """Max over ``Z`` of ``|b(z) - b(0) - sum_j z_j b_j(z)|``."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    r = g.b(Z) - g.b.b0 - np.sum(Z * g.bj_values(Z), axis=1)
    return float(np.abs(r).max())


def probe_grid(d: int, radius: float = PROBE_RADIUS, per_axis: int = 4) -> np.ndarray:
    """Fixed grid: ``per_axis`` radii times 8 angles on each coordinate axis plus the diagonal."""
    pts = []
    rs = radius * np.arange(1, per_axis + 1) / per_axis
    angles = np.exp(2j * np.pi * np.arange(8) / 8)
    dirs = [np.eye(d)[j] for j in range(d)] + [np.ones(d) / np.sqrt(d)]
    for v in dirs:
        for r in rs:
            for a in angles:
                pts.append(r * a * v)
    mixed = np.exp(2j * np.pi * np.arange(d) / (d + 1)) / np.sqrt(d)
    for r in rs:
        pts.append(r * mixed)
    return np.array(pts, dtype=np.complex128)


# operators on kernel spans


def apply_x_on_kernel(g: GleasonData, j: int, w, Z: np.ndarray) -> np.ndarray:
    """``(X_j k^b_w)(z) = conj(w_j) k^b_w(z) - b_j(z) conj(b(w))`` at each row of ``Z``."""
    w = np.asarray(w, dtype=np.complex128)
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    kw = kernel_matrix(g.b, Z, w[None, :])[:, 0]
    return np.conj(w[j]) * kw - g.bj_values(Z)[:, j] * np.conj(g.b(w))


def apply_x_star(g: GleasonData, j: int, coeffs: np.ndarray, W: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``X_j* f (z) = z_j f(z) - <f, b_j> b(z)`` for ``f = sum_i coeffs[i] k^b_{W_i}``."""
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    a = np.asarray(coeffs, dtype=np.complex128)
    f = kernel_matrix(g.b, Z, W) @ a
    f_bj = a @ g.kernel_bj_inner(W)[:, j]
    return Z[:, j] * f - f_bj * g.b(Z)


def kernel_gleason_residual(g: GleasonData, W: np.ndarray, Z: np.ndarray) -> float:
    """Max of ``|sum_j z_j (X_j k_w)(z) - (k_w(z) - k_w(0))|`` over ``W x Z``."""
    worst = 0.0
    zero = np.zeros((1, g.d), dtype=np.complex128)
    for w in np.atleast_2d(W):
        lhs = sum(Z[:, j] * apply_x_on_kernel(g, j, w, Z) for j in range(g.d))
        kw = kernel_matrix(g.b, Z, w[None, :])[:, 0]
        kw0 = kernel_matrix(g.b, zero, w[None, :])[0, 0]
        worst = max(worst, float(np.abs(lhs - (kw - kw0)).max()))
    return worst


def adjoint_consistency(g: GleasonData, W: np.ndarray) -> float:
    """Max of ``|<X_j k_w, k_z> - <k_w, X_j* k_z>|`` over pairs in ``W`` and all ``j``."""
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    worst = 0.0
    for j in range(g.d):
        for p, w in enumerate(W):
            lhs = apply_x_on_kernel(g, j, w, W)  # (X_j k_w)(z) = <X_j k_w, k_z>
            for q, z in enumerate(W):
                e = np.zeros(len(W), dtype=np.complex128)
                e[q] = 1.0
                rhs = np.conj(apply_x_star(g, j, e, W, w[None, :])[0])
                worst = max(worst, abs(lhs[q] - rhs))
    return worst


def _metric_min(D: np.ndarray, K: np.ndarray, floor: float = 1e-12) -> float:
    W = metric_frame(K, floor)
    M = W.conj().T @ D @ W
    return float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])


def contractivity_form(g: GleasonData, W: np.ndarray) -> dict:
    """Gram form of ``I - k_0 (x) k_0 - sum_j X_j* X_j`` on the span of ``k_w``, ``w`` in ``W``.

    Returns the smallest eigenvalue both in absolute terms and relative to
    the kernel metric.
    """
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    bW = g.b(W)
    Ker = kernel_matrix(g.b, W, W, bW, bW)
    u = 1 - np.conj(g.b.b0) * bW
    D = Ker - np.outer(u, u.conj())
    Bv = g.bj_values(W)
    P = g.kernel_bj_inner(W)  # P[w, j] = <k_w, b_j>
    for j in range(g.d):
        # M[v, w] = <X_j k_w, X_j k_v>
        M = (
            np.outer(W[:, j], W[:, j].conj()) * Ker
            - np.outer(bW, W[:, j].conj() * P[:, j])
            - np.outer(W[:, j] * Bv[:, j], bW.conj())
            + g.bj_norm_sq[j] * np.outer(bW, bW.conj())
        )
        D = D - M
    return {
        "minEigenvalue": float(np.linalg.eigvalsh((D + D.conj().T) / 2)[0]),
        "minEigenvalueRelative": _metric_min(D, Ker),
    }


def extremality_gap(g: GleasonData) -> float:
    """``|sum_j ||b_j||^2 - (1 - |b(0)|^2)|``."""
    return abs(g.sum_norm_sq - (1 - abs(g.b.b0) ** 2))


# Clark perturbations


@dataclass
class ClarkReport:
    alpha: complex
    intertwine_residual: float
    isometry_defect: float
    isometry_defect_entrywise: float

    def to_json(self) -> dict:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "intertwineResidual": self.intertwine_residual,
            "isometryDefect": self.isometry_defect,
            "isometryDefectEntrywise": self.isometry_defect_entrywise,
        }


def _beta(alpha: complex, b0: complex) -> complex:
    return np.conj(alpha) / (1 - np.conj(alpha) * b0)


def perturbed_on_kernels(g: GleasonData, alpha: complex, W: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``((X_j + beta b_j (x) k_0) k_w)(z)`` as an array ``[j, w, z]``."""
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    beta = _beta(alpha, g.b.b0)
    bW = g.b(W)
    Kzw = kernel_matrix(g.b, Z, W)  # [z, w]
    kw0 = 1 - g.b.b0 * bW.conj()
    Bz = g.bj_values(Z)  # [z, j]
    out = np.empty((g.d, W.shape[0], Z.shape[0]), dtype=np.complex128)
    for j in range(g.d):
        out[j] = (
            W[:, j].conj()[:, None] * Kzw.T
            + (beta * kw0 - bW.conj())[:, None] * Bz[:, j][None, :]
        )
    return out


def clark_perturb_and_intertwine(g: GleasonData, alpha: complex, points: np.ndarray,
                                 ctx_alpha: Optional[TransformContext] = None) -> ClarkReport:
    """Compare ``V_alpha S^alpha_j* G^alpha_w`` with the perturbed Gleason tuple on kernels.

    The left side is computed from ``mu_alpha``: its GNS tuple at the tail
    degree acts on the coefficients of ``G^alpha_w`` and ``V_alpha`` maps the
    result to ``H(b)``. The right side uses the ``b_j`` of ``mu_1`` in
    ``(X_j + beta b_j (x) k_0) k_w`` with ``beta = conj(alpha) / (1 - conj(alpha) b(0))``.
    """
    _check_unimodular(alpha)
    if not g.quasi_extreme:
        raise PreconditionError("Clark intertwining needs a quasi-extreme b")
    pts = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    check_radius(pts)
    ctx = ctx_alpha or TransformContext(g.b, alpha, g.ctx.radius, g.ctx.T)
    tup = build_gns_tuple(ctx.space, g.projection_degree)
    Gm = ctx.g_matrix(pts)
    rhs = perturbed_on_kernels(g, alpha, pts, pts)
    worst = 0.0
    norm_z = ctx.normalizer(pts)
    Zpow = np.prod(pts[:, None, :] ** ctx.basis.exps[None, :, :], axis=2)  # [z, n]
    for j in range(g.d):
        Y = tup.matrices[j] @ Gm  # columns: S_j* G_w
        vals = (Zpow @ (ctx.gram @ Y)) * norm_z[:, None]  # [z, w]
        worst = max(worst, float(np.abs(vals.T - rhs[j]).max()))
    iso, iso_entry = perturbed_isometry_defect(g, alpha, pts)
    return ClarkReport(complex(alpha), worst, iso, iso_entry)


def perturbed_isometry_defect(g: GleasonData, alpha: complex, W: np.ndarray, floor: float = 1e-12):
    """Defect of ``sum_j T_j* T_j = I`` on the kernel span, ``T_j = X_j + beta b_j (x) k_0``.

    Returns ``(metric-relative norm, max entry)`` of ``sum_j <T_j k_w, T_j k_v> - k(v, w)``.
    """
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    beta = _beta(alpha, g.b.b0)
    bW = g.b(W)
    Ker = kernel_matrix(g.b, W, W, bW, bW)
    delta = beta * (1 - g.b.b0 * bW.conj()) - bW.conj()
    Bv = g.bj_values(W)
    P = g.kernel_bj_inner(W)
    acc = np.zeros_like(Ker)
    for j in range(g.d):
        acc += (
            np.outer(W[:, j], W[:, j].conj()) * Ker
            + np.outer(delta.conj(), W[:, j].conj() * P[:, j])
            + np.outer(W[:, j] * Bv[:, j], delta)
            + g.bj_norm_sq[j] * np.outer(delta.conj(), delta)
        )
    D = acc - Ker
    Wf = metric_frame(Ker, floor)
    M = Wf.conj().T @ D @ Wf
    rel = float(np.abs(np.linalg.eigvalsh((M + M.conj().T) / 2)).max()) if M.size else 0.0
    return rel, float(np.abs(D).max())


# resolvent


@dataclass
class ResolventReport:
    z: np.ndarray
    error: float
    terms: int

    def to_json(self) -> dict:
        return {"z": [[c.real, c.imag] for c in self.z], "error": self.error, "terms": self.terms}


def resolvent_kernel_check(g: GleasonData, z, U: np.ndarray, max_terms: int = 400) -> ResolventReport:
    """Neumann series of ``(I - sum_j conj(z_j) X_j*)^-1 k^b_0`` against ``k^b_z`` on ``U``.

    With ``t = <u, z>`` and ``s_i = <A^i k_0, b~>``, the ``k``-th term is
    ``t^k k_0(u) - (sum_{i<k} s_i t^(k-1-i)) b(u)``. The ``s_i`` are computed
    in ``P^2(mu)`` coordinates (quasi-extreme case) or vanish when every
    ``b_j`` is zero.
    """
    z = np.asarray(z, dtype=np.complex128)
    U = np.atleast_2d(np.asarray(U, dtype=np.complex128))
    check_radius(np.vstack([z[None, :], U]))
    b0 = g.b.b0
    t = (U @ z.conj())
    bU = g.b(U)
    k0 = 1 - np.conj(b0) * bU
    s = _resolvent_coefficients(g, z, max_terms)
    total = np.zeros(U.shape[0], dtype=np.complex128)
    partial = np.zeros(U.shape[0], dtype=np.complex128)  # sum_{i<k} s_i t^(k-1-i)
    tk = np.ones(U.shape[0], dtype=np.complex128)
    used = 0
    for k in range(max_terms):
        total += tk * k0 - partial * bU
        partial = partial * t + s[k]
        tk = tk * t
        used = k + 1
        if np.abs(tk).max() < 1e-18 and abs(s[k]) < 1e-18:
            break
    exact = kernel_matrix(g.b, U, z[None, :])[:, 0]
    return ResolventReport(z, float(np.abs(total - exact).max()), used)


def _resolvent_coefficients(g: GleasonData, z: np.ndarray, n: int) -> np.ndarray:
    s = np.zeros(n, dtype=np.complex128)
    if not g.quasi_extreme:
        if all(x.max_abs() == 0 for x in g.bj_series):
            return s
        raise PreconditionError("resolvent check needs a quasi-extreme b or vanishing b_j")
    tup = g.tuple_
    G = tup.space.gram
    b0 = g.b.b0
    beta1 = 1 / (1 - b0)
    svec = [(1 - np.conj(b0)) * v for v in g.s_vectors]  # b_j in P^2 coordinates
    y = sum(z[j] * svec[j] for j in range(g.d))
    for i in range(n):
        vy0 = (1 - b0) * (G[0] @ y)
        s[i] = np.conj(vy0)
        if abs(vy0) < 1e-18 and np.abs(y).max() < 1e-18:
            break
        y = sum(z[j] * (tup.matrices[j] @ y - beta1 * vy0 * svec[j]) for j in range(g.d))
    return s


# boundary behaviour


@dataclass
class AngularReport:
    zeta: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    tail_bounds: np.ndarray
    L: float
    converged: bool
    verdict: str
    boundary_value: complex

    def to_json(self) -> dict:
        return {
            "zeta": [[c.real, c.imag] for c in self.zeta],
            "radii": self.radii.tolist(),
            "values": self.values.tolist(),
            "tailBounds": self.tail_bounds.tolist(),
            "L": self.L,
            "converged": self.converged,
            "verdict": self.verdict,
            "boundaryValue": [self.boundary_value.real, self.boundary_value.imag],
        }

    def csv(self) -> str:
        rows = ["radius,value,tailBound"]
        rows += [f"{r!r},{v!r},{t!r}" for r, v, t in zip(self.radii.tolist(), self.values.tolist(), self.tail_bounds.tolist())]
        return "\n".join(rows) + "\n"


def angular_derivative(b: Multiplier, zeta, K: int = 20, rel_tol: float = 0.01) -> AngularReport:
    """Radial quotients ``(1 - |b(r zeta)|^2) / (1 - r^2)`` at ``r = 1 - 2^-k``.

    The schedule stops before the first radius whose truncation error could
    exceed 10% of the quotient. Fewer than three usable radii give the verdict
    ``"inconclusive"``. When the last three quotients agree within ``rel_tol``
    the reported ``L`` is extrapolated linearly to ``r = 1``.
    """
    zeta = np.asarray(zeta, dtype=np.complex128)
    if abs(np.linalg.norm(zeta) - 1) > 1e-12:
        raise ValueError("zeta must lie on the unit sphere")
    radii, vals, tails = [], [], []
    bval = 0j
    for k in range(1, K + 1):
        r = 1 - 2.0**-k
        bz = b(r * zeta)
        denom = (1 - r) * (1 + r)
        q = (1 - abs(bz) ** 2) / denom
        tb = b.tail_bound(r)
        err = (2 * tb + tb * tb) / denom
        if err > 0.1 * abs(q):
            break
        radii.append(r)
        vals.append(q)
        tails.append(err)
        bval = bz
    radii_a, vals_a, tails_a = np.array(radii), np.array(vals), np.array(tails)
    if len(vals) < 3:
        return AngularReport(zeta, radii_a, vals_a, tails_a, float("nan"), False, "inconclusive", bval)
    last = vals_a[-3:]
    converged = bool(np.ptp(last) <= rel_tol * abs(last[-1]))
    verdict = "finite angular derivative" if converged else "no finite angular derivative"
    L = float(_radial_limit(vals_a[-2:])) if converged else float(vals_a[-1])
    return AngularReport(zeta, radii_a, vals_a, tails_a, L, converged, verdict, complex(bval))


@dataclass
class EigenReport:
    alpha: complex
    zeta: np.ndarray
    verdict: str
    residual: Optional[float]
    eigenfunction_norm_sq: Optional[float]
    L: Optional[float]
    boundary_mismatch: Optional[float]
    angular: AngularReport

    def to_json(self) -> dict:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "zeta": [[c.real, c.imag] for c in self.zeta],
            "verdict": self.verdict,
            "residual": self.residual,
            "eigenfunctionNormSq": self.eigenfunction_norm_sq,
            "L": self.L,
            "boundaryMismatch": self.boundary_mismatch,
            "angular": self.angular.to_json(),
        }


def eigen_check(g: GleasonData, alpha: complex, zeta, points: Optional[np.ndarray] = None,
                match_tol: float = 1e-3, K: int = 20) -> EigenReport:
    """Check that ``k^b_zeta`` is fixed by ``sum_j conj(zeta_j) S^alpha_j`` on sample points.

    Transported to ``H(b)``, ``S^alpha_j`` acts as
    ``f -> X_j* f + conj(beta) <f, b_j> k_0``. Pairings with the eigenfunction
    ``h(z) = (1 - conj(alpha) b(z)) / (1 - <z, zeta>)`` are radial limits:
    ``<h, b_j> = conj(b_j(zeta))`` and ``||h||^2 = lim h(r zeta)``.
    """
    _check_unimodular(alpha)
    zeta = np.asarray(zeta, dtype=np.complex128)
    ang = angular_derivative(g.b, zeta, K)
    if ang.verdict == "inconclusive":
        return EigenReport(complex(alpha), zeta, "inconclusive", None, None, None, None, ang)
    mismatch = abs(ang.boundary_value - alpha)
    if not ang.converged or mismatch > match_tol:
        return EigenReport(complex(alpha), zeta, "no eigenvalue predicted", None, None,
                           ang.L if ang.converged else None, mismatch, ang)
    pts = sample_points(g.d) if points is None else np.atleast_2d(np.asarray(points, dtype=np.complex128))
    b0 = g.b.b0
    r1, r2 = ang.radii[-2:]
    bj_edge = _radial_limit(g.bj_values(np.array([r1 * zeta, r2 * zeta])))
    s = np.sum(zeta.conj() * bj_edge.conj())  # <h, sum_j zeta_j b_j>
    bz = g.b(pts)
    h = (1 - np.conj(alpha) * bz) / (1 - pts @ zeta.conj())
    k0 = 1 - np.conj(b0) * bz
    cbeta = alpha / (1 - alpha * np.conj(b0))
    res = (pts @ zeta.conj() - 1) * h - s * bz + cbeta * s * k0
    h_edge = _radial_limit(np.array([(1 - np.conj(alpha) * g.b(r * zeta)) / (1 - r) for r in (r1, r2)]))
    return EigenReport(complex(alpha), zeta, "eigenvalue", float(np.abs(res).max()),
                       float(np.real(h_edge)), ang.L, mismatch, ang)


def _radial_limit(vals: np.ndarray) -> np.ndarray:
    """Linear extrapolation to ``r = 1`` from values at ``1 - 2^-(k-1)`` and ``1 - 2^-k``."""
    return 2 * vals[1] - vals[0]


# uniqueness probe


@dataclass
class Candidate:
    epsilon: float
    residual: float
    norm_sq: float
    violates: bool


def uniqueness_probe(g: GleasonData, trials: int = 6, epsilon: float = 1e-3, atoms: int = 3,
                     seed: int = 0, tol: float = 1e-8) -> list[Candidate]:
    """Perturb ``b_j`` by kernel combinations, rescale to extremal norm, test the Gleason identity.

    Each candidate is ``c (b_j + eps g_j)`` with ``g_j`` a random combination of
    ``atoms`` kernels and ``c`` chosen so that ``sum_j ||.||^2 = 1 - |b(0)|^2``.
    A candidate violates the conditions when its Gleason residual on the
    probe grid exceeds ``tol``.
    """
    rng = np.random.default_rng(seed)
    grid = probe_grid(g.d)
    target = 1 - abs(g.b.b0) ** 2
    out = []
    base_vals = g.bj_values(grid)
    bgrid = g.b(grid) - g.b.b0
    for _ in range(trials):
        W = sample_points(g.d, atoms, 0.5, int(rng.integers(1 << 30)))
        A = rng.normal(size=(atoms, g.d)) + 1j * rng.normal(size=(atoms, g.d))
        Kw = kernel_matrix(g.b, W, W)
        P = g.kernel_bj_inner(W)  # <k_w, b_j>
        norm_sq = 0.0
        for j in range(g.d):
            a = A[:, j]
            cross = a @ P[:, j]
            norm_sq += g.bj_norm_sq[j] + 2 * epsilon * np.real(cross) + epsilon**2 * np.real(a.conj() @ Kw.T @ a)
        scale = np.sqrt(target / norm_sq) if norm_sq > 0 else 1.0
        gvals = kernel_matrix(g.b, grid, W) @ A  # [z, j]
        cand = scale * (base_vals + epsilon * gvals)
        res = float(np.abs(bgrid - np.sum(grid * cand, axis=1)).max())
        out.append(Candidate(epsilon, res, float(scale**2 * norm_sq), res > tol))
    return out
