"""The de Branges-Rovnyak side: kernels, transforms and the unitarity check.

:class:`TransformContext` fixes a multiplier ``b``, a unimodular ``alpha``
and a tail degree ``T``. It holds the state ``mu_alpha`` to degree ``2T`` and
the ``P^2(mu_alpha)`` Gram at degree ``T``. A coefficient vector ``x`` over
``monomial_basis(d, T)`` then has Cauchy transform with Taylor coefficients
``G x``, and normalized transform ``(1 - conj(alpha) b) K x``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm, qmc

from ._basis import monomial_basis
from ._config import ResourceError
from .freealg import SymElement
from .gns import GnsSpace, build_gns_space, cross_gram
from .series import Multiplier, TruncatedSeries, _check_unimodular, ts_evaluate
from .states import MomentState, ac_state, orbit_vector

RADIUS_CAP = 0.6
TAIL_TOL = 1e-10
DEFAULT_SAMPLE_RADIUS = 0.5
DEFAULT_SAMPLE_COUNT = 12
_DENSE_LIMIT = 40_000_000


def inner(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``<z, w> = sum_j z_j conj(w_j)`` for rows of ``z`` against rows of ``w``."""
    return np.atleast_2d(z) @ np.atleast_2d(w).conj().T


def kb_eval(b: Multiplier, z, w) -> complex:
    """``(1 - b(z) conj(b(w))) / (1 - <z, w>)``."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    return complex((1 - b(z) * np.conj(b(w))) / (1 - np.vdot(w, z)))


def kernel_matrix(b: Multiplier, Z: np.ndarray, W: np.ndarray,
                  bZ: Optional[np.ndarray] = None, bW: Optional[np.ndarray] = None) -> np.ndarray:
    """``K[i, k] = k^b(Z_i, W_k)``."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
    bZ = b(Z) if bZ is None else bZ
    bW = b(W) if bW is None else bW
    return (1 - np.outer(bZ, bW.conj())) / (1 - inner(Z, W))


def sample_points(d: int, count: int = DEFAULT_SAMPLE_COUNT, radius: float = DEFAULT_SAMPLE_RADIUS,
                  seed: int = 0) -> np.ndarray:
    """Quasi-random points in the ball of the given radius (scrambled Halton)."""
    if count < 1:
        return np.zeros((0, d), dtype=np.complex128)
    sampler = qmc.Halton(d=2 * d + 1, scramble=True, seed=seed)
    u = sampler.random(count)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = norm.ppf(u[:, : 2 * d])
    v = g[:, :d] + 1j * g[:, d:]
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * u[:, 2 * d] ** (1.0 / (2 * d))
    return v * r[:, None]


def check_radius(points: np.ndarray, cap: float = RADIUS_CAP) -> float:
    pts = np.atleast_2d(points)
    r = float(np.linalg.norm(pts, axis=1).max()) if pts.size else 0.0
    if r > cap + 1e-15:
        raise ValueError(f"point radius {r:.6g} exceeds the radius cap {cap}")
    return r


@dataclass
class KernelSample:
    b: Multiplier
    points: np.ndarray
    gram: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.gram + self.gram.conj().T) / 2)[0])


def kernel_sample(b: Multiplier, points: np.ndarray, warn: bool = True) -> KernelSample:
    """Kernel Gram at ``points``; warns when it is not PSD within ``-1e-8``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    if np.linalg.norm(pts, axis=1).max(initial=0) >= 1:
        raise ValueError("sample points must lie in the open unit ball")
    vals = b(pts)
    K = kernel_matrix(b, pts, pts, vals, vals)
    ks = KernelSample(b, pts, K, vals)
    if warn and ks.min_eigenvalue < -1e-8:
        warnings.warn(
            f"kernel Gram has eigenvalue {ks.min_eigenvalue:.3g}; b is not a contractive multiplier",
            RuntimeWarning,
            stacklevel=2,
        )
    return ks


def choose_tail_degree(radius: float, scale: float = 1.0, tol: float = TAIL_TOL) -> int:
    """Smallest ``T >= 1`` with ``scale * radius**(T+1) / (1 - radius) < tol``."""
    if not 0 <= radius < 1:
        raise ValueError("radius must lie in [0, 1)")
    if radius == 0:
        return 1
    T = 1
    while scale * radius ** (T + 1) / (1 - radius) >= tol:
        T += 1
    return T


def tail_bound(radius: float, T: int, scale: float = 1.0) -> float:
    return scale * radius ** (T + 1) / (1 - radius)


class TransformContext:
    """State, Gram and tail degree for Cauchy/Fantappie transforms of ``mu_alpha``.

    Parameters
    ----------
    b : Multiplier
    alpha : complex
        Unimodular.
    radius : float
        Largest point radius the context will be evaluated at (``<= 0.6``).
    tail_degree : int, optional
        Defaults to :func:`choose_tail_degree` at ``radius`` with the state mass
        as scale.
    """

    def __init__(self, b: Multiplier, alpha: complex = 1.0, radius: float = DEFAULT_SAMPLE_RADIUS,
                 tail_degree: Optional[int] = None):
        _check_unimodular(alpha)
        if radius > RADIUS_CAP:
            raise ValueError(f"radius {radius} exceeds the cap {RADIUS_CAP}")
        self.b = b
        self.alpha = complex(alpha)
        self.radius = float(radius)
        b0 = b.b0
        mass = (1 - abs(b0) ** 2) / abs(1 - np.conj(alpha) * b0) ** 2
        self.mass_bound = float(mass)
        T = choose_tail_degree(radius, max(1.0, mass)) if tail_degree is None else int(tail_degree)
        K = len(monomial_basis(b.d, T))
        if K * K > _DENSE_LIMIT:
            raise ResourceError(
                f"dense Gram of size {K} at tail degree {T} is too large; lower the radius or d"
            )
        self.T = T
        self.mu: MomentState = ac_state(b.at_degree(2 * T), self.alpha, 2 * T)

    @cached_property
    def space(self) -> GnsSpace:
        return build_gns_space(self.mu, self.T)

    @property
    def basis(self):
        return monomial_basis(self.b.d, self.T)

    @property
    def gram(self) -> np.ndarray:
        return self.space.gram

    def tail_bound(self, radius: Optional[float] = None, scale: float = 1.0) -> float:
        r = self.radius if radius is None else radius
        return tail_bound(r, self.T, scale * max(1.0, self.mu.mass))

    def vector(self, p: SymElement | np.ndarray) -> np.ndarray:
        """Coefficient vector over the tail basis of an element of ``S`` (or pad an array)."""
        K = len(self.basis)
        if isinstance(p, SymElement):
            if not p.in_s:
                raise ValueError("transforms take elements without adjoint parts")
            if p.degree() > self.T:
                raise ValueError(f"element degree {p.degree()} exceeds tail degree {self.T}")
            x = np.zeros(K, dtype=np.complex128)
            for n, c in p.plus.items():
                x[self.basis.index(n)] += c
            return x
        x = np.asarray(p, dtype=np.complex128)
        if x.size > K:
            raise ValueError("coefficient vector longer than the tail basis")
        out = np.zeros(K, dtype=np.complex128)
        out[: x.size] = x
        return out

    def cauchy_series(self, p) -> TruncatedSeries:
        """``K_mu p`` as a series to the tail degree (coefficients ``G x``)."""
        return TruncatedSeries(self.b.d, self.T, self.gram @ self.vector(p))

    def cauchy_series_low(self, x: np.ndarray, low_degree: int) -> TruncatedSeries:
        """``K_mu x`` for ``x`` over a low-degree basis, without the full Gram."""
        low = monomial_basis(self.b.d, low_degree)
        x = np.asarray(x, dtype=np.complex128)
        Gc = cross_gram(self.mu, self.basis, low)
        return TruncatedSeries(self.b.d, self.T, Gc @ x[: len(low)])

    def g_vector(self, w) -> np.ndarray:
        """Coefficients of ``G_w = (1 - alpha conj(b(w))) (I - L w*)^-1`` to the tail degree."""
        w = np.asarray(w, dtype=np.complex128)
        wpow = np.prod(w.conj()[None, :] ** self.basis.exps, axis=1)
        return (1 - self.alpha * np.conj(self.b(w))) * wpow

    def g_matrix(self, W: np.ndarray) -> np.ndarray:
        """Columns ``g_vector(w)`` for each row of ``W``."""
        W = np.atleast_2d(np.asarray(W, dtype=np.complex128))
        pw = np.prod(W.conj()[:, None, :] ** self.basis.exps[None, :, :], axis=2)
        return (pw * (1 - self.alpha * np.conj(self.b(W)))[:, None]).T

    def normalizer(self, Z: np.ndarray) -> np.ndarray:
        return 1 - np.conj(self.alpha) * self.b(np.atleast_2d(Z))


def cauchy_transform(ctx: TransformContext, p, z) -> complex:
    """``K_mu p(z) = mu((I - zL*)^-1 p(L))`` summed to the tail degree."""
    z = np.asarray(z, dtype=np.complex128)
    check_radius(z)
    return complex(ts_evaluate(ctx.cauchy_series(p), z))


def fantappie_transform(ctx: TransformContext, p, z) -> complex:
    """``V_mu p(z) = (1 - conj(alpha) b(z)) K_mu p(z)``."""
    z = np.asarray(z, dtype=np.complex128)
    return complex((1 - np.conj(ctx.alpha) * ctx.b(z)) * cauchy_transform(ctx, p, z))


def fantappie_values(ctx: TransformContext, x: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``V_mu x`` at each row of ``Z`` for a coefficient vector ``x``."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    check_radius(Z)
    return ctx.normalizer(Z) * ts_evaluate(ctx.cauchy_series(x), Z)


@dataclass
class UnitarityReport:
    max_abs_error: float
    tail_degree: int
    tail_bound: float
    points: np.ndarray

    def to_json(self) -> dict:
        return {
            "maxAbsError": self.max_abs_error,
            "tailDegree": self.tail_degree,
            "tailBound": self.tail_bound,
            "points": [[[c.real, c.imag] for c in p] for p in self.points],
        }


def unitarity_check(ctx: TransformContext, points: np.ndarray) -> UnitarityReport:
    """Compare ``<[G_w], [G_z]>_mu`` with ``k^b(z, w)`` on the sample points."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    r = check_radius(pts)
    Gm = ctx.g_matrix(pts)
    P = Gm.conj().T @ ctx.gram @ Gm
    Kb = kernel_matrix(ctx.b, pts, pts)
    err = float(np.abs(P - Kb).max())
    return UnitarityReport(err, ctx.T, ctx.tail_bound(r * r), pts)


def nc_kernel_identity(ctx: TransformContext, z, w) -> tuple[complex, complex]:
    """``mu((I - zL*)^-1 (I - Lw*)^-1)`` from moments, and its closed form.

    The closed form is ``k^b(z, w) / ((1 - conj(alpha) b(z)) (1 - alpha conj(b(w))))``.
    """
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    check_radius(np.vstack([z, w]))
    zp = np.prod(z[None, :] ** ctx.basis.exps, axis=1)
    wp = np.prod(w.conj()[None, :] ** ctx.basis.exps, axis=1)
    lhs = complex(zp @ ctx.gram @ wp)
    rhs = kb_eval(ctx.b, z, w) / ((1 - np.conj(ctx.alpha) * ctx.b(z)) * (1 - ctx.alpha * np.conj(ctx.b(w))))
    return lhs, complex(rhs)


def contractivity_warnings(b: Multiplier, count: int = 24, radius: float = 0.9, seed: int = 0) -> list[str]:
    """Run the slice test and the sampled kernel Gram test; return any warnings raised."""
    from .series import restriction_warning

    msgs = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        restriction_warning(b, seed=seed)
        kernel_sample(b, sample_points(b.d, count, radius, seed))
    for w in caught:
        msgs.append(str(w.message))
        warnings.warn(w.message, w.category, stacklevel=2)
    return msgs
