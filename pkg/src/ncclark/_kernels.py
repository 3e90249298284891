"""Hot loops: truncated Cauchy products, reciprocals, Gram assembly, evaluation.

Each kernel exists twice: a numba ``@njit`` loop nest and a vectorized numpy
version built from per-degree outer products. The public wrappers below pick
one according to :data:`BACKEND`, which is fixed at import time from the
``NCCLARK_DISABLE_NUMBA`` environment variable (or forced to ``"numpy"`` when
numba cannot be imported). Both implementations stay importable as
:data:`numba_impl` and :data:`numpy_impl` for testing and benchmarking.
"""

from __future__ import annotations

from types import SimpleNamespace

import numpy as np

from ._basis import MonomialBasis
from ._config import numba_disabled

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

BACKEND = "numpy" if (numba_disabled() or not HAVE_NUMBA) else "numba"

_CHUNK = 4_000_000


# numpy implementations


def _np_add_block(out, idx, vals):
    out += np.bincount(idx, weights=vals.real, minlength=out.size)
    out += 1j * np.bincount(idx, weights=vals.imag, minlength=out.size)


def _np_series_mul(a, b, basis: MonomialBasis):
    N = basis.N
    out = np.zeros(len(basis), dtype=np.complex128)
    keys, lookup = basis.keys, basis.lookup
    for s in range(N + 1):
        sl = basis.degree_slice(s)
        blk = a[sl]
        if not blk.any():
            continue
        lim = basis.up_to(N - s)
        idx = lookup[keys[sl][:, None] + keys[:lim][None, :]].ravel()
        vals = (blk[:, None] * b[:lim][None, :]).ravel()
        _np_add_block(out, idx, vals)
    return out


def _np_series_reciprocal(a, basis: MonomialBasis):
    N = basis.N
    keys, lookup = basis.keys, basis.lookup
    r = np.zeros(len(basis), dtype=np.complex128)
    inv0 = 1.0 / a[0]
    r[0] = inv0
    for t in range(1, N + 1):
        tsl = basis.degree_slice(t)
        acc = np.zeros(tsl.stop - tsl.start, dtype=np.complex128)
        for s in range(1, t + 1):
            asl = basis.degree_slice(s)
            blk = a[asl]
            if not blk.any():
                continue
            rsl = basis.degree_slice(t - s)
            idx = lookup[keys[asl][:, None] + keys[rsl][None, :]].ravel() - tsl.start
            vals = (blk[:, None] * r[rsl][None, :]).ravel()
            _np_add_block(acc, idx, vals)
        r[tsl] = -acc * inv0
    return r


def _np_gram_block(row_exps, col_exps, row_orbit, col_orbit, moments, mom_weights, mom_lookup):
    P, Q = row_exps.shape[0], col_exps.shape[0]
    d = row_exps.shape[1]
    G = np.zeros((P, Q), dtype=np.complex128)
    step = max(1, _CHUNK // max(1, Q * d))
    for p0 in range(0, P, step):
        rows = row_exps[p0 : p0 + step]
        diff = col_exps[None, :, :] - rows[:, None, :]
        up = (diff >= 0).all(axis=2)
        down = (diff <= 0).all(axis=2)
        key = np.abs(diff) @ mom_weights
        pos = mom_lookup[key]
        vals = moments[pos]
        G[p0 : p0 + step] = np.where(
            up,
            row_orbit[p0 : p0 + step, None] * vals,
            np.where(down, col_orbit[None, :] * vals.conj(), 0.0),
        )
    return G


def _np_series_eval(coeffs, exps, points):
    P, d = points.shape
    N = int(exps.sum(axis=1).max()) if exps.size else 0
    powers = np.ones((P, d, N + 1), dtype=np.complex128)
    for k in range(1, N + 1):
        powers[:, :, k] = powers[:, :, k - 1] * points
    out = np.zeros(P, dtype=np.complex128)
    K = exps.shape[0]
    step = max(1, _CHUNK // max(1, P))
    for k0 in range(0, K, step):
        e = exps[k0 : k0 + step]
        mono = np.ones((P, e.shape[0]), dtype=np.complex128)
        for j in range(d):
            mono *= powers[:, j, :][:, e[:, j]]
        out += mono @ coeffs[k0 : k0 + step]
    return out


numpy_impl = SimpleNamespace(
    name="numpy",
    series_mul=_np_series_mul,
    series_reciprocal=_np_series_reciprocal,
    gram_block=_np_gram_block,
    series_eval=_np_series_eval,
)


# numba implementations

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_mul(a, b, degrees, keys, lookup, offsets, N):
        K = a.shape[0]
        out = np.zeros(K, dtype=np.complex128)
        for i in range(K):
            ai = a[i]
            if ai == 0:
                continue
            lim = offsets[N - degrees[i] + 1]
            ki = keys[i]
            for j in range(lim):
                bj = b[j]
                if bj != 0:
                    out[lookup[ki + keys[j]]] += ai * bj
        return out

    @njit(cache=True)
    def _nb_recip(a, keys, lookup, offsets, N):
        K = a.shape[0]
        r = np.zeros(K, dtype=np.complex128)
        acc = np.zeros(K, dtype=np.complex128)
        inv0 = 1.0 / a[0]
        r[0] = inv0
        for t in range(1, N + 1):
            for s in range(1, t + 1):
                for i in range(offsets[s], offsets[s + 1]):
                    ai = a[i]
                    if ai == 0:
                        continue
                    ki = keys[i]
                    for j in range(offsets[t - s], offsets[t - s + 1]):
                        acc[lookup[ki + keys[j]]] += ai * r[j]
            for k in range(offsets[t], offsets[t + 1]):
                r[k] = -acc[k] * inv0
        return r

    @njit(cache=True)
    def _nb_gram(row_exps, col_exps, row_orbit, col_orbit, moments, mom_weights, mom_lookup):
        P = row_exps.shape[0]
        Q = col_exps.shape[0]
        d = row_exps.shape[1]
        G = np.zeros((P, Q), dtype=np.complex128)
        for p in range(P):
            for q in range(Q):
                up = True
                down = True
                key = 0
                for j in range(d):
                    t = col_exps[q, j] - row_exps[p, j]
                    if t > 0:
                        down = False
                        key += t * mom_weights[j]
                    elif t < 0:
                        up = False
                        key -= t * mom_weights[j]
                if up:
                    G[p, q] = row_orbit[p] * moments[mom_lookup[key]]
                elif down:
                    G[p, q] = col_orbit[q] * np.conj(moments[mom_lookup[key]])
        return G

    @njit(cache=True)
    def _nb_eval(coeffs, exps, points):
        P = points.shape[0]
        d = points.shape[1]
        K = exps.shape[0]
        N = 0
        for i in range(K):
            s = 0
            for j in range(d):
                s += exps[i, j]
            if s > N:
                N = s
        out = np.zeros(P, dtype=np.complex128)
        powers = np.ones((d, N + 1), dtype=np.complex128)
        for p in range(P):
            for j in range(d):
                for k in range(1, N + 1):
                    powers[j, k] = powers[j, k - 1] * points[p, j]
            acc = 0j
            for i in range(K):
                term = coeffs[i]
                if term == 0:
                    continue
                for j in range(d):
                    term *= powers[j, exps[i, j]]
                acc += term
            out[p] = acc
        return out

    def _nb_series_mul(a, b, basis: MonomialBasis):
        return _nb_mul(a, b, basis.degrees, basis.keys, basis.lookup, basis.offsets, basis.N)

    def _nb_series_reciprocal(a, basis: MonomialBasis):
        return _nb_recip(a, basis.keys, basis.lookup, basis.offsets, basis.N)

    numba_impl = SimpleNamespace(
        name="numba",
        series_mul=_nb_series_mul,
        series_reciprocal=_nb_series_reciprocal,
        gram_block=_nb_gram,
        series_eval=_nb_eval,
    )
else:  # pragma: no cover
    numba_impl = None


def _impl():
    return numba_impl if BACKEND == "numba" else numpy_impl


# public wrappers


def series_mul(a: np.ndarray, b: np.ndarray, basis: MonomialBasis) -> np.ndarray:
    """Cauchy product of two coefficient vectors aligned with ``basis``, truncated at ``basis.N``."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    return _impl().series_mul(a, b, basis)


def series_reciprocal(a: np.ndarray, basis: MonomialBasis) -> np.ndarray:
    """Multiplicative inverse solved degree by degree. Requires ``a[0] != 0``."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no reciprocal")
    return _impl().series_reciprocal(a, basis)


def gram_block(
    row_exps: np.ndarray,
    col_exps: np.ndarray,
    moments: np.ndarray,
    mom_basis: MonomialBasis,
    row_orbit: np.ndarray,
    col_orbit: np.ndarray,
) -> np.ndarray:
    """Matrix ``G[p, q] = mu(L^(n_p)* L^(m_q))`` from a moment vector.

    ``row_orbit`` and ``col_orbit`` hold the orbit sizes of the row and column
    indices as floats. The moment basis must reach the largest difference
    degree, which is at most the larger of the two index degrees.
    """
    row_exps = np.ascontiguousarray(row_exps, dtype=np.int64)
    col_exps = np.ascontiguousarray(col_exps, dtype=np.int64)
    need = 0
    if row_exps.size and col_exps.size:
        need = max(int(row_exps.sum(axis=1).max()), int(col_exps.sum(axis=1).max()))
    if need > mom_basis.N:
        raise ValueError(f"moments known to degree {mom_basis.N}, Gram block needs {need}")
    return _impl().gram_block(
        row_exps,
        col_exps,
        np.ascontiguousarray(row_orbit, dtype=np.float64),
        np.ascontiguousarray(col_orbit, dtype=np.float64),
        np.ascontiguousarray(moments, dtype=np.complex128),
        np.ascontiguousarray(mom_basis.weights, dtype=np.int64),
        np.ascontiguousarray(mom_basis.lookup, dtype=np.int64),
    )


def series_eval(coeffs: np.ndarray, exps: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_i coeffs[i] z**exps[i]`` at each row of ``points``."""
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=np.complex128)
    return _impl().series_eval(
        np.ascontiguousarray(coeffs, dtype=np.complex128),
        np.ascontiguousarray(exps, dtype=np.int64),
        points,
    )
