"""Graded enumeration of multi-indices.

Every dense coefficient vector in the package is aligned with a
:class:`MonomialBasis`: the multi-indices of total degree at most ``N`` in
``d`` variables, ordered by degree and, within a degree, reverse
lexicographically (so ``(2,0), (1,1), (0,2)`` for ``d = 2``).

Each index ``n`` also carries an additive key ``sum_j n_j (N+1)**j``. Keys
add under index addition as long as the sum still has degree at most ``N``,
which lets the kernels locate products through one table lookup.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

_LOOKUP_LIMIT = 50_000_000


def _compositions(k: int, d: int):
    if d == 1:
        yield (k,)
        return
    for a in range(k, -1, -1):
        for rest in _compositions(k - a, d - 1):
            yield (a,) + rest


def basis_size(d: int, N: int) -> int:
    return comb(N + d, d)


class MonomialBasis:
    """Multi-indices ``|n| <= N`` in ``d`` variables.

    Attributes
    ----------
    exps : ndarray of shape (K, d), int64
    degrees : ndarray of shape (K,), int64
    offsets : ndarray of shape (N + 2,)
        ``offsets[k]`` is the position of the first index of degree ``k``.
    keys : ndarray of shape (K,)
    lookup : ndarray of shape ((N+1)**d,)
        Maps a key back to its position, ``-1`` for keys of degree above N.
    """

    def __init__(self, d: int, N: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        if N < 0:
            raise ValueError("degree must be >= 0")
        self.d = d
        self.N = N
        if d == 1:
            exps = np.arange(N + 1, dtype=np.int64).reshape(-1, 1)
        else:
            rows = [c for k in range(N + 1) for c in _compositions(k, d)]
            exps = np.array(rows, dtype=np.int64).reshape(-1, d)
        self.exps = exps
        self.exps.setflags(write=False)
        self.degrees = exps.sum(axis=1)
        self.offsets = np.array([basis_size(d, k - 1) if k else 0 for k in range(N + 2)], dtype=np.int64)
        radix = N + 1
        if radix**d > _LOOKUP_LIMIT:
            raise ValueError(f"lookup table for d={d}, N={N} is too large")
        self.radix = radix
        self.weights = radix ** np.arange(d, dtype=np.int64)
        self.keys = exps @ self.weights
        lookup = np.full(radix**d, -1, dtype=np.int64)
        lookup[self.keys] = np.arange(len(exps), dtype=np.int64)
        self.lookup = lookup
        for arr in (self.degrees, self.offsets, self.keys, self.lookup, self.weights):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.exps.shape[0]

    def __repr__(self) -> str:
        return f"MonomialBasis(d={self.d}, N={self.N}, size={len(self)})"

    def index(self, n) -> int:
        """Position of multi-index ``n``; ``KeyError`` if out of range."""
        n = tuple(int(x) for x in n)
        if len(n) != self.d or min(n) < 0 or sum(n) > self.N:
            raise KeyError(n)
        key = sum(x * self.radix**j for j, x in enumerate(n))
        return int(self.lookup[key])

    def degree_slice(self, k: int) -> slice:
        return slice(int(self.offsets[k]), int(self.offsets[k + 1]))

    def up_to(self, k: int) -> int:
        """Number of indices of degree ``<= k``."""
        return int(self.offsets[min(k, self.N) + 1])

    def unit(self, j: int) -> int:
        """Position of the unit index ``e_j`` (0-based ``j``)."""
        e = [0] * self.d
        e[j] = 1
        return self.index(e)

    def shift_down(self, j: int) -> np.ndarray:
        """Position of ``n - e_j`` for each ``n``, ``-1`` where ``n_j = 0``."""
        out = np.full(len(self), -1, dtype=np.int64)
        ok = self.exps[:, j] >= 1
        out[ok] = self.lookup[self.keys[ok] - self.weights[j]]
        return out

    def embed(self, other: "MonomialBasis") -> np.ndarray:
        """Positions in ``other`` of this basis' indices (``other`` must contain them)."""
        if other.d != self.d or other.N < self.N:
            raise ValueError("target basis does not contain this basis")
        return other.lookup[self.exps @ other.weights]


@lru_cache(maxsize=64)
def monomial_basis(d: int, N: int) -> MonomialBasis:
    return MonomialBasis(d, N)
