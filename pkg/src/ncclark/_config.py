"""Environment-driven configuration.

Two variables are read:

``NCCLARK_DISABLE_NUMBA``
    Any of ``1``, ``true``, ``yes`` selects the pure-numpy kernels.
``NCCLARK_MAX_BASIS``
    Upper bound on the number of basis elements (Fock words, word-state
    words, monomials) any single construction may allocate. Default 200000.
"""

from __future__ import annotations

import os

DEFAULT_MAX_BASIS = 200_000


def numba_disabled() -> bool:
    return os.environ.get("NCCLARK_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


def max_basis() -> int:
    raw = os.environ.get("NCCLARK_MAX_BASIS", "").strip()
    if not raw:
        return DEFAULT_MAX_BASIS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"NCCLARK_MAX_BASIS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("NCCLARK_MAX_BASIS must be positive")
    return value


class ResourceError(RuntimeError):
    """A requested construction exceeds the configured basis cap."""


def check_basis_size(size: int, what: str) -> None:
    cap = max_basis()
    if size > cap:
        raise ResourceError(
            f"{what} needs {size} basis elements, above NCCLARK_MAX_BASIS={cap}"
        )
