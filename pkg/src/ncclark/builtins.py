"""Registry of builtin multipliers and their string grammar.

Grammar (``--builtin`` on the command line)::

    zero                          b = 0
    coordinate                    b = z1
    cuntz:<c1>,<c2>,...           b = <z, zeta>, zeta a unit vector
    two-point                     atoms e1, e2 with weight 1/2 each (d = 2)
    one-var:<a0>,<a1>,...         b = a0 + a1 z1 + a2 z1^2 + ...
    product-nonextreme:<a0>,...   b = p(z1) p(z2) ... p(zd), p(t) = a0 + a1 t + ...
    atoms:<pt>@<w>;<pt>@<w>;...   Herglotz average of point masses, pt = c1,c2,...

Complex entries use Python syntax with ``i`` or ``j`` (``0.6``, ``0.8i``,
``0.3+0.4j``). Each builtin is written once as a function of the coordinate
functions, so the same code yields the Taylor table (coordinates as
:class:`TruncatedSeries`) and exact values (coordinates as arrays).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .series import Multiplier, TruncatedSeries

DEFAULT_PRODUCT_FACTOR = (0.5, 0.5)

GRAMMAR = __doc__.split("Grammar (``--builtin`` on the command line)::")[1].split("Complex entries")[0]


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("i", "j")
    if not s:
        raise ValueError("empty complex number")
    try:
        return complex(s)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex number {text!r}") from exc


def parse_vector(text: str) -> np.ndarray:
    return np.array([parse_complex(t) for t in text.split(",")], dtype=np.complex128)


@dataclass(frozen=True)
class Atom:
    point: np.ndarray
    weight: float


def check_atoms(atoms: Sequence[Atom], tol: float = 1e-12) -> int:
    """Validate atoms on the sphere with positive weights; return the dimension."""
    if not atoms:
        raise ValueError("at least one atom is required")
    d = len(atoms[0].point)
    for a in atoms:
        if len(a.point) != d:
            raise ValueError("atoms of different dimension")
        if abs(np.linalg.norm(a.point) - 1) > tol:
            raise ValueError(f"atom {a.point} is off the unit sphere (|zeta| = {np.linalg.norm(a.point):.15g})")
        if not a.weight > 0:
            raise ValueError(f"atom weight must be positive, got {a.weight}")
    return d


def _inner(zs, zeta):
    return sum(z * np.conj(c) for z, c in zip(zs, zeta))


def _herglotz_of_atoms(zs, atoms):
    f = 0
    for a in atoms:
        ell = _inner(zs, a.point)
        f = f + a.weight * (1 + ell) / (1 - ell)
    return f


def _poly(t, coeffs):
    out = 0
    for c in reversed(list(coeffs)):
        out = out * t + c
    return out


def _build(d: int, N: int, label: str, fn: Callable) -> Multiplier:
    def factory(M: int) -> TruncatedSeries:
        zs = [TruncatedSeries.variable(d, M, j) for j in range(d)]
        out = fn(zs)
        if not isinstance(out, TruncatedSeries):
            out = TruncatedSeries.constant(d, M, out)
        return out

    def exact(points: np.ndarray) -> np.ndarray:
        zs = [points[:, j] for j in range(d)]
        return np.broadcast_to(np.asarray(fn(zs), dtype=np.complex128), (points.shape[0],)).copy()

    return Multiplier(factory(N), label, exact, factory)


def zero(d: int = 2, N: int = 8) -> Multiplier:
    return _build(d, N, "zero", lambda zs: zs[0] * 0)


def coordinate(d: int = 2, N: int = 8) -> Multiplier:
    return _build(d, N, "coordinate", lambda zs: zs[0])


def cuntz(zeta: Sequence[complex], N: int = 8) -> Multiplier:
    zeta = np.asarray(zeta, dtype=np.complex128)
    check_atoms([Atom(zeta, 1.0)])
    label = "cuntz:" + ",".join(_fmt(c) for c in zeta)
    return _build(len(zeta), N, label, lambda zs: _inner(zs, zeta))


def atoms(points: Sequence[Sequence[complex]], weights: Sequence[float], N: int = 8, label: str | None = None) -> Multiplier:
    """Inverse Cayley transform of ``sum_k w_k (1 + <z, zeta_k>)/(1 - <z, zeta_k>)``."""
    items = [Atom(np.asarray(p, dtype=np.complex128), float(w)) for p, w in zip(points, weights)]
    if len(items) != len(points) or len(points) != len(weights):
        raise ValueError("points and weights must have the same length")
    d = check_atoms(items)
    if label is None:
        label = "atoms:" + ";".join(",".join(_fmt(c) for c in a.point) + "@" + repr(a.weight) for a in items)

    def fn(zs):
        f = _herglotz_of_atoms(zs, items)
        return (f - 1) / (f + 1)

    return _build(d, N, label, fn)


def two_point(N: int = 8) -> Multiplier:
    return atoms([(1, 0), (0, 1)], [0.5, 0.5], N, label="two-point")


def one_var(coeffs: Sequence[complex], d: int = 2, N: int = 8) -> Multiplier:
    coeffs = [complex(c) for c in coeffs]
    label = "one-var:" + ",".join(_fmt(c) for c in coeffs)
    return _build(d, N, label, lambda zs: _poly(zs[0], coeffs))


def product_nonextreme(factor: Sequence[complex] = DEFAULT_PRODUCT_FACTOR, d: int = 2, N: int = 8) -> Multiplier:
    factor = [complex(c) for c in factor]
    label = "product-nonextreme:" + ",".join(_fmt(c) for c in factor)

    def fn(zs):
        out = 1
        for z in zs:
            out = out * _poly(z, factor)
        return out

    return _build(d, N, label, fn)


def _fmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c).strip("()")


def parse_builtin(spec: str, d: int | None = None, N: int = 8) -> Multiplier:
    """Build a multiplier from its registry string.

    ``d`` is required to agree with dimensions implied by the string
    (``cuntz``, ``atoms``, ``two-point``) and defaults to 2 otherwise.
    """
    name, _, arg = spec.strip().partition(":")
    name = name.strip().lower()

    def dim(implied: int | None) -> int:
        if implied is not None and d is not None and d != implied:
            raise ValueError(f"builtin {spec!r} has dimension {implied}, but d={d} was requested")
        return implied if implied is not None else (d if d is not None else 2)

    if name == "zero":
        return zero(dim(None), N)
    if name == "coordinate":
        return coordinate(dim(None), N)
    if name == "cuntz":
        if not arg:
            raise ValueError("cuntz needs a unit vector, e.g. cuntz:0.6,0.8")
        zeta = parse_vector(arg)
        dim(len(zeta))
        return cuntz(zeta, N)
    if name == "two-point":
        dim(2)
        return two_point(N)
    if name == "one-var":
        if not arg:
            raise ValueError("one-var needs coefficients, e.g. one-var:0,0,1")
        return one_var(parse_vector(arg), dim(None), N)
    if name == "product-nonextreme":
        factor = parse_vector(arg) if arg else DEFAULT_PRODUCT_FACTOR
        return product_nonextreme(factor, dim(None), N)
    if name == "atoms":
        if not arg:
            raise ValueError("atoms needs points and weights, e.g. atoms:1,0@0.5;0,1@0.5")
        pts, wts = [], []
        for chunk in arg.split(";"):
            p, sep, w = chunk.partition("@")
            if not sep:
                raise ValueError(f"atom {chunk!r} lacks '@weight'")
            pts.append(parse_vector(p))
            wts.append(float(w))
        dim(len(pts[0]))
        return atoms(pts, wts, N)
    raise ValueError(f"unknown builtin {spec!r}; grammar:\n{GRAMMAR}")


_EXPECTED_QE = {"zero": False, "coordinate": True, "cuntz": True, "two-point": True, "product-nonextreme": False}


def expected_quasi_extreme(label: str | None) -> bool | None:
    """Documented quasi-extremality of a builtin family, ``None`` when not fixed by the family.

    ``one-var`` is expected quasi-extreme when it is a unimodular monomial ``c t^k``.
    """
    if not label:
        return None
    name, _, arg = label.partition(":")
    if name in _EXPECTED_QE:
        return _EXPECTED_QE[name]
    if name == "one-var":
        coeffs = parse_vector(arg)
        nz = np.flatnonzero(coeffs)
        return bool(len(nz) == 1 and nz[0] > 0 and abs(abs(coeffs[nz[0]]) - 1) < 1e-12) or None
    return None


BUILTIN_NAMES = ("zero", "coordinate", "cuntz", "two-point", "one-var", "product-nonextreme", "atoms")
