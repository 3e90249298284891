"""Acceptance criteria 1-12, one registered case per sub-claim.

Run ``pytest tests/test_acceptance.py`` (a per-criterion PASS/FAIL table is
printed in the terminal summary) or ``python tests/test_acceptance.py``.

Cases listed in ``KNOWN_FAILURES`` are computed exactly as stated and fail;
they are marked strict xfail so an unexpected pass breaks the run.
"""

from __future__ import annotations

import sys
from collections import defaultdict

import numpy as np
import pytest

from ncclark import builtins as B
from ncclark import gleason as gl
from ncclark.freealg import fock_oracle
from ncclark.gns import (
    build_extended_gns,
    build_gns_space,
    build_gns_tuple,
    coisometry_defect,
    distance_curve,
    project_identity,
    row_isometry_defect,
    vector_state_error,
)
from ncclark.hbspace import TransformContext, sample_points, unitarity_check
from ncclark.states import PreconditionError, ac_state, disintegration_check, extend_to_words, word_consistency

CASES: list[tuple[int, str, callable]] = []
RESULTS: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)

KNOWN_FAILURES = {
    "3:two-point distance at N=3": "distance 0.1875 at N=3 (exact 3/16); curve decreases slowly",
    "3:two-point witness p(L)": "||[I]-[p(L)]||^2 = 1.1835 for the stated polynomial",
    "4:two-point coisometry": "state not quasi-extreme at N=5",
    "5:two-point vector state": "state not quasi-extreme at N=5",
    "6:two-point extension": "state not quasi-extreme",
    "8:two-point Gleason": "no quasi-extreme Gleason data",
    "9:two-point Clark": "no quasi-extreme Gleason data",
}


def case(criterion: int, name: str):
    def deco(fn):
        CASES.append((criterion, f"{criterion}:{name}", fn))
        return fn

    return deco


def _random_zetas(d=3, k=3, seed=7):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


QE = {
    "coordinate": lambda: B.coordinate(2),
    "cuntz": lambda: B.cuntz([0.6, 0.8j]),
    "cuntz-d3": lambda: B.cuntz(_random_zetas()[0]),
    "one-var-z2": lambda: B.one_var([0, 0, 1], 2),
    "two-point": lambda: B.two_point(),
}
LIGHT_QE = list(QE)  # every builtin above is cheap at GNS degree 5
HEAVY_QE = ["coordinate", "cuntz", "one-var-z2", "two-point"]  # tail-degree checks, d = 2

ALL_BUILTINS = {
    "zero": B.zero(2),
    "coordinate": B.coordinate(2),
    "cuntz": B.cuntz([0.6, 0.8j]),
    "two-point": B.two_point(),
    "one-var-z2": B.one_var([0, 0, 1], 2),
    "product-nonextreme": B.product_nonextreme(),
}


# 1. bimodule oracle

for _d in (2, 3):

    @case(1, f"Fock oracle d={_d}")
    def _c1(d=_d):
        r = fock_oracle(d, 6, 3)
        return r.max_abs_error <= 1e-12, f"maxAbsError={r.max_abs_error:.3g} over {r.pairs} pairs"


# 2. Gram positivity

GRAM_STATES = {
    "vacuum": B.zero(2),
    **{f"cuntz-{i}": B.cuntz(z) for i, z in enumerate(_random_zetas())},
    "two-point": B.two_point(),
    "one-var b=z": B.one_var([0, 1], 2),
    "product-nonextreme": B.product_nonextreme(),
}

for _name, _b in GRAM_STATES.items():

    @case(2, f"Gram PSD {_name}")
    def _c2(b=_b):
        worst = min(build_gns_space(ac_state(b, 1.0, 2 * N), N).min_eigenvalue() for N in range(1, 7))
        return worst >= -1e-8, f"min eigenvalue over N<=6: {worst:.3g}"


# 3. quasi-extremality verdicts


@case(3, "vacuum distance 1.0")
def _c3_vac():
    curve = distance_curve(ac_state(B.zero(2), 1.0, 12), range(1, 7))
    return all(c == 1.0 for c in curve), f"curve={curve}"


for _i, _z in enumerate(_random_zetas()):

    @case(3, f"Cuntz distance N=1 #{_i}")
    def _c3_cuntz(z=_z):
        dist = distance_curve(ac_state(B.cuntz(z), 1.0, 2), [1])[0]
        return dist <= 1e-10, f"distance={dist:.3g}"


@case(3, "two-point distance at N=3")
def _c3_two():
    dist = distance_curve(ac_state(B.two_point(), 1.0, 6), [3])[0]
    return dist <= 1e-8, f"distance={dist:.17g}"


@case(3, "two-point witness p(L)")
def _c3_witness():
    space = build_gns_space(ac_state(B.two_point(), 1.0, 6), 3)
    x = np.zeros(len(space.basis), dtype=complex)
    x[0] = 1.0
    sign = {1: 1, 2: -1, 3: 1}
    for pos in range(1, len(space.basis)):
        x[pos] = -sign[int(space.basis.degrees[pos])] / np.sqrt(6)
    val = space.norm_sq(x)
    return val <= 1e-8, f"||[I]-[p(L)]||^2={val:.6g}"


@case(3, "product-nonextreme distance >= 0.01, monotone")
def _c3_prod():
    curve = distance_curve(ac_state(B.product_nonextreme(), 1.0, 12), range(1, 7))
    mono = all(curve[i + 1] <= curve[i] + 1e-12 for i in range(5))
    return min(curve) >= 0.01 and mono, "curve=" + ", ".join(f"{c:.6g}" for c in curve)


# 4-6. GNS tuple on quasi-extreme builtins


def _tuple(b, N=5):
    return build_gns_tuple(build_gns_space(ac_state(b, 1.0, 2 * N), N))


for _name in LIGHT_QE:

    @case(4, f"{_name} coisometry")
    def _c4(name=_name):
        cd = coisometry_defect(_tuple(QE[name]()))
        return cd <= 1e-6, f"defect={cd:.3g}"

    @case(5, f"{_name} vector state")
    def _c5(name=_name):
        try:
            err = vector_state_error(_tuple(QE[name]()), 4)
        except PreconditionError as exc:
            return False, str(exc)
        return err <= 1e-6, f"max error={err:.3g}"

    @case(6, f"{_name} extension")
    def _c6(name=_name):
        b = QE[name]()
        mu = ac_state(b, 1.0, 10)
        try:
            nu = extend_to_words(mu, 5)
        except PreconditionError as exc:
            return False, str(exc)
        cons = word_consistency(nu, mu, 4)
        iso = row_isometry_defect(build_extended_gns(nu))
        return cons <= 1e-8 and iso <= 1e-12, f"consistency={cons:.3g}, rowIsometry={iso:.3g}"


@case(4, "vacuum coisometry defect >= 0.1")
def _c4_vac():
    cd = coisometry_defect(_tuple(B.zero(2)))
    return cd >= 0.1, f"defect={cd:.3g}"


# 7. Fantappie unitarity

for _name in ("zero", "coordinate", "cuntz", "two-point"):

    @case(7, f"unitarity {_name}")
    def _c7(name=_name):
        b = ALL_BUILTINS[name]
        ctx = TransformContext(b, 1.0, 0.5)
        rep = unitarity_check(ctx, sample_points(2, 10, 0.5, seed=11))
        ok = rep.max_abs_error <= 1e-6 and ctx.tail_bound() < 1e-10
        return ok, f"mismatch={rep.max_abs_error:.3g}, T={ctx.T}"


# 8-9. Gleason and Clark

_GL_CACHE: dict = {}


def _gleason(name):
    if name not in _GL_CACHE:
        _GL_CACHE[name] = gl.compute_bj(QE[name]())
    return _GL_CACHE[name]


SAMPLES = sample_points(2, 12)

for _name in HEAVY_QE:

    @case(8, f"{_name} Gleason")
    def _c8(name=_name):
        try:
            g = _gleason(name)
        except PreconditionError as exc:
            return False, str(exc)
        res = gl.gleason_residual(g, gl.probe_grid(2))
        gap = gl.extremality_gap(g)
        form = gl.contractivity_form(g, SAMPLES)["minEigenvalueRelative"]
        ok = res <= 1e-6 and gap <= 1e-6 and form >= -1e-7
        return ok, f"residual={res:.3g}, gap={gap:.3g}, contractivity min={form:.3g}"

    @case(9, f"{_name} Clark")
    def _c9(name=_name):
        try:
            g = _gleason(name)
        except PreconditionError as exc:
            return False, str(exc)
        worst = max(gl.clark_perturb_and_intertwine(g, a, SAMPLES[:5]).intertwine_residual for a in (1, 1j, -1))
        return worst <= 1e-6, f"max intertwine residual={worst:.3g}"


@case(9, "d=1 one-var inner: perturbation isometric")
def _c9_d1():
    g = gl.compute_bj(B.one_var([0, 0, 1], 1))
    pts = sample_points(1, 8)
    reps = [gl.clark_perturb_and_intertwine(g, a, pts) for a in (1, 1j, -1)]
    iso = max(r.isometry_defect for r in reps)
    res = max(r.intertwine_residual for r in reps)
    return iso <= 1e-7 and res <= 1e-6, f"isometry defect={iso:.3g}, residual={res:.3g}"


# 10. boundary


@case(10, "b=z1 at e1")
def _c10_e1():
    g = gl.compute_bj(B.coordinate(2))
    e = gl.eigen_check(g, 1.0, [1, 0], SAMPLES)
    ok = (
        e.verdict == "eigenvalue"
        and abs(e.L - 1) <= 1e-6
        and abs(e.eigenfunction_norm_sq - e.L) <= 1e-6
        and e.residual <= 1e-8
    )
    return ok, f"L={e.L}, normSq={e.eigenfunction_norm_sq}, residual={e.residual}"


@case(10, "b=z1 at e2")
def _c10_e2():
    g = gl.compute_bj(B.coordinate(2))
    verdicts = {gl.eigen_check(g, a, [0, 1], SAMPLES).verdict for a in (1, 1j, -1)}
    return verdicts == {"no eigenvalue predicted"}, f"verdicts={sorted(verdicts)}"


# 11. disintegration

for _name, _b in ALL_BUILTINS.items():

    @case(11, f"disintegration {_name}")
    def _c11(b=_b):
        worst = max(disintegration_check(b, z, 512).error for z in sample_points(2, 12, 0.5))
        return worst <= 1e-8, f"max error={worst:.3g}"


# 12. resolvent kernel

for _name in ("zero", "coordinate", "cuntz", "one-var-z2"):

    @case(12, f"resolvent {_name}")
    def _c12(name=_name):
        b = ALL_BUILTINS[name]
        g = gl.compute_bj(b)
        U = sample_points(2, 8, 0.6, seed=5)
        worst = max(gl.resolvent_kernel_check(g, z, U).error for z in U)
        return worst <= 1e-6, f"max error={worst:.3g}"


# pytest glue


def _params():
    out = []
    for crit, name, fn in CASES:
        marks = []
        if name in KNOWN_FAILURES:
            marks.append(pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[name]))
        out.append(pytest.param(crit, name, fn, id=name, marks=marks))
    return out


@pytest.mark.parametrize("criterion,name,fn", _params())
def test_criterion(criterion, name, fn):
    ok, detail = fn()
    RESULTS[criterion].append((name, bool(ok), detail))
    assert ok, detail


def summary_lines() -> list[str]:
    lines = []
    for crit in sorted(RESULTS):
        rows = RESULTS[crit]
        status = "PASS" if all(ok for _, ok, _ in rows) else "FAIL"
        failed = [n.split(":", 1)[1] for n, ok, _ in rows if not ok]
        extra = f" (failing: {'; '.join(failed)})" if failed else ""
        lines.append(f"criterion {crit:2d}: {status}  {sum(ok for _, ok, _ in rows)}/{len(rows)} cases{extra}")
    return lines


if __name__ == "__main__":
    for crit, name, fn in CASES:
        try:
            ok, detail = fn()
        except Exception as exc:  # report and continue
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        RESULTS[crit].append((name, bool(ok), detail))
        print(f"  [{'ok' if ok else 'FAIL'}] {name}: {detail}")
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for rows in RESULTS.values() for _, ok, _ in rows) else 1)
