"""Named checks, each returning a :class:`~ncclark.reports.Report`.

The command line is a thin wrapper around these functions; the tolerances
below are the defaults it applies.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import gleason as gl
from .builtins import expected_quasi_extreme
from .freealg import fock_oracle
from .gns import (
    build_extended_gns,
    build_gns_space,
    build_gns_tuple,
    coisometry_defect,
    distance_curve,
    row_contraction_norm,
    row_isometry_defect,
    row_unitary_defect,
    vector_state_error,
)
from .hbspace import TransformContext, nc_kernel_identity, sample_points, unitarity_check
from .reports import Report
from .series import Multiplier
from .states import DEFAULT_QE_THRESHOLD, MomentState, PreconditionError, ac_state, disintegration_check, extend_to_words, word_consistency

TOL = {
    "gramPsd": -1e-8,
    "hermitian": 1e-12,
    "qeDistance": 1e-8,
    "nonQeDistance": 0.01,
    "monotone": 1e-10,
    "rowContraction": 1e-8,
    "coisometry": 1e-6,
    "vectorState": 1e-6,
    "extension": 1e-8,
    "rowIsometry": 1e-10,
    "rowUnitary": 1e-6,
    "unitarity": 1e-6,
    "gleasonResidual": 1e-6,
    "extremality": 1e-6,
    "contractivity": -1e-7,
    "kernelGleason": 1e-8,
    "adjoint": 1e-8,
    "uniqueness": 1e-8,
    "intertwine": 1e-6,
    "isometry": 1e-7,
    "eigenResidual": 1e-8,
    "eigenNorm": 1e-6,
    "disintegration": 1e-8,
    "resolvent": 1e-6,
    "oracle": 1e-12,
}

DEFAULT_ALPHAS = (1.0, 1j, -1.0)


def _inputs(b: Optional[Multiplier], **extra) -> dict:
    out = {}
    if b is not None:
        out["multiplier"] = b.label or "table"
        out["d"] = b.d
        out["tableDegree"] = b.N
    out.update(extra)
    return out


def state_for(b: Multiplier, N: int, alpha: complex = 1.0) -> MomentState:
    """``mu_alpha`` with moments to degree ``2N``, enough for a GNS Gram of degree ``N``."""
    return ac_state(b, alpha, 2 * N)


def moments_check(b: Multiplier, alpha: complex, N: int) -> Report:
    mu = ac_state(b, alpha, N)
    rep = Report("moments", _inputs(b, alpha=alpha, N=N), {"N": N})
    rep.data["moments"] = [
        {"index": list(map(int, n)), "value": complex(v)} for n, v in zip(mu.basis.exps, mu.moments)
    ]
    rep.data["mass"] = mu.mass
    rep.verdict = "computed"
    rep._table = mu  # for CSV export
    return rep


def gram_check(mu: MomentState, N: int) -> Report:
    space = build_gns_space(mu, N)
    G = space.gram
    rep = Report("gram", {"state": mu.provenance, "d": mu.d, "N": N}, {"N": N})
    eig = np.linalg.eigvalsh(G)
    rep.residual("minEigenvalue", eig[0], TOL["gramPsd"], "min")
    rep.residual("g00MinusMass", abs(G[0, 0] - mu.mass), TOL["hermitian"])
    rep.data["size"] = len(G)
    rep.data["maxEigenvalue"] = float(eig[-1])
    rep.verdict = "positive semidefinite" if rep.status == "ok" else "not positive semidefinite"
    rep._matrix = G
    return rep


def quasiextreme_check(mu: MomentState, N: int, expect: Optional[bool] = None,
                       threshold: float = DEFAULT_QE_THRESHOLD) -> Report:
    degrees = list(range(1, N + 1))
    curve = distance_curve(mu, degrees)
    rep = Report("quasiextreme", {"state": mu.provenance, "d": mu.d, "N": N, "expected": expect},
                 {"N": N, "threshold": threshold})
    rep.data["curve"] = [{"N": n, "distanceSq": c} for n, c in zip(degrees, curve)]
    rise = max([0.0] + [curve[i + 1] - curve[i] for i in range(len(curve) - 1)])
    rep.residual("monotoneViolation", rise, TOL["monotone"])
    qe_at = next((n for n, c in zip(degrees, curve) if c < threshold), None)
    rep.data["quasiExtremeAt"] = qe_at
    rep.verdict = "quasi-extreme" if qe_at is not None else "not quasi-extreme"
    if expect is True:
        rep.residual("minDistanceSq", min(curve), TOL["qeDistance"], note="expected quasi-extreme")
    elif expect is False:
        rep.residual("minDistanceSq", min(curve), TOL["nonQeDistance"], "min", note="expected not quasi-extreme")
    rep._curve = (degrees, curve)
    return rep


def gns_check(mu: MomentState, N: int, threshold: float = DEFAULT_QE_THRESHOLD) -> Report:
    tup = build_gns_tuple(build_gns_space(mu, N))
    qe = tup.distance_sq < threshold
    rep = Report("gns", {"state": mu.provenance, "d": mu.d, "N": N}, {"N": N, "threshold": threshold})
    rep.residual("rowContractionExcess", row_contraction_norm(tup) - 1, TOL["rowContraction"])
    cd = coisometry_defect(tup)
    rep.data["projectionDegree"] = tup.projection_degree
    rep.data["distanceSq"] = tup.distance_sq
    if qe:
        rep.residual("coisometryDefect", cd, TOL["coisometry"])
        rep.residual("vectorStateError", vector_state_error(tup, min(4, N - 1)), TOL["vectorState"])
        rep.verdict = "quasi-extreme"
    else:
        rep.residual("coisometryDefect", cd, None, note="not quasi-extreme; reported only")
        rep.verdict = "not quasi-extreme"
    return rep


def extend_check(mu: MomentState, max_len: int, gns_degree: Optional[int] = None) -> Report:
    rep = Report("extend", {"state": mu.provenance, "d": mu.d, "maxLen": max_len, "gnsDegree": gns_degree},
                 {"N": mu.N})
    try:
        nu = extend_to_words(mu, max_len, gns_degree)
    except PreconditionError as exc:
        rep.error("extension", exc)
        rep.verdict = "precondition failed"
        return rep
    rep.residual("consistency", word_consistency(nu, mu, min(4, max_len, mu.N)), TOL["extension"])
    ext = build_extended_gns(nu)
    rep.residual("rowIsometryDefect", row_isometry_defect(ext), TOL["rowIsometry"])
    rep.residual("rowUnitaryDefect", row_unitary_defect(ext), TOL["rowUnitary"])
    rep.data["words"] = len(ext.words)
    rep.verdict = "consistent" if rep.status == "ok" else "inconsistent"
    return rep


def fantappie_check(b: Multiplier, alphas: Sequence[complex], points: np.ndarray,
                    radius: Optional[float] = None) -> Report:
    pts = np.atleast_2d(points)
    r = float(np.linalg.norm(pts, axis=1).max()) if radius is None else radius
    rep = Report("fantappie", _inputs(b, alphas=list(alphas), points=len(pts), radius=r))
    for a in alphas:
        ctx = TransformContext(b, a, max(r, 1e-3))
        u = unitarity_check(ctx, pts)
        lhs, rhs = nc_kernel_identity(ctx, pts[0], pts[-1])
        key = _akey(a)
        rep.residual(f"unitarity[{key}]", u.max_abs_error, TOL["unitarity"])
        rep.residual(f"kernelIdentity[{key}]", abs(lhs - rhs), TOL["unitarity"])
        rep.convention.setdefault("tailDegree", ctx.T)
        rep.convention.setdefault("tailBound", u.tail_bound)
    rep.verdict = "unitary on samples" if rep.status == "ok" else "unitarity mismatch"
    return rep


def _akey(a: complex) -> str:
    a = complex(a)
    return f"{a.real:.6g}{a.imag:+.6g}i"


def gleason_data(b: Multiplier, radius: float = 0.5, max_degree: int = gl.MAX_PROJECTION_DEGREE,
                 bj=None, bj_norm_sq=None) -> gl.GleasonData:
    return gl.compute_bj(b, radius=radius, bj=bj, bj_norm_sq=bj_norm_sq, max_degree=max_degree)


def gleason_check(b: Multiplier, points: np.ndarray, g: Optional[gl.GleasonData] = None,
                  max_degree: int = gl.MAX_PROJECTION_DEGREE, seed: int = 0) -> Report:
    rep = Report("gleason", _inputs(b, points=len(points), seed=seed))
    if g is None:
        try:
            g = gleason_data(b, max_degree=max_degree)
        except PreconditionError as exc:
            rep.error("computeBj", exc)
            rep.verdict = "precondition failed"
            return rep
    rep.convention["tailDegree"] = g.tail_degree
    rep.data.update({k: v for k, v in g.to_json().items() if k != "bj"})
    rep.residual("gleasonResidual", gl.gleason_residual(g, gl.probe_grid(g.d)), TOL["gleasonResidual"])
    gap = gl.extremality_gap(g)
    if g.quasi_extreme:
        rep.residual("extremalityGap", gap, TOL["extremality"])
    else:
        rep.residual("normExcess", g.sum_norm_sq - (1 - abs(g.b.b0) ** 2), TOL["extremality"])
    form = gl.contractivity_form(g, points)
    rep.residual("contractivityMinEigenvalue", form["minEigenvalueRelative"], TOL["contractivity"], "min")
    rep.data["contractivityMinEigenvalueAbsolute"] = form["minEigenvalue"]
    sub = points[: min(4, len(points))]
    rep.residual("kernelGleasonResidual", gl.kernel_gleason_residual(g, sub, points), TOL["kernelGleason"])
    rep.residual("adjointConsistency", gl.adjoint_consistency(g, sub), TOL["adjoint"])
    if g.quasi_extreme:
        cands = gl.uniqueness_probe(g, seed=seed, tol=TOL["uniqueness"])
        rep.residual("uniquenessNonViolations", sum(not c.violates for c in cands), 0.0)
        rep.data["uniquenessProbe"] = [
            {"epsilon": c.epsilon, "residual": c.residual, "normSq": c.norm_sq, "violates": c.violates} for c in cands
        ]
    rep.verdict = "extremal Gleason solution" if g.quasi_extreme else "Gleason solution (non-extremal data)"
    rep._gleason = g
    return rep


def clark_check(g: gl.GleasonData, alphas: Sequence[complex], points: np.ndarray) -> Report:
    rep = Report("clark", _inputs(g.b, alphas=list(alphas), points=len(points)), {"tailDegree": g.tail_degree})
    for a in alphas:
        r = gl.clark_perturb_and_intertwine(g, a, points)
        key = _akey(a)
        rep.residual(f"intertwine[{key}]", r.intertwine_residual, TOL["intertwine"])
        rep.residual(f"isometryDefect[{key}]", r.isometry_defect, TOL["isometry"])
        rep.data[key] = r.to_json()
    rep.verdict = "intertwined" if rep.status == "ok" else "intertwining mismatch"
    return rep


def boundary_check(b: Multiplier, zetas: Sequence[np.ndarray], alphas: Sequence[complex],
                   g: Optional[gl.GleasonData] = None, points: Optional[np.ndarray] = None,
                   max_degree: int = gl.MAX_PROJECTION_DEGREE) -> Report:
    rep = Report("boundary", _inputs(b, zetas=[list(z) for z in zetas], alphas=list(alphas)))
    rep._schedules = []
    verdicts = []
    for zi, zeta in enumerate(zetas):
        ang = gl.angular_derivative(b, zeta)
        rep._schedules.append((zi, ang))
        entry = {"angular": ang.to_json(), "eigen": {}}
        if ang.verdict == "inconclusive":
            rep.inconclusive = True
        for a in alphas:
            key = f"{zi}:{_akey(a)}"
            if not ang.converged or abs(ang.boundary_value - a) > 1e-3:
                entry["eigen"][_akey(a)] = {"verdict": "no eigenvalue predicted" if ang.verdict != "inconclusive" else "inconclusive"}
                verdicts.append(entry["eigen"][_akey(a)]["verdict"])
                continue
            if g is None:
                try:
                    g = gleason_data(b, max_degree=max_degree)
                except PreconditionError as exc:
                    rep.error(f"eigen[{key}]", exc)
                    continue
            e = gl.eigen_check(g, a, zeta, points)
            entry["eigen"][_akey(a)] = e.to_json()
            verdicts.append(e.verdict)
            if e.verdict == "inconclusive":
                rep.inconclusive = True
            elif e.verdict == "eigenvalue":
                rep.residual(f"eigenResidual[{key}]", e.residual, TOL["eigenResidual"])
                rep.residual(f"normSqMinusL[{key}]", abs(e.eigenfunction_norm_sq - e.L), TOL["eigenNorm"])
        rep.data[str(zi)] = entry
    rep.verdict = ", ".join(sorted(set(verdicts))) if verdicts else "no eigenvalue predicted"
    return rep


def disintegrate_check(b: Multiplier, points: np.ndarray, nodes: int = 512) -> Report:
    rep = Report("disintegrate", _inputs(b, points=len(points), nodes=nodes))
    worst = max(disintegration_check(b, z, nodes).error for z in np.atleast_2d(points))
    rep.residual("quadratureError", worst, TOL["disintegration"])
    rep.verdict = "vacuum recovered" if rep.status == "ok" else "mismatch"
    return rep


def resolvent_check(g: gl.GleasonData, points: np.ndarray) -> Report:
    rep = Report("resolvent", _inputs(g.b, points=len(points)))
    worst = 0.0
    terms = 0
    for z in np.atleast_2d(points):
        r = gl.resolvent_kernel_check(g, z, points)
        worst = max(worst, r.error)
        terms = max(terms, r.terms)
    rep.residual("kernelError", worst, TOL["resolvent"])
    rep.data["maxTerms"] = terms
    rep.verdict = "functional model kernel reproduced" if rep.status == "ok" else "mismatch"
    return rep


def oracle_check(d: int, max_len: int = 6, max_degree: int = 3) -> Report:
    r = fock_oracle(d, max_len, max_degree)
    rep = Report("oracle", {"d": d, "maxLen": max_len, "maxDegree": max_degree})
    rep.residual("maxAbsError", r.max_abs_error, TOL["oracle"])
    rep.data.update(r.to_json())
    rep.verdict = "symbolic and Fock products agree" if rep.status == "ok" else "mismatch"
    return rep


def default_zetas(b: Multiplier) -> list[np.ndarray]:
    zs = [np.eye(b.d, dtype=np.complex128)[j] for j in range(b.d)]
    if b.label and b.label.startswith("cuntz:"):
        from .builtins import parse_vector

        zs.append(parse_vector(b.label.split(":", 1)[1]))
    return zs


def suite(b: Multiplier, N: int = 8, points: int = 12, seed: int = 0, max_len: int = 5,
          alphas: Sequence[complex] = DEFAULT_ALPHAS, zetas: Optional[Sequence[np.ndarray]] = None) -> Report:
    """Every check that applies to ``b``, folded into one report.

    Checks that need a quasi-extreme ``b`` run when the distance curve says
    so or when the builtin family is expected to be quasi-extreme; in the
    latter case a failed precondition is a failure of the suite.
    """
    rep = Report("suite", _inputs(b, N=N, points=points, seed=seed, maxLen=max_len, alphas=list(alphas)), {"N": N})
    pts = sample_points(b.d, points, 0.5, seed)
    expect = expected_quasi_extreme(b.label)
    mu = state_for(b, N)

    def run(name, fn):
        try:
            sub = fn()
        except Exception as exc:  # recorded, the suite carries on
            rep.error(name, exc)
            return None
        rep.merge(name, sub)
        return sub

    run("oracle", lambda: oracle_check(b.d))
    run("gram", lambda: gram_check(mu, N))
    qe_rep = run("quasiextreme", lambda: quasiextreme_check(mu, N, expect))
    qe = qe_rep is not None and qe_rep.verdict == "quasi-extreme"
    run("gns", lambda: gns_check(mu, N))
    if qe or expect:
        run("extend", lambda: extend_check(state_for(b, max(N, 2 * max_len)), max_len, N))
    run("fantappie", lambda: fantappie_check(b, (1.0,), pts[:10]))
    run("disintegrate", lambda: disintegrate_check(b, pts))
    g = None
    if qe or expect or not np.any(b.series.coeffs[1:]):
        gl_rep = run("gleason", lambda: gleason_check(b, pts, max_degree=N, seed=seed))
        g = getattr(gl_rep, "_gleason", None) if gl_rep is not None else None
    if g is not None and g.quasi_extreme:
        run("clark", lambda: clark_check(g, alphas, pts[:5]))
    if g is not None:
        run("resolvent", lambda: resolvent_check(g, sample_points(b.d, 6, 0.6, seed)))
    zs = default_zetas(b) if zetas is None else zetas
    run("boundary", lambda: boundary_check(b, zs, (1.0,), g, pts, max_degree=N))
    rep.verdict = rep.status
    return rep
