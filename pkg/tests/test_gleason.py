import numpy as np
import pytest

from ncclark import builtins as B
from ncclark import gleason as gl
from ncclark.hbspace import sample_points
from ncclark.series import TruncatedSeries
from ncclark.states import PreconditionError

Z = sample_points(2, 12)


@pytest.fixture(scope="module")
def cuntz_data():
    return gl.compute_bj(B.cuntz([0.6, 0.8j]))


def test_cuntz_bj_are_constants(cuntz_data):
    # b = <z, zeta>: b_j = conj(zeta_j), ||b_j||^2 = |zeta_j|^2
    vals = cuntz_data.bj_values(Z)
    assert np.allclose(vals, np.array([0.6, -0.8j])[None, :], atol=1e-12)
    assert np.allclose(cuntz_data.bj_norm_sq, [0.36, 0.64], atol=1e-12)
    assert cuntz_data.projection_degree == 1


def test_one_var_square():
    g = gl.compute_bj(B.one_var([0, 0, 1], 2))
    vals = g.bj_values(Z)
    assert np.allclose(vals[:, 0], Z[:, 0], atol=1e-10)
    assert np.allclose(vals[:, 1], 0, atol=1e-10)
    assert g.projection_degree == 2


def test_identities(qe_builtin):
    g = gl.compute_bj(qe_builtin)
    assert gl.gleason_residual(g, gl.probe_grid(2)) < 1e-6
    assert gl.extremality_gap(g) < 1e-6
    assert gl.kernel_gleason_residual(g, Z[:4], Z) < 1e-8
    assert gl.adjoint_consistency(g, Z[:4]) < 1e-8
    form = gl.contractivity_form(g, Z)
    assert form["minEigenvalueRelative"] >= -1e-7


def test_pullback_matches_reproducing_property(cuntz_data):
    assert np.allclose(cuntz_data.kernel_bj_inner(Z), cuntz_data.bj_values(Z).conj(), atol=1e-10)


def test_not_quasi_extreme_needs_tables():
    with pytest.raises(PreconditionError, match="not quasi-extreme"):
        gl.compute_bj(B.product_nonextreme(), max_degree=3)


def test_explicit_tables():
    b = B.product_nonextreme()
    # b(z) - b(0) = z1 (1/4) + z2 (1/4 + z1/4)
    z1 = TruncatedSeries.variable(2, 8, 0)
    bj = [TruncatedSeries.constant(2, 8, 0.25), 0.25 + 0.25 * z1]
    g = gl.compute_bj(b, bj=bj, bj_norm_sq=[0.1, 0.2])
    assert not g.quasi_extreme
    assert gl.gleason_residual(g, gl.probe_grid(2)) < 1e-14


def test_zero_gets_vanishing_bj():
    g = gl.compute_bj(B.zero())
    assert not g.quasi_extreme and g.sum_norm_sq == 0
    rep = gl.resolvent_kernel_check(g, [0.3, 0.2], sample_points(2, 6, 0.6))
    assert rep.error < 1e-12


def test_x_star_on_kernel(cuntz_data):
    # X_j* f (z) = z_j f(z) - <f, b_j> b(z)
    w = Z[:2]
    a = np.array([1.0, -0.5j])
    out = gl.apply_x_star(cuntz_data, 0, a, w, Z)
    f = (1 - np.outer(cuntz_data.b(Z), cuntz_data.b(w).conj())) / (1 - Z @ w.conj().T) @ a
    fb = a @ cuntz_data.bj_values(w)[:, 0].conj()
    assert np.allclose(out, Z[:, 0] * f - fb * cuntz_data.b(Z), atol=1e-10)


@pytest.mark.parametrize("alpha", [1.0, 1j, -1.0])
def test_clark(qe_builtin, alpha):
    g = gl.compute_bj(qe_builtin)
    r = gl.clark_perturb_and_intertwine(g, alpha, Z[:5])
    assert r.intertwine_residual < 1e-6
    assert r.isometry_defect < 1e-7


def test_clark_classical_d1():
    g = gl.compute_bj(B.one_var([0, 0, 1], 1))
    pts = sample_points(1, 8)
    for alpha in (1.0, 1j, np.exp(2j)):
        r = gl.clark_perturb_and_intertwine(g, alpha, pts)
        assert r.intertwine_residual < 1e-6
        assert r.isometry_defect < 1e-7


def test_resolvent(qe_builtin):
    g = gl.compute_bj(qe_builtin)
    U = sample_points(2, 8, 0.6, seed=2)
    for z in U[:3]:
        assert gl.resolvent_kernel_check(g, z, U).error < 1e-6


def test_resolvent_coefficients_sum():
    # the Neumann coefficients must add up to conj(b(z) - b(0))
    g = gl.compute_bj(B.one_var([0, 0, 1], 2))
    z = np.array([0.4, 0.3j])
    s = gl._resolvent_coefficients(g, z, 200)
    assert abs(s.sum() - np.conj(g.b(z) - g.b.b0)) < 1e-12


def test_uniqueness_probe(cuntz_data):
    cands = gl.uniqueness_probe(cuntz_data, trials=8)
    assert all(c.violates for c in cands)
    assert all(abs(c.norm_sq - 1) < 1e-12 for c in cands)


def test_angular_coordinate():
    b = B.coordinate()
    ad = gl.angular_derivative(b, [1, 0])
    assert ad.converged and ad.L == pytest.approx(1, abs=1e-6)
    ad2 = gl.angular_derivative(b, [0, 1])
    assert not ad2.converged and ad2.verdict == "no finite angular derivative"
    assert np.allclose(ad2.values, 1 / (1 - ad2.radii**2))


def test_angular_inconclusive_for_short_table():
    b = B.two_point(N=4)
    user = type(b)(b.series)  # table only, no exact evaluator
    ad = gl.angular_derivative(user, [1, 0])
    assert ad.verdict == "inconclusive"


def test_angular_off_sphere():
    with pytest.raises(ValueError):
        gl.angular_derivative(B.coordinate(), [0.5, 0])


def test_eigen_coordinate():
    g = gl.compute_bj(B.coordinate())
    e = gl.eigen_check(g, 1.0, [1, 0], Z)
    assert e.verdict == "eigenvalue"
    assert e.residual < 1e-8
    assert e.eigenfunction_norm_sq == pytest.approx(1, abs=1e-6)
    assert gl.eigen_check(g, 1.0, [0, 1]).verdict == "no eigenvalue predicted"
    assert gl.eigen_check(g, 1j, [1, 0]).verdict == "no eigenvalue predicted"


def test_eigen_cuntz(cuntz_data):
    e = gl.eigen_check(cuntz_data, 1.0, [0.6, 0.8j], Z)
    assert e.verdict == "eigenvalue" and e.residual < 1e-8
    assert abs(e.eigenfunction_norm_sq - e.L) < 1e-6


def test_eigen_square_d1():
    g = gl.compute_bj(B.one_var([0, 0, 1], 1))
    e = gl.eigen_check(g, -1.0, [1j], sample_points(1, 8))
    assert e.verdict == "eigenvalue" and e.residual < 1e-8
    assert e.L == pytest.approx(2, abs=1e-6)
    assert e.eigenfunction_norm_sq == pytest.approx(2, abs=1e-6)
