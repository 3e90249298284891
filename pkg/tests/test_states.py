import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncclark import builtins as B
from ncclark.gns import build_gns_space
from ncclark.states import (
    MomentState,
    PreconditionError,
    WordState,
    ac_state,
    disintegration_by_moments,
    disintegration_check,
    extend_to_words,
    herglotz_from_state,
    measure_moments,
    orbit_vector,
    state_from_atoms,
    vacuum_state,
    word_consistency,
)

import oracles


def test_zero_gives_vacuum():
    mu = ac_state(B.zero(2, 6), 1.0, 6)
    assert np.array_equal(mu.moments, vacuum_state(2, 6).moments)


def test_measure_moments_carry_orbit_factor():
    # the state of an atomic measure is orbit(n) times the plain moment
    pts = [(0.6, 0.8j), (1, 0)]
    w = [0.3, 0.7]
    mu, _ = state_from_atoms(pts, w, 5)
    ref = orbit_vector(2, 5) * measure_moments(pts, w, 5)
    assert np.allclose(mu.moments, ref, atol=1e-13)


def test_two_point_moments_against_oracle():
    mu = ac_state(B.two_point(), 1.0, 5)
    mom = oracles.atom_moments([(1, 0), (0, 1)], [0.5, 0.5])
    for n, v in zip(mu.basis.exps, mu.moments):
        assert abs(v - complex(mom(tuple(int(x) for x in n)))) < 1e-12


@pytest.mark.parametrize("alpha", [1.0, 1j, -1.0, np.exp(0.3j)])
def test_alpha_masses(alpha):
    b = B.one_var([0.3, 0.5], 2)
    mu = ac_state(b, alpha, 4)
    b0 = 0.3
    assert mu.mass == pytest.approx((1 - b0**2) / abs(1 - np.conj(alpha) * b0) ** 2)


def test_herglotz_roundtrip():
    mu = ac_state(B.cuntz([0.6, 0.8]), 1.0, 4)
    f = herglotz_from_state(mu)
    back = MomentState(2, 4, np.where(np.arange(len(f.coeffs)) == 0, f.coeffs.real, f.coeffs.conj() / 2))
    assert np.allclose(back.moments, mu.moments)


def test_invalid_mass():
    with pytest.raises(ValueError):
        MomentState(1, 1, [1j, 0])


def test_json_roundtrip():
    mu = ac_state(B.two_point(), 1j, 3)
    back = MomentState.from_json(mu.to_json())
    assert np.array_equal(back.moments, mu.moments)


def test_state_needs_unimodular_alpha():
    with pytest.raises(ValueError, match="unimodular"):
        ac_state(B.zero(), 0.5)


def test_extension_of_cuntz_is_product_state():
    zeta = np.array([0.6, 0.8j])
    mu = ac_state(B.cuntz(zeta), 1.0, 8)
    nu = extend_to_words(mu, 4)
    # nu(L_w) = prod zeta_{w_k}
    for w, v in nu.word_moments.items():
        assert abs(v - np.prod([zeta[i - 1] for i in w])) < 1e-10
    assert word_consistency(nu, mu) < 1e-10
    assert WordState.from_json(nu.to_json()).word_moments == nu.word_moments


def test_extension_needs_quasi_extreme():
    with pytest.raises(PreconditionError):
        extend_to_words(ac_state(B.product_nonextreme(), 1.0, 8), 3)


@pytest.mark.parametrize("spec", ["zero", "coordinate", "cuntz:0.6,0.8j", "two-point", "product-nonextreme", "one-var:0,0,1"])
def test_disintegration(spec):
    b = B.parse_builtin(spec)
    rep = disintegration_check(b, [0.3, -0.2j], 512)
    assert rep.error < 1e-8


def test_disintegration_by_moments():
    b = B.cuntz([0.6, 0.8])
    v = disintegration_by_moments(b, [0.2, 0.1], nodes=32, degree=10)
    assert abs(v - 1) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0.05, 0.95))
def test_atomic_gram_psd(theta, weight):
    pts = [(np.cos(theta), np.sin(theta) * 1j), (0, 1)]
    mu, _ = state_from_atoms(pts, [weight, 1 - weight], 8)
    assert build_gns_space(mu, 4).min_eigenvalue() > -1e-8
