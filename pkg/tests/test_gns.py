import numpy as np
import pytest

from ncclark import builtins as B
from ncclark.gns import (
    build_extended_gns,
    build_gns_space,
    build_gns_tuple,
    coisometry_defect,
    complex_matrix_csv,
    distance_curve,
    gns_vector_state,
    project_identity,
    row_contraction_norm,
    row_isometry_defect,
    row_unitary_defect,
    vector_state_error,
)
from ncclark.states import PreconditionError, ac_state, extend_to_words, vacuum_state

import oracles

# frozen from the 50-digit oracle in tests/oracles.py
TWO_POINT_CURVE = [0.5, 0.25, 0.1875, 0.15432098765432099, 0.13242212848799481, 0.11643602433066394]
PRODUCT_CURVE = [1.4296296296296296, 1.3445787756668586, 1.3403988037652262, 1.339855636261178,
                 1.339810282475417, 1.3398056612957704]


def curve(b, top=6):
    return distance_curve(ac_state(b, 1.0, 2 * top), range(1, top + 1))


def test_vacuum_curve_is_one():
    assert distance_curve(vacuum_state(2, 12), range(1, 7)) == [1.0] * 6


def test_two_point_curve_frozen(backend):
    assert np.allclose(curve(B.two_point()), TWO_POINT_CURVE, rtol=0, atol=1e-12)


def test_product_curve_frozen(backend):
    assert np.allclose(curve(B.product_nonextreme()), PRODUCT_CURVE, rtol=0, atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_two_point_live_oracle(N):
    mom = oracles.atom_moments([(1, 0), (0, 1)], [0.5, 0.5])
    assert float(oracles.distance_sq(mom, 2, N)) == pytest.approx(TWO_POINT_CURVE[N - 1], abs=1e-15)


def test_product_live_oracle():
    mom = oracles.product_moments([0.5, 0.5], 6)
    assert float(oracles.distance_sq(mom, 2, 3)) == pytest.approx(PRODUCT_CURVE[2], abs=1e-14)


def test_cuntz_projection_is_witness():
    zeta = np.array([0.6, 0.8j])
    space = build_gns_space(ac_state(B.cuntz(zeta), 1.0, 2), 1)
    c, dist = project_identity(space, 1)
    assert dist < 1e-12
    # [I] = [sum conj(zeta_j) L_j] up to null vectors
    x = np.zeros(3, complex)
    x[0] = 1
    x[1:] = -zeta.conj()
    assert space.norm_sq(x) < 1e-12


def test_gram_requires_double_degree():
    with pytest.raises(ValueError):
        build_gns_space(ac_state(B.zero(), 1.0, 3), 2)


def test_tuple_on_quasi_extreme(qe_builtin, backend):
    mu = ac_state(qe_builtin, 1.0, 10)
    tup = build_gns_tuple(build_gns_space(mu, 5))
    assert tup.distance_sq < 1e-12
    assert coisometry_defect(tup) < 1e-6
    assert vector_state_error(tup, 4) < 1e-6
    assert abs(row_contraction_norm(tup) - 1) < 1e-8


def test_vacuum_not_coisometric():
    tup = build_gns_tuple(build_gns_space(vacuum_state(2, 10), 5))
    assert coisometry_defect(tup) >= 0.1
    with pytest.raises(PreconditionError):
        gns_vector_state(tup, (1, 0))


def test_row_contraction_nonextreme():
    tup = build_gns_tuple(build_gns_space(ac_state(B.product_nonextreme(), 1.0, 10), 5))
    assert row_contraction_norm(tup) <= 1 + 1e-8


def test_extended_gns(qe_builtin):
    mu = ac_state(qe_builtin, 1.0, 10)
    ext = build_extended_gns(extend_to_words(mu, 5))
    assert row_isometry_defect(ext) < 1e-12
    assert row_unitary_defect(ext) < 1e-8


def test_csv_export():
    text = complex_matrix_csv(np.array([[1 + 2j, 0], [0, 3]]))
    assert text.splitlines()[0] == "1.0,2.0,0.0,0.0"
