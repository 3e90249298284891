import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncclark._basis import monomial_basis
from ncclark.series import (
    Multiplier,
    SingularityError,
    TruncatedSeries,
    cayley_herglotz,
    geometric_tail,
    inverse_cayley,
    restriction_warning,
    ts_evaluate,
)


def _dict_mul(a, b, N):
    out = {}
    for n, x in a.items():
        for m, y in b.items():
            k = tuple(i + j for i, j in zip(n, m))
            if sum(k) <= N:
                out[k] = out.get(k, 0) + x * y
    return out


coeff = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.data())
def test_mul_matches_dictionary_convolution(d, N, data):
    K = len(monomial_basis(d, N))
    a = np.array(data.draw(st.lists(coeff, min_size=K, max_size=K)))
    b = np.array(data.draw(st.lists(coeff, min_size=K, max_size=K)))
    A, B = TruncatedSeries(d, N, a), TruncatedSeries(d, N, b)
    ref = _dict_mul(A.to_dict(), B.to_dict(), N)
    got = (A * B).to_dict()
    for k in set(ref) | set(got):
        assert abs(ref.get(k, 0) - got.get(k, 0)) <= 1e-12 * (1 + abs(ref.get(k, 0)))


def test_mul_both_backends(backend, rng):
    d, N = 3, 6
    K = len(monomial_basis(d, N))
    a = TruncatedSeries(d, N, rng.normal(size=K) + 1j * rng.normal(size=K))
    b = TruncatedSeries(d, N, rng.normal(size=K))
    ref = _dict_mul(a.to_dict(), b.to_dict(), N)
    got = (a * b).to_dict()
    assert max(abs(ref[k] - got.get(k, 0)) for k in ref) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 6), st.data())
def test_reciprocal(d, N, data):
    K = len(monomial_basis(d, N))
    a = np.array(data.draw(st.lists(coeff, min_size=K, max_size=K)))
    a[0] = 1 + data.draw(st.floats(0.5, 2.0))
    A = TruncatedSeries(d, N, a)
    one = A * (1 / A)
    assert np.allclose(one.coeffs, TruncatedSeries.one(d, N).coeffs, atol=1e-8 * max(1, np.abs(a).max()) ** N)


def test_reciprocal_singular():
    with pytest.raises(SingularityError):
        1 / TruncatedSeries.variable(2, 3, 0)
    assert issubclass(SingularityError, ZeroDivisionError)


def test_geometric_example():
    z1 = TruncatedSeries.variable(1, 6, 0)
    g = 1 / (1 - z1)
    assert np.allclose(g.coeffs, 1)


def test_evaluate(backend):
    z = [TruncatedSeries.variable(2, 4, j) for j in range(2)]
    p = 1 + 2 * z[0] * z[1] - z[1] ** 3
    pts = np.array([[0.3, -0.2j], [0.1, 0.5]])
    exact = 1 + 2 * pts[:, 0] * pts[:, 1] - pts[:, 1] ** 3
    assert np.allclose(ts_evaluate(p, pts), exact, atol=1e-15)
    assert np.isclose(p(pts[0]), exact[0])


def test_json_roundtrip():
    s = TruncatedSeries.linear(2, 3, [0.5, -0.5j], 0.1)
    t = TruncatedSeries.from_json(s.to_json())
    assert np.array_equal(s.coeffs, t.coeffs)


def test_multiplier_validation():
    with pytest.raises(ValueError):
        Multiplier(TruncatedSeries.constant(2, 3, 1.0))


def test_cayley_roundtrip():
    b = Multiplier(TruncatedSeries.linear(2, 6, [0.3, 0.4], 0.2))
    back = inverse_cayley(cayley_herglotz(b, 1j))
    # inverse_cayley recovers conj(alpha) b
    assert np.allclose(back.series.coeffs, -1j * b.series.coeffs, atol=1e-14)


def test_truncate_and_tail():
    s = TruncatedSeries.variable(2, 5, 0) ** 4
    assert s.truncate(3).max_abs() == 0
    assert geometric_tail(0.5, 3) == pytest.approx(0.5**4 / 0.5)


def test_restriction_warning():
    bad = Multiplier(TruncatedSeries.linear(1, 2, [0.99], 0.3))
    with pytest.warns(RuntimeWarning):
        assert restriction_warning(bad)
