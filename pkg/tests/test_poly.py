import numpy as np
from hypothesis import given, settings, strategies as st

from starweyl.poly import Poly

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
terms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coef, min_size=1, max_size=6)
point = st.tuples(coef, coef)


@settings(max_examples=50)
@given(terms, terms, point)
def test_product_evaluates_pointwise(a, b, p):
    P, Q = Poly.from_terms(2, a), Poly.from_terms(2, b)
    x = np.array([p])
    assert np.allclose((P * Q).evaluate(x), P.evaluate(x) * Q.evaluate(x), rtol=1e-10, atol=1e-8)


@settings(max_examples=50)
@given(terms, terms, st.sampled_from([0, 1]))
def test_leibniz(a, b, i):
    P, Q = Poly.from_terms(2, a), Poly.from_terms(2, b)
    pts = np.array([[0.3, -0.7j], [1.1, 0.4]])
    lhs = (P * Q).diff(i).evaluate(pts)
    rhs = (P.diff(i) * Q + P * Q.diff(i)).evaluate(pts)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-9)


@settings(max_examples=50)
@given(terms)
def test_terms_round_trip(a):
    P = Poly.from_terms(2, a)
    assert Poly.from_terms(2, P.terms()).trim().c.tolist() == P.trim().c.tolist()
