import random

import pytest
from hypothesis import given, settings, strategies as st

from starweyl import weyl_core as wc

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([1, 2])


def _setup(seed, m, max_degree=3):
    rng = random.Random(seed)
    ctx = wc.ExpressionContext(m, wc.random_exact_K(m, rng))
    f, g, h = (wc.random_element(m, rng, max_degree=max_degree) for _ in range(3))
    return ctx, f, g, h


@settings(max_examples=25, deadline=None)
@given(seeds, dims)
def test_associative(seed, m):
    ctx, f, g, h = _setup(seed, m)
    sp = wc.star_product
    assert sp(sp(f, g, ctx), h, ctx) == sp(f, sp(g, h, ctx), ctx)


@settings(max_examples=25, deadline=None)
@given(seeds, dims)
def test_intertwiner_is_homomorphism(seed, m):
    ctx, f, g, _ = _setup(seed, m)
    Kp = wc.random_exact_K(m, random.Random(seed + 1))
    ctx2 = ctx.with_K(Kp)
    I = lambda x: wc.intertwine(x, ctx.K, Kp)
    assert I(wc.star_product(f, g, ctx)) == wc.star_product(I(f), I(g), ctx2)


@settings(max_examples=25, deadline=None)
@given(seeds, dims)
def test_intertwiners_compose_and_invert(seed, m):
    rng = random.Random(seed)
    K1, K2, K3 = (wc.random_exact_K(m, rng) for _ in range(3))
    f = wc.random_element(m, rng)
    assert wc.intertwine(wc.intertwine(f, K1, K2), K2, K3) == wc.intertwine(f, K1, K3)
    assert wc.intertwine(wc.intertwine(f, K1, K2), K2, K1) == f


@settings(max_examples=25, deadline=None)
@given(seeds, dims)
def test_hermitian_conjugation_reverses_products(seed, m):
    rng = random.Random(seed)
    ctx = wc.ExpressionContext(m)
    f, g = wc.random_element(m, rng), wc.random_element(m, rng)
    hc = wc.hermitian_conjugate
    assert hc(wc.star_product(f, g, ctx)) == wc.star_product(hc(g), hc(f), ctx)
    assert hc(hc(f)) == f


@settings(max_examples=25, deadline=None)
@given(seeds, dims)
def test_json_round_trip(seed, m):
    f = wc.random_element(m, random.Random(seed))
    assert wc.WeylElement.from_json(f.to_json()) == f


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(-3, 3).filter(lambda k: k != 0))
def test_expansive_automorphism_is_multiplicative(seed, lam):
    ctx, f, g, _ = _setup(seed, 1)
    E = lambda x: wc.expansive_automorphism(x, lam)
    assert E(wc.star_product(f, g, ctx)) == wc.star_product(E(f), E(g), ctx)


def test_canonical_commutator_any_ordering():
    rng = random.Random(5)
    for m in (1, 2, 3):
        ctx = wc.ExpressionContext(m, wc.random_exact_K(m, rng))
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                c = wc.commutator(wc.WeylElement.u(m, i), wc.WeylElement.v(m, j), ctx)
                expected = wc.WeylElement.scalar(m, (0, -1), hpow=1) if i == j else wc.WeylElement(m)
                assert c == expected


def test_dimension_mismatch():
    with pytest.raises(wc.DimensionError):
        wc.WeylElement(1, {((1, 0, 0), 0): wc.ONE})


def test_asymmetric_K_rejected():
    K = ((wc.ZERO, wc.ONE), (wc.ZERO, wc.ZERO))
    with pytest.raises(ValueError):
        wc.ExpressionContext(1, K)


def test_axioms_hold_with_hbar_regulator():
    rep = wc.check_mu_regulated_axioms(wc.ExpressionContext(1), 3)
    assert all(v["pass"] for v in rep.values())
