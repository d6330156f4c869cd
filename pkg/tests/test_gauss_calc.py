import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from starweyl import gauss_calc as gc
from starweyl.scenarios import random_small_gaussian
from starweyl.transcend import rel_sup

seeds = st.integers(0, 2**32 - 1)


def _ctx(seed, m=1, hbar=0.7, scale=0.5):
    rng = np.random.default_rng(seed)
    return gc.NumericContext(m, gc.random_generic_K(2 * m, rng) * scale, hbar), rng


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_product_associative(seed, m):
    ctx, rng = _ctx(seed, m)
    A, B, C = (random_small_gaussian(m, rng, scale=0.1) for _ in range(3))
    pts = ctx.grid()[:200]
    left = gc.gauss_product(gc.gauss_product(A, B, ctx), C, ctx).evaluate(pts)
    right = gc.gauss_product(A, gc.gauss_product(B, C, ctx), ctx).evaluate(pts)
    assert rel_sup(left, right) < 1e-10


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_product_matches_low_order_series(seed):
    ctx, rng = _ctx(seed, hbar=0.3)
    A, B = random_small_gaussian(1, rng, 0.02), random_small_gaussian(1, rng, 0.02)
    pts = ctx.grid()
    exact = gc.as_sum(gc.gauss_product(A, B, ctx)).evaluate(pts)
    assert rel_sup(gc.truncated_series_oracle(A, B, ctx, 8, pts), exact) < 1e-7


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_intertwiner_homomorphism(seed):
    ctx, rng = _ctx(seed)
    Kp = gc.random_generic_K(2, rng) * 0.5
    ctx2 = ctx.with_K(Kp)
    A, B = random_small_gaussian(1, rng, 0.1), random_small_gaussian(1, rng, 0.1)
    I = lambda G: gc.intertwine_gauss(G, ctx.K, Kp, ctx.hbar)
    pts = ctx.grid()
    lhs = I(gc.gauss_product(A, B, ctx)).evaluate(pts)
    rhs = gc.gauss_product(I(A), I(B), ctx2).evaluate(pts)
    assert rel_sup(lhs, rhs) < 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_hermitian_conjugate_reverses_products(seed):
    ctx, rng = _ctx(seed)
    A, B = random_small_gaussian(1, rng, 0.1), random_small_gaussian(1, rng, 0.1)
    hc = lambda G: gc.hermitian_conjugate(G, ctx)
    pts = ctx.grid()
    lhs = hc(gc.gauss_product(A, B, ctx)).evaluate(pts)
    rhs = gc.gauss_product(hc(B), hc(A), ctx).evaluate(pts)
    assert rel_sup(lhs, rhs) < 1e-10


cvec = st.tuples(*[st.floats(-1, 1)] * 4).map(lambda t: np.array([t[0] + 1j * t[1], t[2] + 1j * t[3]]))


@settings(max_examples=40, deadline=None)
@given(seeds, cvec, cvec)
def test_linear_exponentials_bch(seed, a, b):
    ctx, _ = _ctx(seed)
    h = ctx.hbar
    lhs = gc.gauss_product(gc.star_exp_linear(a, ctx), gc.star_exp_linear(b, ctx), ctx)
    rhs = gc.star_exp_linear(a + b, ctx)
    phase = 0.5 * (1 / (1j * h)) ** 2 * (a @ (1j * h * gc.standard_J(1)) @ b)
    assert abs(lhs.alpha - rhs.alpha - phase) < 1e-12
    assert np.allclose(lhs.l, rhs.l, atol=1e-12)


times = st.floats(-0.25, 0.25)


@settings(max_examples=30, deadline=None)
@given(seeds, times, times, st.sampled_from(["hyperbolic", "harmonic"]))
def test_quadratic_one_parameter_groups(seed, s, t, kind):
    ctx, _ = _ctx(seed)
    f = gc.star_exp_hyperbolic if kind == "hyperbolic" else gc.star_exp_harmonic
    pts = ctx.grid()
    prod = gc.as_sum(gc.gauss_product(f(s, ctx), f(t, ctx), ctx)).evaluate(pts)
    assert rel_sup(prod, f(s + t, ctx).evaluate(pts)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_vacuum_idempotent_and_annihilated(seed):
    ctx, _ = _ctx(seed, hbar=1.0)
    pts = ctx.grid()
    for vac, left, right in ((gc.vacuum(ctx), gc.y_gen(ctx, 0), gc.x_gen(ctx, 0)),
                             (gc.bar_vacuum(ctx), gc.x_gen(ctx, 0), gc.y_gen(ctx, 0))):
        vv = vac.evaluate(pts)
        scale = np.max(np.abs(vv))
        assert rel_sup(gc.gauss_product(vac, vac, ctx).evaluate(pts), vv) < 1e-11
        assert np.max(np.abs(gc.as_sum(gc.gauss_product(left, vac, ctx)).evaluate(pts))) / scale < 1e-11
        assert np.max(np.abs(gc.as_sum(gc.gauss_product(vac, right, ctx)).evaluate(pts))) / scale < 1e-11


def test_weyl_vacuum_exact_form():
    for h in (0.5, 1.0, 2.0):
        w = gc.vacuum(gc.NumericContext(1, None, h))
        assert np.array_equal(w.Q, [[0, -1 / (1j * h)], [-1 / (1j * h), 0]])
        assert w.prefactor.constant_value() == 2


def test_sandwich_terms_are_pochhammer():
    ctx = gc.NumericContext(1, gc.random_generic_K(2, np.random.default_rng(4)) * 0.5, 0.8)
    r = gc.vacuum_sandwich_tau(0.15, 12, ctx)
    expected = [gc.pochhammer_term(n, 0.15, 0.8) for n in range(13)]
    assert np.allclose(r["terms"], expected, rtol=1e-8, atol=1e-14)
    assert abs(r["partial_sums"][-1] - r["closed_form"]) < 1e-7


def test_heisenberg_factor_domain():
    ctx = gc.NumericContext(1, None, 1.0)
    with pytest.raises(gc.DomainError):
        gc.heisenberg_vacuum_factor(-0.5, ctx)
    with pytest.raises(gc.DomainError):
        gc.check_heisenberg_domain(-0.6, 1.0)


def test_heisenberg_rep_commutators():
    s, u = sp.symbols("s u")
    f = sp.Function("f")(s, u)
    h = sp.Rational(7, 10)
    rep = lambda g, F: gc.apply_heisenberg_rep(g, F, h, s, [u], 0)
    # [v, u] f = i mu f, matching [u, v] = -i mu in the rescaled generators
    assert sp.simplify(rep("v", rep("u", f)) - rep("u", rep("v", f)) - sp.I * rep("mu", f)) == 0


def test_branch_point_detected():
    ctx = gc.NumericContext(1, np.array([[0, 2.0], [2.0, 0]]), 1.0)
    t0 = np.arctanh(0.5)   # Delta = 2 cosh t - 4 sinh t vanishes here
    gc.star_exp_hyperbolic(1.0, ctx)
    with pytest.raises(gc.BranchSingularityError):
        gc.star_exp_hyperbolic(1.0, ctx, path=[0.0, t0, 1.0])


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_hyperbolic_period_classified_by_thresholds(seed):
    # t -> t + pi i multiplies by +1 between the thresholds and by -1 outside; 2 pi i is a full period
    ctx, _ = _ctx(seed, hbar=1.0, scale=1.0)
    a, b = gc.hyperbolic_thresholds(ctx)
    pts = ctx.grid()
    for s, sign in ((a - 0.5, -1), (0.5 * (a + b), 1), (b + 0.5, -1)):
        v0 = gc.star_exp_hyperbolic(s, ctx).evaluate(pts)
        half = gc.star_exp_hyperbolic(s + 1j * np.pi, ctx, path=[0, s, s + 1j * np.pi]).evaluate(pts)
        full = gc.star_exp_hyperbolic(s + 4j * np.pi, ctx, path=[0, s, s + 4j * np.pi]).evaluate(pts)
        assert rel_sup(half, sign * v0) < 1e-8
        assert rel_sup(full, v0) < 1e-8


@settings(max_examples=20, deadline=None)
@given(seeds, st.complex_numbers(max_magnitude=0.3))
def test_exponentials_under_conjugation(seed, t):
    ctx, _ = _ctx(seed)
    pts = ctx.grid()
    hc = lambda G: gc.hermitian_conjugate(G, ctx).evaluate(pts)
    # (1/i hbar) 2 x o y is anti-hermitian, (1/hbar)(x^2 + y^2) is hermitian
    h = gc.star_exp_hyperbolic(t, ctx)
    assert rel_sup(hc(h), gc.star_exp_hyperbolic(-np.conj(t), ctx).evaluate(pts)) < 1e-10
    q = gc.star_exp_harmonic(t, ctx)
    assert rel_sup(hc(q), gc.star_exp_harmonic(np.conj(t), ctx).evaluate(pts)) < 1e-10


def test_conservation_of_unitary_flow():
    ctx, _ = _ctx(3)
    pts = ctx.grid()

    def norm_sq(theta):
        F = gc.star_exp_harmonic(1j * theta, ctx)
        return gc.as_sum(gc.gauss_product(gc.hermitian_conjugate(F, ctx), F, ctx)).evaluate(pts)

    d = 1e-4
    for theta in (0.1, 0.3, 0.6):
        assert np.max(np.abs(norm_sq(theta + d) - norm_sq(theta - d))) / (2 * d) < 1e-6
