import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starweyl import gauss_calc as gc
from starweyl import transcend as tr
from starweyl.scenarios import k_matrices

K_TWO = np.array([[-0.5j, 0.2], [0.2, 0.3j]])


@pytest.fixture(scope="module")
def ctx1():
    K = k_matrices({"K": {"kind": "random-generic", "seed": 3}}, 1)[0]
    return gc.NumericContext(1, K, 0.7)


def test_rel_sup_is_scaled():
    assert tr.rel_sup([2.0, 4.0], [1.0, 2.0]) == 1.0


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(-1.0, 1.0))
def test_two_inverses_and_their_difference(a0, a1):
    ctx = gc.NumericContext(1, K_TWO, 1.0)
    a = np.array([a0, a1])
    if not np.imag(a @ K_TWO @ a) <= -0.4:
        return
    pts = ctx.grid()
    ip, im = tr.star_inverse_linear(a, "plus", ctx), tr.star_inverse_linear(a, "minus", ctx)
    L = tr.linear_form(a, ctx)
    for inv in (ip, im):
        # where the inverse is huge the product cancels in floating point, so
        # the residual is measured against the size of the inverse itself
        scale = max(1.0, np.max(np.abs(inv.evaluate(pts))))
        for prod in (tr.qstar(L, inv, ctx=ctx), tr.qstar(inv, L, ctx=ctx)):
            assert np.max(np.abs(prod.evaluate(pts) - 1)) / scale < 1e-6
    diff = ip.evaluate(pts) - im.evaluate(pts)
    assert tr.rel_sup(diff, tr.inverse_difference_closed_form(a, ctx).evaluate(pts)) < 1e-8


def test_inverse_needs_decay():
    ctx = gc.NumericContext(1, K_TWO, 1.0)
    with pytest.raises(tr.PreconditionError):
        tr.star_inverse_linear(np.array([0.0, 1.0]), "plus", ctx)
    with pytest.raises(ValueError):
        tr.star_inverse_linear(np.array([1.0, 0.5]), "up", ctx)


def test_weak_decay_reports_nonconvergence():
    ctx = gc.NumericContext(1, K_TWO, 1.0)
    with pytest.raises(tr.ConvergenceError):
        tr.star_inverse_linear(np.array([1.0, 1.0]), "plus", ctx)


def test_inverse_carries_certificate():
    ctx = gc.NumericContext(1, K_TWO, 1.0)
    inv = tr.star_inverse_linear(np.array([1.0, 0.5]), "plus", ctx)
    assert inv.certificate["converged"] and inv.certificate["rel_change"] < 1e-7


def test_theta_series_terms_grow():
    # the lattice sum of linear exponentials is not a convergent series here
    ctx = gc.NumericContext(1, K_TWO, 1.0)
    _, info = tr.theta_truncated(np.array([1.0, 0.5]), 6, ctx)
    assert info["tail"] > 1.0


def test_eigenspace_grading(ctx1):
    rep = tr.eigenspace_probe(ctx1)
    for name, r in rep.items():
        assert r["derived_residual"] < 1e-10, name
        if r["degree"] != 0:
            assert r["literal_residual"] > 0.5


def test_rho_inverse_on_complex_vacuum(ctx1):
    pts = ctx1.grid()
    w = tr.complex_vacuum_all(ctx1)
    wv = w.evaluate(pts)
    mnu = ctx1.m * ctx1.hbar
    r2 = tr.qstar(tr.rho2(ctx1), w, ctx=ctx1).evaluate(pts)
    assert tr.rel_sup(r2, mnu * wv) < 1e-10
    rinv = tr.qstar(tr.star_sqrt_inverse(ctx1, pts), w, ctx=ctx1).evaluate(pts)
    assert tr.rel_sup(rinv, mnu ** -0.5 * wv) < 1e-6


def test_nongo_grows_quadratically(ctx1):
    out = tr.nongo_divergence(ctx1, Ts=(1.0, 3.0))
    for T, v in out:
        assert abs(v + T**2) < 1e-10


def test_associativity_probe_groupings_agree(ctx1):
    r = tr.associativity_probe(0.3, ctx1)
    assert abs(r["ratio"] - 1) < 1e-8
    assert abs(r["justext"] - r["justext_expected"]) < 1e-8
