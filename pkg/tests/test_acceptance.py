"""Acceptance criteria 1-11, one PASS/FAIL line per criterion.

Run with pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.  Criteria that cannot be met are strict
xfails and print FAIL.
"""

import math
import time

import numpy as np
import pytest

from starweyl import berezin as bz
from starweyl import gauss_calc as gc
from starweyl import tau_dynamics as td
from starweyl import transcend as tr
from starweyl import weyl_core as wc
from starweyl.scenarios import core_identities, intertwiner_suite, k_matrices

RESULTS = {}


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    return ok


def serial(f, items):
    return [f(x) for x in items]


# ---- 1 ----------------------------------------------------------------------

def test_c01_exact_core_identities():
    t0 = time.perf_counter()
    res = core_identities({"pairs": 100, "n_K": 5, "max_degree": 4, "axiom_degree": 0}, serial)
    dt = time.perf_counter() - t0
    flags = {c["name"]: c["pass"] for c in res.checks if "axiom" not in c["name"]}
    ok = all(flags.values()) and dt < 30
    record("1", ok, "100 pairs, 5 K per m, exact equality: %s; %.1f s" % (all(flags.values()), dt))
    assert ok, (flags, dt)


# ---- 2 ----------------------------------------------------------------------

def test_c02_gaussian_calculus():
    t0 = time.perf_counter()
    res = intertwiner_suite({"pairs": 50, "order": 12, "seed": 0}, serial)
    dt = time.perf_counter() - t0
    vals = {c["name"]: c["value"] for c in res.checks}
    ok = res.passed and dt < 60
    record("2", ok, "oracle rel err %.1e, linear law %.1e, quadratic laws %.1e; %.1f s"
           % (*vals.values(), dt))
    assert ok, (vals, dt)


# ---- 3 ----------------------------------------------------------------------

def _generic_ctx(seed, hbar=1.0):
    return gc.NumericContext(1, k_matrices({"K": {"kind": "random-generic", "seed": seed}}, 1)[0], hbar)


def test_c03_vacuum_identities():
    worst = 0.0
    for seed in (1, 2, 3):
        ctx = _generic_ctx(seed)
        pts = ctx.grid()
        vac = gc.vacuum(ctx)
        vv = vac.evaluate(pts)
        scale = np.max(np.abs(vv))
        worst = max(worst,
                    tr.rel_sup(gc.gauss_product(vac, vac, ctx).evaluate(pts), vv),
                    np.max(np.abs(gc.as_sum(gc.gauss_product(gc.y_gen(ctx, 0), vac, ctx)).evaluate(pts))) / scale,
                    np.max(np.abs(gc.as_sum(gc.gauss_product(vac, gc.x_gen(ctx, 0), ctx)).evaluate(pts))) / scale)
    h = 1.0
    w = gc.vacuum(gc.NumericContext(1, None, h))
    weyl = (np.array_equal(w.Q, [[0, -1 / (1j * h)], [-1 / (1j * h), 0]])
            and w.prefactor.constant_value() == 2 and w.alpha == 0)
    ctx = _generic_ctx(1)
    sums = {s: abs(gc.vacuum_sandwich_tau(s, 30, ctx)["partial_sums"][-1] - (1 + 2 * s) ** -0.5)
            for s in (0.1, 0.2)}
    ok = worst <= 1e-12 and weyl and max(sums.values()) <= 1e-8
    record("3a", ok, "idempotency/annihilation %.1e, Weyl form exact %s, sandwich s=0.1,0.2 err %.1e"
           % (worst, weyl, max(sums.values())))
    assert ok


@pytest.mark.xfail(strict=True, reason="the sandwich series has ratio 2 hbar s = 0.8 at s = 0.4; "
                                       "the n = 30 tail is about 6e-5")
def test_c03_sandwich_s04():
    ctx = _generic_ctx(1)
    r = gc.vacuum_sandwich_tau(0.4, 30, ctx)
    err = abs(r["partial_sums"][-1] - r["closed_form"])
    record("3b", err <= 1e-8, "sandwich s=0.4 by n=30: err %.1e (tolerance 1e-8)" % err)
    assert err <= 1e-8


# ---- 4 ----------------------------------------------------------------------

def test_c04_two_inverses():
    ctx = gc.NumericContext(1, np.array([[-0.5j, 0.2], [0.2, 0.3j]]), 1.0)
    a = np.array([1.0, 0.5])
    pts = ctx.grid()
    ip, im = tr.star_inverse_linear(a, "plus", ctx), tr.star_inverse_linear(a, "minus", ctx)
    L = tr.linear_form(a, ctx)
    errs = [tr.rel_sup(tr.qstar(L, inv, ctx=ctx).evaluate(pts), 1) for inv in (ip, im)]
    gap = float(np.max(np.abs(ip.evaluate(pts) - im.evaluate(pts))))
    ok = max(errs) <= 1e-6 and gap > 1e-3
    record("4", ok, "<a,u>*inv_+ err %.1e, <a,u>*inv_- err %.1e, |inv_+ - inv_-| = %.3g" % (*errs, gap))
    assert ok


# ---- 5 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def sphere_runs():
    out = []
    for m in (1, 2):
        for K in k_matrices({"K": {"kind": "random-generic", "seed": 3}}, m, 3):
            out.append((m, tr.sphere_relations(gc.NumericContext(m, K, 0.7))))
    return out


def test_c05_sphere_relations_derived(sphere_runs):
    worst = max(v for _, rel in sphere_runs for k, v in rel.items() if "derived" in k)
    ok = worst <= 1e-5
    record("5a", ok, "derived coefficients ([mu^-1,xi] = 2 xi, sum xi xibar = 1 - m mu, commutator): "
                     "max rel residual %.1e over m=1,2 and 3 K each" % worst)
    assert ok


@pytest.mark.xfail(strict=True, reason="the displayed coefficients are off by factors of 2; see the derived test")
def test_c05_sphere_relations_literal(sphere_runs):
    worst = max(v for _, rel in sphere_runs for k, v in rel.items() if "literal" in k)
    record("5b", worst <= 1e-5, "displayed coefficients: max rel residual %.2g (tolerance 1e-5)" % worst)
    assert worst <= 1e-5


# ---- 6 ----------------------------------------------------------------------

def test_c06_tau_dynamics():
    g, h = td.Grid.default(), 1.0
    errs = []
    for t in (0.1, 0.3, 0.45):
        errs.append(np.max(np.abs(td.evolve_initial("one", t, h, g).values - td.closed_form_exp_tau(t, h, g).values)))
        errs.append(np.max(np.abs(td.evolve_initial("half_vacuum", t, h, g).values
                                  - td.closed_form_vacuum(t, h, g).values)))
    death = max(n for _, n in td.vacuum_death_sweep([0.5, 0.6, 1.0, 3.0], h, g))
    conf = max(np.max(np.abs(td.evolve_initial("half_bar_vacuum", t, h, g).values
                             - td.closed_form_bar_vacuum(t, h, g).values)) for t in (0.1, 0.3, 1.0))
    gap = td.semigroup_check("one", 0.2, 0.3, h, g)["gap"]
    ok = max(errs) <= 1e-6 and death < 1e-8 and conf <= 1e-6 and gap < 1e-6
    record("6", ok, "closed forms %.1e, death norm %.1e, bar-vacuum form %.1e, semigroup gap %.1e"
           % (max(errs), death, conf, gap))
    assert ok


# ---- 7 ----------------------------------------------------------------------

def test_c07_non_uniqueness():
    h = 1.0
    r = td.non_uniqueness_demo(td.bump_profile(h), h, td.Grid.default(), ts=(-0.8 / h, 0.0, 0.5, 2.0))
    norms = r["norms"]
    past = norms[-0.8]
    future = max(v for t, v in norms.items() if t >= 0)
    ok = future <= 1e-12 and past > 1e-3
    record("7", ok, "bump in eta<0: norm %.3g at t=-0.8, max %.1e for t>=0" % (past, future))
    assert ok


# ---- 8 ----------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="both groupings agree; the computed ratio is 1, not sqrt(1+2 hbar t)")
def test_c08_grouping_ratio():
    r = tr.associativity_probe(0.4, _generic_ctx(2))
    err = abs(r["ratio"] - r["expected_ratio"])
    record("8a", err <= 1e-6, "grouping ratio %.6f vs sqrt(1.8) = %.6f" % (r["ratio"].real, r["expected_ratio"]))
    assert err <= 1e-6


def test_c08_justext():
    ctx = _generic_ctx(2)
    worst = 0.0
    for t in (0.4, 0.0, -0.2, -0.4, -0.45):
        r = tr.associativity_probe(t, ctx)
        worst = max(worst, abs(r["justext"] - r["justext_expected"]))
    ok = worst <= 1e-8
    record("8b", ok, "vacuum * W = (1+2 hbar t)^(-1/2) vacuum down to 2 hbar t = -0.9: max err %.1e" % worst)
    assert ok


# ---- 9 ----------------------------------------------------------------------

def test_c09_berezin():
    p = bz.DiskParameter(2.0, 64, 8)
    diag = bz.diagonal_report(p, k_max=56)["max_defect"]
    quad = bz.matrix_vs_quadrature()["max_defect"]
    comm = next(r for r in bz.disk_commutators(p) if r["identity"].startswith("[w*,w]"))["max_defect"]
    beta = abs(bz.beta_check()["quadrature"] - math.pi / 12)
    ok = diag <= 1e-12 and quad <= 1e-8 and comm < 1e-10 and beta <= 1e-10
    record("9", ok, "diagonal %.1e, entries vs quadrature %.1e, [w*,w] %.1e, pi B(3,2) %.1e"
           % (diag, quad, comm, beta))
    assert ok


# ---- 10 ---------------------------------------------------------------------

def test_c10_fock_embedding():
    r = bz.fock_embedding(64, 0.1, 8)
    ok = r["max_defect"] < 1e-8 and abs(r["s_fit"] - r["s_predicted"]) < 1e-8
    record("10", ok, "commutator defect %.1e; fitted s = %.6g, dictionary %s"
           % (r["max_defect"], r["s_fit"], r["dictionary"]))
    assert ok


# ---- 11 ---------------------------------------------------------------------

def test_c11_axioms():
    rep = wc.check_mu_regulated_axioms(wc.ExpressionContext(1), 4)
    ok = all(v["pass"] for v in rep.values())
    record("11", ok, "A.1-A.4 to degree 4: %s" % {k: v["pass"] for k, v in sorted(rep.items())})
    assert ok


def summary_lines():
    groups = {}
    for key, (ok, detail) in RESULTS.items():
        crit = "".join(ch for ch in key if ch.isdigit())
        groups.setdefault(int(crit), []).append((key, ok, detail))
    lines = []
    for crit in sorted(groups):
        parts = [p for p in groups[crit] if p[2]]
        ok = all(p[1] for p in parts)
        lines.append("%s criterion %d: %s" % ("PASS" if ok else "FAIL", crit, "; ".join(p[2] for p in parts)))
    return lines


if __name__ == "__main__":
    import inspect
    import sys

    mod = sys.modules[__name__]
    runs = None
    for name, fn in sorted(inspect.getmembers(mod, inspect.isfunction)):
        if not name.startswith("test_c"):
            continue
        try:
            if "sphere_runs" in inspect.signature(fn).parameters:
                if runs is None:
                    runs = sphere_runs.__wrapped__()
                fn(runs)
            else:
                fn()
        except AssertionError:
            pass
    print("\n".join(summary_lines()))
