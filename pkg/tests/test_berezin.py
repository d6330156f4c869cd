import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starweyl import berezin as bz

s_values = st.floats(0.2, 20.0)


@settings(max_examples=25, deadline=None)
@given(s_values)
def test_diagonal_of_wbar_w(s):
    r = bz.diagonal_report(bz.DiskParameter(s, 48, 8))
    assert r["max_defect"] < 1e-12 and r["offdiag"] == 0


@settings(max_examples=25, deadline=None)
@given(s_values)
def test_commutator_identities(s):
    for r in bz.disk_commutators(bz.DiskParameter(s, 48, 8)):
        assert r["max_defect"] < 1e-8, r["identity"]


@settings(max_examples=25, deadline=None)
@given(s_values, st.integers(0, 3), st.integers(0, 3))
def test_holomorphic_symbols_multiply(s, p, q):
    P = bz.DiskParameter(s, 40, 8)
    lhs = (bz.berezin_matrix(p, 0, P) @ bz.berezin_matrix(q, 0, P)).interior()
    assert np.allclose(lhs, bz.berezin_matrix(p + q, 0, P).interior(), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(s_values, st.integers(0, 3), st.integers(0, 3))
def test_adjoint_symbol_is_conjugate_transpose(s, p, q):
    P = bz.DiskParameter(s, 40, 8)
    A, B = bz.berezin_matrix(p, q, P).entries, bz.berezin_matrix(q, p, P).entries
    assert np.allclose(A, B.conj().T, atol=1e-14)


def test_entries_match_quadrature():
    assert bz.matrix_vs_quadrature()["max_defect"] < 1e-10


def test_beta_value():
    assert abs(bz.beta_check()["quadrature"] - math.pi / 12) < 1e-12


def test_reproducing_kernel():
    pts = np.array([0.0, 0.3 + 0.2j, -0.5j, 0.6])
    r = bz.reproducing_check([0, 0, 0, 1], 1.5, pts)
    assert r["max_error"] < 1e-10


def test_poisson_limit_shrinks():
    assert bz.poisson_limit(100.0) < bz.poisson_limit(10.0) / 5


def test_parameter_checks():
    with pytest.raises(bz.ParameterError):
        bz.DiskParameter(-1.0)
    with pytest.raises(bz.ParameterError):
        bz.DiskParameter(1.0, N=10, buffer=8)
    with pytest.raises(bz.ParameterError):
        bz.berezin_matrix(0, 1, bz.DiskParameter(0.5), weight=2)
    with pytest.raises(ValueError):
        bz.identity(bz.DiskParameter(1.0, 32)) @ bz.identity(bz.DiskParameter(1.0, 40))


@settings(max_examples=10, deadline=None)
@given(st.floats(0.02, 0.4))
def test_fock_model_reproduces_disk(hbar):
    r = bz.fock_embedding(64, hbar, 8)
    assert r["max_defect"] < 1e-8
    assert abs(r["s_fit"] - (1 - 2 * hbar) / (2 * hbar)) < 1e-6


def test_bare_square_root_breaks_at_vacuum():
    r = bz.fock_embedding(64, 0.1, 8, shift=0.0)
    assert abs(r["max_defect"] - 1.0) < 1e-12


def test_operator_csv(tmp_path):
    P = bz.DiskParameter(1.0, 20, 4)
    bz.w_op(P).to_csv(tmp_path / "w.csv")
    rows = list(csv.reader(open(tmp_path / "w.csv")))
    assert rows[0] == ["row", "col", "re", "im"]
    assert len(rows) == 1 + 19
    assert all(int(r[0]) == int(r[1]) + 1 for r in rows[1:])
