import json

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from starweyl import tau_dynamics as td

GRID = td.Grid.default()


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 0.45), st.sampled_from([0.5, 1.0]))
def test_evolution_matches_closed_form(t, h):
    F = td.evolve_initial("one", t, h, GRID)
    assert np.max(np.abs(F.values - td.closed_form_exp_tau(t, h, GRID).values)) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 0.4), st.floats(0.0, 0.4))
def test_semigroup(s, t):
    assert td.semigroup_check("half_bar_vacuum", s, t, 1.0, GRID)["relative_gap"] < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_transport_composes(s, t):
    phi = td.SpectralProfile.smooth(lambda xi, eta: np.exp(-xi**2 - (eta - 1) ** 2), 1.0)
    xi, eta = np.meshgrid(np.linspace(-3, 3, 31), np.linspace(-4, 4, 41))
    a = td.transport_profile(td.transport_profile(phi, s), t).evaluate(xi, eta)
    b = td.transport_profile(phi, s + t).evaluate(xi, eta)
    assert np.allclose(a, b, atol=1e-14)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 3.0))
def test_stationary_datum_is_fixed(t):
    X, Y = GRID.mesh()
    F = td.evolve_initial("stationary", t, 1.0, GRID)
    assert np.max(np.abs(F.values - td.stationary_factor(X, Y, 1.0))) < 1e-12


def test_vacuum_dies_after_half():
    for t, n in td.vacuum_death_sweep([0.5, 0.75, 2.0], 1.0, GRID):
        assert n == 0.0
    assert td.evolve_initial("half_vacuum", 0.49, 1.0, GRID).norm() > 1.0


def test_vacuum_scalar_matches_series():
    r = td.vacuum_scalar_law(0.2)
    assert abs(r["field_scalar"] - r["closed_form"]) < 1e-12
    assert abs(r["series_partial_sum"] - r["closed_form"]) < 1e-8


def test_past_needs_permission():
    with pytest.raises(td.DirectionError):
        td.evolve_initial("one", -0.1, 1.0, GRID)


def test_non_uniqueness_profile_support():
    r = td.non_uniqueness_demo(td.bump_profile(1.0), 1.0, GRID, ts=(-0.8, 0.0, 1.0))
    assert r["norms"][-0.8] > 1e-3 and r["norms"][0.0] == 0.0 and r["norms"][1.0] == 0.0
    bad = td.SpectralProfile.smooth(lambda xi, eta: np.exp(-xi**2 - eta**2), 1.0, zero_fill=False)
    with pytest.raises(td.SupportError):
        td.non_uniqueness_demo(bad, 1.0, GRID)


def test_past_branch_adds_hidden_profile():
    bump = td.bump_profile(1.0)
    F = td.evolve_initial("one", -0.8, 1.0, GRID, allow_past=True, past_profile=bump)
    assert F.norm() > 0
    # the same profile contributes nothing once t >= 0
    G = td.evolve_initial("one", 0.3, 1.0, GRID, past_profile=bump)
    assert np.max(np.abs(G.values - td.evolve_initial("one", 0.3, 1.0, GRID).values)) == 0


def test_contour_derivative_beats_central_difference():
    X, Y = GRID.mesh()
    exact = 1j * X * np.exp(-2 * Y)
    scale = np.max(np.abs(exact))
    assert np.max(np.abs(td.time_derivative_closed_form(1.0, GRID) - exact)) / scale < 1e-12
    assert np.max(np.abs(td.central_difference_closed_form(1.0, GRID) - exact)) / scale > 1e-6


def test_weyl_equation_residual_is_second_order():
    a = td.closed_form_exp_tau(0.2, 1.0, GRID)
    r = [td.reduce_to_weyl_equation(a, td.closed_form_exp_tau(0.2 + dt, 1.0, GRID))[1] for dt in (1e-3, 5e-4)]
    assert 3.5 < r[0] / r[1] < 4.5


def test_periodicity_report():
    x, y = sp.symbols("x0 y0")
    h = sp.Integer(1)
    E = sp.exp(2 / (sp.I * h) * (x + sp.I * h) * y)
    assert all(td.periodicity_report(E, x, y, h).values())
    assert not td.periodicity_report(E * x, x, y, h)["x_period"]
    assert not td.periodicity_report(E * sp.exp(2 * y), x, y, h)["y_quarter_period"]


def test_field_outputs(tmp_path):
    g = td.Grid.default(nx=16, ny=9)
    F = td.closed_form_exp_tau(0.1, 1.0, g)
    F.to_csv(tmp_path / "f.csv")
    F.slice_csv(0.0, tmp_path / "s.csv")
    F.to_npy(tmp_path / "f.npy")
    data = np.loadtxt(tmp_path / "f.csv", delimiter=",", skiprows=1)
    assert data.shape == (16 * 9, 4)
    assert open(tmp_path / "s.csv").readline().strip() == "x0,re,im,abs"
    assert np.array_equal(np.load(tmp_path / "f.npy"), F.values)
    assert json.load(open(tmp_path / "f.npy.json"))["shape"] == [16, 9]


def test_grid_needs_power_of_two():
    with pytest.raises(ValueError):
        td.Grid.default(nx=100)


@pytest.mark.parametrize("datum,t", [("one", 0.2), ("half_vacuum", 0.2), ("half_bar_vacuum", 0.6)])
def test_evolved_fields_solve_the_difference_equation(datum, t):
    dt = 1e-4
    a = td.evolve_initial(datum, t, 1.0, GRID)
    b = td.evolve_initial(datum, t + dt, 1.0, GRID)
    _, worst = td.reduce_to_weyl_equation(a, b)
    assert worst < 1e-4 * max(a.norm(), 1.0)
