"""Periodicity conditions for a few Weyl-ordered data F(x0, y0) (exact, sympy)."""

import sympy as sp

from starweyl import tau_dynamics as td

x, y = sp.symbols("x0 y0")
h = sp.Integer(1)
E = sp.exp(2 / (sp.I * h) * (x + sp.I * h) * y)
data = {
    "E (stationary)": E,
    "E * exp(4 y0)": E * sp.exp(4 * y),
    "E * exp(2 pi x0)": E * sp.exp(2 * sp.pi * x),
    "E * x0": E * x,
    "one": sp.Integer(1),
}
for name, F in data.items():
    print("%-18s %s" % (name, td.periodicity_report(F, x, y, h)))
