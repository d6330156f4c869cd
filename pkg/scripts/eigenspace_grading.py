"""Grading of sample monomials by commutation with the inverse sphere coordinate.

Prints the residual against eigenvalue 2l (derived at nu = hbar) and against l.
"""

import sys

from starweyl import gauss_calc as gc
from starweyl import transcend as tr
from starweyl.scenarios import k_matrices

hbar = float(sys.argv[1]) if len(sys.argv) > 1 else 0.7
for seed in (3, 4, 5):
    ctx = gc.NumericContext(1, k_matrices({"K": {"kind": "random-generic", "seed": seed}}, 1)[0], hbar)
    for name, r in tr.eigenspace_probe(ctx).items():
        print("seed %d  %-20s eigenvalue 2l: %.2e   eigenvalue l: %.2e"
              % (seed, name, r["derived_residual"], r["literal_residual"]))
