"""rho^2 and rho^-1 acting on the product of complex vacuums, as scalar multiples."""

import sys

from starweyl import gauss_calc as gc
from starweyl import transcend as tr
from starweyl.scenarios import k_matrices

hbar = float(sys.argv[1]) if len(sys.argv) > 1 else 0.7
for m in (1, 2):
    ctx = gc.NumericContext(m, k_matrices({"K": {"kind": "random-generic", "seed": 3}}, m)[0], hbar)
    pts = ctx.grid()
    w = tr.complex_vacuum_all(ctx)
    c2, _ = gc.scalar_multiple(tr.qstar(tr.rho2(ctx), w, ctx=ctx), w, pts)
    c1, _ = gc.scalar_multiple(tr.qstar(tr.star_sqrt_inverse(ctx, pts), w, ctx=ctx), w, pts)
    mnu = m * hbar
    print("m=%d  rho^2: %.12g (m nu = %.12g)   rho^-1: %.12g ((m nu)^-1/2 = %.12g, (2 m nu)^-1/2 = %.12g)"
          % (m, c2.real, mnu, c1.real, mnu ** -0.5, (2 * mnu) ** -0.5))
