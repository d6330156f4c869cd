"""Pi(T) = int_{-T}^0 2 s c(s) ds for the vacuum sandwich of exp_*(s x0); grows like -T^2."""

from starweyl import gauss_calc as gc
from starweyl import transcend as tr
from starweyl.scenarios import k_matrices

ctx = gc.NumericContext(1, k_matrices({"K": {"kind": "random-generic", "seed": 3}}, 1)[0], 0.7)
for T, v in tr.nongo_divergence(ctx, Ts=(1.0, 2.0, 4.0, 8.0, 16.0)):
    print("T = %5.1f   Pi(T) = %+.10f   Pi(T) + T^2 = %.1e" % (T, v.real, abs(v + T * T)))
