"""(s+1)[w, wbar] against the classical symbol -(1-|w|^2)^2 as s grows; the gap falls like 1/s."""

from starweyl import berezin as bz

for s in (1, 3, 10, 30, 100, 300, 1000):
    gap = bz.poisson_limit(float(s))
    print("s = %6g   gap = %.4e   s * gap = %.3f" % (s, gap, s * gap))
