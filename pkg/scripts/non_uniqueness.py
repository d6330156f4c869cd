"""Fields of a profile supported in eta < 0: nonzero in the past, identically zero for t >= 0.

Writes slices at y0 = 0 as out/non_uniqueness_t<t>.csv (columns x0, re, im, abs).
"""

import sys
from pathlib import Path

from starweyl import tau_dynamics as td

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
out.mkdir(parents=True, exist_ok=True)
h = 1.0
g = td.Grid.default()
psi = td.bump_profile(h)
for t in (-1.5, -1.0, -0.8, -0.5, 0.0, 0.5, 1.0):
    F = td.synthesize_field(psi, t, g)
    F.slice_csv(0.0, out / ("non_uniqueness_t%+.1f.csv" % t))
    print("t = %+.2f   max|F| = %.4g" % (t, F.norm()))
