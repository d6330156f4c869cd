"""d/dt at t = 0 of the exp(i t tau) closed form: contour rule against central difference.

The exact derivative is i x0 e^{-2 y0}.
"""

import numpy as np

from starweyl import tau_dynamics as td

g = td.Grid.default()
X, Y = g.mesh()
exact = 1j * X * np.exp(-2 * Y)
scale = np.max(np.abs(exact))
print("contour (r=1e-4, 32 nodes): rel err %.2e" % (np.max(np.abs(td.time_derivative_closed_form(1.0, g) - exact)) / scale))
for d in (1e-3, 1e-4, 1e-5, 1e-6):
    cd = td.central_difference_closed_form(1.0, g, delta=d)
    print("central difference delta=%g: rel err %.2e" % (d, np.max(np.abs(cd - exact)) / scale))
