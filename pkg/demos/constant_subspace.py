"""
Constants stay constant
=======================

For the second reference problem N depends on u only and the kernel integrates
to 2 log 2 from every point, so K maps constants to constants.  The
linearize-first iterates started at zero are therefore constant.  Their values
are the Newton iterates of the scalar equation -c - 2 log2 c^3 = y.
"""

import numpy as np

from singsub import register_example, solve_linearize_first
from singsub.kernels import LOG2

problem, disc = register_example(2, "linearize-first")
history, final = solve_linearize_first(problem, disc)

# scalar Newton, written out by hand
y = 0.5 + 0.25 * LOG2
c, scalar = 0.0, [0.0]
for _ in range(5):
    c -= (-c - 2 * LOG2 * c**3 - y) / (-1 - 6 * LOG2 * c**2)
    scalar.append(c)

chain = []
it = final
while it is not None:
    chain.append(it)
    it = it.previous

s = np.linspace(0.0, 1.0, 101)
print(" k   grid value          scalar Newton       spread of phi_k(s)")
for it in reversed(chain):
    w = it.grid_values.values
    print(f"{it.k:2d}  {w.mean(): .15f}  {scalar[it.k]: .15f}  {np.ptp(it.eval_at(s)):.1e}")

# The spread column uses the natural interpolation formula between the nodes,
# so it checks the continuous iterates as well as the grid values.
