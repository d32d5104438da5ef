"""
How accurate is the fine rule?
==============================

The fine rule is a truncated midpoint sum.  For g(r) = 1/(2 sqrt r) the term
from the fine node closest to s dominates the error.  How large it is depends
on where s sits between two fine nodes, so the error at a single point does
not shrink monotonically as P grows.  The subtracted form has no such problem
on constants because it uses the closed-form line integral.
"""

import numpy as np

from singsub import FineQuadratureSpec, exact_line_integral, fine_singular_integral
from singsub.kernels import get_kernel

kernel = get_kernel("example1")
s = np.random.default_rng(9).uniform(0.0, 1.0, 20)
exact = exact_line_integral(kernel, 0.0, 1.0, s)

print("   P        mu     median error    max error")
for P, mu in ((500, 2e-6), (2000, 2e-7), (8000, 2e-8), (32000, 2e-9)):
    err = np.abs(fine_singular_integral(kernel, np.ones_like, FineQuadratureSpec(P, mu), 0, 1, s) - exact)
    print(f"{P:5d}  {mu:8.0e}  {np.median(err):12.2e}  {err.max():11.2e}")

# The median falls slowly with P; the maximum follows whichever sample
# happens to land closest to a fine node.
