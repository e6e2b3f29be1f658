"""
An order-two witness that sees negativity
=========================================

``<(2xp)^2>_W`` restricted to Fock levels 0, 4, 8, 12, 16 is a symmetric
tridiagonal matrix. Its lowest eigenvalue is negative, so the matching
state has a negative Wigner function.
"""

import numpy as np

from wignerneg import fb_determinant_exact, fb_matrix, fb_search, min_eigenpair, wigner_grid

m = fb_matrix(5)
print("diagonal:", m.diag)
print("squared off-diagonal:", m.offdiag_sq)
print("exact determinant:", fb_determinant_exact(5))

pair = min_eigenpair(m.dense())
print("lowest eigenvalue:", pair.value)
print("eigenvector:", np.round(pair.vector, 4))

# the same matrix built from Weyl moments, returned with the state
report = fb_search(0.0, (0, 4), 5)
print("violated:", report.violated)

# check by integrating (2xp)^2 against the tabulated Wigner function
g = wigner_grid(report.state.density(), -9, 9, 241, -9, 9, 241)
x, p = np.meshgrid(g.xs, g.ps, indexing="ij")
print("grid estimate:", np.sum((2 * x * p) ** 2 * g.values) * g.dx * g.dp)
print("most negative W:", g.values.min())
