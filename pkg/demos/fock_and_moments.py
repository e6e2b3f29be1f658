"""
Wigner moments from Fock-space algebra
======================================

Symmetrically ordered moments of a state are traces against Weyl-ordered
operators, so no phase-space integral is needed.
"""

import numpy as np

from wignerneg import DensityMatrix, FockState, moment_table, radial_moment, wigner_grid

# a single photon: <x^2>_W = <p^2>_W = 3/2
rho = DensityMatrix.fock(1)
table = moment_table(rho, 4)
print("<x^2>_W =", table[2, 0], " <x^2 p^2>_W =", table[2, 2])

# radial moments of Fock states follow simple polynomials in n
for n in range(4):
    r = [radial_moment(DensityMatrix.fock(n), j) for j in (1, 2, 3)]
    print(n, np.round(r, 12))

# the same numbers from a tabulated Wigner function
grid = wigner_grid(rho, -7, 7, 141, -7, 7, 141)
print("grid <x^2 p^2> =", grid.integrate(2, 2), " W(0,0) =", grid.values[70, 70], "vs", -1 / np.pi)

# superpositions with complex amplitudes work the same way
cat = FockState.from_levels([0, 2, 4], [1, 0.5j, -0.3]).density()
print("<xp>_W of the superposition:", moment_table(cat, 2)[1, 1])
