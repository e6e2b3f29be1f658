"""
Witnesses built from radial moments
===================================

For Fock states the cubic family cannot go negative, while the quartic
``r^4 + c20 r^2 + c0`` exposes the single photon using moments up to r^8.
"""

from wignerneg import DensityMatrix, PolynomialWitness, radial_moment, rotinv_fc_minimum, rotinv_fd_minimum
from wignerneg import witness_value

for n in range(5):
    r = [radial_moment(DensityMatrix.fock(n), j) for j in (1, 2, 3)]
    print("n=%d  best cubic witness value %.4f" % (n, rotinv_fc_minimum(*r).value))

fit = rotinv_fd_minimum(DensityMatrix.fock(1))
print("quadratic form coefficients:", fit.coefficients)
print("minimum at c20=%g, c0=%g, value %g" % (fit.c20, fit.c0, fit.value))

# evaluated directly from Wigner moments
print(witness_value(DensityMatrix.fock(1), PolynomialWitness.fd(fit.c20, fit.c0)))
