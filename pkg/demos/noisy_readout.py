"""
Seeing negativity through detector noise
========================================

Readouts of a single photon are smeared by Gaussian noise large enough to
make the density positive. Moments of the noisy samples are turned into
cumulants, the noise variances are subtracted, and the quartic witness is
evaluated on the recovered moments.
"""

from wignerneg import DensityMatrix, PolynomialWitness
from wignerneg.measurement import NoiseModel, convolved_grid, recover_witness

rho = DensityMatrix.fock(1)
noise = NoiseModel(0.5, 0.5)
print("smallest value of the noisy density:", convolved_grid(rho, noise).values.min())

res = recover_witness(rho, noise, PolynomialWitness.fd(-12, 26), 10**6, seed=42)
for name, (value, se) in res.statistics.items():
    print(f"{name:8s} {value:10.4f} +- {se:.4f}")
print("negativity detected:", res.report.violated)
