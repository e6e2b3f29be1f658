"""
Quadratures from a continuous position record
=============================================

A harmonic oscillator's position is recorded for one period with white
noise. Projecting the record on cos and sin returns the initial quadratures
with extra variance close to 2 S0 / t0, which is then deconvolved as well.
"""

import numpy as np

from wignerneg import DensityMatrix, PolynomialWitness
from wignerneg.measurement import (
    NoiseModel,
    TrajectoryConfig,
    extract_quadratures,
    extraction_noise,
    recover_witness,
    simulate_record,
)

period = 2 * np.pi
cfg = TrajectoryConfig(1.0, period, period / 1000, NoiseModel(0.5, 0.5, s0=0.2), 10**4, seed=1)
run = simulate_record(DensityMatrix.fock(0), cfg)
err = extract_quadratures(run) - run.initial
print("extraction variance:", err.var(axis=0), "predicted:", 2 * 0.2 / cfg.t0)
print("total noise to deconvolve:", extraction_noise(cfg))

small = TrajectoryConfig(1.0, period, period / 200, NoiseModel(0.5, 0.5, s0=0.02), 0, seed=0)
res = recover_witness(DensityMatrix.fock(1), small, PolynomialWitness.fd(-12, 26), 10**6, seed=7)
print("recovered witness: %.2f +- %.2f" % res.statistics["witness"])
