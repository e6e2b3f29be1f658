import numpy as np
import pytest

from wignerneg import DensityMatrix, FockState, PolynomialWitness, moment_table
from wignerneg.measurement import (
    CHUNK,
    NoiseModel,
    SamplingError,
    TrajectoryConfig,
    convolve_moments,
    convolved_grid,
    empirical_moments,
    extract_quadratures,
    extraction_noise,
    husimi,
    recover_witness,
    sample_convolved,
    simulate_record,
    trajectory_record,
)

PERIOD = 2 * np.pi


def test_husimi_vacuum():
    x, p = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-2, 2, 5))
    np.testing.assert_allclose(husimi(DensityMatrix.fock(0), x, p), np.exp(-(x**2 + p**2) / 2) / (2 * np.pi))


def test_husimi_is_smoothed_wigner():
    rho = FockState.from_levels([0, 1, 3], [1, 0.5j, -0.7]).density()
    g = convolved_grid(rho, NoiseModel(0.5, 0.5), points=161)
    xx, pp = np.meshgrid(g.xs, g.ps, indexing="ij")
    np.testing.assert_allclose(g.values, husimi(rho, xx, pp), atol=1e-6)
    assert g.total() == pytest.approx(1.0, abs=1e-6)


def test_positivity_guard(fock1):
    with pytest.raises(SamplingError):
        convolved_grid(fock1, NoiseModel(0.3, 0.3))
    assert convolved_grid(fock1, NoiseModel(0.5, 0.5)).values.min() >= -1e-12


def test_sampling_requires_enough_noise(fock1):
    with pytest.raises(SamplingError):
        sample_convolved(fock1, NoiseModel(0.4, 0.6), 10, seed=0)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(0.0, 1.0)
    with pytest.raises(ValueError):
        NoiseModel(1.0, 1.0, s0=-1.0)


def test_vacuum_variance():
    s = sample_convolved(DensityMatrix.fock(0), NoiseModel(0.5, 0.5), 200_000, seed=1).samples
    se = np.sqrt(2 / s.shape[0])
    assert np.all(np.abs(s.var(axis=0) - 1.0) < 5 * se)


def test_fock1_mean_square_radius(fock1):
    s = sample_convolved(fock1, NoiseModel(0.5, 0.5), 200_000, seed=2).samples
    r2 = np.sum(s**2, axis=1)
    assert abs(r2.mean() - 4.0) < 5 * r2.std() / np.sqrt(r2.size)


def test_empty_sample(fock1):
    run = sample_convolved(fock1, NoiseModel(0.5, 0.5), 0, seed=0)
    assert run.samples.shape == (0, 2)
    assert len(run) == 0


def test_seeded_and_thread_independent(fock1):
    noise = NoiseModel(0.6, 0.8)
    n = CHUNK * 2 + 1000
    a = sample_convolved(fock1, noise, n, seed=5).samples
    b = sample_convolved(fock1, noise, n, seed=5, threads=3).samples
    np.testing.assert_array_equal(a, b)
    c = sample_convolved(fock1, noise, 1000, seed=6).samples
    assert not np.array_equal(a[:1000], c)


def test_sample_moments_match_forward_model():
    rho = FockState.from_levels([0, 2], [1, 1]).density()
    noise = NoiseModel(0.7, 0.9)
    s = sample_convolved(rho, noise, 1_000_000, seed=3).samples
    exact = convolve_moments(moment_table(rho, 4), noise)
    emp = empirical_moments(s, 4)
    for (n, m), val in exact.entries.items():
        if n + m == 0:
            continue
        mono = s[:, 0] ** n * s[:, 1] ** m
        se = mono.std() / np.sqrt(mono.size)
        assert abs(emp[n, m] - val) < 5 * se, (n, m)


def test_config_validation():
    noise = NoiseModel(0.5, 0.5)
    with pytest.raises(ValueError):
        TrajectoryConfig(1.0, 1.5 * PERIOD, PERIOD / 100, noise, 1, 0)  # not whole periods
    with pytest.raises(ValueError):
        TrajectoryConfig(1.0, PERIOD, PERIOD / 100.5, noise, 1, 0)  # dt does not divide t0
    cfg = TrajectoryConfig(1.0, PERIOD, PERIOD / 100, noise, 1, 0)
    assert cfg.steps == 100
    assert cfg.times[-1] == pytest.approx(PERIOD)


def test_noiseless_record_is_trajectory():
    cfg = TrajectoryConfig(2.0, PERIOD, PERIOD / 400, NoiseModel(0.5, 0.5), 1, 0)
    rec = trajectory_record(1.3, -0.4, cfg)
    np.testing.assert_allclose(rec, 1.3 * np.cos(2 * cfg.times) - 0.4 * np.sin(2 * cfg.times), atol=1e-15)


def test_noiseless_extraction():
    cfg = TrajectoryConfig(1.0, PERIOD, PERIOD / 1000, NoiseModel(0.5, 0.5), 1, 0)
    pts = np.random.default_rng(0).uniform(-3, 3, size=(50, 2))
    recs = np.array([trajectory_record(x, p, cfg) for x, p in pts])
    assert np.max(np.abs(extract_quadratures(recs, cfg.times, 1.0) - pts)) < 1e-5


def test_extraction_variance_halves_with_record_length():
    s0 = 0.2
    var = []
    for periods in (1, 2):
        cfg = TrajectoryConfig(1.0, periods * PERIOD, PERIOD / 200, NoiseModel(0.5, 0.5, s0), 20_000, 4)
        run = simulate_record(DensityMatrix.fock(0), cfg)
        var.append((extract_quadratures(run) - run.initial).var(axis=0))
        predicted = extraction_noise(cfg).sigma2_x - 0.5
        assert predicted == pytest.approx(2 * s0 / cfg.t0, rel=1e-2)
        np.testing.assert_allclose(var[-1], predicted, rtol=0.05)
    np.testing.assert_allclose(var[0] / var[1], 2.0, rtol=0.08)


def test_record_thread_independence(fock1):
    cfg = TrajectoryConfig(1.0, PERIOD, PERIOD / 50, NoiseModel(0.5, 0.5, 0.1), 3000, 9)
    a = simulate_record(fock1, cfg)
    b = simulate_record(fock1, cfg, threads=2)
    np.testing.assert_array_equal(a.records, b.records)


def test_recovery_fock1_small_run(fock1):
    res = recover_witness(fock1, NoiseModel(0.5, 0.5), PolynomialWitness.fd(-12, 26), 1_000_000, seed=42)
    r4, se = res.statistics["r4"]
    assert abs(r4 - 10) < 3 * se
    w, wse = res.statistics["witness"]
    assert abs(w + 28) < 3 * wse
    d = res.to_dict()
    assert d["schema"] == 1
    assert set(d) >= {"empirical_moments", "deconvolved_moments", "witness", "stderr_bootstrap"}


def test_recovery_is_deterministic(fock1):
    args = (fock1, NoiseModel(0.6, 0.6), PolynomialWitness.fb(0.0), 20_000)
    a = recover_witness(*args, seed=7, bootstrap=20).to_dict()
    b = recover_witness(*args, seed=7, bootstrap=20).to_dict()
    assert a == b


def test_recovery_from_records(fock1):
    cfg = TrajectoryConfig(1.0, PERIOD, PERIOD / 100, NoiseModel(0.5, 0.5, 0.05), 0, 0)
    res = recover_witness(fock1, cfg, PolynomialWitness.fd(-12, 26), 200_000, seed=1, bootstrap=50)
    r2, se = res.statistics["r2"]
    assert abs(r2 - 3) < 4 * se
