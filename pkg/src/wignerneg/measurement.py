"""Noisy quadrature readout of a harmonic oscillator and moment deconvolution.

A detector adds independent Gaussian noise to the Wigner distribution, so
the measurable density is ``W * G`` and its cumulant generating function is
the sum of the two. Subtracting the (known) noise cumulants recovers the
Wigner cumulants, hence the Wigner moments, hence any witness value.

``W`` itself cannot be sampled when it is negative. Noise with variance at
least 1/2 per quadrature makes ``W * G`` a non-negative density: it is the
Husimi function (``W`` smoothed by the vacuum width) smoothed further.
Samples are drawn from the Husimi function by rejection and then receive
the remaining Gaussian noise.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .cumulants import CumulantTable, cumulants_to_moments, moments_to_cumulants
from .fock import DensityMatrix
from .weyl import MomentTable, PhaseSpaceGrid, wigner_grid
from .witness import PolynomialWitness, WitnessReport

__all__ = [
    "NoiseModel",
    "TrajectoryConfig",
    "MeasurementRun",
    "RecoveryResult",
    "husimi",
    "convolved_grid",
    "sample_convolved",
    "convolve_moments",
    "deconvolve",
    "empirical_moments",
    "simulate_record",
    "extract_quadratures",
    "extraction_noise",
    "recover_witness",
    "SamplingError",
]

MIN_SAMPLING_VARIANCE = 0.5
CHUNK = 1 << 18
ENVELOPE_SAFETY = 1.05


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    """Detector noise: per-readout variances and white-noise density ``s0``."""

    sigma2_x: float
    sigma2_p: float
    s0: float = 0.0

    def __post_init__(self):
        if not (self.sigma2_x > 0 and self.sigma2_p > 0):
            raise ValueError("noise variances must be positive")
        if self.s0 < 0:
            raise ValueError("white-noise density must be non-negative")

    def require_sampleable(self):
        if min(self.sigma2_x, self.sigma2_p) < MIN_SAMPLING_VARIANCE:
            raise SamplingError(
                f"noise variance below {MIN_SAMPLING_VARIANCE}: the smoothed Wigner function "
                "is not guaranteed non-negative and cannot be sampled"
            )

    def to_dict(self) -> dict:
        return {"sigma2_x": self.sigma2_x, "sigma2_p": self.sigma2_p, "s0": self.s0}


@dataclass(frozen=True)
class TrajectoryConfig:
    """Continuous position readout ``x(t) = x0 cos(wt) + p0 sin(wt) + noise``.

    ``noise.sigma2_*`` smear the initial point (at least 1/2 so it can be
    sampled); ``noise.s0`` is the white-noise density of the record, so each
    time bin gets variance ``s0 / dt``.
    """

    omega: float
    t0: float
    dt: float
    noise: NoiseModel
    samples: int
    seed: int

    def __post_init__(self):
        if self.omega <= 0 or self.t0 <= 0 or self.dt <= 0:
            raise ValueError("omega, t0 and dt must be positive")
        if self.samples < 0:
            raise ValueError("samples must be non-negative")
        periods = self.t0 * self.omega / (2 * np.pi)
        if abs(periods - round(periods)) > 1e-9 * max(1.0, periods) or round(periods) < 1:
            raise ValueError("t0 must be a whole number of oscillation periods")
        steps = self.t0 / self.dt
        if abs(steps - round(steps)) > 1e-9 * steps:
            raise ValueError("dt must divide t0")

    @property
    def steps(self) -> int:
        return int(round(self.t0 / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    def to_dict(self) -> dict:
        return {"omega": self.omega, "t0": self.t0, "dt": self.dt, "noise": self.noise.to_dict(),
                "samples": self.samples, "seed": self.seed}


@dataclass
class MeasurementRun:
    """Readouts plus what produced them.

    ``samples`` is ``(n, 2)`` for direct readout; ``records`` is
    ``(n, steps + 1)`` for time records. ``initial`` holds the sampled
    ``(x0, p0)`` of each time record.
    """

    config: dict
    samples: np.ndarray | None = None
    records: np.ndarray | None = None
    initial: np.ndarray | None = None
    times: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        arr = self.samples if self.samples is not None else self.records
        return 0 if arr is None else arr.shape[0]


def _coherent_overlaps(x, p, n_max: int) -> np.ndarray:
    """``<n|alpha>`` for ``alpha = (x + ip)/sqrt(2)``, last axis ``n``."""
    alpha = (np.asarray(x) + 1j * np.asarray(p)) / np.sqrt(2)
    out = np.empty(alpha.shape + (n_max + 1,), dtype=complex)
    out[..., 0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for n in range(n_max):
        out[..., n + 1] = out[..., n] * alpha / np.sqrt(n + 1)
    return out


def husimi(rho: DensityMatrix, x, p) -> np.ndarray:
    """``W`` convolved with vacuum-width noise, as a density in ``(x, p)``."""
    n_max = rho.support_max
    c = _coherent_overlaps(x, p, n_max)
    r = rho.entries[: n_max + 1, : n_max + 1]
    val = np.einsum("...m,mn,...n->...", c.conj(), r, c, optimize=True)
    return val.real / (2 * np.pi)


def _half_width(rho: DensityMatrix, noise: NoiseModel) -> float:
    return float(np.sqrt(2 * rho.support_max + 1) + 6 * np.sqrt(max(noise.sigma2_x, noise.sigma2_p) + 0.5))


def _gaussian_kernel(xs: np.ndarray, var: float) -> np.ndarray:
    d = xs[:, None] - xs[None, :]
    step = xs[1] - xs[0]
    return np.exp(-0.5 * d * d / var) / np.sqrt(2 * np.pi * var) * step


def convolved_grid(rho: DensityMatrix, noise: NoiseModel, points: int = 161, check: bool = True) -> PhaseSpaceGrid:
    """Tabulate ``W * G_noise`` from the Wigner grid.

    The grid covers the state's turning point plus six noise-broadened
    standard deviations. With ``check`` the result is required to be
    ``>= -1e-12`` everywhere.
    """
    L = _half_width(rho, noise)
    w = wigner_grid(rho, -L, L, points, -L, L, points)
    kx = _gaussian_kernel(w.xs, noise.sigma2_x)
    kp = _gaussian_kernel(w.ps, noise.sigma2_p)
    vals = kx @ w.values @ kp.T
    if check and vals.min() < -1e-12:
        raise SamplingError(f"convolved density negative ({vals.min():.3g}); noise too small")
    return PhaseSpaceGrid(w.x0, w.x1, w.nx, w.p0, w.p1, w.np, vals)


class _HusimiSampler:
    """Rejection sampler for :func:`husimi` with a Gaussian proposal."""

    def __init__(self, rho: DensityMatrix, noise: NoiseModel, points: int = 201):
        self.rho = rho
        self.noise = noise
        n_max = rho.support_max
        self.s2 = 2.0 * (n_max + 1)
        L = _half_width(rho, noise)
        g = np.linspace(-L, L, points)
        X, P = np.meshgrid(g, g, indexing="ij")
        ratio = husimi(rho, X, P) / self._proposal(X, P)
        edge = max(ratio[0].max(), ratio[-1].max(), ratio[:, 0].max(), ratio[:, -1].max())
        peak = ratio.max()
        if edge >= peak or not np.isfinite(peak):
            raise SamplingError("grid does not enclose the density peak; state support exceeds grid")
        self.envelope = ENVELOPE_SAFETY * peak

    def _proposal(self, x, p):
        return np.exp(-0.5 * (x * x + p * p) / self.s2) / (2 * np.pi * self.s2)

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty((n, 2))
        filled = 0
        s = np.sqrt(self.s2)
        while filled < n:
            batch = max(1024, int(1.5 * (n - filled) * self.envelope))
            prop = rng.normal(0.0, s, size=(batch, 2))
            u = rng.random(batch)
            q = husimi(self.rho, prop[:, 0], prop[:, 1])
            keep = prop[u * self.envelope * self._proposal(prop[:, 0], prop[:, 1]) < q]
            take = min(n - filled, keep.shape[0])
            out[filled : filled + take] = keep[:take]
            filled += take
        extra = np.array([self.noise.sigma2_x, self.noise.sigma2_p]) - MIN_SAMPLING_VARIANCE
        out += rng.normal(size=(n, 2)) * np.sqrt(extra)
        return out


def _chunk_rngs(seed: int, n: int, stream: int = 0):
    sizes = [min(CHUNK, n - s) for s in range(0, n, CHUNK)]
    seqs = np.random.SeedSequence([int(seed), stream]).spawn(len(sizes))
    return sizes, [np.random.default_rng(sq) for sq in seqs]


def _map_chunks(fn, sizes, rngs, threads: int):
    if threads <= 1 or len(sizes) <= 1:
        return [fn(n, rng) for n, rng in zip(sizes, rngs)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, sizes, rngs))


def sample_convolved(rho: DensityMatrix, noise: NoiseModel, n: int, seed: int, threads: int = 1) -> MeasurementRun:
    """``n`` i.i.d. noisy readouts ``(x, p)`` drawn from ``W * G_noise``.

    Chunks of fixed size get their own seed stream, so output is identical
    for any ``threads``.
    """
    noise.require_sampleable()
    if n < 0:
        raise ValueError("n must be non-negative")
    config = {"noise": noise.to_dict(), "samples": n, "seed": seed}
    if n == 0:
        return MeasurementRun(config, samples=np.empty((0, 2)), provenance={"seed": seed})
    sampler = _HusimiSampler(rho, noise)
    sizes, rngs = _chunk_rngs(seed, n)
    parts = _map_chunks(sampler.draw, sizes, rngs, threads)
    return MeasurementRun(config, samples=np.concatenate(parts), provenance={"seed": seed})


def _gaussian_raw_moment(k: int, var: float) -> float:
    if k % 2:
        return 0.0
    out = 1.0
    for j in range(1, k, 2):
        out *= j
    return out * var ** (k // 2)


def convolve_moments(table: MomentTable, noise: NoiseModel) -> MomentTable:
    """Exact moments of ``W * G_noise`` from the moments of ``W``."""
    out = {}
    for (i, j) in table.entries:
        out[(i, j)] = sum(
            comb(i, a) * comb(j, b) * table.entries[(i - a, j - b)]
            * _gaussian_raw_moment(a, noise.sigma2_x) * _gaussian_raw_moment(b, noise.sigma2_p)
            for a in range(i + 1) for b in range(j + 1)
        )
    return MomentTable(table.max_order, out)


def deconvolve(measured: CumulantTable, noise: NoiseModel) -> CumulantTable:
    """Remove Gaussian detector noise: only the two variances change."""
    updates = {}
    if (2, 0) in measured.entries:
        updates[(2, 0)] = measured.entries[(2, 0)] - noise.sigma2_x
    if (0, 2) in measured.entries:
        updates[(0, 2)] = measured.entries[(0, 2)] - noise.sigma2_p
    return measured.replace(updates)


def _monomial_index(max_order: int):
    return [(n, k - n) for k in range(max_order + 1) for n in range(k + 1)]


def _block_power_sums(samples: np.ndarray, max_order: int, blocks: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-block sums of ``x^i p^j`` (``i + j <= max_order``) and block sizes."""
    n = samples.shape[0]
    blocks = max(1, min(blocks, n))
    edges = np.linspace(0, n, blocks + 1).astype(np.int64)
    idx = _monomial_index(max_order)
    sums = np.empty((blocks, len(idx)))
    for b in range(blocks):
        seg = samples[edges[b] : edges[b + 1]]
        xp = seg[:, 0:1] ** np.arange(max_order + 1)
        pp = seg[:, 1:2] ** np.arange(max_order + 1)
        full = xp.T @ pp
        sums[b] = [full[i, j] for i, j in idx]
    return sums, np.diff(edges).astype(float)


def _table_from_sums(sums: np.ndarray, count: float, max_order: int) -> MomentTable:
    vals = sums / count
    entries = dict(zip(_monomial_index(max_order), vals.tolist()))
    entries[(0, 0)] = 1.0
    return MomentTable(max_order, entries)


def empirical_moments(samples: np.ndarray, max_order: int) -> MomentTable:
    sums, sizes = _block_power_sums(np.asarray(samples, dtype=float), max_order, 64)
    return _table_from_sums(sums.sum(axis=0), sizes.sum(), max_order)


def _record_chunk(rho, config: TrajectoryConfig, sampler, n, rng):
    t = config.times
    init = sampler.draw(n, rng)
    rec = np.outer(init[:, 0], np.cos(config.omega * t)) + np.outer(init[:, 1], np.sin(config.omega * t))
    if config.noise.s0 > 0:
        rec += rng.normal(0.0, np.sqrt(config.noise.s0 / config.dt), size=rec.shape)
    return init, rec


def simulate_record(rho: DensityMatrix, config: TrajectoryConfig, threads: int = 1) -> MeasurementRun:
    """Position records along classical trajectories plus white noise."""
    config.noise.require_sampleable()
    sampler = _HusimiSampler(rho, config.noise)
    sizes, rngs = _chunk_rngs(config.seed, config.samples, stream=1)
    parts = _map_chunks(lambda n, rng: _record_chunk(rho, config, sampler, n, rng), sizes, rngs, threads)
    if parts:
        init = np.concatenate([p[0] for p in parts])
        rec = np.concatenate([p[1] for p in parts])
    else:
        init, rec = np.empty((0, 2)), np.empty((0, config.steps + 1))
    return MeasurementRun(config.to_dict(), records=rec, initial=init, times=config.times,
                          provenance={"seed": config.seed})


def trajectory_record(x0: float, p0: float, config: TrajectoryConfig, rng=None) -> np.ndarray:
    """Single record from a given initial point."""
    t = config.times
    rec = x0 * np.cos(config.omega * t) + p0 * np.sin(config.omega * t)
    if config.noise.s0 > 0:
        rng = np.random.default_rng(config.seed) if rng is None else rng
        rec = rec + rng.normal(0.0, np.sqrt(config.noise.s0 / config.dt), size=rec.shape)
    return rec


def _fourier_weights(times: np.ndarray, omega: float) -> np.ndarray:
    t0 = times[-1] - times[0]
    periods = t0 * omega / (2 * np.pi)
    if abs(periods - round(periods)) > 1e-9 * max(1.0, periods) or round(periods) < 1:
        raise ValueError("record length is not a whole number of periods")
    trap = np.full(times.size, times[1] - times[0])
    trap[[0, -1]] /= 2
    return 2.0 / t0 * np.stack([trap * np.cos(omega * times), trap * np.sin(omega * times)], axis=1)


def extract_quadratures(run: MeasurementRun | np.ndarray, times=None, omega: float | None = None) -> np.ndarray:
    """``(x0, p0)`` estimates from the ``cos`` and ``sin`` Fourier components.

    Accepts a :class:`MeasurementRun` from :func:`simulate_record` or a raw
    ``(n, steps + 1)`` array with explicit ``times`` and ``omega``.
    """
    if isinstance(run, MeasurementRun):
        records, times, omega = run.records, run.times, run.config["omega"]
    else:
        records = np.atleast_2d(run)
    weights = _fourier_weights(np.asarray(times, dtype=float), omega)
    return records @ weights


def extraction_noise(config: TrajectoryConfig) -> NoiseModel:
    """Total Gaussian noise on the extracted quadratures.

    Initial-point smearing plus the filtered white noise, which is close to
    ``2 s0 / t0`` per quadrature.
    """
    w = _fourier_weights(config.times, config.omega)
    white = config.noise.s0 / config.dt * np.sum(w**2, axis=0)
    return NoiseModel(float(config.noise.sigma2_x + white[0]), float(config.noise.sigma2_p + white[1]))


@dataclass
class RecoveryResult:
    report: WitnessReport
    stderr: float
    empirical: MomentTable
    deconvolved: MomentTable
    statistics: dict  # name -> (value, bootstrap standard error)
    noise: NoiseModel
    samples: int

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "samples": self.samples,
            "noise": self.noise.to_dict(),
            "empirical_moments": self.empirical.to_dict(),
            "deconvolved_moments": self.deconvolved.to_dict(),
            "witness": self.report.to_dict(),
            "stderr_bootstrap": self.stderr,
            "statistics": {k: {"value": v, "stderr": e} for k, (v, e) in self.statistics.items()},
        }


def _recovered(sums, count, order, noise):
    measured = _table_from_sums(sums, count, order)
    return cumulants_to_moments(deconvolve(moments_to_cumulants(measured), noise))


def recover_witness(rho: DensityMatrix, noise: NoiseModel | TrajectoryConfig, witness: PolynomialWitness,
                    n: int, seed: int, bootstrap: int = 200, blocks: int = 1000,
                    threads: int = 1) -> RecoveryResult:
    """Sample, deconvolve and evaluate ``<f^2>_W`` with a bootstrap error.

    The bootstrap resamples ``blocks`` contiguous blocks of the i.i.d.
    sample with replacement (each resample redoes the full moment ->
    cumulant -> deconvolution -> witness chain). ``violated`` in the report
    means ``value + 3 SE < 0``.
    """
    order = 2 * witness.order
    if order > 8:
        raise ValueError("witness order above 4 needs moments beyond order 8")
    if isinstance(noise, TrajectoryConfig):
        config = TrajectoryConfig(noise.omega, noise.t0, noise.dt, noise.noise, n, seed)
        run = simulate_record(rho, config, threads)
        samples = extract_quadratures(run)
        total_noise = extraction_noise(config)
    else:
        samples = sample_convolved(rho, noise, n, seed, threads).samples
        total_noise = noise
    if samples.shape[0] == 0:
        raise ValueError("no samples to analyse")
    sums, sizes = _block_power_sums(samples, order, blocks)
    empirical = _table_from_sums(sums.sum(axis=0), sizes.sum(), order)
    recovered = _recovered(sums.sum(axis=0), sizes.sum(), order, total_noise)

    def stats(table):
        out = {"witness": table.expect(witness.square())}
        for j in range(1, order // 2 + 1):
            out[f"r{2 * j}"] = table.radial[j]
        return out

    point = stats(recovered)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 2]))
    nb = sums.shape[0]
    boot = {k: [] for k in point}
    for _ in range(bootstrap):
        pick = rng.integers(0, nb, nb)
        st = stats(_recovered(sums[pick].sum(axis=0), sizes[pick].sum(), order, total_noise))
        for k, v in st.items():
            boot[k].append(v)
    errors = {k: float(np.std(v, ddof=1)) if len(v) > 1 else float("nan") for k, v in boot.items()}
    statistics = {k: (point[k], errors[k]) for k in point}
    report = WitnessReport(witness, point["witness"], stderr=errors["witness"],
                           params={"samples": int(samples.shape[0]), "seed": seed})
    return RecoveryResult(report, errors["witness"], empirical, recovered, statistics, total_noise,
                          int(samples.shape[0]))
