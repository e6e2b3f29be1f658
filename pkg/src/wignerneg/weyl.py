"""Weyl-ordered moments and Wigner-function tabulation.

The Wigner average of a phase-space monomial equals the expectation of its
Weyl (symmetrically ordered) quantization, so every moment here is a trace
against a Fock-space matrix.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .fock import DensityMatrix, OperatorMatrix, build_operator, padded_dim

__all__ = [
    "MomentTable",
    "PhaseSpaceGrid",
    "weyl_operator",
    "moment",
    "radial_moment",
    "moment_table",
    "fock_wavefunctions",
    "wigner_grid",
]

IMAG_TOL = 1e-10


@lru_cache(maxsize=64)
def _quadrature_powers(dim: int, order: int):
    x = build_operator("x", dim).entries
    p = build_operator("p", dim).entries
    xs = [np.eye(dim, dtype=complex)]
    ps = [np.eye(dim, dtype=complex)]
    for _ in range(order):
        xs.append(xs[-1] @ x)
        ps.append(ps[-1] @ p)
    return xs, ps


def _weyl_matrix(n: int, m: int, dim: int, p_side: bool = False) -> np.ndarray:
    xs, ps = _quadrature_powers(dim, n + m)
    if p_side:
        # same operator, symmetrized over the p factors instead
        terms = (comb(m, j) * ps[j] @ xs[n] @ ps[m - j] for j in range(m + 1))
        return sum(terms) / 2**m
    terms = (comb(n, j) * xs[j] @ ps[m] @ xs[n - j] for j in range(n + 1))
    return sum(terms) / 2**n


def weyl_operator(n: int, m: int, dim: int, p_side: bool = False) -> OperatorMatrix:
    """Weyl quantization of ``x**n p**m`` as a ``dim x dim`` matrix.

    Uses McCoy's one-sided form ``2**-n sum_j C(n, j) x^j p^m x^(n-j)``.
    The products are formed in a padded space so that every returned entry
    is exact. ``p_side=True`` symmetrizes over ``p`` instead, which gives
    the same operator.
    """
    if n < 0 or m < 0:
        raise ValueError("exponents must be non-negative")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    big = padded_dim(dim - 1, n + m)
    mat = _weyl_matrix(n, m, big, p_side)[:dim, :dim]
    return OperatorMatrix(mat, f"W(x^{n} p^{m})")


def _real(val: complex, what: str) -> float:
    if abs(val.imag) >= IMAG_TOL:
        raise ArithmeticError(f"{what} has imaginary part {val.imag:g}")
    return float(val.real)


def _padded_rho(rho: DensityMatrix, order: int) -> np.ndarray:
    big = padded_dim(rho.support_max, order)
    return rho.padded(max(big, rho.dim)).entries


def moment(rho: DensityMatrix, n: int, m: int) -> float:
    """Wigner moment ``<x^n p^m>_W``."""
    if n < 0 or m < 0:
        raise ValueError("exponents must be non-negative")
    r = _padded_rho(rho, n + m)
    w = _weyl_matrix(n, m, r.shape[0])
    return _real(np.sum(w * r.T), f"moment ({n},{m})")


def radial_moment(rho: DensityMatrix, j: int) -> float:
    """``<(x^2 + p^2)^j>_W`` from the binomial expansion of Cartesian moments."""
    if j < 0:
        raise ValueError("j must be non-negative")
    r = _padded_rho(rho, 2 * j)
    dim = r.shape[0]
    total = sum(comb(j, i) * _weyl_matrix(2 * i, 2 * (j - i), dim) for i in range(j + 1))
    return _real(np.sum(total * r.T), f"radial moment {j}")


@dataclass(frozen=True)
class MomentTable:
    """Wigner moments ``<x^n p^m>`` for ``n + m <= max_order``.

    ``radial[j]`` holds ``<r^(2j)>`` for ``2j <= max_order``; it is derived
    from ``entries`` when not given.
    """

    max_order: int
    entries: dict
    radial: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.radial:
            rad = {}
            for j in range(self.max_order // 2 + 1):
                rad[j] = sum(comb(j, i) * self.entries[(2 * i, 2 * (j - i))] for i in range(j + 1))
            object.__setattr__(self, "radial", rad)

    def __getitem__(self, key) -> float:
        return self.entries[tuple(key)]

    def expect(self, coeffs: dict) -> float:
        """Wigner average of ``sum c_nm x^n p^m``."""
        return float(sum(c * self.entries[(n, m)] for (n, m), c in coeffs.items()))

    def to_dict(self) -> dict:
        return {
            "max_order": self.max_order,
            "entries": [[n, m, v] for (n, m), v in sorted(self.entries.items())],
            "radial": [[j, v] for j, v in sorted(self.radial.items())],
        }


def moment_table(rho: DensityMatrix, max_order: int) -> MomentTable:
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    r = _padded_rho(rho, max_order)
    dim = r.shape[0]
    entries = {}
    for k in range(max_order + 1):
        for n in range(k + 1):
            w = _weyl_matrix(n, k - n, dim)
            entries[(n, k - n)] = _real(np.sum(w * r.T), f"moment ({n},{k - n})")
    return MomentTable(max_order, entries)


def fock_wavefunctions(x, n_max: int) -> np.ndarray:
    """Position wavefunctions ``psi_0..psi_nmax`` at ``x``; last axis is ``n``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n_max + 1,))
    out[..., 0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        out[..., 1] = np.sqrt(2.0) * x * out[..., 0]
    for n in range(1, n_max):
        out[..., n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[..., n] - np.sqrt(n / (n + 1)) * out[..., n - 1]
    return out


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """``W(x, p)`` on an inclusive rectangular grid; ``values[i, j]`` at ``(x_i, p_j)``."""

    x0: float
    x1: float
    nx: int
    p0: float
    p1: float
    np: int
    values: np.ndarray
    bad: np.ndarray | None = None

    @property
    def xs(self):
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ps(self):
        return np.linspace(self.p0, self.p1, self.np)

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p1 - self.p0) / (self.np - 1)

    def total(self) -> float:
        return float(self.values.sum() * self.dx * self.dp)

    def marginal_x(self) -> np.ndarray:
        """``int W dp`` at each ``x``."""
        return self.values.sum(axis=1) * self.dp

    def marginal_p(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.dx

    def integrate(self, n: int, m: int) -> float:
        """Riemann estimate of ``int x^n p^m W dx dp``."""
        X, P = np.meshgrid(self.xs, self.ps, indexing="ij")
        return float(np.sum(X**n * P**m * self.values) * self.dx * self.dp)

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1,
            "x0": self.x0, "x1": self.x1, "nx": self.nx,
            "p0": self.p0, "p1": self.p1, "np": self.np,
            "values": self.values.ravel().tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "PhaseSpaceGrid":
        d = json.loads(text)
        vals = np.array(d["values"], dtype=float).reshape(d["nx"], d["np"])
        return cls(d["x0"], d["x1"], d["nx"], d["p0"], d["p1"], d["np"], vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "p", "w"])
        for i, x in enumerate(self.xs):
            for j, p in enumerate(self.ps):
                w.writerow([repr(float(x)), repr(float(p)), repr(float(self.values[i, j]))])
        return buf.getvalue()


def wigner_grid(rho: DensityMatrix, x0, x1, nx, p0, p1, np_, nodes: int = 200) -> PhaseSpaceGrid:
    """Tabulate ``W(x, p) = (1/pi) int rho(x - y, x + y) exp(2ipy) dy``.

    The ``y`` integral is Gauss-Legendre on ``[-Y, Y]`` with ``Y`` the
    classical turning point of the highest occupied level plus eight
    vacuum standard deviations.
    """
    if nx < 2 or np_ < 2:
        raise ValueError("grid needs at least 2 points per axis")
    if not all(np.isfinite([x0, x1, p0, p1])):
        raise ValueError("grid bounds must be finite")
    n_max = rho.support_max
    ymax = np.sqrt(2 * n_max + 1) + 8 / np.sqrt(2)
    t, wt = np.polynomial.legendre.leggauss(nodes)
    y, wt = ymax * t, ymax * wt
    xs = np.linspace(x0, x1, nx)
    ps = np.linspace(p0, p1, np_)
    r = rho.entries[: n_max + 1, : n_max + 1]
    phase = np.exp(2j * np.outer(y, ps)) * wt[:, None]
    values = np.empty((nx, np_))
    chunk = max(1, 4_000_000 // (nodes * (n_max + 1)))
    for s in range(0, nx, chunk):
        xc = xs[s : s + chunk, None]
        lo = fock_wavefunctions(xc - y, n_max)
        hi = fock_wavefunctions(xc + y, n_max)
        kern = np.einsum("xym,mn,xyn->xy", lo, r, hi, optimize=True)
        values[s : s + chunk] = (kern @ phase).real / np.pi
    bad = ~np.isfinite(values)
    return PhaseSpaceGrid(float(x0), float(x1), int(nx), float(p0), float(p1), int(np_), values, bad)
