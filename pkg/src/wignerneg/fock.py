"""Truncated Fock-space states and ladder-operator matrices.

Quadratures are dimensionless with ``[x, p] = i`` (hbar = 1) and
``a = (x + i p) / sqrt(2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FockState",
    "DensityMatrix",
    "OperatorMatrix",
    "build_operator",
    "expectation",
    "project_lattice",
    "padded_dim",
    "OPERATOR_KINDS",
]

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
POSITIVITY_TOL = 1e-10

OPERATOR_KINDS = ("a", "adag", "x", "p", "n", "identity")


def padded_dim(n_max: int, order: int) -> int:
    """Dimension in which products of ``order`` ladder operators stay exact.

    Matrix elements between states with occupation <= ``n_max`` are exact
    once every intermediate state fits, i.e. ``n_max + order < D``.
    """
    return int(n_max) + int(order) + 2


@dataclass(frozen=True)
class FockState:
    """Pure state ``sum_n v_n |n>`` over a truncated Fock basis.

    Amplitudes are normalized on construction; use :meth:`raw` to keep an
    unnormalized vector for intermediate algebra.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).ravel()
        if v.size < 1:
            raise ValueError("FockState needs at least one amplitude")
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        v = v / norm
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def raw(cls, amplitudes) -> "FockState":
        obj = object.__new__(cls)
        v = np.array(amplitudes, dtype=complex).ravel()
        v.setflags(write=False)
        object.__setattr__(obj, "amplitudes", v)
        return obj

    @classmethod
    def basis(cls, n: int, dim: int | None = None) -> "FockState":
        dim = n + 1 if dim is None else dim
        if not 0 <= n < dim:
            raise ValueError(f"level {n} outside dimension {dim}")
        v = np.zeros(dim, dtype=complex)
        v[n] = 1.0
        return cls(v)

    @classmethod
    def from_levels(cls, levels, coeffs, dim: int | None = None) -> "FockState":
        """Superposition with ``coeffs[i]`` on ``|levels[i]>``."""
        levels = [int(n) for n in levels]
        dim = max(levels) + 1 if dim is None else dim
        v = np.zeros(dim, dtype=complex)
        for n, c in zip(levels, coeffs, strict=True):
            v[n] += c
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def support_max(self) -> int:
        nz = np.flatnonzero(np.abs(self.amplitudes) > 0)
        return int(nz[-1]) if nz.size else 0

    def padded(self, dim: int) -> "FockState":
        if dim < self.dim:
            if np.any(self.amplitudes[dim:] != 0):
                raise ValueError("cannot shrink below the state support")
            return FockState.raw(self.amplitudes[:dim])
        v = np.zeros(dim, dtype=complex)
        v[: self.dim] = self.amplitudes
        return FockState.raw(v)

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive, unit-trace matrix in the truncated Fock basis."""

    entries: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise ValueError("density matrix must be square and non-empty")
        if self.check:
            if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(rho) - 1) > NORM_TOL:
                raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
            if np.linalg.eigvalsh(rho)[0] < -POSITIVITY_TOL:
                raise ValueError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def fock(cls, n: int, dim: int | None = None) -> "DensityMatrix":
        return FockState.basis(n, dim).density()

    @classmethod
    def mixture(cls, levels, weights, dim: int | None = None) -> "DensityMatrix":
        """Diagonal mixture ``sum_n w_n |n><n|``; weights are normalized."""
        levels = [int(n) for n in levels]
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("mixture weights must be non-negative and not all zero")
        dim = max(levels) + 1 if dim is None else dim
        diag = np.zeros(dim)
        for n, wn in zip(levels, w / w.sum(), strict=True):
            diag[n] += wn
        return cls(np.diag(diag).astype(complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def support_max(self) -> int:
        mask = np.any(np.abs(self.entries) > 0, axis=0)
        nz = np.flatnonzero(mask)
        return int(nz[-1]) if nz.size else 0

    def padded(self, dim: int) -> "DensityMatrix":
        if dim < self.dim:
            if np.any(self.entries[dim:, :] != 0) or np.any(self.entries[:, dim:] != 0):
                raise ValueError("cannot shrink below the state support")
            return DensityMatrix(self.entries[:dim, :dim], check=False)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[: self.dim, : self.dim] = self.entries
        return DensityMatrix(rho, check=False)

    def is_diagonal(self, tol: float = 1e-10) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.max(np.abs(off), initial=0.0) <= tol)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    label: str = "custom"
    omega: float = 1.0

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries, f"{self.label}*{other.label}", self.omega)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, f"{self.label}^dag", self.omega)


def _lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def build_operator(kind: str, dim: int, omega: float = 1.0) -> OperatorMatrix:
    """Truncated matrix of ``a``, ``adag``, ``x``, ``p``, ``n`` or ``identity``.

    Entries near the truncation edge are wrong for products (``x @ x`` has a
    bad last diagonal element); callers pad with :func:`padded_dim`.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    a = _lowering(dim)
    if kind == "a":
        m = a
    elif kind == "adag":
        m = a.conj().T
    elif kind == "x":
        m = (a + a.conj().T) / np.sqrt(2)
    elif kind == "p":
        m = 1j * (a.conj().T - a) / np.sqrt(2)
    elif kind == "n":
        m = np.diag(np.arange(dim, dtype=float)).astype(complex)
    elif kind == "identity":
        m = np.eye(dim, dtype=complex)
    else:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {OPERATOR_KINDS}")
    m.setflags(write=False)
    return OperatorMatrix(m, kind, omega)


def expectation(rho: DensityMatrix, op: OperatorMatrix, hermitian: bool | None = None) -> complex:
    """``Tr(op @ rho)``.

    For a Hermitian operator the imaginary part must vanish (to 1e-10).
    """
    if rho.dim != op.dim:
        raise ValueError(f"dimension mismatch: rho {rho.dim} vs operator {op.dim}")
    val = complex(np.sum(op.entries * rho.entries.T))
    if hermitian is None:
        hermitian = bool(np.allclose(op.entries, op.entries.conj().T, atol=1e-12))
    if hermitian and abs(val.imag) >= 1e-10:
        raise ArithmeticError(f"expectation of Hermitian operator has imaginary part {val.imag:g}")
    return val


def project_lattice(state: FockState, offset: int, spacing: int) -> FockState:
    """Keep amplitudes on ``n = offset (mod spacing)`` and renormalize."""
    if spacing < 1 or not 0 <= offset < spacing:
        raise ValueError("need 0 <= offset < spacing")
    n = np.arange(state.dim)
    v = np.where(n % spacing == offset, state.amplitudes, 0)
    if not np.any(v != 0):
        raise ValueError(f"state has no weight on lattice {offset} mod {spacing}")
    return FockState(v)
