"""Cyclic Jacobi eigensolver for small real symmetric matrices."""
from __future__ import annotations

from typing import NamedTuple

import numba as nb
import numpy as np

__all__ = ["jacobi_eigh", "min_eigenpair", "hermitian_min_eigenpair", "EigenPair"]

MAX_SIZE = 256


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray
    degenerate: bool


@nb.njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p):
                off += a[p, q] * a[p, q]
        if np.sqrt(off) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


def _check_symmetric(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] > MAX_SIZE:
        raise ValueError(f"matrix larger than {MAX_SIZE}")
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return np.ascontiguousarray(0.5 * (a + a.T))


def jacobi_eigh(a, max_sweeps: int = 100):
    """All eigenvalues (ascending) and eigenvectors (columns) of ``a``.

    Sweeps over every off-diagonal pair in row order until the off-diagonal
    Frobenius norm drops below machine precision relative to ``||a||``.
    """
    a = _check_symmetric(a)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if n > 1 and norm > 0:
        if _jacobi_sweeps(a, v, np.finfo(float).eps * norm, max_sweeps) < 0:
            raise ArithmeticError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[k]) / vec[k])


def min_eigenpair(a, degeneracy_tol: float = 1e-8) -> EigenPair:
    """Smallest eigenvalue with its unit eigenvector.

    The vector's largest-magnitude component is made positive. When the two
    lowest eigenvalues are closer than ``degeneracy_tol`` the pair is flagged
    degenerate and the vector is whichever Jacobi produced first.
    """
    w, v = jacobi_eigh(a)
    vec = _fix_sign(v[:, 0] / np.linalg.norm(v[:, 0]))
    degenerate = bool(w.size > 1 and w[1] - w[0] < degeneracy_tol)
    return EigenPair(float(w[0]), vec, degenerate)


def hermitian_min_eigenpair(h, degeneracy_tol: float = 1e-8) -> EigenPair:
    """:func:`min_eigenpair` for a complex Hermitian matrix.

    Real input goes straight to Jacobi. Otherwise the real ``2n x 2n``
    embedding ``[[Re, -Im], [Im, Re]]`` is diagonalized; its spectrum is the
    Hermitian one doubled. The returned vector has its largest component
    real and positive.
    """
    h = np.asarray(h)
    if not np.iscomplexobj(h) or not np.any(h.imag):
        return min_eigenpair(np.real(h), degeneracy_tol)
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * max(1.0, float(np.max(np.abs(h)))):
        raise ValueError("matrix is not Hermitian")
    n = h.shape[0]
    re, im = h.real, h.imag
    w, v = jacobi_eigh(np.block([[re, -im], [im, re]]))
    vec = v[:n, 0] + 1j * v[n:, 0]
    vec = _fix_sign(vec / np.linalg.norm(vec))
    if np.max(np.abs(vec.imag)) < 1e-14:
        vec = vec.real.copy()
    degenerate = bool(n > 1 and w[2] - w[0] < degeneracy_tol)
    return EigenPair(float(w[0]), vec, degenerate)
