"""The regularized state ``psi(x) ~ exp(-|x|/2) |x|^(eps - 1/2)``.

As ``eps -> 0`` this state drives ``<(2xp)^2>_W`` towards its lower bound
``-1``. All integrals here carry the integrable ``|x|^(2 eps - 1)`` (or
``|y - |x||^(eps - 1/2)``) endpoint singularity and are done with
substitution plus geometrically graded Gauss-Legendre panels.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma

import numpy as np

__all__ = [
    "RegularizedStateParams",
    "psi",
    "psi_derivative",
    "phi",
    "dilation_log_derivative",
    "psi_norm_check",
    "fb_moment",
    "wigner_point",
    "QuadratureError",
]


class QuadratureError(ArithmeticError):
    """Node refinement changed an integral by more than the tolerance."""


@dataclass(frozen=True)
class RegularizedStateParams:
    epsilon: float
    c0: float = 0.0
    nodes: int = 16
    x_cut: float = 1.0
    tol: float = 1e-10

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0; the eps = 0 state is not normalizable")
        if self.nodes < 4:
            raise ValueError("need at least 4 quadrature nodes per panel")

    @property
    def prefactor(self) -> float:
        """``1 / (2 Gamma(2 eps))``, the squared normalization constant."""
        return 1.0 / (2.0 * gamma(2 * self.epsilon))


def psi(params: RegularizedStateParams, x):
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        return np.sqrt(params.prefactor) * np.exp(-x / 2) * x ** (params.epsilon - 0.5)


def dilation_log_derivative(params: RegularizedStateParams, x):
    """``x d(ln psi)/dx``, finite at ``x = 0``."""
    return params.epsilon - 0.5 - np.abs(np.asarray(x, dtype=float)) / 2


def psi_derivative(params: RegularizedStateParams, x):
    """``d psi / dx`` for ``x != 0``."""
    x = np.asarray(x, dtype=float)
    return psi(params, x) * dilation_log_derivative(params, x) / x


def _phi_ratio(params, x):
    # phi / psi; x p + p x = -i (2 x d/dx + 1)
    return params.c0 - 1j - 2j * dilation_log_derivative(params, x)


def phi(params: RegularizedStateParams, x):
    """``(x p + p x + c0) psi`` with ``p = -i d/dx``."""
    return _phi_ratio(params, x) * psi(params, x)


@lru_cache(maxsize=32)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _graded_edges(length: float, levels: int = 30, ratio: float = 0.15, pieces: int = 4) -> np.ndarray:
    """Panel edges on ``[0, length]`` refined geometrically towards 0."""
    tiny = length * ratio ** np.arange(levels, 0, -1)
    coarse = np.linspace(length * ratio, length, pieces + 1)
    return np.concatenate([[0.0], tiny, coarse[1:]])


def _panel_rule(edges: np.ndarray, n: int):
    t, w = _gl(n)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    return (lo + half * (1 + t)).ravel(), (half * w).ravel()


def _weighted_integral(h, eps: float, x_cut: float, n: int) -> float:
    """``int_0^inf h(x) x^(2 eps - 1) exp(-x) dx``."""
    q = 1.0 / (2 * eps)
    u, wu = _panel_rule(_graded_edges(x_cut ** (2 * eps)), n)
    xs = u**q
    head = q * np.sum(wu * h(xs) * np.exp(-xs))
    # exp(-x) is below 1e-30 of the head beyond x_cut + 70
    xt, wt = _panel_rule(np.linspace(x_cut, x_cut + 70.0, 36), n)
    tail = np.sum(wt * h(xt) * xt ** (2 * eps - 1) * np.exp(-xt))
    return float(head + tail)


def _refined(fn, params: RegularizedStateParams):
    coarse = fn(params.nodes)
    fine = fn(2 * params.nodes)
    if abs(fine - coarse) > params.tol * max(1.0, abs(fine)):
        raise QuadratureError(f"no convergence: {coarse!r} vs {fine!r}")
    return fine, abs(fine - coarse)


def psi_norm_check(params: RegularizedStateParams, return_error: bool = False):
    """``int |psi|^2 dx``, which should be 1."""
    eps = params.epsilon
    if eps > 5:
        raise ValueError("epsilon above 5 is outside the supported range")
    c = 2 * params.prefactor  # both half-lines

    def run(n):
        return c * _weighted_integral(lambda x: np.ones_like(x), eps, params.x_cut, n)

    val, err = _refined(run, params)
    return (val, err) if return_error else val


def fb_moment(params: RegularizedStateParams, return_error: bool = False):
    """``<(2xp + c0)^2>_W = int |phi|^2 dx - 1``.

    ``phi / psi`` is smooth away from 0, so the squared ratio times the
    singular weight ``|psi|^2`` is integrated.
    """
    eps = params.epsilon
    c = 2 * params.prefactor

    def ratio_sq(x):
        return np.abs(_phi_ratio(params, x)) ** 2

    def run(n):
        return c * _weighted_integral(ratio_sq, eps, params.x_cut, n) - 1.0

    val, err = _refined(run, params)
    return (val, err) if return_error else val


def _wigner_nodes(a: float, p_max: float, n: int, reach: float = 40.0):
    """Quadrature nodes on ``[0, a + reach]`` graded towards ``y = a``.

    Coarse panels are no longer than half a ``cos(2 p y)`` wavelength.
    """
    wavelength = np.pi / max(p_max, 1e-12)
    max_len = min(1.0, wavelength / 2)
    pieces = []

    def coarse(lo, hi):
        k = max(1, int(np.ceil((hi - lo) / max_len)))
        return np.linspace(lo, hi, k + 1)

    def graded(length):
        first = min(length, max_len)
        e = _graded_edges(first, pieces=1)
        if length > first:
            e = np.concatenate([e, coarse(first, length)[1:]])
        return e

    if a > 0:
        left = a - graded(a)[::-1]  # refine towards a from below
        pieces.append(np.sort(left))
    right = a + graded(reach)
    pieces.append(right)
    ys, ws = [], []
    for edges in pieces:
        y, w = _panel_rule(np.asarray(edges), n)
        ys.append(y)
        ws.append(w)
    return np.concatenate(ys), np.concatenate(ws)


def wigner_point(params: RegularizedStateParams, x: float, p, return_error: bool = False):
    """``W(x, p) = (1/pi) int psi(x+y) psi(x-y) exp(2ipy) dy``.

    ``x`` is a scalar and ``p`` may be an array. For real even ``psi`` the
    integrand reduces to ``exp(-max(|x|, y)) |x^2 - y^2|^(eps - 1/2)`` on
    ``y >= 0``, singular at ``y = |x|`` when ``eps < 1/2``.
    """
    a = abs(float(x))
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    p_max = float(np.max(np.abs(p_arr), initial=0.0))
    eps = params.epsilon
    c = 2 * params.prefactor / np.pi

    def run(n):
        y, w = _wigner_nodes(a, p_max, n)
        with np.errstate(divide="ignore"):
            f = np.exp(-np.maximum(a, y)) * np.abs(a * a - y * y) ** (eps - 0.5)
        wf = w * np.where(np.isfinite(f), f, 0.0)
        out = np.empty(p_arr.size)
        step = max(1, 2_000_000 // y.size)
        for s in range(0, p_arr.size, step):
            out[s : s + step] = np.cos(2 * np.outer(p_arr[s : s + step], y)) @ wf
        return c * out

    coarse = run(params.nodes)
    fine = run(2 * params.nodes)
    err = np.abs(fine - coarse)
    if np.any(err > 1e-7 * np.maximum(1.0, np.abs(fine))):
        raise QuadratureError(f"Wigner integral not converged, error estimate {err.max():.3g}")
    out = fine if np.ndim(p) else float(fine[0])
    if return_error:
        return out, (err if np.ndim(p) else float(err[0]))
    return out
