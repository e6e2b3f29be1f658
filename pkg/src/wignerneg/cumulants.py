"""Bivariate moment <-> cumulant conversion.

Uses the derivative recursion of ``M = exp(K)``: for ``i > 0``

    m[i, j] = sum_{a < i, b <= j} C(i-1, a) C(j, b) k[a+1, b] m[i-1-a, j-b]

and the same with the roles of ``i`` and ``j`` swapped when ``i == 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .weyl import MomentTable

__all__ = ["CumulantTable", "moments_to_cumulants", "cumulants_to_moments", "MAX_ORDER"]

MAX_ORDER = 8


@dataclass(frozen=True)
class CumulantTable:
    """Joint cumulants ``<<x^n p^m>>`` for ``1 <= n + m <= max_order``."""

    max_order: int
    entries: dict

    def __getitem__(self, key) -> float:
        return self.entries[tuple(key)]

    def replace(self, updates: dict) -> "CumulantTable":
        entries = dict(self.entries)
        entries.update(updates)
        return CumulantTable(self.max_order, entries)

    def to_dict(self) -> dict:
        return {"max_order": self.max_order, "entries": [[n, m, v] for (n, m), v in sorted(self.entries.items())]}


def _indices(max_order: int):
    for k in range(1, max_order + 1):
        for n in range(k + 1):
            yield n, k - n


def _recursion_terms(i: int, j: int, kappa: dict, mom: dict, skip_top: bool):
    """Sum of the recursion for ``m[i, j]``; optionally without the ``k[i, j]`` term."""
    swap = i == 0
    if swap:
        i, j = j, i
    total = 0.0
    for a in range(i):
        for b in range(j + 1):
            if skip_top and a == i - 1 and b == j:
                continue
            k_idx = (a + 1, b)
            m_idx = (i - 1 - a, j - b)
            if swap:
                k_idx, m_idx = k_idx[::-1], m_idx[::-1]
            total += comb(i - 1, a) * comb(j, b) * kappa[k_idx] * mom[m_idx]
    return total


def moments_to_cumulants(moments, max_order: int | None = None) -> CumulantTable:
    """``moments`` is a :class:`MomentTable` or a ``{(n, m): value}`` dict with ``(0, 0) = 1``."""
    entries = moments.entries if isinstance(moments, MomentTable) else dict(moments)
    if max_order is None:
        max_order = moments.max_order if isinstance(moments, MomentTable) else max(n + m for n, m in entries)
    if max_order > MAX_ORDER:
        raise ValueError(f"max_order above {MAX_ORDER} is not supported")
    mom = dict(entries)
    mom[(0, 0)] = 1.0
    kappa = {}
    for i, j in _indices(max_order):
        kappa[(i, j)] = mom[(i, j)] - _recursion_terms(i, j, kappa, mom, skip_top=True)
    return CumulantTable(max_order, kappa)


def cumulants_to_moments(cumulants: CumulantTable) -> MomentTable:
    kappa = cumulants.entries
    mom = {(0, 0): 1.0}
    for i, j in _indices(cumulants.max_order):
        mom[(i, j)] = _recursion_terms(i, j, kappa, mom, skip_top=False)
    return MomentTable(cumulants.max_order, mom)
