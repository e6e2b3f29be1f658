"""Polynomial negativity witnesses ``<f^2>_W >= 0`` and their searches.

A genuine probability density satisfies ``<f^2> >= 0`` for every real
polynomial ``f``. A state whose Wigner moments give ``<f^2>_W < 0`` therefore
has a Wigner function that is negative somewhere.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .eigen import hermitian_min_eigenpair
from .fock import DensityMatrix, FockState
from .weyl import moment_table, radial_moment, weyl_operator

__all__ = [
    "PolynomialWitness",
    "TridiagonalWitnessMatrix",
    "WitnessReport",
    "witness_value",
    "witness_operator",
    "fa_scan",
    "fb_matrix",
    "fb_determinant_exact",
    "fb_search",
    "fb_search_matrix",
    "Order2Search",
    "general_order2_search",
    "necessity_check",
    "rotinv_fc_minimum",
    "rotinv_fd_minimum",
    "fc_quadratic",
    "DEFAULT_C0_GRID",
]

VIOLATION_TOL = 1e-9
DEFAULT_C0_GRID = tuple(np.round(np.arange(-40, 41) * 0.25, 2).tolist())


@dataclass(frozen=True)
class PolynomialWitness:
    """Real polynomial ``f(x, p) = sum c_nm x^n p^m``."""

    coeffs: dict
    name: str = "custom"

    def __post_init__(self):
        clean = {}
        for (n, m), c in dict(self.coeffs).items():
            n, m, c = int(n), int(m), float(c)
            if n < 0 or m < 0:
                raise ValueError("exponents must be non-negative")
            if c != 0:
                clean[(n, m)] = clean.get((n, m), 0.0) + c
        clean = {k: v for k, v in clean.items() if v != 0}
        if not clean:
            raise ValueError("zero polynomial is not a witness")
        object.__setattr__(self, "coeffs", clean)

    @property
    def order(self) -> int:
        return max(n + m for n, m in self.coeffs)

    def square(self) -> dict:
        """Coefficients of ``f**2`` as a commutative polynomial."""
        out = defaultdict(float)
        for (n1, m1), c1 in self.coeffs.items():
            for (n2, m2), c2 in self.coeffs.items():
                out[(n1 + n2, m1 + m2)] += c1 * c2
        return dict(out)

    def __call__(self, x, p):
        return sum(c * np.asarray(x) ** n * np.asarray(p) ** m for (n, m), c in self.coeffs.items())

    @classmethod
    def fa(cls, c0: float = 0.0) -> "PolynomialWitness":
        return cls({(2, 0): 1, (0, 2): 1, (0, 0): c0}, "fa")

    @classmethod
    def fb(cls, c0: float = 0.0) -> "PolynomialWitness":
        return cls({(1, 1): 2, (0, 0): c0}, "fb")

    @classmethod
    def fc(cls, c30: float, c10: float) -> "PolynomialWitness":
        # x (x^2 + p^2) + (c30 - 1) x^3 + c10 x
        return cls({(3, 0): c30, (1, 2): 1, (1, 0): c10}, "fc")

    @classmethod
    def fd(cls, c20: float, c0: float) -> "PolynomialWitness":
        # r^4 + c20 r^2 + c0
        return cls({(4, 0): 1, (2, 2): 2, (0, 4): 1, (2, 0): c20, (0, 2): c20, (0, 0): c0}, "fd")

    def to_dict(self) -> dict:
        return {"name": self.name, "coeffs": [[n, m, c] for (n, m), c in sorted(self.coeffs.items())]}

    @classmethod
    def from_dict(cls, d: dict) -> "PolynomialWitness":
        return cls({(n, m): c for n, m, c in d["coeffs"]}, d.get("name", "custom"))


def _vector_json(v):
    if v is None:
        return None
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [[float(z.real), float(z.imag)] for z in v]
    return [float(z) for z in v]


@dataclass
class WitnessReport:
    witness: PolynomialWitness
    value: float
    state: FockState | DensityMatrix | None = None
    min_eigenvalue: float | None = None
    eigenvector: np.ndarray | None = None
    degenerate: bool = False
    basis: tuple | None = None
    params: dict = field(default_factory=dict)
    stderr: float | None = None

    @property
    def violated(self) -> bool:
        # statistical estimates must clear three standard errors
        if self.stderr is not None:
            return self.value + 3 * self.stderr < 0
        return self.value < -VIOLATION_TOL

    def to_dict(self) -> dict:
        from .statespec import state_to_json

        return {
            "witness": self.witness.to_dict(),
            "state": None if self.state is None else state_to_json(self.state),
            "value": self.value,
            "min_eigenvalue": self.min_eigenvalue,
            "eigenvector": _vector_json(self.eigenvector),
            "basis": None if self.basis is None else list(self.basis),
            "violated": self.violated,
            "degenerate": self.degenerate,
            **({"stderr": self.stderr} if self.stderr is not None else {}),
            **({"params": self.params} if self.params else {}),
        }


def witness_value(rho: DensityMatrix, f: PolynomialWitness) -> float:
    """``<f^2>_W`` from the state's Wigner moments up to order ``2k``."""
    table = moment_table(rho, 2 * f.order)
    return table.expect(f.square())


def witness_operator(f: PolynomialWitness, dim: int) -> np.ndarray:
    """Weyl quantization of ``f**2`` as an exact ``dim x dim`` matrix."""
    out = np.zeros((dim, dim), dtype=complex)
    for (n, m), c in f.square().items():
        out += c * weyl_operator(n, m, dim).entries
    return out


def fa_scan(n_max: int) -> list[dict]:
    """Check that ``f_a = x^2 + p^2 + c0`` cannot expose a Fock state.

    ``<(x^2+p^2)^2>_W - <x^2+p^2>_W^2`` is computed from Weyl moments of
    ``|n>``; it equals 1 for every ``n`` so the best ``c0`` still leaves
    ``<f_a^2>_W >= 1``.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    rows = []
    for n in range(n_max + 1):
        rho = DensityMatrix.fock(n)
        r2, r4 = radial_moment(rho, 1), radial_moment(rho, 2)
        exact_margin = (4 * n * n + 4 * n + 2) - (2 * n + 1) ** 2
        rows.append({"n": n, "r2": r2, "r4": r4, "margin": r4 - r2 * r2, "exact_margin": exact_margin})
    return rows


@dataclass(frozen=True)
class TridiagonalWitnessMatrix:
    """``(2xp)^2`` restricted to ``|0>, |4>, ..., |4(L-1)>``.

    ``offdiag_sq[k-1] = B_k**2`` is kept as an exact integer.
    """

    diag: tuple
    offdiag_sq: tuple

    @property
    def size(self) -> int:
        return len(self.diag)

    @property
    def offdiag(self) -> np.ndarray:
        return -np.sqrt(np.array(self.offdiag_sq, dtype=float))

    @property
    def basis(self) -> tuple:
        return tuple(4 * k for k in range(self.size))

    def dense(self) -> np.ndarray:
        m = np.diag(np.array(self.diag, dtype=float))
        if self.size > 1:
            off = self.offdiag
            m += np.diag(off, 1) + np.diag(off, -1)
        return m


def fb_matrix(levels: int) -> TridiagonalWitnessMatrix:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    diag = tuple(32 * k * k + 8 * k + 1 for k in range(levels))
    off = tuple(4 * k * (4 * k - 1) * (4 * k - 2) * (4 * k - 3) for k in range(1, levels))
    return TridiagonalWitnessMatrix(diag, off)


def fb_determinant_exact(levels: int) -> int:
    """Exact determinant of :func:`fb_matrix` by the three-term recurrence."""
    mat = fb_matrix(levels)
    prev, cur = 1, mat.diag[0]
    for k in range(1, levels):
        prev, cur = cur, mat.diag[k] * cur - mat.offdiag_sq[k - 1] * prev
    return cur


def _lattice(offset: int, spacing: int, levels: int) -> list[int]:
    if spacing < 1 or not 0 <= offset < spacing:
        raise ValueError("need 0 <= offset < spacing")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    return [offset + spacing * k for k in range(levels)]


class _FbBlocks:
    """``W(x^2 p^2)`` and ``W(xp)`` on a set of Fock labels, reused across ``c0``."""

    def __init__(self, labels):
        self.labels = list(labels)
        dim = max(self.labels) + 1
        idx = np.ix_(self.labels, self.labels)
        self.quartic = 4 * weyl_operator(2, 2, dim).entries[idx]
        self.cross = 4 * weyl_operator(1, 1, dim).entries[idx]

    def matrix(self, c0: float) -> np.ndarray:
        m = self.quartic + c0 * self.cross + c0 * c0 * np.eye(len(self.labels))
        return m.real if not np.any(m.imag) else m


def fb_search_matrix(c0: float, offset: int = 0, spacing: int = 4, levels: int = 5) -> np.ndarray:
    """Matrix of ``W((2xp + c0)^2)`` on the Fock lattice ``offset + spacing*k``."""
    return _FbBlocks(_lattice(offset, spacing, levels)).matrix(c0)


def _report_from_matrix(witness, mat, labels, params) -> WitnessReport:
    pair = hermitian_min_eigenpair(mat)
    dim = max(labels) + 1
    state = FockState.from_levels(labels, pair.vector, dim)
    return WitnessReport(
        witness=witness,
        value=pair.value,
        state=state,
        min_eigenvalue=pair.value,
        eigenvector=pair.vector,
        degenerate=pair.degenerate,
        basis=tuple(labels),
        params=params,
    )


def fb_search(c0: float = 0.0, lattice=(0, 4), levels: int = 5) -> WitnessReport:
    """Most negative ``<(2xp + c0)^2>_W`` over states on a Fock lattice."""
    offset, spacing = lattice
    labels = _lattice(offset, spacing, levels)
    mat = _FbBlocks(labels).matrix(c0)
    params = {"family": "fb", "c0": c0, "offset": offset, "spacing": spacing, "levels": levels}
    return _report_from_matrix(PolynomialWitness.fb(c0), mat, labels, params)


@dataclass
class Order2Search:
    best: WitnessReport
    rows: list  # (family, offset, spacing, levels, c0, value)

    def minimum(self, family: str | None = None) -> float:
        vals = [r[-1] for r in self.rows if family is None or r[0] == family]
        return min(vals)


def general_order2_search(c0_grid=DEFAULT_C0_GRID, levels: int = 9, lattices=((0, 2), (1, 2)),
                          families=("fa", "fb")) -> Order2Search:
    """Scan the reduced order-2 families over ``c0`` and Fock lattices.

    Any order-2 polynomial is brought to ``f_a = x^2+p^2+c0`` or
    ``f_b = 2xp+c0`` by rotations, squeezes and shifts of phase space, which
    act unitarily on states, so only those two families are scanned. Every
    truncation ``1..levels`` of each lattice is tried. The best entry is the
    minimum value with ties broken by the parameter tuple.
    """
    rows = []
    for family in families:
        if family not in ("fa", "fb"):
            raise ValueError(f"unknown order-2 family {family!r}")
        for offset, spacing in lattices:
            full = _lattice(offset, spacing, levels)
            dim = max(full) + 1
            if family == "fa":
                ops = {(n, m): weyl_operator(n, m, dim).entries for n, m in [(4, 0), (2, 2), (0, 4), (2, 0), (0, 2)]}
                quartic = ops[(4, 0)] + 2 * ops[(2, 2)] + ops[(0, 4)]
                quad = ops[(2, 0)] + ops[(0, 2)]
            else:
                blocks = _FbBlocks(full)
            for c0 in c0_grid:
                if family == "fb":
                    full_mat = blocks.matrix(c0)
                else:
                    full_mat = (quartic + 2 * c0 * quad).real[np.ix_(full, full)] + c0 * c0 * np.eye(levels)
                for L in range(1, levels + 1):
                    val = hermitian_min_eigenpair(full_mat[:L, :L]).value
                    rows.append((family, offset, spacing, L, float(c0), val))
    best_row = min(rows, key=lambda r: (r[-1], r[:-1]))
    family, offset, spacing, L, c0, _ = best_row
    labels = _lattice(offset, spacing, L)
    if family == "fb":
        best = fb_search(c0, (offset, spacing), L)
    else:
        mat = witness_operator(PolynomialWitness.fa(c0), max(labels) + 1)[np.ix_(labels, labels)]
        params = {"family": "fa", "c0": c0, "offset": offset, "spacing": spacing, "levels": L}
        best = _report_from_matrix(PolynomialWitness.fa(c0), mat, labels, params)
    return Order2Search(best, rows)


def necessity_check(c0_grid=DEFAULT_C0_GRID, max_states: int = 4) -> list[dict]:
    """Lowest ``<(2xp + c0)^2>_W`` over small Fock subspaces.

    Covers every subset of at most ``max_states`` labels from
    ``{0, 4, 8, 12, 16}`` and every window of ``max_states`` consecutive
    labels on the even and odd spacing-2 lattices up to ``|18>``. A
    non-negative minimum in every case means none of these subspaces holds
    a violating state.
    """
    cases = []
    for r in range(1, max_states + 1):
        cases.extend(itertools.combinations((0, 4, 8, 12, 16), r))
    for offset in (0, 1):
        start = offset
        while start + 2 * (max_states - 1) <= 18:
            cases.append(tuple(range(start, start + 2 * max_states, 2)))
            start += 2
    out = []
    for labels in cases:
        blocks = _FbBlocks(labels)
        best = min(((hermitian_min_eigenpair(blocks.matrix(c0)).value, float(c0)) for c0 in c0_grid))
        out.append({"labels": list(labels), "min_value": best[0], "c0": best[1]})
    return out


def fc_quadratic(c30: float, c10: float, r2: float, r4: float, r6: float) -> float:
    """``<f_c^2>`` for a rotationally invariant Wigner function."""
    return (5 * c30**2 + 2 * c30 + 1) * r6 / 16 + (3 * c30 + 1) * c10 * r4 / 4 + c10**2 * r2 / 2


@dataclass(frozen=True)
class FcMinimum:
    c30: float
    c10: float
    value: float
    check_value: float


def rotinv_fc_minimum(r2: float, r4: float, r6: float) -> FcMinimum:
    """Closed-form minimizer of :func:`fc_quadratic` over ``(c30, c10)``."""
    denom = 10 * r6 * r2 - 9 * r4 * r4
    if abs(denom) <= 1e-12:
        raise ZeroDivisionError("degenerate radial moments: 10 r6 r2 - 9 r4^2 = 0")
    c30 = (3 * r4 * r4 - 2 * r6 * r2) / denom
    c10 = -r4 * r6 / denom
    value = r6 * (r6 * r2 - r4 * r4) / (2 * denom)
    return FcMinimum(c30, c10, value, fc_quadratic(c30, c10, r2, r4, r6))


@dataclass(frozen=True)
class FdMinimum:
    c20: float
    c0: float
    value: float
    # coefficients of c20^2, c0^2, c20*c0, c20, c0, 1
    coefficients: tuple
    radial: tuple

    def quadratic(self, c20: float, c0: float) -> float:
        q = self.coefficients
        return q[0] * c20**2 + q[1] * c0**2 + q[2] * c20 * c0 + q[3] * c20 + q[4] * c0 + q[5]


def rotinv_fd_minimum(rho: DensityMatrix) -> FdMinimum:
    """Minimize ``<(r^4 + c20 r^2 + c0)^2>_W`` for a Fock-diagonal state."""
    if not rho.is_diagonal(1e-10):
        raise ValueError("state is not diagonal in the Fock basis (not rotationally invariant)")
    r2, r4, r6, r8 = (radial_moment(rho, j) for j in (1, 2, 3, 4))
    coeffs = (r4, 1.0, 2 * r2, 2 * r6, 2 * r4, r8)
    hess = np.array([[2 * r4, 2 * r2], [2 * r2, 2.0]])
    if abs(np.linalg.det(hess)) <= 1e-12:
        raise np.linalg.LinAlgError("singular quadratic form in (c20, c0)")
    c20, c0 = np.linalg.solve(hess, [-2 * r6, -2 * r4])
    fit = FdMinimum(float(c20), float(c0), 0.0, coeffs, (r2, r4, r6, r8))
    return FdMinimum(fit.c20, fit.c0, fit.quadratic(fit.c20, fit.c0), coeffs, (r2, r4, r6, r8))
