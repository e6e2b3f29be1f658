import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_laguerre

from wignerneg import DensityMatrix, FockState, PhaseSpaceGrid, build_operator, moment, moment_table
from wignerneg import radial_moment, weyl_operator, wigner_grid
from wignerneg.fock import expectation


def random_state(seed, n_max=5):
    rng = np.random.default_rng(seed)
    return FockState(rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)).density()


def test_fock1_second_order(fock1):
    table = moment_table(fock1, 2)
    assert table[2, 0] == pytest.approx(1.5)
    assert table[0, 2] == pytest.approx(1.5)
    assert table[1, 1] == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("n", range(11))
def test_radial_closed_forms(n):
    rho = DensityMatrix.fock(n)
    assert radial_moment(rho, 1) == pytest.approx(2 * n + 1, abs=1e-9)
    assert radial_moment(rho, 2) == pytest.approx(4 * n * n + 4 * n + 2, abs=1e-9)
    assert radial_moment(rho, 3) == pytest.approx(8 * n**3 + 12 * n * n + 16 * n + 6, abs=1e-9)


def test_fock1_eighth_radial(fock1):
    assert radial_moment(fock1, 4) == pytest.approx(216, abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_symmetrized_xp_matches_operators(seed):
    rho = random_state(seed)
    dim = rho.dim + 4
    big = rho.padded(dim)
    x, p = build_operator("x", dim), build_operator("p", dim)
    sym = 0.5 * ((x @ p).entries + (p @ x).entries)
    direct = np.trace(big.entries @ sym).real
    assert moment(rho, 1, 1) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("nm", [(2, 2), (3, 1), (1, 3), (4, 2)])
def test_x_side_equals_p_side(nm):
    dim = 8
    a = weyl_operator(*nm, dim).entries
    b = weyl_operator(*nm, dim, p_side=True).entries
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_weyl_operator_hermitian():
    op = weyl_operator(3, 2, 7).entries
    np.testing.assert_allclose(op, op.conj().T, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 2 * np.pi))
def test_radial_rotation_invariant(seed, theta):
    # rotating by exp(-i theta n) leaves radial moments unchanged
    rho = random_state(seed, 4)
    phase = np.exp(-1j * theta * np.arange(rho.dim))
    rot = DensityMatrix(phase[:, None] * rho.entries * phase.conj()[None, :])
    for j in (1, 2):
        assert radial_moment(rot, j) == pytest.approx(radial_moment(rho, j), rel=1e-10, abs=1e-10)


def test_wigner_origin_fock1(fock1):
    g = wigner_grid(fock1, -1, 1, 3, -1, 1, 3)
    assert g.values[1, 1] == pytest.approx(-1 / np.pi, abs=1e-6)


def test_wigner_matches_laguerre_form(fock_n):
    n, rho = fock_n
    g = wigner_grid(rho, -3, 3, 13, -2, 2, 9)
    xx, pp = np.meshgrid(g.xs, g.ps, indexing="ij")
    r2 = xx**2 + pp**2
    exact = (-1) ** n / np.pi * np.exp(-r2) * eval_laguerre(n, 2 * r2)
    np.testing.assert_allclose(g.values, exact, atol=1e-9)


def test_grid_moments_match_algebra():
    rho = random_state(3, 3)
    g = wigner_grid(rho, -8, 8, 161, -8, 8, 161)
    assert g.total() == pytest.approx(1.0, abs=1e-6)
    for nm in [(1, 0), (0, 1), (2, 0), (1, 1), (2, 2)]:
        assert g.integrate(*nm) == pytest.approx(moment(rho, *nm), abs=1e-5)


def test_grid_json_round_trip(fock1):
    g = wigner_grid(fock1, -2, 2, 5, -2, 2, 4)
    back = PhaseSpaceGrid.from_json(g.to_json())
    np.testing.assert_array_equal(back.values, g.values)
    assert back.to_json() == g.to_json()


def test_grid_csv_header(fock1):
    text = wigner_grid(fock1, -1, 1, 2, -1, 1, 2).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "x,p,w"
    assert len(lines) == 5


def test_moment_table_expect(fock1):
    table = moment_table(fock1, 4)
    # <(x^2 + p^2)^2>_W = r4
    assert table.expect({(4, 0): 1, (2, 2): 2, (0, 4): 1}) == pytest.approx(10.0)
    assert expectation(fock1, build_operator("n", fock1.dim)) == pytest.approx(1.0)
