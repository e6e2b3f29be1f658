"""Moment-based tests for negativity of the Wigner function."""
__version__ = "0.1.0"

from .fock import DensityMatrix, FockState, OperatorMatrix, build_operator, expectation, project_lattice
from .weyl import MomentTable, PhaseSpaceGrid, moment, moment_table, radial_moment, weyl_operator, wigner_grid
from .witness import (
    PolynomialWitness,
    WitnessReport,
    fa_scan,
    fb_determinant_exact,
    fb_matrix,
    fb_search,
    general_order2_search,
    necessity_check,
    rotinv_fc_minimum,
    rotinv_fd_minimum,
    witness_value,
)
from .eigen import min_eigenpair
from .statespec import parse_state
