"""Radial multiconfiguration solver for J=1 states of a four-electron atom.

Variational spaces built from the 1s² core plus an open sp or pd pair, with
LS-symmetric and unrestricted (J=1 only) minimisation and checks of which
symmetric minimisers survive once the LS constraints are dropped.
"""

from .energy import EnergyReport, MCState, MixingVector, total_energy
from .grid import RadialGrid, make_log_grid
from .kernels import BACKEND
from .slater_condon import HamiltonianParams
from .solver import SolveOptions, Solution, ci_diagonalize, minimize_J1, minimize_symmetric

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EnergyReport",
    "HamiltonianParams",
    "MCState",
    "MixingVector",
    "RadialGrid",
    "SolveOptions",
    "Solution",
    "__version__",
    "ci_diagonalize",
    "make_log_grid",
    "minimize_J1",
    "minimize_symmetric",
    "total_energy",
]
