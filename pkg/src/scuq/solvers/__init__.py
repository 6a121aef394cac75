"""Finite-volume solvers for the deterministic problems behind each collocation node."""

from .grid import Grid1D, free_ghosts, minmod
from .models import (EulerModel, ShallowWaterModel, desingularized_velocity, euler_conserved,
                     euler_flux, euler_pressure, swe_flux)
from .riemann import cell_average_exact, exact_riemann, star_state
from .scheme import SolveResult, central_upwind_rhs, cfl_dt, numerical_flux, solve, ssp_rk3_step
from .snapshots import read_snapshot, write_snapshots

__all__ = [
    "Grid1D", "free_ghosts", "minmod",
    "EulerModel", "ShallowWaterModel", "desingularized_velocity", "euler_conserved",
    "euler_flux", "euler_pressure", "swe_flux",
    "cell_average_exact", "exact_riemann", "star_state",
    "SolveResult", "central_upwind_rhs", "cfl_dt", "numerical_flux", "solve", "ssp_rk3_step",
    "read_snapshot", "write_snapshots",
]
