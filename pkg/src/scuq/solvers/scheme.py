"""Semi-discrete central-upwind right-hand side, SSP-RK3 and the time loop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, StateError
from .grid import Grid1D


def numerical_flux(faces, model) -> np.ndarray:
    """Central-upwind flux at every face."""
    ap, am = faces.a_plus, faces.a_minus
    fl, fr = model.flux(faces.left), model.flux(faces.right)
    gap = ap - am
    safe = np.where(gap > 0, gap, 1.0)
    H = (ap * fl - am * fr + ap * am * (faces.right - faces.left)) / safe
    # both speeds zero: the face is at rest, average the fluxes
    return np.where(gap > 0, H, 0.5 * (fl + fr))


def central_upwind_rhs(U, model, grid: Grid1D, return_flux: bool = False):
    """dU/dt = -(H_{j+1/2} - H_{j-1/2}) / dx + S_j with free boundaries."""
    faces = model.faces(U, grid)
    H = numerical_flux(faces, model)
    rhs = -(H[:, 1:] - H[:, :-1]) / grid.dx
    src = model.source(U, faces, grid)
    if src is not None:
        rhs = rhs + src
    if return_flux:
        return rhs, H
    return rhs


def ssp_rk3_step(U, rhs, dt: float):
    """Three-stage strong-stability-preserving Runge-Kutta step."""
    if not dt > 0:
        raise ConfigurationError(f"time step must be positive, got {dt}")
    # increment form of u1 = u + dt L(u), u2 = 3/4 u + 1/4 (u1 + dt L(u1)),
    # u+ = 1/3 u + 2/3 (u2 + dt L(u2)); a zero operator leaves u bit-for-bit
    U1 = U + dt * rhs(U)
    U2 = U + 0.25 * ((U1 - U) + dt * rhs(U1))
    return U + (2.0 / 3.0) * ((U2 - U) + dt * rhs(U2))


def max_speed(U, model, grid: Grid1D) -> float:
    faces = model.faces(U, grid)
    return float(np.max(np.maximum(np.abs(faces.a_plus), np.abs(faces.a_minus))))


def cfl_dt(U, model, grid: Grid1D, cfl: float) -> float:
    if not 0.0 < cfl < 1.0:
        raise ConfigurationError(f"CFL number must lie in (0, 1), got {cfl}")
    a = max_speed(U, model, grid)
    return cfl * grid.dx / a if a > 0 else cfl * grid.dx


@dataclass
class SolveResult:
    """Cell averages at the final time plus run diagnostics.

    ``boundary_flux`` is the time integral of the numerical flux through
    the left and right domain ends (shape (components, 2)), so that
    ``sum(U_T - U_0) * dx == -(boundary_flux[:, 1] - boundary_flux[:, 0])``.
    """

    x: np.ndarray
    time: float
    conserved: np.ndarray
    primitive: np.ndarray
    steps: int
    boundary_flux: np.ndarray


def solve(model, initial, grid: Grid1D, T: float, cfl: float = 0.45,
          max_steps: int = 1_000_000) -> SolveResult:
    """March ``initial`` (array or callable of the cell centres) to time ``T``."""
    if not T > 0:
        raise ConfigurationError(f"final time must be positive, got {T}")
    U = np.array(initial(grid.centers) if callable(initial) else initial, dtype=float)
    if U.shape != (model.n_components, grid.J):
        raise ConfigurationError(f"initial state has shape {U.shape}, "
                                 f"expected {(model.n_components, grid.J)}")
    model.check(U, time=0.0)
    t, steps = 0.0, 0
    boundary = np.zeros((model.n_components, 2))
    while t < T:
        if steps >= max_steps:
            raise StateError(f"no convergence to T={T} within {max_steps} steps", time=t)
        try:
            dt = min(cfl_dt(U, model, grid, cfl), T - t)
            fluxes = []

            def rhs(V):
                r, H = central_upwind_rhs(V, model, grid, return_flux=True)
                fluxes.append(H[:, [0, -1]])
                return r

            U = ssp_rk3_step(U, rhs, dt)
        except StateError as exc:
            raise StateError(f"{exc.reason} during step {steps + 1}", cell=exc.cell, time=t) from exc
        # effective stage weights of the SSP-RK3 update are 1/6, 1/6, 2/3
        boundary += dt * (fluxes[0] / 6.0 + fluxes[1] / 6.0 + fluxes[2] * (2.0 / 3.0))
        steps += 1
        t = T if T - t <= dt else t + dt
        model.check(U, time=t)
    return SolveResult(grid.centers, t, U, model.primitive(U, grid), steps, boundary)
