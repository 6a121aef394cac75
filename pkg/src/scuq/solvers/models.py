"""Euler gas dynamics and Saint-Venant shallow water for the central-upwind scheme.

A model turns the cell averages (components first, cells last) into left
and right limits at the J + 1 faces, and supplies the physical flux, the
one-sided local speeds and any source term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import StateError
from .grid import GHOSTS, Grid1D, face_values, free_ghosts, limited_differences

THETA = 1.3


@dataclass
class Faces:
    """Conserved left/right limits at the faces plus the local speeds."""

    left: np.ndarray
    right: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    extra: dict = field(default_factory=dict)


def _first_bad(mask) -> int:
    return int(np.flatnonzero(mask)[0])


# ---------------------------------------------------------------- Euler


def euler_pressure(U, gamma: float):
    rho, mom, E = U
    return (gamma - 1.0) * (E - 0.5 * mom * mom / rho)


def euler_flux(U, gamma: float = 1.4) -> np.ndarray:
    """(rho u, rho u^2 + P, u (E + P)) for conserved ``U = (rho, rho u, E)``."""
    U = np.asarray(U, dtype=float)
    rho, mom, E = U
    if np.any(rho <= 0):
        bad = np.atleast_1d(rho <= 0)
        raise StateError("non-positive density", cell=_first_bad(bad))
    u = mom / rho
    P = euler_pressure(U, gamma)
    return np.stack([mom, mom * u + P, u * (E + P)])


def euler_conserved(rho, u, P, gamma: float = 1.4) -> np.ndarray:
    rho, u, P = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, u, P)))
    return np.stack([rho, rho * u, P / (gamma - 1.0) + 0.5 * rho * u * u])


@dataclass(frozen=True)
class EulerModel:
    gamma: float = 1.4
    theta: float = THETA
    n_components = 3
    names = ("rho", "rho_u", "E")

    def primitive(self, U, grid: Grid1D | None = None) -> np.ndarray:
        """(rho, u, P)."""
        rho = U[0]
        return np.stack([rho, U[1] / rho, euler_pressure(U, self.gamma)])

    def conserved(self, V) -> np.ndarray:
        return euler_conserved(V[0], V[1], V[2], self.gamma)

    def check(self, U, time=None):
        rho = U[0]
        P = euler_pressure(U, self.gamma)
        bad = ~(rho > 0) | ~(P > 0)
        if np.any(bad):
            j = _first_bad(bad)
            raise StateError(f"vacuum or negative pressure (rho={rho[j]:.3e}, P={P[j]:.3e})",
                             cell=j, time=time)

    def flux(self, U):
        return euler_flux(U, self.gamma)

    def faces(self, U, grid: Grid1D) -> Faces:
        V = free_ghosts(self.primitive(U))
        left, right = face_values(V, self.theta)
        for side in (left, right):
            bad = ~(side[0] > 0) | ~(side[2] > 0)
            if np.any(bad):
                j = _first_bad(bad)
                raise StateError("vacuum or negative pressure in the reconstruction", cell=j)
        cl = np.sqrt(self.gamma * left[2] / left[0])
        cr = np.sqrt(self.gamma * right[2] / right[0])
        ap = np.maximum(np.maximum(left[1] + cl, right[1] + cr), 0.0)
        am = np.minimum(np.minimum(left[1] - cl, right[1] - cr), 0.0)
        return Faces(self.conserved(left), self.conserved(right), ap, am)

    def source(self, U, faces: Faces, grid: Grid1D):
        return None


# ---------------------------------------------------------------- shallow water


def desingularized_velocity(h, hu, kappa: float):
    """2 h (hu) / (h^2 + max(h^2, kappa^2)); equals hu / h once h >= kappa."""
    h2 = h * h
    return 2.0 * h * hu / (h2 + np.maximum(h2, kappa * kappa))


def swe_flux(U, g: float = 1.0, kappa: float = 1e-8) -> np.ndarray:
    """(hu, hu^2 + g h^2 / 2) with the velocity desingularized near dry states."""
    U = np.asarray(U, dtype=float)
    h, hu = U
    u = desingularized_velocity(h, hu, kappa)
    return np.stack([h * u, h * u * u + 0.5 * g * h * h])


@dataclass(frozen=True)
class ShallowWaterModel:
    """Well-balanced central-upwind shallow water over a fixed bottom ``Z(x)``.

    The bottom is sampled at the faces and its cell value is the face
    average.  The water surface ``w = h + Z`` and the discharge are
    reconstructed; face depths are kept non-negative by bending the surface
    slope in cells where it would dip below the bottom.
    """

    topography: Callable[[np.ndarray], np.ndarray]
    g: float = 1.0
    theta: float = THETA
    depth_scale: float = 1.0
    _bottoms: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    n_components = 2
    names = ("h", "hu")

    @property
    def kappa(self) -> float:
        return 1e-8 * self.depth_scale

    def bottom(self, grid: Grid1D):
        """(face values incl. ghost faces, cell values incl. ghost cells)."""
        cached = self._bottoms.get(grid)
        if cached is None:
            k = np.arange(-GHOSTS, grid.J + GHOSTS + 1)
            zf = np.asarray(self.topography(grid.x_min + k * grid.dx), dtype=float)
            cached = self._bottoms[grid] = (zf, 0.5 * (zf[:-1] + zf[1:]))
        return cached

    def cell_bottom(self, grid: Grid1D) -> np.ndarray:
        return self.bottom(grid)[1][GHOSTS:-GHOSTS]

    def initial_state(self, grid: Grid1D, surface, velocity=None) -> np.ndarray:
        x = grid.centers
        h = np.maximum(np.asarray(surface(x), dtype=float) - self.cell_bottom(grid), 0.0)
        u = np.zeros_like(x) if velocity is None else np.asarray(velocity(x), dtype=float)
        return np.stack([h, h * u])

    def primitive(self, U, grid: Grid1D | None = None) -> np.ndarray:
        """(h, u), plus the surface w when the grid is given."""
        h, hu = U
        u = desingularized_velocity(h, hu, self.kappa)
        if grid is None:
            return np.stack([h, u])
        return np.stack([h, u, h + self.cell_bottom(grid)])

    def check(self, U, time=None):
        bad = ~(U[0] >= 0) | ~np.isfinite(U[1])
        if np.any(bad):
            j = _first_bad(bad)
            raise StateError(f"negative or invalid depth (h={U[0][j]:.3e})", cell=j, time=time)

    def flux(self, U):
        return swe_flux(U, self.g, self.kappa)

    def faces(self, U, grid: Grid1D) -> Faces:
        zf, zc = self.bottom(grid)
        w = free_ghosts(U[0]) + zc
        w = np.maximum(w, zc)
        hu = free_ghosts(U[1])

        # surface slopes, corrected so both face depths stay >= 0
        s = limited_differences(w, self.theta)
        wc = w[1:-1]
        z_e, z_w = zf[2:-1], zf[1:-2]  # east / west face bottoms of cells 1..J+2
        east, west = wc + 0.5 * s, wc - 0.5 * s
        low_e = east < z_e
        east = np.where(low_e, z_e, east)
        west = np.where(low_e, 2.0 * wc - z_e, west)
        low_w = west < z_w
        west = np.where(low_w, z_w, west)
        east = np.where(low_w, 2.0 * wc - z_w, east)

        q = limited_differences(hu, self.theta)
        q_e, q_w = hu[1:-1] + 0.5 * q, hu[1:-1] - 0.5 * q

        z_face = zf[GHOSTS:-GHOSTS]
        h_l = np.maximum(east[:-1] - z_face, 0.0)
        h_r = np.maximum(west[1:] - z_face, 0.0)
        u_l = desingularized_velocity(h_l, q_e[:-1], self.kappa)
        u_r = desingularized_velocity(h_r, q_w[1:], self.kappa)
        # recompute the discharge only where the depth is below kappa
        hu_l = np.where(h_l < self.kappa, h_l * u_l, q_e[:-1])
        hu_r = np.where(h_r < self.kappa, h_r * u_r, q_w[1:])

        c_l, c_r = np.sqrt(self.g * h_l), np.sqrt(self.g * h_r)
        ap = np.maximum(np.maximum(u_l + c_l, u_r + c_r), 0.0)
        am = np.minimum(np.minimum(u_l - c_l, u_r - c_r), 0.0)
        return Faces(np.stack([h_l, hu_l]), np.stack([h_r, hu_r]), ap, am,
                     extra={"z_face": z_face})

    def source(self, U, faces: Faces, grid: Grid1D):
        z = faces.extra["z_face"]
        h_east = faces.left[0][1:]  # left limit at face j+1/2 is cell j's east value
        h_west = faces.right[0][:-1]
        bed = -self.g * 0.5 * (h_east + h_west) * (z[1:] - z[:-1]) / grid.dx
        return np.stack([np.zeros_like(bed), bed])
