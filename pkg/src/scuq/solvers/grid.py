"""Uniform 1-D grids, ghost cells and the limited slopes used by the schemes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError

GHOSTS = 2


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    J: int

    def __post_init__(self):
        if self.J < 4:
            raise ConfigurationError(f"grid needs at least 4 cells, got {self.J}")
        if not self.x_max > self.x_min:
            raise ConfigurationError("grid needs x_max > x_min")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, dx: float) -> Grid1D:
        J = int(round((x_max - x_min) / dx))
        return cls(float(x_min), float(x_max), J)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.J

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.J) + 0.5) * self.dx

    @property
    def interfaces(self) -> np.ndarray:
        """The J + 1 cell faces x_{j-1/2}, j = 0..J."""
        return self.x_min + np.arange(self.J + 1) * self.dx


def free_ghosts(q: np.ndarray, n: int = GHOSTS) -> np.ndarray:
    """Pad the cell axis (last) with copies of the end cells."""
    return np.concatenate([np.repeat(q[..., :1], n, axis=-1), q,
                           np.repeat(q[..., -1:], n, axis=-1)], axis=-1)


def minmod(*args):
    """Elementwise minmod: the smallest magnitude if all share a sign, else 0."""
    lo = hi = np.asarray(args[0], dtype=float)
    for a in args[1:]:
        lo = np.minimum(lo, a)
        hi = np.maximum(hi, a)
    return np.where(lo > 0, lo, np.where(hi < 0, hi, 0.0))


def limited_differences(v: np.ndarray, theta: float) -> np.ndarray:
    """Generalised minmod slopes (times dx) for cells 1..n-2 of a padded array."""
    back = v[..., 1:-1] - v[..., :-2]
    fwd = v[..., 2:] - v[..., 1:-1]
    return minmod(theta * back, 0.5 * (back + fwd), theta * fwd)


def face_values(v: np.ndarray, theta: float):
    """Left and right limits at the J + 1 faces from a 2-ghost padded array.

    ``v`` holds J + 4 cells; the result pairs are indexed by face j - 1/2.
    """
    s = limited_differences(v, theta)  # cells 1..J+2 of the padded array
    centre = v[..., 1:-1]
    east = centre + 0.5 * s  # value at the right face of each cell
    west = centre - 0.5 * s
    return east[..., :-1], west[..., 1:]
