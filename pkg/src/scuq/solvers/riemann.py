"""Exact solution of the Riemann problem for the ideal-gas Euler equations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class StarState:
    pressure: float
    velocity: float
    rho_left: float
    rho_right: float
    iterations: int


def _side(p, rho, P, c, gamma):
    """Pressure function f_K(p) and its derivative for one side."""
    if p > P:  # shock
        A = 2.0 / ((gamma + 1.0) * rho)
        B = (gamma - 1.0) / (gamma + 1.0) * P
        root = np.sqrt(A / (p + B))
        return (p - P) * root, root * (1.0 - 0.5 * (p - P) / (B + p))
    ratio = p / P  # rarefaction
    f = 2.0 * c / (gamma - 1.0) * (ratio ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
    df = ratio ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho * c)
    return f, df


def star_state(left, right, gamma: float = 1.4, tol: float = 1e-14,
               max_iter: int = 100) -> StarState:
    """Newton iteration on f_L(p) + f_R(p) + (u_R - u_L) = 0.

    ``left`` and ``right`` are primitive triples (rho, u, P).
    """
    rl, ul, pl = map(float, left)
    rr, ur, pr = map(float, right)
    if min(rl, rr, pl, pr) <= 0:
        raise InputError("Riemann data needs positive density and pressure")
    cl, cr = np.sqrt(gamma * pl / rl), np.sqrt(gamma * pr / rr)
    if 2.0 * (cl + cr) / (gamma - 1.0) <= ur - ul:
        raise InputError("initial data generate vacuum")
    # two-rarefaction guess
    z = (gamma - 1.0) / (2.0 * gamma)
    p = ((cl + cr - 0.5 * (gamma - 1.0) * (ur - ul)) / (cl / pl ** z + cr / pr ** z)) ** (1.0 / z)
    for it in range(1, max_iter + 1):
        fl, dfl = _side(p, rl, pl, cl, gamma)
        fr, dfr = _side(p, rr, pr, cr, gamma)
        p_new = max(p - (fl + fr + ur - ul) / (dfl + dfr), 1e-14)
        change = abs(p_new - p) / (0.5 * (p_new + p))
        p = p_new
        if change < tol:
            break
    fl, _ = _side(p, rl, pl, cl, gamma)
    fr, _ = _side(p, rr, pr, cr, gamma)
    u = 0.5 * (ul + ur) + 0.5 * (fr - fl)
    g1 = (gamma - 1.0) / (gamma + 1.0)
    if p > pl:
        rsl = rl * (p / pl + g1) / (g1 * p / pl + 1.0)
    else:
        rsl = rl * (p / pl) ** (1.0 / gamma)
    if p > pr:
        rsr = rr * (p / pr + g1) / (g1 * p / pr + 1.0)
    else:
        rsr = rr * (p / pr) ** (1.0 / gamma)
    return StarState(p, u, rsl, rsr, it)


def exact_riemann(x, t: float, left, right, x0: float = 0.5, gamma: float = 1.4):
    """Primitive (rho, u, P) of the exact solution at points ``x`` and time ``t``."""
    x = np.asarray(x, dtype=float)
    if not t > 0:
        raise InputError("sampling time must be positive")
    star = star_state(left, right, gamma)
    rl, ul, pl = map(float, left)
    rr, ur, pr = map(float, right)
    cl, cr = np.sqrt(gamma * pl / rl), np.sqrt(gamma * pr / rr)
    p, u = star.pressure, star.velocity
    s = (x - x0) / t
    g1 = (gamma - 1.0) / (gamma + 1.0)
    rho = np.empty_like(s)
    vel = np.empty_like(s)
    prs = np.empty_like(s)

    def fill(mask, r, v, q):
        rho[mask], vel[mask], prs[mask] = r, v, q

    left_of_contact = s <= u
    # left wave
    if p > pl:
        sl = ul - cl * np.sqrt((gamma + 1.0) / (2.0 * gamma) * p / pl + (gamma - 1.0) / (2.0 * gamma))
        fill(left_of_contact & (s < sl), rl, ul, pl)
        fill(left_of_contact & (s >= sl), star.rho_left, u, p)
    else:
        c_star = cl * (p / pl) ** ((gamma - 1.0) / (2.0 * gamma))
        head, tail = ul - cl, u - c_star
        fill(left_of_contact & (s < head), rl, ul, pl)
        fill(left_of_contact & (s > tail), star.rho_left, u, p)
        fan = left_of_contact & (s >= head) & (s <= tail)
        c = (2.0 / (gamma + 1.0)) * (cl + 0.5 * (gamma - 1.0) * (ul - s[fan]))
        fill(fan, rl * (c / cl) ** (2.0 / (gamma - 1.0)),
             (2.0 / (gamma + 1.0)) * (cl + 0.5 * (gamma - 1.0) * ul + s[fan]),
             pl * (c / cl) ** (2.0 * gamma / (gamma - 1.0)))
    # right wave
    right_of_contact = ~left_of_contact
    if p > pr:
        sr = ur + cr * np.sqrt((gamma + 1.0) / (2.0 * gamma) * p / pr + (gamma - 1.0) / (2.0 * gamma))
        fill(right_of_contact & (s > sr), rr, ur, pr)
        fill(right_of_contact & (s <= sr), star.rho_right, u, p)
    else:
        c_star = cr * (p / pr) ** ((gamma - 1.0) / (2.0 * gamma))
        head, tail = ur + cr, u + c_star
        fill(right_of_contact & (s > head), rr, ur, pr)
        fill(right_of_contact & (s < tail), star.rho_right, u, p)
        fan = right_of_contact & (s >= tail) & (s <= head)
        c = (2.0 / (gamma + 1.0)) * (cr - 0.5 * (gamma - 1.0) * (ur - s[fan]))
        fill(fan, rr * (c / cr) ** (2.0 / (gamma - 1.0)),
             (2.0 / (gamma + 1.0)) * (-cr + 0.5 * (gamma - 1.0) * ur + s[fan]),
             pr * (c / cr) ** (2.0 * gamma / (gamma - 1.0)))
    return np.stack([rho, vel, prs])


def cell_average_exact(grid, t: float, left, right, x0: float = 0.5,
                       gamma: float = 1.4, sub: int = 64) -> np.ndarray:
    """Cell averages of the exact primitive solution by midpoint sub-sampling."""
    offsets = (np.arange(sub) + 0.5) / sub - 0.5
    pts = grid.centers[:, None] + grid.dx * offsets[None, :]
    vals = exact_riemann(pts.ravel(), t, left, right, x0, gamma)
    return vals.reshape(3, grid.J, sub).mean(axis=2)
