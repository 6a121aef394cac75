"""CWENO-Z interpolation of order 7 on point values.

Each collocation node owns a cell bounded by the midpoints to its
neighbours (the end cells stop at the end nodes).  On cell j the surrogate
is the single polynomial

    P = (w0 / d0) * (P_opt - sum_k d_k P_k) + sum_k w_k P_k

where ``P_opt`` interpolates the 7-node stencil around node j and ``P_k``
are the cubic interpolants of the 4-node sub-stencils that contain node j.
Every candidate passes through the cell's own node, so the surrogate
reproduces the data exactly at the nodes.  Near the ends the stencil is the
nearest in-range 7-node window and only the sub-stencils containing node j
take part, plus two linear candidates through node j and each neighbour
with a small linear weight.  Without them a jump in the last two intervals
crosses every cubic that contains node j; with them the Z-weights still
find a jump-free candidate there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainRangeError, InputError
from .random_space import CollocationSet

STENCIL = 7
CUBIC = 4
LINEAR = 2
SLOTS = 1 + CUBIC + LINEAR
EPSILON = 1e-6
OPTIMAL_WEIGHT = 0.5
# linear weight of each end-cell linear candidate; small so smooth data keep
# near-optimal weights where the slope vanishes at an end
END_LINEAR_WEIGHT = 1e-3


def smoothness_indicator(poly: Polynomial, interval) -> float:
    """sum_{l>=1} W^(2l-1) * integral over the interval of (P^(l))^2, W = width."""
    lo, hi = interval
    width = hi - lo
    total = 0.0
    p = Polynomial(poly.coef)
    for l in range(1, max(p.degree(), 0) + 1):
        p = p.deriv()
        sq = (p * p).integ()
        total += width ** (2 * l - 1) * (sq(hi) - sq(lo))
    return float(total)


def _indicator_matrix(lo: float, hi: float, degree: int) -> np.ndarray:
    """Q with beta = c^T Q c for P(u) = sum_m c_m u^m on [lo, hi] (unit width)."""
    n = degree + 1
    Q = np.zeros((n, n))
    for l in range(1, n):
        for m in range(l, n):
            fm = np.prod(np.arange(m - l + 1, m + 1, dtype=float))
            for k in range(l, n):
                fk = np.prod(np.arange(k - l + 1, k + 1, dtype=float))
                e = m + k - 2 * l + 1
                Q[m, k] += fm * fk * (hi ** e - lo ** e) / e
    return Q


def _interp_matrix(u: np.ndarray) -> np.ndarray:
    """Maps node values to monomial coefficients of the interpolant in u."""
    return np.linalg.inv(np.vander(u, increasing=True))


@dataclass(frozen=True)
class CwenoSurrogate:
    """Per-cell blended polynomials in the local variable u = (xi - x_j) / W_j.

    ``coefficients`` has shape ``(N, 7) + value_shape``.  ``weights`` holds
    the nonlinear weights (optimal first, then the four cubic slots, then
    the left and right end-cell linear slots; zero for slots a cell does
    not use) and ``linear_weights`` the matching linear weights.
    """

    nodes: np.ndarray
    boundaries: np.ndarray
    coefficients: np.ndarray
    weights: np.ndarray
    linear_weights: np.ndarray
    indicators: np.ndarray
    value_shape: tuple

    @property
    def domain(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    def __call__(self, xi):
        return cweno_eval(self, xi)


def cweno_build(colloc: CollocationSet, optimal_weight: float = OPTIMAL_WEIGHT,
                epsilon: float = EPSILON) -> CwenoSurrogate:
    x = colloc.nodes
    N = x.size
    if N < STENCIL:
        raise InputError(f"CWENO order 7 needs N >= {STENCIL}, got {N}")
    if not 0.0 < optimal_weight < 1.0:
        raise InputError("optimal linear weight must lie in (0, 1)")
    f = colloc.values
    value_shape = f.shape[1:]
    f2 = f.reshape(N, -1)
    ncol = f2.shape[1]

    bounds = np.empty(N + 1)
    bounds[0], bounds[-1] = x[0], x[-1]
    bounds[1:-1] = 0.5 * (x[:-1] + x[1:])

    coeffs = np.zeros((N, STENCIL, ncol))
    weights = np.zeros((N, SLOTS, ncol))
    linear = np.zeros((N, SLOTS))
    betas = np.zeros((N, SLOTS, ncol))

    for j in range(N):
        s = min(max(j - 3, 0), N - STENCIL)
        W = bounds[j + 1] - bounds[j]
        u = (x[s:s + STENCIL] - x[j]) / W
        lo, hi = (bounds[j] - x[j]) / W, (bounds[j + 1] - x[j]) / W
        Q = _indicator_matrix(lo, hi, STENCIL - 1)
        fs = f2[s:s + STENCIL]
        r = j - s  # position of node j in the stencil

        c_opt = _interp_matrix(u) @ fs
        cands = np.zeros((SLOTS, STENCIL, ncol))
        cands[0] = c_opt
        slots = []
        for k in range(CUBIC):
            if k <= r <= k + CUBIC - 1:
                cands[1 + k, :CUBIC] = _interp_matrix(u[k:k + CUBIC]) @ fs[k:k + CUBIC]
                slots.append(1 + k)

        cubic_slots = list(slots)
        d = np.zeros(SLOTS)
        d[0] = optimal_weight
        if len(cubic_slots) < CUBIC:
            for k, nb in enumerate((r - 1, r + 1)):
                if 0 <= nb < STENCIL:
                    pair = [min(r, nb), max(r, nb)]
                    cands[1 + CUBIC + k, :2] = _interp_matrix(u[pair]) @ fs[pair]
                    slots.append(1 + CUBIC + k)
                    d[1 + CUBIC + k] = END_LINEAR_WEIGHT
        d[cubic_slots] = (1.0 - d.sum()) / len(cubic_slots)
        beta = np.einsum("imc,mn,inc->ic", cands, Q, cands)
        beta = np.maximum(beta, 0.0)

        used = [0] + slots
        tau = np.abs(beta[0] - beta[cubic_slots].mean(axis=0))
        wt = np.zeros((SLOTS, ncol))
        wt[used] = d[used, None] * (1.0 + tau / (beta[used] + epsilon))
        wt /= wt.sum(axis=0)

        blend = (wt[0] / d[0]) * (c_opt - np.einsum("i,imc->mc", d[1:], cands[1:]))
        blend += np.einsum("ic,imc->mc", wt[1:], cands[1:])

        coeffs[j] = blend
        weights[j] = wt
        linear[j] = d
        betas[j] = beta

    shape = (N,)
    return CwenoSurrogate(
        nodes=x, boundaries=bounds,
        coefficients=coeffs.reshape(shape + (STENCIL,) + value_shape),
        weights=weights.reshape(shape + (SLOTS,) + value_shape),
        linear_weights=linear,
        indicators=betas.reshape(shape + (SLOTS,) + value_shape),
        value_shape=value_shape)


def cell_index(surrogate: CwenoSurrogate, xi) -> np.ndarray:
    return np.searchsorted(surrogate.boundaries[1:-1], xi, side="right")


def cweno_eval(surrogate: CwenoSurrogate, xi):
    """Evaluate the blended polynomial of the cell containing each point."""
    xi = np.asarray(xi, dtype=float)
    lo, hi = surrogate.domain
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if xi.size and (np.min(xi) < lo - slack or np.max(xi) > hi + slack):
        raise DomainRangeError(f"evaluation point outside [{lo:.17g}, {hi:.17g}]")
    flat = np.clip(xi.ravel(), lo, hi)
    j = cell_index(surrogate, flat)
    b = surrogate.boundaries
    u = (flat - surrogate.nodes[j]) / (b[j + 1] - b[j])
    c = surrogate.coefficients.reshape(surrogate.nodes.size, STENCIL, -1)
    u = u[:, None]
    out = c[j, STENCIL - 1]
    for m in range(STENCIL - 2, -1, -1):
        out = out * u + c[j, m]
    return out.reshape(xi.shape + surrogate.value_shape)
