"""Gauss quadrature and generalized polynomial chaos in one random dimension.

Bases are orthonormal with respect to the probability law of the input:
Legendre for a uniform law, probabilists' Hermite for a normal law.  Nodes
and weights come from the Golub-Welsch eigenproblem on the Jacobi matrix of
the three-term recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError, InputError
from .random_space import CollocationSet, RandomVariable

FAMILIES = ("legendre", "hermite")
_LAW_OF_FAMILY = {"legendre": "uniform", "hermite": "normal"}


def _recurrence(family: str, n: int) -> np.ndarray:
    """Off-diagonal entries sqrt(beta_k), k = 1..n, of the Jacobi matrix."""
    k = np.arange(1, n + 1, dtype=float)
    if family == "legendre":
        return k / np.sqrt(4.0 * k * k - 1.0)
    if family == "hermite":
        return np.sqrt(k)
    raise ConfigurationError(f"unknown polynomial family {family!r}")


def family_for(rv: RandomVariable) -> str:
    return "legendre" if rv.kind == "uniform" else "hermite"


def _affine(rv: RandomVariable) -> tuple[float, float]:
    """(center, scale) such that xi = center + scale * z."""
    if rv.kind == "uniform":
        return 0.5 * (rv.a + rv.b), 0.5 * (rv.b - rv.a)
    return rv.mu, rv.sigma


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    family: str
    center: float
    scale: float

    def __len__(self):
        return self.nodes.size


def gauss_rule(family: str, N: int, rv: RandomVariable) -> QuadratureRule:
    """N-point Gauss rule for ``rv`` in physical units, weights summing to 1."""
    if N < 1:
        raise InputError(f"quadrature needs N >= 1, got {N}")
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown polynomial family {family!r}")
    if _LAW_OF_FAMILY[family] != rv.kind:
        raise ConfigurationError(f"{family} quadrature does not match a {rv.kind} law")

    if N == 1:
        z, v0 = np.zeros(1), np.ones(1)
    else:
        off = _recurrence(family, N - 1)
        z, vecs = eigh_tridiagonal(np.zeros(N), off)
        v0 = vecs[0]
    # symmetric law: enforce exact symmetry of nodes and weights
    z = 0.5 * (z - z[::-1])
    w = v0 * v0
    w = 0.5 * (w + w[::-1])
    w /= w.sum()
    center, scale = _affine(rv)
    return QuadratureRule(center + scale * z, w, family, center, scale)


def orthonormal_basis(family: str, z, n: int) -> np.ndarray:
    """Values of psi_0..psi_{n-1} at standard points ``z``; shape (n, len(z))."""
    z = np.asarray(z, dtype=float)
    out = np.empty((n,) + z.shape)
    out[0] = 1.0
    if n == 1:
        return out
    b = _recurrence(family, n - 1)
    out[1] = z / b[0]
    for k in range(1, n - 1):
        out[k + 1] = (z * out[k] - b[k - 1] * out[k - 1]) / b[k]
    return out


@dataclass(frozen=True)
class GpcExpansion:
    """Expansion sum_k c_k psi_k((xi - center) / scale).

    ``coefficients`` has the degree axis first; trailing axes (if any)
    index independent outputs such as spatial cells.
    """

    coefficients: np.ndarray
    family: str
    center: float
    scale: float

    @property
    def order(self) -> int:
        return self.coefficients.shape[0]

    def __call__(self, xi):
        return gpc_eval(self, xi)


def gpc_fit(colloc: CollocationSet, rule: QuadratureRule) -> GpcExpansion:
    """Discrete projection c_k = sum_n w_n U(xi_n) psi_k(xi_n)."""
    if len(colloc) != len(rule):
        raise InputError(f"{len(colloc)} collocation nodes for a {len(rule)}-point rule")
    tol = 1e-12 * max(1.0, float(np.max(np.abs(rule.nodes))))
    if np.max(np.abs(colloc.nodes - rule.nodes)) > tol:
        raise InputError("collocation nodes are not the quadrature nodes")
    z = (rule.nodes - rule.center) / rule.scale
    psi = orthonormal_basis(rule.family, z, len(rule))
    values = colloc.values
    weighted = rule.weights.reshape((-1,) + (1,) * (values.ndim - 1)) * values
    coeffs = np.tensordot(psi, weighted, axes=(1, 0))
    return GpcExpansion(coeffs, rule.family, rule.center, rule.scale)


def gpc_eval(expansion: GpcExpansion, xi):
    """Evaluate the expansion; no clamping outside the node hull."""
    xi = np.asarray(xi, dtype=float)
    z = (xi - expansion.center) / expansion.scale
    psi = orthonormal_basis(expansion.family, z.ravel(), expansion.order)
    out = np.tensordot(psi, expansion.coefficients, axes=(0, 0))
    return out.reshape(xi.shape + expansion.coefficients.shape[1:])


def gpc_moments(expansion: GpcExpansion):
    """(mean, variance) read off the coefficients."""
    c = expansion.coefficients
    return c[0], np.sum(c[1:] ** 2, axis=0)
