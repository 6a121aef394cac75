"""Random variable laws, reproducible sampling and collocation node sets.

Sampling uses numpy's PCG64 bit generator (``numpy.random.default_rng``),
whose output stream is specified and platform independent for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InputError


@dataclass(frozen=True)
class RandomVariable:
    """Law of the scalar random input.

    ``kind`` is ``"uniform"`` (parameters ``a < b``) or ``"normal"``
    (``mu``, ``sigma``) truncated to ``mu +/- truncation * sigma``.
    """

    kind: str
    a: float = -1.0
    b: float = 1.0
    mu: float = 0.0
    sigma: float = 1.0
    truncation: float = 6.0

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.a < self.b:
                raise ConfigurationError(f"uniform law needs a < b, got [{self.a}, {self.b}]")
        elif self.kind == "normal":
            if not self.sigma > 0:
                raise ConfigurationError(f"normal law needs sigma > 0, got {self.sigma}")
            if not self.truncation > 0:
                raise ConfigurationError("truncation half-width must be positive")
        else:
            raise ConfigurationError(f"unknown law {self.kind!r}")

    @classmethod
    def uniform(cls, a: float = -1.0, b: float = 1.0) -> RandomVariable:
        return cls("uniform", a=float(a), b=float(b))

    @classmethod
    def normal(cls, mu: float = 0.0, sigma: float = 1.0, truncation: float = 6.0) -> RandomVariable:
        return cls("normal", mu=float(mu), sigma=float(sigma), truncation=float(truncation))

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b) if self.kind == "uniform" else self.mu

    def support(self) -> tuple[float, float]:
        return support(self)


@dataclass(frozen=True)
class SampleSet:
    values: np.ndarray
    seed: int
    law: RandomVariable


@dataclass(frozen=True)
class CollocationSet:
    """Strictly increasing nodes with the solution value at each node.

    ``values`` may be 1-D (one scalar per node) or 2-D with the node axis
    first, e.g. ``(N, n_cells)`` for a spatial field.
    """

    nodes: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise InputError("a collocation set needs at least 2 nodes")
        if values.shape[0] != nodes.size:
            raise InputError(f"{values.shape[0]} values for {nodes.size} nodes")
        if np.any(np.diff(nodes) <= 0):
            raise InputError("collocation nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.nodes.size


def support(rv: RandomVariable) -> tuple[float, float]:
    if rv.kind == "uniform":
        return rv.a, rv.b
    half = rv.truncation * rv.sigma
    return rv.mu - half, rv.mu + half


def sample(rv: RandomVariable, M: int, seed: int) -> SampleSet:
    """Draw ``M`` i.i.d. samples of ``rv``.

    Normal draws falling outside the truncated support are redrawn until
    they land inside it.
    """
    if M < 1:
        raise InputError(f"sample count must be >= 1, got {M}")
    rng = np.random.default_rng(seed)
    if rv.kind == "uniform":
        values = rng.uniform(rv.a, rv.b, size=M)
    else:
        lo, hi = support(rv)
        values = rng.normal(rv.mu, rv.sigma, size=M)
        bad = np.flatnonzero((values < lo) | (values > hi))
        while bad.size:
            values[bad] = rng.normal(rv.mu, rv.sigma, size=bad.size)
            bad = bad[(values[bad] < lo) | (values[bad] > hi)]
    return SampleSet(values=values, seed=seed, law=rv)


def uniform_nodes(rv: RandomVariable, N: int) -> np.ndarray:
    if N < 2:
        raise InputError(f"need at least 2 nodes, got {N}")
    lo, hi = support(rv)
    nodes = np.linspace(lo, hi, N)
    # exact symmetry for symmetric supports
    mid = 0.5 * (lo + hi)
    nodes = mid + 0.5 * ((nodes - mid) - (nodes[::-1] - mid))
    nodes[0], nodes[-1] = lo, hi
    return nodes
