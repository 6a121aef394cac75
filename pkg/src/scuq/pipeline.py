"""One build-then-evaluate contract over the five surrogate methods, and the
collocation -> surrogate -> sampling -> histogram -> moments pipeline."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import cweno, gpc, splines
from .errors import ConfigurationError, InputError
from .random_space import CollocationSet, RandomVariable, SampleSet, support, uniform_nodes
from .statistics import EmpiricalPdf, auto_bins, build_pdf, moments_from_pdf


class SurrogateMethod(str, enum.Enum):
    GPC = "gpc"
    BSPLINE_INTERP = "bspline-interp"
    BSPLINE_APPROX = "bspline-approx"
    SP_SPLINE = "sp-spline"
    CWENO = "cweno"

    @classmethod
    def parse(cls, value) -> SurrogateMethod:
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ConfigurationError(f"unknown method {value!r} (expected one of {names})") from None


METHODS = tuple(SurrogateMethod)

MIN_NODES = {
    SurrogateMethod.GPC: 1,
    SurrogateMethod.BSPLINE_INTERP: 4,
    SurrogateMethod.BSPLINE_APPROX: 6,
    SurrogateMethod.SP_SPLINE: 3,
    SurrogateMethod.CWENO: 7,
}

LABELS = {
    SurrogateMethod.GPC: "gPC",
    SurrogateMethod.BSPLINE_INTERP: "interpolation B-spline",
    SurrogateMethod.BSPLINE_APPROX: "approximation B-spline",
    SurrogateMethod.SP_SPLINE: "SP spline",
    SurrogateMethod.CWENO: "CWENO interpolation",
}


def collocation_nodes(method, rv: RandomVariable, N: int) -> np.ndarray:
    """Quadrature nodes for gPC, uniformly spaced support nodes otherwise."""
    method = SurrogateMethod.parse(method)
    check_node_count(method, N)
    if method is SurrogateMethod.GPC:
        return gpc.gauss_rule(gpc.family_for(rv), N, rv).nodes
    return uniform_nodes(rv, N)


def check_node_count(method, N: int):
    method = SurrogateMethod.parse(method)
    if N < MIN_NODES[method]:
        raise ConfigurationError(f"{method.value} needs at least {MIN_NODES[method]} nodes, got {N}")


@dataclass
class Surrogate:
    """A built surrogate over xi; values may carry trailing axes (cells)."""

    method: SurrogateMethod
    nodes: np.ndarray
    model: object

    def __call__(self, xi):
        return self.model(xi)


def build_surrogate(method, colloc: CollocationSet, rv: RandomVariable) -> Surrogate:
    method = SurrogateMethod.parse(method)
    check_node_count(method, len(colloc))
    try:
        if method is SurrogateMethod.GPC:
            rule = gpc.gauss_rule(gpc.family_for(rv), len(colloc), rv)
            model = gpc.gpc_fit(colloc, rule)
        elif method is SurrogateMethod.BSPLINE_INTERP:
            model = splines.bspline_interp_fit(colloc)
        elif method is SurrogateMethod.BSPLINE_APPROX:
            model = splines.bspline_approx_fit(colloc)
        elif method is SurrogateMethod.SP_SPLINE:
            model = splines.sp_spline_fit(colloc)
        else:
            model = cweno.cweno_build(colloc)
    except InputError as exc:
        raise ConfigurationError(f"{method.value}: {exc}") from exc
    return Surrogate(method, colloc.nodes, model)


def sample_surrogate(surrogate: Surrogate, samples: SampleSet | np.ndarray, chunk: int = 1 << 18):
    """Evaluate at every sample, preserving sample order."""
    xi = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if xi.size <= chunk:
        return np.asarray(surrogate(xi))
    parts = [np.asarray(surrogate(xi[i:i + chunk])) for i in range(0, xi.size, chunk)]
    return np.concatenate(parts, axis=0)


# relative spread below which sampled values count as a single point: surrogate
# round-off on constant data reaches a few thousand ulps
POINT_MASS_RTOL = 1e-10


def is_point_mass(values) -> bool:
    lo, hi = float(np.min(values)), float(np.max(values))
    return hi - lo <= POINT_MASS_RTOL * max(abs(lo), abs(hi))


def pdf_of(values, convention: str = "paper", max_bins: int | None = None):
    """(pdf, mean, std) of sampled values on their own auto-binned range.

    Values whose relative spread is at most ``POINT_MASS_RTOL`` are a
    point mass: the mean is the centre of their range and the std is zero
    whatever the width convention.
    """
    values = np.asarray(values, dtype=float)
    pdf = build_pdf(values, auto_bins(values, max_bins))
    if is_point_mass(values):
        return pdf, 0.5 * (float(values.min()) + float(values.max())), 0.0
    m, v = moments_from_pdf(pdf, convention)
    return pdf, m, float(np.sqrt(max(v, 0.0)))


def coefficient_moments(surrogate: Surrogate):
    """(mean, std) read off the gPC coefficients."""
    if surrogate.method is not SurrogateMethod.GPC:
        raise ConfigurationError(f"{surrogate.method.value} has no expansion coefficients")
    m, v = gpc.gpc_moments(surrogate.model)
    return m, np.sqrt(v)


MOMENT_SOURCES = ("auto", "pdf")


@dataclass
class FieldResult:
    """Per-cell statistics of a surrogate-sampled field.

    ``overshoot`` is the per-cell excursion of the surrogate beyond the
    range of its nodal data (see :func:`overshoot`).
    """

    method: SurrogateMethod
    x: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    pdfs: list
    overshoot: np.ndarray


def field_pipeline(x, nodes, field, method, rv: RandomVariable, samples: SampleSet,
                   convention: str = "paper", moments: str = "auto", chunk: int = 64,
                   n_probe: int = 4001, max_bins: int | None = None) -> FieldResult:
    """Build one surrogate per spatial cell (shared nodes), sample, histogram.

    ``field`` has shape (N nodes, n_cells).  Each cell gets its own auto bin
    count (optionally capped by ``max_bins``).  With ``moments="auto"`` gPC moments come from the expansion
    coefficients and every other method's from its histogram; ``"pdf"``
    uses the histogram for all methods.
    """
    field = np.asarray(field, dtype=float)
    if field.ndim != 2 or field.shape[0] != len(nodes):
        raise InputError("field must have shape (N nodes, n_cells)")
    if moments not in MOMENT_SOURCES:
        raise ConfigurationError(f"unknown moment source {moments!r}")
    method = SurrogateMethod.parse(method)
    ncell = field.shape[1]
    mean = np.empty(ncell)
    std = np.empty(ncell)
    over = np.empty(ncell)
    pdfs: list[EmpiricalPdf] = []
    for start in range(0, ncell, chunk):
        stop = min(start + chunk, ncell)
        data = field[:, start:stop]
        surrogate = build_surrogate(method, CollocationSet(nodes, data), rv)
        block = sample_surrogate(surrogate, samples)
        for col in range(block.shape[1]):
            pdf, m, s = pdf_of(block[:, col], convention, max_bins)
            mean[start + col] = m
            std[start + col] = s
            pdfs.append(pdf)
        if moments == "auto" and method is SurrogateMethod.GPC:
            mean[start:stop], std[start:stop] = coefficient_moments(surrogate)
        over[start:stop] = overshoot(surrogate, data, rv, n_probe)
    return FieldResult(method, np.asarray(x, dtype=float), mean, std, pdfs, over)


def overshoot(surrogate: Surrogate, data, rv: RandomVariable | None = None, n_probe: int = 20001):
    """Largest excursion of the surrogate beyond [min data, max data] on a dense grid.

    The grid spans the node hull (and the support of ``rv`` when given and
    the method may evaluate there).
    """
    data = np.asarray(data, dtype=float)
    lo, hi = surrogate.nodes[0], surrogate.nodes[-1]
    if rv is not None and surrogate.method is SurrogateMethod.GPC:
        lo, hi = support(rv)
    grid = np.linspace(lo, hi, n_probe)
    values = sample_surrogate(surrogate, grid)
    above = np.max(values - data.max(axis=0), axis=0)
    below = np.max(data.min(axis=0) - values, axis=0)
    return np.maximum(np.maximum(above, below), 0.0)
