"""Histogram PDFs, moments, Monte Carlo references, L1 errors and power-law fits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .random_space import RandomVariable, sample

# Width convention for moments: "paper" uses range / (n_bins + 1),
# "native" the actual histogram bin width range / n_bins.
MOMENT_CONVENTIONS = ("paper", "native")

# smallest bin width, in ulps of the data magnitude, that auto_bins will use
RESOLVABLE_ULPS = 64


def auto_bins(data, max_bins: int | None = None) -> int:
    """Bin count from min(Sturges width, Freedman-Diaconis width).

    Falls back to Sturges alone when the interquartile range is zero and
    returns 1 for data with zero range.  Data whose spread is within a few
    thousand ulps get fewer bins, so every bin keeps a finite width.
    ``max_bins`` optionally caps the count: a sample that is mostly a point
    mass has a near-zero interquartile range and would otherwise ask for
    billions of bins.
    """
    x = np.asarray(data, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise InputError("cannot choose bins for empty data")
    span = float(x.max() - x.min())
    if span == 0.0:
        return 1
    sturges = span / (math.log2(n) + 1.0)
    q75, q25 = np.percentile(x, [75, 25])
    fd = 2.0 * (q75 - q25) * n ** (-1.0 / 3.0)
    width = min(fd, sturges) if fd > 0 else sturges
    n_bins = int(math.ceil(span / width))
    # keep bins resolvable in floating point when the spread is at rounding level
    resolvable = int(span / (RESOLVABLE_ULPS * np.spacing(max(abs(x.min()), abs(x.max())))))
    n_bins = max(1, min(n_bins, resolvable))
    if max_bins is not None:
        if max_bins < 1:
            raise InputError(f"max_bins must be >= 1, got {max_bins}")
        n_bins = min(n_bins, max_bins)
    return n_bins


@dataclass(frozen=True)
class EmpiricalPdf:
    """Equal-width histogram density.

    ``densities`` are normalised by the total sample count, so
    ``sum(densities) * w_native + outside == 1`` where ``outside`` is the
    fraction of samples that fell outside ``edges`` (non-zero only for PDFs
    built on borrowed edges).
    """

    edges: np.ndarray
    densities: np.ndarray
    n_samples: int
    outside: float = 0.0

    @property
    def n_bins(self) -> int:
        return self.densities.size

    @property
    def u_min(self) -> float:
        return float(self.edges[0])

    @property
    def u_max(self) -> float:
        return float(self.edges[-1])

    @property
    def w_native(self) -> float:
        return (self.u_max - self.u_min) / self.n_bins

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def delta_u(self, convention: str = "paper") -> float:
        if convention == "paper":
            return (self.u_max - self.u_min) / (self.n_bins + 1)
        if convention == "native":
            return self.w_native
        raise InputError(f"unknown width convention {convention!r}")


def _range(x):
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        # same widening numpy.histogram applies to a degenerate range
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


OVERFLOW_RULES = ("count", "clip")


def build_pdf(data, n_bins: int, edges=None, overflow: str = "count") -> EmpiricalPdf:
    """Histogram ``data`` into ``n_bins`` equal bins over [min, max].

    With ``edges`` given (equal-width, e.g. a reference PDF's), those are
    used instead.  Samples outside them are either counted in ``outside``
    (``overflow="count"``) or clipped into the end bins (``"clip"``).  The
    last bin is closed on both sides.
    """
    if overflow not in OVERFLOW_RULES:
        raise InputError(f"unknown overflow rule {overflow!r}")
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise InputError("cannot build a PDF from empty data")
    if n_bins < 1:
        raise InputError(f"n_bins must be >= 1, got {n_bins}")
    if edges is None:
        lo, hi = _range(x)
    else:
        edges = np.asarray(edges, dtype=float)
        if edges.size != n_bins + 1:
            raise InputError("edges do not match n_bins")
        lo, hi = float(edges[0]), float(edges[-1])
        if overflow == "clip":
            x = np.clip(x, lo, hi)
    counts, hist_edges = np.histogram(x, bins=n_bins, range=(lo, hi))
    if edges is not None:
        hist_edges = edges
    n = x.size
    w = (hi - lo) / n_bins
    inside = int(counts.sum())
    return EmpiricalPdf(hist_edges, counts / (n * w), n, outside=(n - inside) / n)


def moments_from_pdf(pdf: EmpiricalPdf, convention: str = "paper"):
    """(mean, variance) as sum p_i U_i dU and sum p_i (U_i - mean)^2 dU."""
    du = pdf.delta_u(convention)
    p, u = pdf.densities, pdf.midpoints
    mean = float(np.sum(p * u) * du)
    var = float(np.sum(p * (u - mean) ** 2) * du)
    return mean, var


def mc_reference(generator, rv: RandomVariable, M: int, seed: int,
                 n_bins: int | None = None) -> EmpiricalPdf:
    """Histogram of ``generator`` applied to M samples, bins chosen by auto_bins."""
    values = np.asarray(generator(sample(rv, M, seed).values), dtype=float)
    if n_bins is None:
        n_bins = auto_bins(values)
    return build_pdf(values, n_bins)


def l1_pdf_error(reference: EmpiricalPdf, candidate: EmpiricalPdf) -> float:
    """sum |p_ref - p_cand| * w over shared bins plus any mass outside them."""
    if reference.n_bins != candidate.n_bins or not np.array_equal(reference.edges, candidate.edges):
        raise InputError("PDFs must share the same bin edges")
    inner = float(np.sum(np.abs(reference.densities - candidate.densities)) * reference.w_native)
    return inner + reference.outside + candidate.outside


@dataclass(frozen=True)
class PowerLawFit:
    """error ~= K * N**(-k), fitted in log-log space."""

    K: float
    k: float
    residual: float
    n_points: int

    def __call__(self, N):
        return self.K * np.asarray(N, dtype=float) ** (-self.k)


def power_law_fit(Ns, errors) -> PowerLawFit:
    Ns = np.asarray(Ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if Ns.size != errors.size or Ns.size < 2:
        raise InputError("power-law fit needs at least 2 (N, error) pairs")
    if np.any(errors <= 0) or np.any(Ns <= 0):
        raise InputError("power-law fit needs strictly positive N and errors")
    lx, ly = np.log(Ns), np.log(errors)
    A = np.column_stack([np.ones_like(lx), lx])
    (intercept, slope), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (intercept + slope * lx)
    return PowerLawFit(K=float(np.exp(intercept)), k=float(-slope),
                       residual=float(np.sqrt(np.mean(resid ** 2))), n_points=int(Ns.size))


def write_pdf_csv(path, pdf: EmpiricalPdf):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["bin_midpoint", "density"])
        for u, p in zip(pdf.midpoints, pdf.densities):
            out.writerow([repr(float(u)), repr(float(p))])


def read_pdf_csv(path):
    """Returns (midpoints, densities) arrays."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]
