"""Spline surrogates: cubic B-splines (interpolating / least-squares) and a
shape-preserving rational quartic interpolant with local tension.

The B-spline fits delegate to :mod:`scipy.interpolate`.  The
shape-preserving spline is implemented here.  On each interval it is a
degree-4 rational Bezier function whose denominator is a degree-elevated
quadratic; with positive weights the rational Bernstein basis is variation
diminishing, so monotone, non-negative or convex control polygons give
monotone, non-negative or convex segments.  One tension parameter per
interval is raised from its neutral value (where the segment is the cubic
Hermite interpolant) only as far as the shape constraints require.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import BSpline, make_interp_spline, make_lsq_spline

from .errors import DomainRangeError, InputError
from .random_space import CollocationSet

# relative slack for "inside the node range" checks
_RANGE_RTOL = 1e-12
# smallest admissible tangent fraction (largest tension)
_MIN_TANGENT_FRACTION = 1e-10


def _check_range(xi, lo, hi):
    xi = np.asarray(xi, dtype=float)
    slack = _RANGE_RTOL * max(1.0, abs(lo), abs(hi))
    if xi.size and (np.min(xi) < lo - slack or np.max(xi) > hi + slack):
        raise DomainRangeError(
            f"evaluation point outside [{lo:.17g}, {hi:.17g}]: "
            f"[{np.min(xi):.17g}, {np.max(xi):.17g}]")
    return np.clip(xi, lo, hi)


class CubicBSpline:
    """Cubic B-spline surrogate on the closed node range (no extrapolation)."""

    def __init__(self, spline: BSpline, mode: str, nodes: np.ndarray):
        self.spline = spline
        self.mode = mode
        self.nodes = nodes

    @property
    def knots(self):
        return self.spline.t

    @property
    def coefficients(self):
        return self.spline.c

    @property
    def domain(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    def __call__(self, xi):
        return spline_eval(self, xi)


def bspline_interp_fit(colloc: CollocationSet) -> CubicBSpline:
    """Not-a-knot cubic interpolant."""
    if len(colloc) < 4:
        raise InputError(f"cubic interpolation needs N >= 4, got {len(colloc)}")
    spl = make_interp_spline(colloc.nodes, colloc.values, k=3)
    return CubicBSpline(spl, "interpolating", colloc.nodes)


# control points of the least-squares spline; fixed so that the fit keeps
# smoothing as N grows instead of turning into an interpolant
APPROX_CONTROL_POINTS = 6


def approx_control_count(N: int) -> int:
    return min(APPROX_CONTROL_POINTS, N - 1)


def bspline_approx_fit(colloc: CollocationSet, n_control: int | None = None) -> CubicBSpline:
    """Least-squares cubic B-spline on uniformly spaced knots.

    ``n_control`` defaults to ``min(6, N - 1)`` and must stay below N.
    """
    N = len(colloc)
    if N < 6:
        raise InputError(f"approximating B-spline needs N >= 6, got {N}")
    if n_control is None:
        n_control = approx_control_count(N)
    if not 4 <= n_control < N:
        raise InputError(f"approximating B-spline needs 4 <= control count < N, got {n_control} for N={N}")
    lo, hi = colloc.nodes[0], colloc.nodes[-1]
    interior = np.linspace(lo, hi, n_control - 2)[1:-1]
    t = np.concatenate([[lo] * 4, interior, [hi] * 4])
    try:
        spl = make_lsq_spline(colloc.nodes, colloc.values, t, k=3)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise InputError(f"rank-deficient least-squares design: {exc}") from exc
    return CubicBSpline(spl, "approximating", colloc.nodes)


class ShapePreservingSpline:
    """C1 piecewise rational quartic interpolant with per-interval tension.

    On interval i with t in [0, 1] the segment is
    ``sum_k w_k P_k B_k(t) / sum_k w_k B_k(t)`` (degree-4 Bernstein
    polynomials ``B_k``), with weights ``(1, 1/(4a), (1/a - 1)/3, 1/(4a), 1)``
    where ``a = 1 / (2 (1 + r))`` and ``r >= 1`` is the tension.  Arrays
    carry the interval axis first and optional trailing value axes.
    """

    def __init__(self, nodes, values, slopes, tangent_fraction):
        self.nodes = nodes
        self.values = values
        self.slopes = slopes
        self.tangent_fraction = tangent_fraction
        h = np.diff(nodes).reshape((-1,) + (1,) * (values.ndim - 1))
        a = tangent_fraction
        f0, f1 = values[:-1], values[1:]
        d0, d1 = slopes[:-1], slopes[1:]
        self._control = np.stack([
            f0,
            f0 + a * h * d0,
            0.5 * (f0 + f1) + (2.0 / 3.0) * a * h * (d0 - d1),
            f1 - a * h * d1,
            f1,
        ])
        self._weights = np.stack([
            np.ones_like(a), 0.25 / a, (1.0 / a - 1.0) / 3.0, 0.25 / a, np.ones_like(a)])

    @property
    def tension(self):
        return 0.5 / self.tangent_fraction - 1.0

    @property
    def domain(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    def __call__(self, xi):
        return spline_eval(self, xi)

    def _evaluate(self, xi):
        x = self.nodes
        idx = np.clip(np.searchsorted(x, xi, side="right") - 1, 0, x.size - 2)
        t = (xi - x[idx]) / (x[idx + 1] - x[idx])
        extra = self.values.ndim - 1
        t = t.reshape(t.shape + (1,) * extra)
        s = 1.0 - t
        bern = (s ** 4, 4 * s ** 3 * t, 6 * s * s * t * t, 4 * s * t ** 3, t ** 4)
        num = np.zeros(np.shape(t)[:1] + self.values.shape[1:])
        den = np.zeros_like(num)
        for k in range(5):
            wb = self._weights[k][idx] * bern[k]
            num += wb * self._control[k][idx]
            den += wb
        return num / den


def _slopes(x, f):
    """Node derivatives: three-point estimates, zeroed at data extrema."""
    h = np.diff(x).reshape((-1,) + (1,) * (f.ndim - 1))
    delta = np.diff(f, axis=0) / h
    d = np.empty_like(f)
    hl, hr = h[:-1], h[1:]
    dl, dr = delta[:-1], delta[1:]
    d[1:-1] = np.where(dl * dr > 0, (hr * dl + hl * dr) / (hl + hr), 0.0)
    if f.shape[0] == 2:
        d[0] = d[-1] = delta[0]
        return d, delta
    for end, (h0, h1, s0, s1) in (
            (0, (h[0], h[1], delta[0], delta[1])),
            (-1, (h[-1], h[-2], delta[-1], delta[-2]))):
        est = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1)
        d[end] = np.where(np.sign(est) == np.sign(s0), est, 0.0)
    return d, delta


def _ratio(num, den):
    """num / den where den > 0, +inf elsewhere (constraint inactive)."""
    num, den = np.broadcast_arrays(num, den)
    out = np.full(num.shape, np.inf)
    np.divide(num, den, out=out, where=den > 0)
    return out


def _tangent_fraction(h, f, d, delta):
    """Largest a <= 1/4 for which every applicable shape constraint holds."""
    f0, f1 = f[:-1], f[1:]
    d0, d1 = d[:-1], d[1:]
    a = np.full(delta.shape, 0.25)

    # monotonicity: P1 <= P2 <= P3 along the direction of the data
    D, p, q = np.abs(delta), np.abs(d0), np.abs(d1)
    a = np.minimum(a, _ratio(1.5 * D, p + q + np.maximum(p, q)))

    # convexity / concavity: control polygon slopes ordered
    for sgn in (1.0, -1.0):
        dl, dr, dm = sgn * d0, sgn * d1, sgn * delta
        spread = dr - dl
        active = (dl <= dm) & (dm <= dr) & (spread > 0)
        bound = 0.75 * np.minimum(dm - dl, dr - dm) / np.where(active, spread, 1.0)
        a = np.where(active, np.minimum(a, bound), a)

    # sign preservation: control ordinates keep the sign of the end values
    for sgn in (1.0, -1.0):
        g0, g1, e0, e1 = sgn * f0, sgn * f1, sgn * d0, sgn * d1
        active = (g0 > 0) & (g1 > 0)
        b1 = _ratio(g0, -h * e0)
        b2 = _ratio(0.75 * (g0 + g1), h * (e1 - e0))
        b3 = _ratio(g1, h * e1)
        bound = np.minimum(np.minimum(b1, b2), b3)
        a = np.where(active, np.minimum(a, bound), a)

    return np.maximum(a, _MIN_TANGENT_FRACTION)


def sp_spline_fit(colloc: CollocationSet) -> ShapePreservingSpline:
    """Shape-preserving rational quartic interpolant of the collocation data."""
    if len(colloc) < 3:
        raise InputError(f"shape-preserving spline needs N >= 3, got {len(colloc)}")
    x, f = colloc.nodes, colloc.values
    d, delta = _slopes(x, f)
    h = np.diff(x).reshape((-1,) + (1,) * (f.ndim - 1))
    a = _tangent_fraction(h, f, d, delta)
    return ShapePreservingSpline(x, f, d, a)


def spline_eval(spline, xi):
    """Evaluate either spline type; points outside the node range raise."""
    lo, hi = spline.domain
    xi = _check_range(xi, lo, hi)
    if isinstance(spline, CubicBSpline):
        return spline.spline(xi)
    flat = xi.ravel()
    out = spline._evaluate(flat)
    return out.reshape(xi.shape + spline.values.shape[1:])
