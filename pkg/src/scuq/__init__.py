"""Stochastic collocation in one random dimension with five surrogate models."""

__version__ = "0.1.0"

from .errors import ConfigurationError, DomainRangeError, InputError, ScuqError, StateError
from .gpc import GpcExpansion, QuadratureRule, gauss_rule, gpc_eval, gpc_fit, gpc_moments
from .cweno import CwenoSurrogate, cweno_build, cweno_eval, smoothness_indicator
from .pipeline import (METHODS, FieldResult, Surrogate, SurrogateMethod, build_surrogate,
                       collocation_nodes, field_pipeline, overshoot, sample_surrogate)
from .random_space import CollocationSet, RandomVariable, SampleSet, sample, support, uniform_nodes
from .splines import (CubicBSpline, ShapePreservingSpline, bspline_approx_fit, bspline_interp_fit,
                      sp_spline_fit, spline_eval)
from .statistics import (EmpiricalPdf, PowerLawFit, auto_bins, build_pdf, l1_pdf_error,
                         mc_reference, moments_from_pdf, power_law_fit)

__all__ = [
    "__version__",
    "ScuqError", "InputError", "ConfigurationError", "DomainRangeError", "StateError",
    "RandomVariable", "SampleSet", "CollocationSet", "sample", "support", "uniform_nodes",
    "QuadratureRule", "GpcExpansion", "gauss_rule", "gpc_fit", "gpc_eval", "gpc_moments",
    "CubicBSpline", "ShapePreservingSpline", "bspline_interp_fit", "bspline_approx_fit",
    "sp_spline_fit", "spline_eval",
    "CwenoSurrogate", "cweno_build", "cweno_eval", "smoothness_indicator",
    "EmpiricalPdf", "PowerLawFit", "auto_bins", "build_pdf", "moments_from_pdf", "mc_reference",
    "l1_pdf_error", "power_law_fit",
    "SurrogateMethod", "METHODS", "Surrogate", "FieldResult", "build_surrogate",
    "collocation_nodes", "sample_surrogate", "field_pipeline", "overshoot",
]
