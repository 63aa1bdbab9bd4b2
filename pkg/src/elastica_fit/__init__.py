"""Approximation of planar curves by Euler elastica segments."""

from .curve import BezierChain, CurveSamples, Polyline, load_curve, sample
from .elastica import ElasticaCurve, ElasticaParams
from .errors import (
    DegenerateInputError,
    DomainError,
    ElasticaError,
    SingularModulusError,
)
from .fitting import FitProblem, FitResult, fit, objective, residual_r4
from .recovery import RecoveryReport, initial_guess
from .segmentation import PiecewiseFit, fit_piecewise

__version__ = "0.1.0"

__all__ = [
    "BezierChain",
    "CurveSamples",
    "DegenerateInputError",
    "DomainError",
    "ElasticaCurve",
    "ElasticaError",
    "ElasticaParams",
    "FitProblem",
    "FitResult",
    "PiecewiseFit",
    "Polyline",
    "RecoveryReport",
    "SingularModulusError",
    "fit",
    "fit_piecewise",
    "initial_guess",
    "load_curve",
    "objective",
    "residual_r4",
    "sample",
    "__version__",
]
