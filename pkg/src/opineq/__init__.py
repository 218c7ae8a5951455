"""Randomized, certificate-producing checks of operator inequalities for positive maps."""
from .errors import (
    DomainError,
    DominanceError,
    NumericFailure,
    OpineqError,
    PreconditionError,
    SearchExhausted,
    ShapeError,
    SingularError,
)
from .linalg import eig_hermitian, frac_power, loewner_leq, polar_decompose, svd
from .means import FurutaParams, geometric_mean
from .pairs import MonotonePair, ScalarFunctionSpec, is_concave_pair, is_monotone_pair
from .report import InequalityCheckReport, WitnessCertificate
from .tolerance import DEFAULT_TOL, ToleranceConfig

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DomainError",
    "DominanceError",
    "FurutaParams",
    "InequalityCheckReport",
    "MonotonePair",
    "NumericFailure",
    "OpineqError",
    "PreconditionError",
    "ScalarFunctionSpec",
    "SearchExhausted",
    "ShapeError",
    "SingularError",
    "ToleranceConfig",
    "WitnessCertificate",
    "eig_hermitian",
    "frac_power",
    "geometric_mean",
    "is_concave_pair",
    "is_monotone_pair",
    "loewner_leq",
    "polar_decompose",
    "svd",
]
