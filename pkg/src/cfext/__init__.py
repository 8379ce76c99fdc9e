"""Continued fractions with exact and arbitrary-precision evaluation, contraction and extension
transforms, convergence certificates, and a verification harness for Ramanujan-type identities."""

from . import convergence, core, identities, transforms
from .core import CoefficientSource, ProjectiveValue, approximants, convergents, from_terms, value_at
from .errors import CFError, ContractionError, DomainError, ModeError, ParseError, SourceExhausted
from .scalar import Scalar, format_scalar, parse_scalar

__all__ = [
    "CFError",
    "CoefficientSource",
    "ContractionError",
    "DomainError",
    "ModeError",
    "ParseError",
    "ProjectiveValue",
    "Scalar",
    "SourceExhausted",
    "approximants",
    "convergence",
    "convergents",
    "core",
    "format_scalar",
    "from_terms",
    "identities",
    "parse_scalar",
    "transforms",
    "value_at",
]
