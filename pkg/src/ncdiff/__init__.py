"""Exact symbolic workbench for covariant differential calculi on quantum
planes and superplanes (d^2 = 0 and d^3 = 0)."""

from .algebra import (
    Element,
    Generator,
    Presentation,
    PresentationError,
    critical_pairs,
    format_element,
    load_presentation,
    normalize,
)
from .covariance import (
    build_combined,
    check_covariance,
    coaction,
    covariance_reports,
    solve_ansatz,
)
from .differential import (
    calculus,
    check_leibniz,
    check_nilpotency,
    check_relations_closed,
    d,
)
from .parsing import parse_expr
from .presets import CALCULUS_IDS, GROUP_IDS, PRESET_IDS, preset, specialize
from .scalar import Scalar, canonical, is_zero_randomized, parse_scalar, substitute

__all__ = [
    "CALCULUS_IDS", "GROUP_IDS", "PRESET_IDS",
    "Element", "Generator", "Presentation", "PresentationError", "Scalar",
    "build_combined", "calculus", "canonical", "check_covariance", "check_leibniz",
    "check_nilpotency", "check_relations_closed", "coaction", "covariance_reports",
    "critical_pairs", "d", "format_element", "is_zero_randomized", "load_presentation",
    "normalize", "parse_expr", "parse_scalar", "preset", "solve_ansatz", "specialize",
    "substitute",
]
