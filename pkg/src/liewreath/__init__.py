"""Exact truncated formal series, Lie algebras of formal vector fields,
fundamental actions and wreath products of Lie algebras."""

from .spaces import Rational, SpaceDesc, Vec, parse_rational, format_rational
from .polyjet import HomogeneousPoly, Jet, LinearMap, DenseMultilinear
from .lie import LieAlgebra, validate_lie, load_lie
from .action import FormalAction, make_action
from .fundamental import t_coefficients, fundamental_action
from .wreath import WreathAlgebra, WreathElement, wreath_bracket, star
from .extension import Extension, make_extension, h_series, kk_embed

__version__ = "0.1.0"

__all__ = [
    "Rational", "SpaceDesc", "Vec", "parse_rational", "format_rational",
    "HomogeneousPoly", "Jet", "LinearMap", "DenseMultilinear",
    "LieAlgebra", "validate_lie", "load_lie",
    "FormalAction", "make_action",
    "t_coefficients", "fundamental_action",
    "WreathAlgebra", "WreathElement", "wreath_bracket", "star",
    "Extension", "make_extension", "h_series", "kk_embed",
]
