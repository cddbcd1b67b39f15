"""Exact verification of conformal dynamical symmetries of the 1D
collisionless transport (Vlasov) equation.

The symbolic kernel (params, expr) does exact rational arithmetic on
generalized monomials in (t, r, v); fields adds Lie brackets and
symmetry-multiplier extraction; catalog holds the six-generator
representations together with their structure tables, the two-Witt-family
split, the level-2 extension obstruction and the forced-transport
constraint system; odes and transport cover the numeric side; grammar and
cli provide the textual front end.
"""

from fractions import Fraction

from .expr import Expr, R, T, V, lit, mono, par, subst_z
from .fields import (VectorField, bracket, expand_in_basis,
                     symmetry_multiplier)
from .grammar import ParseError, format_expr, format_vfield, parse_expr, \
    parse_vfield
from .params import KernelError, ParamPoly, ParamRat

__all__ = [
    "Expr", "Fraction", "KernelError", "ParamPoly", "ParamRat", "ParseError",
    "R", "T", "V", "VectorField", "bracket", "expand_in_basis",
    "format_expr", "format_vfield", "lit", "mono", "par", "parse_expr",
    "parse_vfield", "subst_z", "symmetry_multiplier",
]

__version__ = "0.1.0"
