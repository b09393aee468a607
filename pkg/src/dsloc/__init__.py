"""Exact windowed DS cohomology of odd vector fields on free supercommutative algebras."""

from .algebra import AlgebraMap, Monomial, Presentation, SuperPoly, Variable, eliminate_unit_monomial
from .cohomology import DegreeWindow, DSReport, Grading, ModuleOperator, ds_cohomology, ds_module, superdimension
from .derivation import Derivation, bracket, check_diagonal, h_decompose, odd_derivation, square
from .parser import parse_expression, render

__all__ = [
    "AlgebraMap", "Monomial", "Presentation", "SuperPoly", "Variable", "eliminate_unit_monomial",
    "DegreeWindow", "DSReport", "Grading", "ModuleOperator", "ds_cohomology", "ds_module", "superdimension",
    "Derivation", "bracket", "check_diagonal", "h_decompose", "odd_derivation", "square",
    "parse_expression", "render",
]
