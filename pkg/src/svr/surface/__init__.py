"""Concrete syntax: lexer, parser, pretty-printer and desugaring."""

from .ast import Diagnostic, SourceModule
from .parser import ParseError, parse, parse_expr, parse_formula, parse_module, parse_stack, parse_term
from .printer import print_expr, print_module, print_type
from .desugar import DesugarError, Scope, desugar_expr, desugar_type

__all__ = [
    "Diagnostic", "SourceModule", "ParseError", "parse", "parse_expr", "parse_formula",
    "parse_module", "parse_stack", "parse_term", "print_expr", "print_module", "print_type",
    "DesugarError", "Scope", "desugar_expr", "desugar_type",
]
