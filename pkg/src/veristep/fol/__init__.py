"""First-order formulas: AST, parser, printer and prover-format emitters."""

from .emit import TARGETS, UnsupportedTarget, emit_problem, emit_prover_format
from .formula import (
    And,
    Atom,
    Binary,
    Const,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Quantifier,
    Term,
    Var,
    Xor,
    ast_equal,
    atom,
    collect_constants,
    free_variables,
    is_closed,
    walk,
)
from .parser import (
    DanglingQuantifier,
    FormulaError,
    FormulaSyntaxError,
    LexError,
    UnsupportedTerm,
    parse_formula,
    tokenize,
)
from .printer import print_formula

__all__ = [
    "And", "Atom", "Binary", "Const", "Exists", "ForAll", "Formula", "Iff", "Implies",
    "Not", "Or", "Quantifier", "Term", "Var", "Xor",
    "ast_equal", "atom", "collect_constants", "free_variables", "is_closed", "walk",
    "DanglingQuantifier", "FormulaError", "FormulaSyntaxError", "LexError", "UnsupportedTerm",
    "parse_formula", "tokenize", "print_formula",
    "TARGETS", "UnsupportedTarget", "emit_problem", "emit_prover_format",
]
