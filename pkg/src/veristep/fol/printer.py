"""Canonical Unicode rendering with minimal parentheses."""

from __future__ import annotations

from .formula import And, Atom, Binary, ForAll, Formula, Iff, Implies, Not, Or, Quantifier, Xor

SYMBOLS = {And: "∧", Or: "∨", Xor: "⊕", Implies: "→", Iff: "↔"}
PRECEDENCE = {And: 4, Or: 3, Xor: 2, Implies: 1, Iff: 0}
RIGHT_ASSOC = (Implies, Iff)


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return " ".join([f.predicate, *(t.name for t in f.args)])
    if isinstance(f, Not):
        inner = print_formula(f.inner)
        return f"¬{inner}" if isinstance(f.inner, Atom) else f"¬({inner})"
    if isinstance(f, Quantifier):
        symbol = "∀" if isinstance(f, ForAll) else "∃"
        body = print_formula(f.body)
        if isinstance(f.body, Binary):
            body = f"({body})"
        return f"{symbol} {f.var}, {body}"
    op = type(f)
    prec = PRECEDENCE[op]
    return f"{_operand(f.left, prec, op in RIGHT_ASSOC)} {SYMBOLS[op]} {_operand(f.right, prec, op not in RIGHT_ASSOC)}"


def _operand(child: Formula, parent_prec: int, tie_needs_parens: bool) -> str:
    text = print_formula(child)
    if isinstance(child, Quantifier):
        return f"({text})"
    if isinstance(child, Binary):
        prec = PRECEDENCE[type(child)]
        if prec < parent_prec or (prec == parent_prec and tie_needs_parens):
            return f"({text})"
    return text

