"""TPTP (fof) and SMT-LIB 2 emission for offline cross-checking."""

from __future__ import annotations

import re

from .formula import (
    And,
    Atom,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Quantifier,
    Term,
    Xor,
    collect_constants,
    walk,
)

TARGETS = ("tptp", "smtlib")


class UnsupportedTarget(ValueError):
    pass


def _tptp_lower(name: str) -> str:
    name = name.replace("'", "_prime")
    name = name[0].lower() + name[1:]
    return name if name[0].isalpha() else "c" + name


def _tptp_var(name: str) -> str:
    name = name.replace("'", "_prime")
    return name[0].upper() + name[1:] if name[0].isalpha() else "V" + name


_SMT_SIMPLE = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*")
_SMT_RESERVED = {"and", "or", "not", "xor", "=>", "=", "forall", "exists", "let", "ite", "true", "false", "_", "!", "as"}


def _smt_symbol(name: str) -> str:
    if _SMT_SIMPLE.fullmatch(name) and name not in _SMT_RESERVED:
        return name
    return f"|{name}|"


def _tptp_term(t: Term) -> str:
    return _tptp_var(t.name) if t.is_var else _tptp_lower(t.name)


def _tptp(f: Formula) -> str:
    if isinstance(f, Atom):
        pred = _tptp_lower(f.predicate)
        if not f.args:
            return pred
        return f"{pred}({','.join(_tptp_term(t) for t in f.args)})"
    if isinstance(f, Not):
        return f"~ {_tptp_wrap(f.inner)}"
    if isinstance(f, Quantifier):
        symbol = "!" if isinstance(f, ForAll) else "?"
        return f"{symbol} [{_tptp_var(f.var)}] : {_tptp_wrap(f.body)}"
    op = {And: "&", Or: "|", Xor: "<~>", Implies: "=>", Iff: "<=>"}[type(f)]
    return f"({_tptp(f.left)} {op} {_tptp(f.right)})"


def _tptp_wrap(f: Formula) -> str:
    text = _tptp(f)
    return f"({text})" if isinstance(f, (Not, Quantifier)) else text


def _smt(f: Formula) -> str:
    if isinstance(f, Atom):
        pred = _smt_symbol(f.predicate)
        if not f.args:
            return pred
        return f"({pred} {' '.join(_smt_symbol(t.name) for t in f.args)})"
    if isinstance(f, Not):
        return f"(not {_smt(f.inner)})"
    if isinstance(f, Quantifier):
        q = "forall" if isinstance(f, ForAll) else "exists"
        return f"({q} (({_smt_symbol(f.var)} U)) {_smt(f.body)})"
    op = {And: "and", Or: "or", Xor: "xor", Implies: "=>", Iff: "="}[type(f)]
    return f"({op} {_smt(f.left)} {_smt(f.right)})"


def emit_prover_format(f: Formula, target: str) -> str:
    """Render one formula as a TPTP or SMT-LIB fragment.

    TPTP constants and predicates are lowercased and variables capitalised,
    following that format's lexical conventions.
    """
    if target == "tptp":
        return _tptp(f)
    if target == "smtlib":
        return _smt(f)
    raise UnsupportedTarget(f"unknown prover target {target!r}; expected one of {TARGETS}")


def _signature(formulas: list[Formula]) -> dict[str, int]:
    preds: dict[str, int] = {}
    for f in formulas:
        for node in walk(f):
            if isinstance(node, Atom):
                preds.setdefault(node.predicate, len(node.args))
    return preds


def emit_problem(hypotheses: list[Formula], conclusion: Formula, target: str) -> str:
    """A complete problem file asserting ``hypotheses ⊢ conclusion``.

    For SMT-LIB the negated conclusion is asserted, so ``unsat`` means entailed.
    """
    if target == "tptp":
        lines = [f"fof(h{i}, axiom, {_tptp(h)})." for i, h in enumerate(hypotheses, 1)]
        lines.append(f"fof(goal, conjecture, {_tptp(conclusion)}).")
        return "\n".join(lines) + "\n"
    if target == "smtlib":
        formulas = [*hypotheses, conclusion]
        constants = sorted(set().union(*(collect_constants(f) for f in formulas)))
        lines = ["(declare-sort U 0)"]
        lines += [f"(declare-const {_smt_symbol(c)} U)" for c in constants]
        for pred, arity in _signature(formulas).items():
            lines.append(f"(declare-fun {_smt_symbol(pred)} ({' '.join(['U'] * arity)}) Bool)")
        lines += [f"(assert {_smt(h)})" for h in hypotheses]
        lines.append(f"(assert (not {_smt(conclusion)}))")
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"
    raise UnsupportedTarget(f"unknown prover target {target!r}; expected one of {TARGETS}")

