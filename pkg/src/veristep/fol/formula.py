"""Immutable first-order formula AST.

Terms are constants or variables; there are no function symbols. Whether a
term is a variable is decided by binding (an enclosing quantifier over the
same name), never by capitalization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


@dataclass(frozen=True)
class Term:
    name: str
    is_var: bool = False

    def __post_init__(self) -> None:
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"invalid term name {self.name!r}")


def Const(name: str) -> Term:
    return Term(name, is_var=False)


def Var(name: str) -> Term:
    return Term(name, is_var=True)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Not:
    inner: "Formula"


@dataclass(frozen=True)
class Binary:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And(Binary):
    pass


@dataclass(frozen=True)
class Or(Binary):
    pass


@dataclass(frozen=True)
class Xor(Binary):
    pass


@dataclass(frozen=True)
class Implies(Binary):
    pass


@dataclass(frozen=True)
class Iff(Binary):
    pass


@dataclass(frozen=True)
class Quantifier:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForAll(Quantifier):
    pass


@dataclass(frozen=True)
class Exists(Quantifier):
    pass


Formula = Union[Atom, Not, And, Or, Xor, Implies, Iff, ForAll, Exists]


def atom(predicate: str, *args: str | Term) -> Atom:
    """Build an atom whose string arguments are constants."""
    return Atom(predicate, tuple(a if isinstance(a, Term) else Const(a) for a in args))


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Not):
            stack.append(node.inner)
        elif isinstance(node, Quantifier):
            stack.append(node.body)


def collect_constants(f: Formula) -> frozenset[str]:
    """Names of the constants occurring in argument positions."""
    return frozenset(
        t.name for node in walk(f) if isinstance(node, Atom) for t in node.args if not t.is_var
    )


def free_variables(f: Formula) -> frozenset[str]:
    def go(node: Formula, bound: frozenset[str]) -> set[str]:
        if isinstance(node, Atom):
            return {t.name for t in node.args if t.is_var and t.name not in bound}
        if isinstance(node, Not):
            return go(node.inner, bound)
        if isinstance(node, Binary):
            return go(node.left, bound) | go(node.right, bound)
        return go(node.body, bound | {node.var})

    return frozenset(go(f, frozenset()))


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


def ast_equal(a: Formula, b: Formula) -> bool:
    """Structural equality up to renaming of bound variables.

    No associativity, commutativity or logical simplification is applied.
    """
    return _alpha_eq(a, b, {}, {}, 0)


def _alpha_eq(a: Formula, b: Formula, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Atom):
        if a.predicate != b.predicate or len(a.args) != len(b.args):
            return False
        for ta, tb in zip(a.args, b.args):
            if ta.is_var != tb.is_var:
                return False
            if ta.is_var:
                la, lb = env_a.get(ta.name), env_b.get(tb.name)
                if la is None and lb is None:
                    if ta.name != tb.name:
                        return False
                elif la != lb:
                    return False
            elif ta.name != tb.name:
                return False
        return True
    if isinstance(a, Not):
        return _alpha_eq(a.inner, b.inner, env_a, env_b, depth)
    if isinstance(a, Binary):
        return _alpha_eq(a.left, b.left, env_a, env_b, depth) and _alpha_eq(
            a.right, b.right, env_a, env_b, depth
        )
    return _alpha_eq(
        a.body, b.body, {**env_a, a.var: depth}, {**env_b, b.var: depth}, depth + 1
    )


def depth(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.inner)
    if isinstance(f, Binary):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)
