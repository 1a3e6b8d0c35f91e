"""Lexer and top-down parser for the Lean-flavoured formula syntax.

Precedence, tightest first: ``¬``, ``∧``, ``∨``, ``⊕``, ``→``, ``↔``.
``→`` and ``↔`` associate to the right; ``∧``, ``∨`` and ``⊕`` to the left.
Quantifiers extend as far to the right as possible. Predicates may be applied
either Lean-style (``pred a b``) or call-style (``pred(a, b)``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    IDENT_RE,
    And,
    Atom,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Xor,
)


class FormulaError(ValueError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        where = f" at offset {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class LexError(FormulaError):
    pass


class FormulaSyntaxError(FormulaError):
    pass


class UnsupportedTerm(FormulaError):
    pass


class DanglingQuantifier(FormulaError):
    pass


# longest spellings first so that "<->" is not read as "<" "-" ">"
_OPERATORS = [
    ("<->", "IFF"), ("<=>", "IFF"), ("↔", "IFF"), ("⇔", "IFF"),
    ("->", "IMP"), ("=>", "IMP"), ("→", "IMP"), ("⇒", "IMP"),
    ("&&", "AND"), ("&", "AND"), ("∧", "AND"),
    ("||", "OR"), ("|", "OR"), ("∨", "OR"),
    ("^", "XOR"), ("⊕", "XOR"),
    ("¬", "NOT"), ("~", "NOT"), ("!", "NOT"),
    ("∀", "FORALL"), ("∃", "EXISTS"),
    ("(", "LPAREN"), (")", "RPAREN"), (",", "COMMA"), (".", "DOT"),
]
_KEYWORDS = {"forall": "FORALL", "exists": "EXISTS"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = IDENT_RE.match(text, i)
        if m:
            word = m.group()
            tokens.append(Token(_KEYWORDS.get(word, "IDENT"), word, i))
            i = m.end()
            continue
        for spelling, kind in _OPERATORS:
            if text.startswith(spelling, i):
                tokens.append(Token(kind, spelling, i))
                i += len(spelling)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", i, text)
    tokens.append(Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.error(f"expected {kind}, found {tok.text or 'end of input'!r}", tok)
        return self.advance()

    def error(self, message: str, tok: Token, cls=FormulaSyntaxError) -> FormulaError:
        return cls(message, tok.pos, self.text)

    def parse(self) -> Formula:
        f = self.iff(frozenset())
        tok = self.peek()
        if tok.kind != "EOF":
            raise self.error(f"unexpected {tok.text!r}", tok)
        return f

    def iff(self, scope: frozenset[str]) -> Formula:
        left = self.implies(scope)
        if self.peek().kind == "IFF":
            self.advance()
            return Iff(left, self.iff(scope))
        return left

    def implies(self, scope: frozenset[str]) -> Formula:
        left = self.xor(scope)
        if self.peek().kind == "IMP":
            self.advance()
            return Implies(left, self.implies(scope))
        return left

    def _left_assoc(self, kind: str, cls, operand, scope: frozenset[str]) -> Formula:
        left = operand(scope)
        while self.peek().kind == kind:
            self.advance()
            left = cls(left, operand(scope))
        return left

    def xor(self, scope: frozenset[str]) -> Formula:
        return self._left_assoc("XOR", Xor, self.disj, scope)

    def disj(self, scope: frozenset[str]) -> Formula:
        return self._left_assoc("OR", Or, self.conj, scope)

    def conj(self, scope: frozenset[str]) -> Formula:
        return self._left_assoc("AND", And, self.unary, scope)

    def unary(self, scope: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "NOT":
            self.advance()
            return Not(self.unary(scope))
        if tok.kind in ("FORALL", "EXISTS"):
            return self.quantifier(scope)
        return self.primary(scope)

    def quantifier(self, scope: frozenset[str]) -> Formula:
        qtok = self.advance()
        start = self.i
        names = []
        while self.peek().kind == "IDENT":
            names.append(self.advance().text)
        if not names:
            raise self.error("quantifier without a variable", self.peek())
        if self.peek().kind in ("COMMA", "DOT"):
            self.advance()
        elif len(names) > 1:
            # "∀x p x": only the first identifier is the bound variable
            names = names[:1]
            self.i = start + 1
        if self.peek().kind in ("EOF", "RPAREN"):
            raise self.error("quantifier has an empty body", self.peek(), DanglingQuantifier)
        body = self.iff(scope | set(names))
        cls = ForAll if qtok.kind == "FORALL" else Exists
        for name in reversed(names):
            body = cls(name, body)
        return body

    def primary(self, scope: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.iff(scope)
            self.expect("RPAREN")
            return inner
        if tok.kind == "IDENT":
            return self.application(scope)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def term(self, tok: Token, scope: frozenset[str]) -> Term:
        return Term(tok.text, is_var=tok.text in scope)

    def application(self, scope: frozenset[str]) -> Atom:
        pred = self.advance()
        args: list[Term] = []
        if self.peek().kind == "LPAREN":
            self.advance()
            if self.peek().kind != "RPAREN":
                while True:
                    tok = self.peek()
                    if tok.kind != "IDENT":
                        raise self.error(f"expected an argument, found {tok.text!r}", tok)
                    self.advance()
                    if self.peek().kind in ("LPAREN", "IDENT"):
                        raise self.error(
                            f"nested application in argument {tok.text!r}", tok, UnsupportedTerm
                        )
                    args.append(self.term(tok, scope))
                    if self.peek().kind == "COMMA":
                        self.advance()
                        continue
                    break
            self.expect("RPAREN")
            return Atom(pred.text, tuple(args))
        while self.peek().kind == "IDENT":
            args.append(self.term(self.advance(), scope))
        if self.peek().kind == "LPAREN":
            raise self.error(
                "parenthesised argument after juxtaposed arguments", self.peek(), UnsupportedTerm
            )
        return Atom(pred.text, tuple(args))


def parse_formula(text: str) -> Formula:
    if not text or not text.strip():
        raise FormulaSyntaxError("empty formula", 0, text)
    return _Parser(text).parse()
