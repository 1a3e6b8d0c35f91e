"""Tseitin encoding of quantifier-free formulas into DIMACS-style clauses."""

from __future__ import annotations

from ..fol.formula import And, Atom, Formula, Iff, Implies, Not, Or, Quantifier, Xor


class TseitinEncoder:
    """Encodes ground formulas; atom variables keep the indices of ``atom_table``.

    Auxiliary variables are numbered after the atoms, so any variable above
    ``num_atoms`` is an encoding artefact.
    """

    def __init__(self, atom_table: dict[Atom, int]):
        self.atom_table = atom_table
        self.num_atoms = len(atom_table)
        self.num_vars = self.num_atoms
        self.clauses: list[list[int]] = []
        self._memo: dict[Formula, int] = {}

    def _fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def literal(self, f: Formula) -> int:
        if isinstance(f, Atom):
            return self.atom_table[f]
        if isinstance(f, Not):
            return -self.literal(f.inner)
        if isinstance(f, Quantifier):
            raise ValueError("formula must be ground before CNF encoding")
        cached = self._memo.get(f)
        if cached is not None:
            return cached
        if isinstance(f, (And, Or)):
            parts = [self.literal(g) for g in _flatten(f, type(f))]
            x = self._fresh()
            if isinstance(f, And):
                self.clauses += [[-x, p] for p in parts]
                self.clauses.append([x, *(-p for p in parts)])
            else:
                self.clauses.append([-x, *parts])
                self.clauses += [[x, -p] for p in parts]
        else:
            a, b = self.literal(f.left), self.literal(f.right)
            x = self._fresh()
            if isinstance(f, Implies):
                self.clauses += [[-x, -a, b], [x, a], [x, -b]]
            elif isinstance(f, Xor):
                self.clauses += [[-x, a, b], [-x, -a, -b], [x, -a, b], [x, a, -b]]
            elif isinstance(f, Iff):
                self.clauses += [[-x, -a, b], [-x, a, -b], [x, a, b], [x, -a, -b]]
            else:
                raise TypeError(f"unexpected node {type(f).__name__}")
        self._memo[f] = x
        return x

    def assert_formula(self, f: Formula) -> None:
        """Add clauses forcing ``f`` to hold."""
        if isinstance(f, And):
            for part in _flatten(f, And):
                self.assert_formula(part)
        elif isinstance(f, Not) and isinstance(f.inner, Or):
            for part in _flatten(f.inner, Or):
                self.assert_formula(Not(part))
        elif isinstance(f, Or):
            self.clauses.append([self.literal(p) for p in _flatten(f, Or)])
        else:
            self.clauses.append([self.literal(f)])


def _flatten(f: Formula, cls) -> list[Formula]:
    out: list[Formula] = []
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, cls):
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append(node)
    return out
