"""Entailment checking: DPLL on the Tseitin-encoded grounding, plus an exhaustive oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from ..fol.formula import (
    And,
    Atom,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Quantifier,
    Xor,
    is_closed,
)
from ..fol.printer import print_formula
from .cnf import TseitinEncoder
from .dpll import BudgetExceeded, solve
from .grounding import GroundingContext, ProverLimits, UniverseTooLarge, instantiate, ground


class Status(str, enum.Enum):
    ENTAILED = "Entailed"
    NOT_ENTAILED = "NotEntailed"
    RESOURCE_LIMIT = "ResourceLimit"


class TooManyAtoms(Exception):
    pass


@dataclass(frozen=True)
class EntailmentQuery:
    hypotheses: tuple[Formula, ...]
    conclusion: Formula

    def __init__(self, hypotheses: Iterable[Formula], conclusion: Formula):
        object.__setattr__(self, "hypotheses", tuple(hypotheses))
        object.__setattr__(self, "conclusion", conclusion)
        for f in (*self.hypotheses, conclusion):
            if not is_closed(f):
                raise ValueError(f"formula has free variables: {print_formula(f)}")

    @property
    def formulas(self) -> list[Formula]:
        return [*self.hypotheses, self.conclusion]


@dataclass(frozen=True)
class EntailmentVerdict:
    status: Status
    countermodel: dict[Atom, bool] | None = None
    universe: tuple[str, ...] = ()
    diagnostic: str | None = None
    atom_count: int = 0

    @property
    def entailed(self) -> bool:
        return self.status is Status.ENTAILED

    def countermodel_text(self) -> dict[str, bool] | None:
        if self.countermodel is None:
            return None
        return {print_formula(a): v for a, v in self.countermodel.items()}


def check_entailment(query: EntailmentQuery, limits: ProverLimits | None = None) -> EntailmentVerdict:
    """Decide ``hypotheses ⊢ conclusion`` by refuting ``hypotheses ∧ ¬conclusion``."""
    limits = limits or ProverLimits()
    try:
        ctx = GroundingContext.build(query.formulas, limits.max_ground_atoms)
    except UniverseTooLarge as exc:
        return EntailmentVerdict(Status.RESOURCE_LIMIT, diagnostic=str(exc))
    encoder = TseitinEncoder(ctx.atom_table)
    for h in query.hypotheses:
        encoder.assert_formula(ground(h, ctx.universe))
    encoder.assert_formula(Not(ground(query.conclusion, ctx.universe)))
    try:
        model = solve(encoder.num_vars, encoder.clauses, limits.step_budget)
    except BudgetExceeded as exc:
        return EntailmentVerdict(
            Status.RESOURCE_LIMIT, universe=ctx.universe, diagnostic=str(exc), atom_count=len(ctx.atom_table)
        )
    if model is None:
        return EntailmentVerdict(Status.ENTAILED, universe=ctx.universe, atom_count=len(ctx.atom_table))
    counter = {a: model[i] for a, i in ctx.atom_table.items()}
    return EntailmentVerdict(
        Status.NOT_ENTAILED, counter, universe=ctx.universe, atom_count=len(ctx.atom_table)
    )


def brute_force_entailment(query: EntailmentQuery, limits: ProverLimits | None = None) -> EntailmentVerdict:
    """Exhaustive oracle: evaluate every assignment of the ground atoms.

    All 2^n assignments are evaluated at once as n-bit-wide truth tables, with
    quantifiers interpreted directly over the universe (no grounding, no CNF).
    The first countermodel in assignment order is reported.
    """
    limits = limits or ProverLimits()
    try:
        ctx = GroundingContext.build(query.formulas, limits.enumeration_threshold)
    except UniverseTooLarge as exc:
        raise TooManyAtoms(f"enumeration threshold {limits.enumeration_threshold} exceeded: {exc}") from exc
    atoms = ctx.atoms
    n = len(atoms)
    size = 1 << n
    full = (1 << size) - 1
    tables = {}
    for i, a in enumerate(atoms):
        period = 1 << (i + 1)
        block = ((1 << (1 << i)) - 1) << (1 << i)  # assignment k has atom i true iff bit i of k
        tables[a] = full // ((1 << period) - 1) * block
    hyps = full
    for h in query.hypotheses:
        hyps &= _table(h, tables, ctx.universe, {}, full)
    bad = hyps & ~_table(query.conclusion, tables, ctx.universe, {}, full) & full
    if not bad:
        return EntailmentVerdict(Status.ENTAILED, universe=ctx.universe, atom_count=n)
    k = (bad & -bad).bit_length() - 1
    counter = {a: bool((k >> i) & 1) for i, a in enumerate(atoms)}
    return EntailmentVerdict(Status.NOT_ENTAILED, counter, universe=ctx.universe, atom_count=n)


def _table(f: Formula, tables: dict, universe: tuple[str, ...], env: dict, full: int) -> int:
    if isinstance(f, Atom):
        return tables[instantiate(f, env)]
    if isinstance(f, Not):
        return full ^ _table(f.inner, tables, universe, env, full)
    if isinstance(f, Quantifier):
        parts = [_table(f.body, tables, universe, {**env, f.var: c}, full) for c in universe]
        acc = full if isinstance(f, ForAll) else 0
        for p in parts:
            acc = acc & p if isinstance(f, ForAll) else acc | p
        return acc
    a = _table(f.left, tables, universe, env, full)
    b = _table(f.right, tables, universe, env, full)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Xor):
        return a ^ b
    if isinstance(f, Implies):
        return (full ^ a) | b
    if isinstance(f, Iff):
        return full ^ (a ^ b)
    raise TypeError(type(f).__name__)

