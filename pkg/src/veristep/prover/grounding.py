"""Herbrand grounding over the finite constant universe of a query."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..fol.formula import (
    And,
    Atom,
    Binary,
    Const,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    Quantifier,
    Xor,
    collect_constants,
    walk,
)

FRESH_CONSTANT = "c0"


class UniverseTooLarge(Exception):
    """Grounding would produce more ground atoms than allowed."""


@dataclass(frozen=True)
class ProverLimits:
    max_ground_atoms: int = 64
    enumeration_threshold: int = 20
    step_budget: int = 10**6

    def __post_init__(self) -> None:
        for name in ("max_ground_atoms", "enumeration_threshold", "step_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def query_universe(formulas: Iterable[Formula]) -> tuple[str, ...]:
    names: set[str] = set()
    for f in formulas:
        names |= collect_constants(f)
    return tuple(sorted(names)) if names else (FRESH_CONSTANT,)


def instantiate(atom: Atom, env: Mapping[str, str]) -> Atom:
    if not any(t.is_var for t in atom.args):
        return atom
    return Atom(atom.predicate, tuple(Const(env[t.name]) if t.is_var else t for t in atom.args))


def _fold(cls, parts: list[Formula]) -> Formula:
    result = parts[0]
    for part in parts[1:]:
        result = cls(result, part)
    return result


def ground(f: Formula, universe: Iterable[str], max_ground_atoms: int | None = None) -> Formula:
    """Replace each ∀ (∃) by the conjunction (disjunction) of its instances.

    The result contains no quantifiers and no variables. ``max_ground_atoms``
    bounds the number of distinct ground atoms the expansion may create.
    """
    universe = tuple(universe)
    if not universe:
        raise ValueError("universe must be nonempty")
    if max_ground_atoms is not None:
        ground_atoms([f], universe, max_ground_atoms)
    return _ground(f, universe, {})


def _ground(f: Formula, universe: tuple[str, ...], env: dict[str, str]) -> Formula:
    if isinstance(f, Atom):
        return instantiate(f, env)
    if isinstance(f, Not):
        return Not(_ground(f.inner, universe, env))
    if isinstance(f, Binary):
        return type(f)(_ground(f.left, universe, env), _ground(f.right, universe, env))
    parts = [_ground(f.body, universe, {**env, f.var: c}) for c in universe]
    return _fold(And if isinstance(f, ForAll) else Or, parts)


def ground_atoms(
    formulas: Iterable[Formula], universe: tuple[str, ...], limit: int | None = None
) -> list[Atom]:
    """Distinct ground atoms of the grounded formulas, in first-occurrence order."""
    seen: dict[Atom, None] = {}
    for f in formulas:
        for node in walk(f):
            if not isinstance(node, Atom):
                continue
            var_names = list(dict.fromkeys(t.name for t in node.args if t.is_var))
            for values in itertools.product(universe, repeat=len(var_names)):
                ga = instantiate(node, dict(zip(var_names, values)))
                if ga not in seen:
                    seen[ga] = None
                    if limit is not None and len(seen) > limit:
                        raise UniverseTooLarge(
                            f"more than {limit} ground atoms over a universe of {len(universe)} constants"
                        )
    return list(seen)


@dataclass
class GroundingContext:
    universe: tuple[str, ...]
    atom_table: dict[Atom, int] = field(default_factory=dict)

    @classmethod
    def build(cls, formulas: list[Formula], limit: int | None = None) -> "GroundingContext":
        universe = query_universe(formulas)
        atoms = ground_atoms(formulas, universe, limit)
        return cls(universe, {a: i for i, a in enumerate(atoms, 1)})

    @property
    def atoms(self) -> list[Atom]:
        return list(self.atom_table)


def evaluate(f: Formula, model: Mapping[Atom, bool], universe: Iterable[str]) -> bool:
    """Truth value of a closed formula under a ground-atom assignment."""
    return _eval(f, model, tuple(universe), {})


def _eval(f: Formula, model: Mapping[Atom, bool], universe: tuple[str, ...], env: dict) -> bool:
    if isinstance(f, Atom):
        return model[instantiate(f, env)]
    if isinstance(f, Not):
        return not _eval(f.inner, model, universe, env)
    if isinstance(f, Quantifier):
        results = (_eval(f.body, model, universe, {**env, f.var: c}) for c in universe)
        return all(results) if isinstance(f, ForAll) else any(results)
    left = _eval(f.left, model, universe, env)
    right = _eval(f.right, model, universe, env)
    if isinstance(f, And):
        return left and right
    if isinstance(f, Or):
        return left or right
    if isinstance(f, Xor):
        return left != right
    if isinstance(f, Implies):
        return (not left) or right
    return left == right


__all__ = [
    "FRESH_CONSTANT", "GroundingContext", "ProverLimits", "UniverseTooLarge",
    "evaluate", "ground", "ground_atoms", "instantiate", "query_universe",
]
