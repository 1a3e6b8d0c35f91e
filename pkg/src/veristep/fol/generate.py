"""Seeded random formula generation for fuzzing and property tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formula import And, Atom, Const, Exists, ForAll, Formula, Iff, Implies, Not, Or, Var, Xor

_BINARY = (And, Or, Xor, Implies, Iff)


@dataclass(frozen=True)
class Vocabulary:
    predicates: tuple[tuple[str, int], ...] = (("p", 0), ("q", 0), ("r", 0), ("s", 1), ("t", 1), ("u", 2))
    constants: tuple[str, ...] = ("A", "B")
    variables: tuple[str, ...] = ("x", "y", "z")


def random_formula(
    rng: random.Random,
    max_depth: int,
    vocab: Vocabulary = Vocabulary(),
    leaf_prob: float = 0.3,
    quantifier_prob: float = 0.2,
) -> Formula:
    """A closed random formula of depth at most ``max_depth``.

    Constants are drawn so that none shares a name with a variable, which keeps
    the binding-based variable/constant distinction unambiguous.
    """
    return _gen(rng, max_depth, vocab, (), leaf_prob, quantifier_prob)


def _gen(rng, depth, vocab, bound, leaf_prob, quantifier_prob) -> Formula:
    if depth == 0 or rng.random() < leaf_prob:
        name, arity = rng.choice(vocab.predicates)
        pool = [Const(c) for c in vocab.constants] + [Var(v) for v in bound]
        return Atom(name, tuple(rng.choice(pool) for _ in range(arity)))
    roll = rng.random()
    if roll < quantifier_prob:
        var = rng.choice(vocab.variables)
        cls = ForAll if rng.random() < 0.5 else Exists
        return cls(var, _gen(rng, depth - 1, vocab, (*bound, var), leaf_prob, quantifier_prob))
    if roll < quantifier_prob + 0.15:
        return Not(_gen(rng, depth - 1, vocab, bound, leaf_prob, quantifier_prob))
    cls = rng.choice(_BINARY)
    return cls(
        _gen(rng, depth - 1, vocab, bound, leaf_prob, quantifier_prob),
        _gen(rng, depth - 1, vocab, bound, leaf_prob, quantifier_prob),
    )
