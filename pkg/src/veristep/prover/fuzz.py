"""Random entailment queries and the solver-versus-oracle agreement harness."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..fol.formula import Implies, Not, Or
from ..fol.generate import Vocabulary, random_formula
from ..fol.printer import print_formula
from .entailment import EntailmentQuery, Status, brute_force_entailment, check_entailment
from .grounding import GroundingContext, ProverLimits, UniverseTooLarge, evaluate


def random_query(rng: random.Random, max_atoms: int = 10, max_depth: int = 3) -> EntailmentQuery:
    """Draw queries until one grounds to at most ``max_atoms`` atoms."""
    vocab = Vocabulary(
        constants=tuple(rng.sample(["A", "B", "C"], rng.randint(1, 2))),
    )
    while True:
        hyps = [random_formula(rng, rng.randint(0, max_depth), vocab) for _ in range(rng.randint(0, 3))]
        roll = rng.random()
        if hyps and roll < 0.25:
            conclusion = rng.choice(hyps)
        elif hyps and roll < 0.45:
            conclusion = Or(rng.choice(hyps), random_formula(rng, 1, vocab))
        elif len(hyps) >= 2 and roll < 0.6:
            # chain-shaped goal: weakening of a hypothesis under another
            conclusion = Implies(hyps[0], hyps[1])
        elif roll < 0.7:
            conclusion = Not(random_formula(rng, max_depth, vocab))
        else:
            conclusion = random_formula(rng, max_depth, vocab)
        query = EntailmentQuery(hyps, conclusion)
        try:
            GroundingContext.build(query.formulas, max_atoms)
        except UniverseTooLarge:
            continue
        return query


def countermodel_ok(query: EntailmentQuery, verdict) -> bool:
    """A reported countermodel satisfies every hypothesis and falsifies the conclusion."""
    if verdict.countermodel is None:
        return verdict.status is not Status.NOT_ENTAILED
    model = verdict.countermodel
    return all(evaluate(h, model, verdict.universe) for h in query.hypotheses) and not evaluate(
        query.conclusion, model, verdict.universe
    )


@dataclass
class FuzzReport:
    count: int = 0
    agreements: int = 0
    entailed: int = 0
    countermodel_failures: int = 0
    disagreements: list[dict] = field(default_factory=list)

    @property
    def agreement_rate(self) -> float:
        return 1.0 if self.count == 0 else self.agreements / self.count

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "agreements": self.agreements,
            "agreement_rate": self.agreement_rate,
            "entailed": self.entailed,
            "not_entailed": self.count - self.entailed,
            "countermodel_failures": self.countermodel_failures,
            "disagreements": self.disagreements,
        }


def query_to_dict(query: EntailmentQuery) -> dict:
    return {
        "hypotheses": [print_formula(h) for h in query.hypotheses],
        "conclusion": print_formula(query.conclusion),
    }


def run_fuzz(count: int, max_atoms: int = 10, seed: int = 0, limits: ProverLimits | None = None):
    """Return (corpus, report) for ``count`` seeded queries."""
    limits = limits or ProverLimits()
    if max_atoms > limits.enumeration_threshold:
        raise ValueError(
            f"max_atoms {max_atoms} exceeds the enumeration threshold {limits.enumeration_threshold}"
        )
    rng = random.Random(seed)
    corpus = []
    report = FuzzReport()
    for _ in range(count):
        query = random_query(rng, max_atoms)
        solver = check_entailment(query, limits)
        oracle = brute_force_entailment(query, limits)
        report.count += 1
        agree = solver.status is oracle.status
        report.agreements += agree
        report.entailed += oracle.status is Status.ENTAILED
        if not (countermodel_ok(query, solver) and countermodel_ok(query, oracle)):
            report.countermodel_failures += 1
        entry = {**query_to_dict(query), "solver": solver.status.value, "oracle": oracle.status.value}
        if not agree:
            report.disagreements.append(entry)
        corpus.append(entry)
    return corpus, report
