"""Entailment checking over finite Herbrand groundings."""

from .dpll import BudgetExceeded, solve
from .entailment import (
    EntailmentQuery,
    EntailmentVerdict,
    Status,
    TooManyAtoms,
    brute_force_entailment,
    check_entailment,
)
from .grounding import (
    FRESH_CONSTANT,
    GroundingContext,
    ProverLimits,
    UniverseTooLarge,
    evaluate,
    ground,
    ground_atoms,
    query_universe,
)

__all__ = [
    "BudgetExceeded", "solve",
    "EntailmentQuery", "EntailmentVerdict", "Status", "TooManyAtoms",
    "brute_force_entailment", "check_entailment",
    "FRESH_CONSTANT", "GroundingContext", "ProverLimits", "UniverseTooLarge",
    "evaluate", "ground", "ground_atoms", "query_universe",
]
