"""Verifier-first answer selection over sampled candidates, with a vote fallback."""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .prover import Status
from .reward import RewardBreakdown


class EmptyPool(ValueError):
    pass


class NoParseableAnswer(ValueError):
    pass


class Source(str, enum.Enum):
    VERIFIED = "Verified"
    MAJORITY = "Majority"


@dataclass(frozen=True)
class CandidateRecord:
    index: int
    schema_valid: bool
    step_statuses: tuple[Status, ...]
    answer_label: str | None

    @property
    def fully_verified(self) -> bool:
        # the gold label is deliberately not consulted
        return self.schema_valid and bool(self.step_statuses) and all(
            s is Status.ENTAILED for s in self.step_statuses
        )

    @classmethod
    def from_breakdown(cls, index: int, b: RewardBreakdown) -> "CandidateRecord":
        return cls(index, b.schema_valid, tuple(v.status for v in b.step_verdicts), b.answer_label)


@dataclass(frozen=True)
class CandidatePool:
    candidates: tuple[CandidateRecord, ...]

    def __post_init__(self) -> None:
        for i, c in enumerate(self.candidates):
            if c.index != i:
                raise ValueError(f"candidate at position {i} has index {c.index}")

    @classmethod
    def from_breakdowns(cls, breakdowns: Iterable[RewardBreakdown]) -> "CandidatePool":
        return cls(tuple(CandidateRecord.from_breakdown(i, b) for i, b in enumerate(breakdowns)))

    def prefix(self, n: int) -> "CandidatePool":
        if n > len(self.candidates):
            raise ValueError(f"pool size {n} exceeds the {len(self.candidates)} available candidates")
        return CandidatePool(self.candidates[:n])


@dataclass(frozen=True)
class SelectionResult:
    answer_label: str
    source: Source
    chosen_index: int | None
    verified_count: int

    def to_dict(self, problem_id=None) -> dict:
        return {
            "problem_id": problem_id,
            "answer": self.answer_label,
            "source": self.source.value,
            "chosen_index": self.chosen_index,
            "verified_count": self.verified_count,
        }


def majority_vote(labels: Sequence[str]) -> str:
    """Most frequent label; ties go to the lexicographically smallest."""
    if not labels:
        raise ValueError("majority_vote needs at least one label")
    counts = Counter(labels)
    return min(counts, key=lambda label: (-counts[label], label))


def select_dtv(pool: CandidatePool) -> SelectionResult:
    if not pool.candidates:
        raise EmptyPool("candidate pool is empty")
    verified = [c for c in pool.candidates if c.fully_verified and c.answer_label is not None]
    if verified:
        chosen = verified[0]
        return SelectionResult(chosen.answer_label, Source.VERIFIED, chosen.index, len(verified))
    labels = [c.answer_label for c in pool.candidates if c.answer_label is not None]
    if not labels:
        raise NoParseableAnswer("no candidate carries an answer label")
    return SelectionResult(majority_vote(labels), Source.MAJORITY, None, 0)


def simulate_soundness(
    pool_sizes: Sequence[int] = (1, 2, 4, 8, 16),
    trials: int = 10_000,
    p_v: float = 0.9,
    p_m: float = 0.4,
    p_verify: float = 0.25,
    seed: int = 0,
) -> dict[int, float]:
    """Mean selection soundness per pool size under a synthetic candidate model.

    Each trial samples max(pool_sizes) candidates, each fully verified with
    probability ``p_verify``; pools of size N are prefixes of that sample.
    A Verified selection is sound with probability ``p_v`` and a Majority one
    with ``p_m``. One uniform draw per trial decides soundness for every N, so
    the comparison across N is paired.
    """
    if not 0 <= p_m <= p_v <= 1:
        raise ValueError("need 0 <= p_m <= p_v <= 1")
    if not pool_sizes or min(pool_sizes) < 1:
        raise ValueError("pool sizes must be positive")
    rng = random.Random(seed)
    largest = max(pool_sizes)
    sound = dict.fromkeys(pool_sizes, 0)
    entailed, failed = (Status.ENTAILED,), (Status.NOT_ENTAILED,)
    for _ in range(trials):
        records = tuple(
            CandidateRecord(
                i,
                True,
                entailed if rng.random() < p_verify else failed,
                rng.choice(("h_goal_true", "h_goal_false")),
            )
            for i in range(largest)
        )
        u = rng.random()
        pool = CandidatePool(records)
        for n in pool_sizes:
            result = select_dtv(pool.prefix(n))
            threshold = p_v if result.source is Source.VERIFIED else p_m
            sound[n] += u < threshold
    return {n: sound[n] / trials for n in pool_sizes}
