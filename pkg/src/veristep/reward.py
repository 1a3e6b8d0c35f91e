"""Step-verified tiered rewards and the outcome-only baseline reward."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .fol import Formula
from .problem import OUTCOME, PROSFI, Problem
from .prover import EntailmentQuery, EntailmentVerdict, ProverLimits, Status, check_entailment
from .trace import (
    DEFAULT_MAX_DEPENDENCIES,
    DiagnosticKind,
    ResolvedStep,
    SchemaDiagnostic,
    TraceSchemaError,
    extract_summary,
    normalize_label,
    parse_steps,
    validate_and_resolve,
    extract_think,
)


class Tier(str, enum.Enum):
    FULL = "Full"
    OPTION_ONLY = "OptionOnly"
    FORMAT_ONLY = "FormatOnly"
    ZERO = "Zero"


@dataclass(frozen=True)
class RewardConfig:
    full_score: float = 1.0
    option_score: float = 0.3
    format_score: float = 0.1
    zero_score: float = 0.0
    max_dependencies: int = DEFAULT_MAX_DEPENDENCIES
    prover_limits: ProverLimits = field(default_factory=ProverLimits)

    def __post_init__(self) -> None:
        if not self.full_score > self.option_score > self.format_score > self.zero_score >= 0:
            raise ValueError("reward tiers must satisfy full > option > format > zero >= 0")
        if self.max_dependencies < 1:
            raise ValueError("max_dependencies must be at least 1")

    def value(self, tier: Tier) -> float:
        return {
            Tier.FULL: self.full_score,
            Tier.OPTION_ONLY: self.option_score,
            Tier.FORMAT_ONLY: self.format_score,
            Tier.ZERO: self.zero_score,
        }[tier]


@dataclass(frozen=True)
class StepVerdict:
    step_id: str
    status: Status
    countermodel: dict[str, bool] | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.step_id, "status": self.status.value, "countermodel": self.countermodel, "detail": self.detail}


@dataclass(frozen=True)
class RewardBreakdown:
    value: float
    tier: Tier
    step_verdicts: tuple[StepVerdict, ...] = ()
    diagnostics: tuple[SchemaDiagnostic, ...] = ()
    answer_label: str | None = None
    schema_valid: bool = False

    @property
    def fully_verified(self) -> bool:
        """Schema valid and every step entailed; the gold label plays no part."""
        return (
            self.schema_valid
            and bool(self.step_verdicts)
            and all(v.status is Status.ENTAILED for v in self.step_verdicts)
        )

    def to_dict(self) -> dict:
        return {
            "reward": self.value,
            "tier": self.tier.value,
            "answer_label": self.answer_label,
            "schema_valid": self.schema_valid,
            "step_verdicts": [v.to_dict() for v in self.step_verdicts],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }


@lru_cache(maxsize=65536)
def _cached_check(hypotheses: tuple[Formula, ...], conclusion: Formula, limits: ProverLimits) -> EntailmentVerdict:
    return check_entailment(EntailmentQuery(hypotheses, conclusion), limits)


def verify_step(step: ResolvedStep, limits: ProverLimits) -> StepVerdict:
    """Check the step's conclusion against its listed dependencies only."""
    try:
        verdict = _cached_check(step.dependency_formulas, step.conclusion, limits)
    except RecursionError:
        return StepVerdict(step.id, Status.RESOURCE_LIMIT, detail="formula nesting too deep")
    return StepVerdict(step.id, verdict.status, verdict.countermodel_text(), verdict.diagnostic)


def _zero(config: RewardConfig, diagnostics: Iterable[SchemaDiagnostic], answer_label: str | None = None):
    return RewardBreakdown(config.zero_score, Tier.ZERO, (), tuple(diagnostics), answer_label, False)


def score_prosfi(response_text: str, problem: Problem, config: RewardConfig | None = None) -> RewardBreakdown:
    """Tiered reward for one structured response.

    Zero when the summary is absent or the trace fails validation; FormatOnly
    when the trace is valid but its final id is not the gold option; Full when
    the answer is right and every step is entailed by its dependencies;
    OptionOnly otherwise.
    """
    config = config or RewardConfig()
    payload = extract_summary(response_text)
    if payload is None:
        return _zero(config, [SchemaDiagnostic(DiagnosticKind.MISSING_SUMMARY, None, "no <summary> block found")])
    try:
        steps = parse_steps(payload)
    except TraceSchemaError as exc:
        return _zero(config, exc.diagnostics)
    answer_label = None
    if steps:
        last = normalize_label(steps[-1].id)
        answer_label = last if last in problem.options else None
    try:
        trace = validate_and_resolve(steps, problem, config.max_dependencies, extract_think(response_text))
    except TraceSchemaError as exc:
        return _zero(config, exc.diagnostics, answer_label)

    verdicts = tuple(verify_step(s, config.prover_limits) for s in trace.steps)
    if trace.final_label != problem.gold_label:
        tier = Tier.FORMAT_ONLY
    elif all(v.status is Status.ENTAILED for v in verdicts):
        tier = Tier.FULL
    else:
        tier = Tier.OPTION_ONLY
    return RewardBreakdown(config.value(tier), tier, verdicts, (), trace.final_label, True)


_LETTER = re.compile(r"(?<![A-Za-z])([ABC])\)")


def outcome_answer(response_text: str) -> tuple[bool, str | None]:
    """(format_ok, last option letter outside the think block)."""
    if response_text.count("<think>") != 1 or response_text.count("</think>") != 1:
        return False, None
    start, end = response_text.index("<think>"), response_text.index("</think>")
    if end < start:
        return False, None
    outside = response_text[:start] + "\n" + response_text[end + len("</think>"):]
    letters = _LETTER.findall(outside)
    return True, (letters[-1] if letters else None)


def score_outcome_breakdown(response_text: str, problem: Problem, config: RewardConfig | None = None) -> RewardBreakdown:
    config = config or RewardConfig()
    ok, letter = outcome_answer(response_text)
    if not ok:
        return RewardBreakdown(config.zero_score, Tier.ZERO, answer_label=None, schema_valid=False)
    if letter == problem.gold_label:
        return RewardBreakdown(config.full_score, Tier.FULL, answer_label=letter, schema_valid=True)
    return RewardBreakdown(config.format_score, Tier.FORMAT_ONLY, answer_label=letter, schema_valid=True)


def score_outcome_cot(response_text: str, problem: Problem, config: RewardConfig | None = None) -> float:
    return score_outcome_breakdown(response_text, problem, config).value


def score(response_text: str, problem: Problem, config: RewardConfig | None = None, mode: str | None = None) -> RewardBreakdown:
    mode = mode or problem.mode
    if mode == PROSFI:
        return score_prosfi(response_text, problem, config)
    if mode == OUTCOME:
        return score_outcome_breakdown(response_text, problem, config)
    raise ValueError(f"unknown mode {mode!r}")


def score_batch(
    items: Sequence[tuple[Problem, Sequence[str]]],
    config: RewardConfig | None = None,
    mode: str | None = None,
) -> list[list[RewardBreakdown]]:
    """Score each problem's candidates; order is preserved."""
    return [[score(text, problem, config, mode) for text in candidates] for problem, candidates in items]


def reward_hit(breakdown: RewardBreakdown) -> bool:
    return breakdown.tier is Tier.FULL
