"""Batch workflows shared by the CLI and the service, with one canonical record encoding."""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .dtv import CandidatePool, NoParseableAnswer, SelectionResult, Source, select_dtv
from .gateway import Gateway, GatewayConfig, JudgeVerdict
from .metrics import (
    EmptyInput,
    ExampleOutcome,
    aggregate_multi_sample,
    compute_rates,
    correlation_matrix,
    correlation_matrix_per_problem,
)
from .problem import OUTCOME, Problem, render_user_prompt
from .reward import RewardBreakdown, RewardConfig, reward_hit, score


def canonical_json(obj) -> str:
    """The one encoding used for every emitted record."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def score_record(problem_id: str, breakdown: RewardBreakdown) -> dict:
    return {"problem_id": problem_id, **breakdown.to_dict()}


def score_one(problem: Problem, response: str, config: RewardConfig, mode: str | None = None) -> str:
    """Canonical reply line for a (problem, response) pair."""
    return canonical_json(score_record(problem.id, score(response, problem, config, mode)))


@dataclass(frozen=True)
class CandidateLine:
    problem_id: str
    candidates: tuple[str, ...]
    line_no: int = 0


class BadLine(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(message)

    def record(self) -> dict:
        return {"line": self.line_no, "error": str(self)}


def read_candidate_lines(lines: Iterable[str]) -> Iterator[CandidateLine | BadLine]:
    """Yield parsed records, or BadLine for lines that do not fit the schema."""
    for no, raw in enumerate(lines, 1):
        if not raw.strip():
            continue
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            yield BadLine(no, f"invalid JSON: {exc.msg}")
            continue
        if not isinstance(data, dict) or "problem_id" not in data:
            yield BadLine(no, "expected an object with problem_id and candidates")
            continue
        cands = data.get("candidates")
        if not isinstance(cands, list) or not all(isinstance(c, str) for c in cands):
            yield BadLine(no, "candidates must be a list of strings")
            continue
        yield CandidateLine(str(data["problem_id"]), tuple(cands), no)


def iter_scored(
    problems: Mapping[str, Problem],
    lines: Iterable[str],
    config: RewardConfig,
    mode: str | None = None,
) -> Iterator[tuple[CandidateLine | BadLine, list[RewardBreakdown] | None]]:
    for item in read_candidate_lines(lines):
        if isinstance(item, BadLine):
            yield item, None
            continue
        problem = problems.get(item.problem_id)
        if problem is None:
            yield BadLine(item.line_no, f"unknown problem_id {item.problem_id!r}"), None
            continue
        yield item, [score(text, problem, config, mode) for text in item.candidates]


# evaluation


def _problem_text(problem: Problem) -> str:
    # the judge sees the natural-language problem only
    return render_user_prompt(problem, OUTCOME)


async def _judge_all(gateway: Gateway, jobs: list[tuple[Problem, str]]) -> list[JudgeVerdict]:
    return list(await asyncio.gather(*(gateway.judge_soundness(_problem_text(p), text) for p, text in jobs)))


async def evaluate_async(
    problems: Mapping[str, Problem],
    lines: Iterable[str],
    config: RewardConfig,
    mode: str | None = None,
    gateway: Gateway | None = None,
) -> dict:
    flat: list[tuple[str, RewardBreakdown]] = []
    jobs: list[tuple[Problem, str]] = []
    errors: list[dict] = []
    for item, breakdowns in iter_scored(problems, lines, config, mode):
        if breakdowns is None:
            errors.append(item.record())
            continue
        problem = problems[item.problem_id]
        for text, b in zip(item.candidates, breakdowns):
            flat.append((problem.id, b))
            jobs.append((problem, text))
    verdicts: list[JudgeVerdict | None] = [None] * len(flat)
    if gateway is not None and jobs:
        verdicts = await _judge_all(gateway, jobs)
    return _assemble(problems, flat, verdicts, errors)


def evaluate(
    problems: Mapping[str, Problem],
    lines: Iterable[str],
    config: RewardConfig,
    mode: str | None = None,
    gateway_config: GatewayConfig | None = None,
    transport=None,
) -> dict:
    """Metrics JSON; a gateway config switches on judged soundness."""
    if gateway_config is None:
        return asyncio.run(evaluate_async(problems, lines, config, mode))

    async def run():
        async with Gateway(gateway_config, transport) as gw:
            return await evaluate_async(problems, lines, config, mode, gw)

    return asyncio.run(run())


def _assemble(problems, flat, verdicts, errors) -> dict:
    per_problem: dict[str, list[ExampleOutcome]] = {}
    outcomes: list[ExampleOutcome] = []
    for (pid, b), v in zip(flat, verdicts):
        o = ExampleOutcome(
            problem_id=pid,
            answer_correct=b.answer_label is not None and b.answer_label == problems[pid].gold_label,
            reward_hit=reward_hit(b),
            judged_sound=None if v is None else v.judged_sound,
        )
        outcomes.append(o)
        per_problem.setdefault(pid, []).append(o)
    result: dict = {"errors": errors}
    if not outcomes:
        result.update(per_sample=None, per_problem=None, correlation=None)
        return result
    result["per_sample"] = compute_rates(outcomes).to_dict()
    result["per_problem"] = aggregate_multi_sample(per_problem).to_dict()
    corr = {}
    for name, fn, arg in (
        ("per_sample", correlation_matrix, outcomes),
        ("per_problem", correlation_matrix_per_problem, per_problem),
    ):
        try:
            corr[name] = fn(arg)
        except EmptyInput:
            corr[name] = None
    result["correlation"] = corr
    result["judge_verdicts"] = [None if v is None else v.label for v in verdicts]
    return result


# test-time selection


def dtv_table(
    problems: Mapping[str, Problem],
    lines: Iterable[str],
    config: RewardConfig,
    pool_sizes: Sequence[int],
    mode: str | None = None,
) -> tuple[list[dict], list[dict], list[dict]]:
    """(selection records on full pools, per-N summary rows, error records).

    Raises ValueError when a requested N exceeds some problem's pool.
    """
    selections, errors = [], []
    pools: list[tuple[Problem, CandidatePool]] = []
    for item, breakdowns in iter_scored(problems, lines, config, mode):
        if breakdowns is None:
            errors.append(item.record())
            continue
        problem = problems[item.problem_id]
        pools.append((problem, CandidatePool.from_breakdowns(breakdowns)))
    for problem, pool in pools:
        for n in pool_sizes:
            if n > len(pool.candidates):
                raise ValueError(
                    f"pool size {n} exceeds the {len(pool.candidates)} candidates of problem {problem.id}"
                )
        sel = _select(pool)
        selections.append(
            sel.to_dict(problem.id) if sel else {"problem_id": problem.id, "error": "no parseable answer"}
        )
    rows = []
    for n in pool_sizes:
        correct = verified = sound = 0
        for problem, pool in pools:
            sel = _select(pool.prefix(n))
            if sel is None:
                continue
            ok = sel.answer_label == problem.gold_label
            correct += ok
            verified += sel.source is Source.VERIFIED
            sound += ok and sel.source is Source.VERIFIED
        k = len(pools) or 1
        rows.append(
            {
                "pool_size": n,
                "problems": len(pools),
                "accuracy": correct / k,
                "verified_share": verified / k,
                "formal_soundness": sound / k,
            }
        )
    return selections, rows, errors


def _select(pool: CandidatePool) -> SelectionResult | None:
    try:
        return select_dtv(pool)
    except NoParseableAnswer:
        return None
