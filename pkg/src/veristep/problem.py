"""ProverQA ingestion, Problem construction and prompt rendering."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

from .fol import Formula, FormulaError, Not, parse_formula, print_formula

PROSFI = "prosfi"
OUTCOME = "outcome"
MODES = (PROSFI, OUTCOME)

GOAL_TRUE = "h_goal_true"
GOAL_FALSE = "h_goal_false"

REQUIRED_FIELDS = ("id", "options", "answer", "question", "reasoning", "context", "nl2fol", "conclusion_fol")


class DatasetError(Exception):
    pass


class RecordSchemaError(DatasetError):
    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"record {index}: {message}")


class ProblemParseError(DatasetError):
    pass


@dataclass
class ProverQARecord:
    id: Any
    options: list[str]
    answer: str
    question: str
    reasoning: str
    context: str
    nl2fol: dict[str, str]
    conclusion_fol: str
    diagnostics: list[str] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Any, index: int = 0) -> "ProverQARecord":
        if not isinstance(data, dict):
            raise RecordSchemaError(index, "record is not a JSON object")
        missing = [k for k in REQUIRED_FIELDS if k not in data]
        if missing:
            raise RecordSchemaError(index, f"missing field(s) {', '.join(missing)}")
        if not isinstance(data["options"], list) or not all(isinstance(o, str) for o in data["options"]):
            raise RecordSchemaError(index, "options must be a list of strings")
        if not isinstance(data["nl2fol"], dict) or not all(isinstance(v, str) for v in data["nl2fol"].values()):
            raise RecordSchemaError(index, "nl2fol must map sentences to formula strings")
        for key in ("answer", "question", "reasoning", "context", "conclusion_fol"):
            if not isinstance(data[key], str):
                raise RecordSchemaError(index, f"{key} must be a string")
        record = cls(**{k: data[k] for k in REQUIRED_FIELDS})
        if record.answer not in option_letters(record.options):
            raise RecordSchemaError(index, f"answer {record.answer!r} is not among the options")
        for text in [*record.nl2fol.values(), record.conclusion_fol]:
            try:
                parse_formula(text)
            except FormulaError as exc:
                record.diagnostics.append(f"ParseError: {text!r}: {exc}")
        return record

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in REQUIRED_FIELDS}


_OPTION_RE = re.compile(r"^\s*([A-Z])\)\s*(.*?)\s*$")


def option_letters(options: list[str]) -> dict[str, str]:
    """Map 'A) True' style option lines to {'A': 'True'}."""
    out = {}
    for line in options:
        m = _OPTION_RE.match(line)
        if m:
            out[m.group(1)] = m.group(2)
    return out


def load_proverqa(path: str | Path) -> list[ProverQARecord]:
    """Read a JSON array, a single JSON object, or JSON-lines of records."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    stripped = text.strip()
    if not stripped:
        return []
    try:
        data = json.loads(stripped)
        items = data if isinstance(data, list) else [data]
    except json.JSONDecodeError:
        items = []
        for lineno, line in enumerate(stripped.splitlines()):
            if not line.strip():
                continue
            try:
                items.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise RecordSchemaError(len(items), f"invalid JSON on line {lineno + 1}: {exc}") from exc
    return [ProverQARecord.from_dict(item, i) for i, item in enumerate(items)]


@dataclass(frozen=True)
class Premise:
    label: str
    nl_text: str
    formula: Formula


@dataclass(frozen=True)
class Problem:
    id: str
    premises: tuple[Premise, ...]
    goal: Formula
    options: dict[str, Formula | None]
    gold_label: str
    mode: str = PROSFI
    question: str = ""
    option_texts: dict[str, str] = field(default_factory=dict)
    diagnostics: tuple[str, ...] = ()

    @property
    def premise_map(self) -> dict[str, Formula]:
        return {p.label: p.formula for p in self.premises}


@dataclass(frozen=True)
class Skipped:
    record_id: Any
    reason: str


def _parse(text: str, where: str) -> Formula:
    try:
        return parse_formula(text)
    except FormulaError as exc:
        raise ProblemParseError(f"{where}: cannot parse {text!r}: {exc}") from exc


def _locate(sentence: str, context: str) -> int:
    pos = context.find(sentence)
    if pos >= 0:
        return pos
    # tolerate whitespace differences between context and nl2fol keys
    words = sentence.split()
    if not words:
        return -1
    m = re.search(r"\s+".join(map(re.escape, words)), context)
    return m.start() if m else -1


def build_problem(record: ProverQARecord, mode: str = PROSFI) -> Problem | Skipped:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    where = f"record {record.id}"
    diagnostics: list[str] = []
    located = []
    for order, (sentence, fol) in enumerate(record.nl2fol.items()):
        pos = _locate(sentence, record.context)
        if pos < 0:
            diagnostics.append(f"UnmatchedSentence: {sentence!r} not found in context")
            pos = len(record.context) + 1
        located.append((pos, order, sentence, _parse(fol, where)))
    located.sort(key=lambda item: (item[0], item[1]))
    premises = tuple(
        Premise(f"h{i}", sentence, formula) for i, (_, _, sentence, formula) in enumerate(located, 1)
    )
    goal = _parse(record.conclusion_fol, where)
    letters = option_letters(record.options)
    answer_value = letters[record.answer].strip().rstrip(".").lower()

    if mode == PROSFI:
        if answer_value not in ("true", "false"):
            return Skipped(record.id, f"answer {record.answer} is {letters[record.answer]!r}")
        return Problem(
            id=str(record.id),
            premises=premises,
            goal=goal,
            options={GOAL_TRUE: goal, GOAL_FALSE: Not(goal)},
            gold_label=GOAL_TRUE if answer_value == "true" else GOAL_FALSE,
            mode=PROSFI,
            question=record.question,
            option_texts={GOAL_TRUE: "True", GOAL_FALSE: "False"},
            diagnostics=tuple(diagnostics),
        )

    options: dict[str, Formula | None] = {}
    for letter, value in letters.items():
        kind = value.strip().rstrip(".").lower()
        options[letter] = goal if kind == "true" else Not(goal) if kind == "false" else None
    return Problem(
        id=str(record.id),
        premises=premises,
        goal=goal,
        options=options,
        gold_label=record.answer,
        mode=OUTCOME,
        question=record.question,
        option_texts=letters,
        diagnostics=tuple(diagnostics),
    )


def load_problems(path: str | Path, mode: str = PROSFI) -> tuple[dict[str, Problem], list[Skipped]]:
    """Index buildable problems by id; Uncertain records are returned separately in prosfi mode."""
    problems: dict[str, Problem] = {}
    skipped: list[Skipped] = []
    for record in load_proverqa(path):
        built = build_problem(record, mode)
        if isinstance(built, Skipped):
            skipped.append(built)
        else:
            problems[built.id] = built
    return problems, skipped


@lru_cache(maxsize=None)
def load_asset(name: str) -> str:
    return resources.files("veristep.assets").joinpath(name).read_text(encoding="utf-8")


def render_system_prompt(mode: str = PROSFI) -> str:
    if mode == PROSFI:
        return load_asset("system_prosfi.txt").rstrip("\n")
    if mode == OUTCOME:
        return load_asset("system_outcome.txt").rstrip("\n")
    raise ValueError(f"mode must be one of {MODES}")


def _split_question(question: str) -> tuple[str, str]:
    head, sep, tail = question.partition("?")
    if not sep or not tail.strip():
        return question.strip(), ""
    return (head + sep).strip(), tail.strip()


def render_user_prompt(problem: Problem, mode: str | None = None) -> str:
    """Deterministic user prompt; formal statements are shown only in prosfi mode.

    Premise labels render as ``h1``, ``h2``, ... exactly as verification expects
    them in step dependencies.
    """
    mode = mode or problem.mode
    if mode == PROSFI:
        lines = ["Context:"]
        for i, p in enumerate(problem.premises, 1):
            lines.append(f"{i}. {p.nl_text} Formal statement: `{p.label} : {print_formula(p.formula)}`.")
        question = problem.question.replace("true, false, or uncertain?", "true or false?")
        lines += ["", f"Question: {question}", "", "Options:"]
        letters = "ABCDEFGH"
        for letter, (label, formula) in zip(letters, problem.options.items()):
            text = problem.option_texts.get(label, label)
            shown = print_formula(formula) if formula is not None else ""
            lines.append(f"{letter}) {text}. Formal statement: `{label}: {shown}`.")
        lines += ["", "The correct option is:"]
        return "\n".join(lines)
    if mode == OUTCOME:
        prefix, statement = _split_question(problem.question)
        lines = ["Context:", *(p.nl_text for p in problem.premises), "", "Question:", prefix]
        if statement:
            lines.append(statement)
        lines += ["", "Options:"]
        lines += [f"{letter}) {text}" for letter, text in problem.option_texts.items()]
        lines += ["", "The correct option is:"]
        return "\n".join(lines)
    raise ValueError(f"mode must be one of {MODES}")
