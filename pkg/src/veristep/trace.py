"""Structured-summary extraction, step parsing and validation against a problem."""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass

from .fol import Formula, FormulaError, ast_equal, parse_formula, print_formula
from .problem import Problem

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPENDENCIES = 4
STEP_FIELDS = ("id", "dependencies", "conclusion", "rule")


class DiagnosticKind(str, enum.Enum):
    MISSING_SUMMARY = "MissingSummary"
    MALFORMED_JSON = "MalformedJson"
    MISSING_FIELD = "MissingField"
    DUPLICATE_ID = "DuplicateId"
    UNKNOWN_DEPENDENCY = "UnknownDependency"
    FORWARD_REFERENCE = "ForwardReference"
    TOO_MANY_DEPENDENCIES = "TooManyDependencies"
    CONCLUSION_PARSE_ERROR = "ConclusionParseError"
    FINAL_LABEL_INVALID = "FinalLabelInvalid"
    FINAL_CONCLUSION_MISMATCH = "FinalConclusionMismatch"


@dataclass(frozen=True)
class SchemaDiagnostic:
    kind: DiagnosticKind
    location: int | None
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "location": self.location, "detail": self.detail}


class TraceSchemaError(Exception):
    def __init__(self, diagnostics: list[SchemaDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{d.kind.value}: {d.detail}" for d in diagnostics))


@dataclass(frozen=True)
class StepRecord:
    id: str
    dependencies: tuple[str, ...]
    conclusion_text: str
    rule_name: str
    extra_fields: tuple[str, ...] = ()


@dataclass(frozen=True)
class ResolvedStep:
    id: str
    dependencies: tuple[str, ...]
    dependency_formulas: tuple[Formula, ...]
    conclusion: Formula
    rule_name: str


@dataclass(frozen=True)
class ResolvedTrace:
    think_text: str
    steps: tuple[ResolvedStep, ...]
    final_label: str


_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")
_PREMISE_LABEL = re.compile(r"h\s*_?\s*\{?\s*(\d+)\s*\}?")


def normalize_label(label: str) -> str:
    """Canonical label text: ``$h_3$``, ``h_3`` and ``h₃`` all become ``h3``."""
    text = label.strip().strip("$").strip().translate(_SUBSCRIPTS)
    m = _PREMISE_LABEL.fullmatch(text)
    return f"h{m.group(1)}" if m else text


_OPEN, _CLOSE = "<summary>", "</summary>"
_FENCE = re.compile(r"^```[A-Za-z0-9_-]*[ \t]*\n?(.*?)\n?```$", re.DOTALL)


def extract_summary(response_text: str) -> str | None:
    """Payload of the last complete ``<summary>...</summary>`` block, fences stripped."""
    end = response_text.rfind(_CLOSE)
    if end < 0:
        return None
    start = response_text.rfind(_OPEN, 0, end)
    if start < 0:
        return None
    payload = response_text[start + len(_OPEN):end].strip()
    m = _FENCE.match(payload)
    if m:
        payload = m.group(1).strip()
    return payload


def extract_think(response_text: str) -> str:
    start = response_text.find("<think>")
    end = response_text.find("</think>", start + 1)
    if start < 0 or end < 0:
        return ""
    return response_text[start + len("<think>"):end].strip()


def parse_steps(payload: str) -> list[StepRecord]:
    """One StepRecord per element of the JSON array; raises TraceSchemaError."""
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise TraceSchemaError([SchemaDiagnostic(DiagnosticKind.MALFORMED_JSON, exc.pos, exc.msg)]) from None
    except RecursionError:
        raise TraceSchemaError([SchemaDiagnostic(DiagnosticKind.MALFORMED_JSON, None, "nesting too deep")]) from None
    if not isinstance(data, list):
        raise TraceSchemaError(
            [SchemaDiagnostic(DiagnosticKind.MALFORMED_JSON, None, "summary is not a JSON array")]
        )
    steps: list[StepRecord] = []
    diagnostics: list[SchemaDiagnostic] = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            diagnostics.append(SchemaDiagnostic(DiagnosticKind.MALFORMED_JSON, i, "step is not a JSON object"))
            continue
        problems = []
        for key in STEP_FIELDS:
            if key not in item:
                problems.append(f"missing {key!r}")
        if "dependencies" in item and not (
            isinstance(item["dependencies"], list) and all(isinstance(d, str) for d in item["dependencies"])
        ):
            problems.append("'dependencies' must be a list of strings")
        for key in ("id", "conclusion", "rule"):
            if key in item and not isinstance(item[key], str):
                problems.append(f"{key!r} must be a string")
        if "id" in item and isinstance(item["id"], str) and not item["id"].strip():
            problems.append("'id' is empty")
        if problems:
            diagnostics.append(SchemaDiagnostic(DiagnosticKind.MISSING_FIELD, i, "; ".join(problems)))
            continue
        extra = tuple(sorted(k for k in item if k not in STEP_FIELDS))
        if extra:
            log.warning("step %d: ignoring surplus fields %s", i, ", ".join(extra))
        steps.append(
            StepRecord(item["id"], tuple(item["dependencies"]), item["conclusion"], item["rule"], extra)
        )
    if diagnostics:
        raise TraceSchemaError(diagnostics)
    return steps


def validate_and_resolve(
    steps: list[StepRecord],
    problem: Problem,
    max_dependencies: int = DEFAULT_MAX_DEPENDENCIES,
    think_text: str = "",
) -> ResolvedTrace:
    """Resolve dependency labels to formulas; raises TraceSchemaError listing every violation."""
    D = DiagnosticKind
    diagnostics: list[SchemaDiagnostic] = []
    premises = problem.premise_map
    all_ids = {normalize_label(s.id) for s in steps}
    earlier: dict[str, Formula | None] = {}
    resolved: list[ResolvedStep] = []
    last_conclusion: Formula | None = None

    if not steps:
        diagnostics.append(SchemaDiagnostic(D.FINAL_LABEL_INVALID, None, "trace contains no steps"))

    for i, step in enumerate(steps):
        sid = normalize_label(step.id)
        if sid in earlier or sid in premises:
            diagnostics.append(SchemaDiagnostic(D.DUPLICATE_ID, i, f"step id {sid!r} is already defined"))
        try:
            conclusion: Formula | None = parse_formula(step.conclusion_text)
        except FormulaError as exc:
            conclusion = None
            diagnostics.append(SchemaDiagnostic(D.CONCLUSION_PARSE_ERROR, i, f"{step.conclusion_text!r}: {exc}"))
        except RecursionError:
            conclusion = None
            diagnostics.append(SchemaDiagnostic(D.CONCLUSION_PARSE_ERROR, i, "formula nesting too deep"))
        if len(step.dependencies) > max_dependencies:
            diagnostics.append(
                SchemaDiagnostic(
                    D.TOO_MANY_DEPENDENCIES, i,
                    f"{len(step.dependencies)} dependencies exceed the limit of {max_dependencies}",
                )
            )
        deps: list[str] = []
        dep_formulas: list[Formula] = []
        for raw in step.dependencies:
            dep = normalize_label(raw)
            deps.append(dep)
            if dep in premises:
                dep_formulas.append(premises[dep])
            elif dep in earlier:
                if earlier[dep] is not None:
                    dep_formulas.append(earlier[dep])
            elif dep in all_ids:
                diagnostics.append(SchemaDiagnostic(D.FORWARD_REFERENCE, i, f"{dep!r} is not an earlier step"))
            else:
                diagnostics.append(SchemaDiagnostic(D.UNKNOWN_DEPENDENCY, i, f"{dep!r} is neither a premise nor a step"))
        earlier.setdefault(sid, conclusion)
        last_conclusion = conclusion
        if conclusion is not None:
            resolved.append(ResolvedStep(sid, tuple(deps), tuple(dep_formulas), conclusion, step.rule_name))

    final_label = ""
    if steps:
        last = len(steps) - 1
        final_label = normalize_label(steps[-1].id)
        target = problem.options.get(final_label)
        if target is None:
            diagnostics.append(
                SchemaDiagnostic(D.FINAL_LABEL_INVALID, last, f"final id {final_label!r} is not an option label")
            )
        elif last_conclusion is not None and not ast_equal(last_conclusion, target):
            diagnostics.append(
                SchemaDiagnostic(
                    D.FINAL_CONCLUSION_MISMATCH, last,
                    f"conclusion {print_formula(last_conclusion)!r} differs from option "
                    f"{final_label} = {print_formula(target)!r}",
                )
            )
    if diagnostics:
        raise TraceSchemaError(diagnostics)
    return ResolvedTrace(think_text, tuple(resolved), final_label)


def resolve_response(
    response_text: str, problem: Problem, max_dependencies: int = DEFAULT_MAX_DEPENDENCIES
) -> ResolvedTrace:
    payload = extract_summary(response_text)
    if payload is None:
        raise TraceSchemaError([SchemaDiagnostic(DiagnosticKind.MISSING_SUMMARY, None, "no <summary> block found")])
    steps = parse_steps(payload)
    return validate_and_resolve(steps, problem, max_dependencies, extract_think(response_text))


def serialize_steps(trace: ResolvedTrace, indent: int | None = 2) -> str:
    items = [
        {
            "id": s.id,
            "dependencies": list(s.dependencies),
            "conclusion": print_formula(s.conclusion),
            "rule": s.rule_name,
        }
        for s in trace.steps
    ]
    return json.dumps(items, indent=indent, ensure_ascii=False)


def render_response(trace: ResolvedTrace) -> str:
    return f"<think>\n{trace.think_text}\n</think>\n<summary>{serialize_steps(trace)}</summary>"
