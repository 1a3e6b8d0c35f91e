from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict


class ScoreRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem_id: str
    response: str
    request_id: Optional[Union[str, int]] = None


class StepVerdictModel(BaseModel):
    id: str
    status: str
    countermodel: Optional[dict[str, bool]] = None
    detail: Optional[str] = None


class DiagnosticModel(BaseModel):
    kind: str
    location: Optional[int] = None
    detail: str


class ScoreReply(BaseModel):
    problem_id: str
    reward: float
    tier: str
    answer_label: Optional[str] = None
    schema_valid: bool
    step_verdicts: list[StepVerdictModel]
    diagnostics: list[DiagnosticModel]


class ErrorReply(BaseModel):
    problem_id: Optional[str] = None
    request_id: Optional[Union[str, int]] = None
    error: str


class Health(BaseModel):
    status: str
    problems: int
    mode: str
