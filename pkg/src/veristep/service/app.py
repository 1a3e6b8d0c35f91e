"""FastAPI app scoring one (problem_id, response) pair per request."""

from __future__ import annotations

from typing import Mapping

import anyio
from fastapi import FastAPI
from fastapi.responses import JSONResponse, Response

from ..pipeline import score_one
from ..problem import Problem
from ..reward import RewardConfig
from .schemas import ErrorReply, Health, ScoreReply, ScoreRequest


def create_app(
    problems: Mapping[str, Problem],
    reward: RewardConfig | None = None,
    mode: str | None = None,
    workers: int = 8,
) -> FastAPI:
    reward = reward or RewardConfig()
    limiter = anyio.CapacityLimiter(workers)
    app = FastAPI(title="veristep reward service")

    @app.get("/health", response_model=Health)
    def health() -> Health:
        return Health(status="ok", problems=len(problems), mode=mode or "per-problem")

    @app.post("/score", response_model=ScoreReply, responses={404: {"model": ErrorReply}})
    async def score(req: ScoreRequest):
        problem = problems.get(req.problem_id)
        if problem is None:
            body = ErrorReply(problem_id=req.problem_id, request_id=req.request_id, error="UnknownProblemId")
            return JSONResponse(body.model_dump(), status_code=404)
        # the body is the exact line `veristep score` would print
        line = await anyio.to_thread.run_sync(score_one, problem, req.response, reward, mode, limiter=limiter)
        return Response(line.encode("utf-8"), media_type="application/json")

    return app
