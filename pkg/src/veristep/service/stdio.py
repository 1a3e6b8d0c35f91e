"""One JSON request per input line, one reply per output line, in completion order."""

from __future__ import annotations

import asyncio
import json
import signal
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, TextIO

from ..pipeline import canonical_json, score_one
from ..problem import Problem
from ..reward import RewardConfig


def _reply(problems, reward, mode, raw: str) -> str:
    try:
        req = json.loads(raw)
    except json.JSONDecodeError as exc:
        return canonical_json({"problem_id": None, "request_id": None, "error": f"invalid JSON: {exc.msg}"})
    if not isinstance(req, dict) or not isinstance(req.get("problem_id"), str) or not isinstance(req.get("response"), str):
        rid = req.get("request_id") if isinstance(req, dict) else None
        return canonical_json({"problem_id": None, "request_id": rid, "error": "expected problem_id and response strings"})
    rid = req.get("request_id")
    problem = problems.get(req["problem_id"])
    if problem is None:
        return canonical_json({"problem_id": req["problem_id"], "request_id": rid, "error": "UnknownProblemId"})
    line = score_one(problem, req["response"], reward, mode)
    if rid is None:
        return line
    # echo the client's correlation id ahead of the scored fields
    return canonical_json({"request_id": rid, **json.loads(line)})


async def _serve(problems, reward, mode, stdin: TextIO, stdout: TextIO, workers: int) -> int:
    loop = asyncio.get_running_loop()
    queue: asyncio.Queue[str | None] = asyncio.Queue()

    def reader():
        for raw in stdin:
            if raw.strip():
                loop.call_soon_threadsafe(queue.put_nowait, raw)
        loop.call_soon_threadsafe(queue.put_nowait, None)

    threading.Thread(target=reader, daemon=True).start()
    try:
        loop.add_signal_handler(signal.SIGTERM, queue.put_nowait, None)
    except (NotImplementedError, RuntimeError, ValueError):
        pass

    write_lock = asyncio.Lock()
    served = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: set[asyncio.Future] = set()

        async def handle(raw: str):
            nonlocal served
            out = await loop.run_in_executor(pool, _reply, problems, reward, mode, raw)
            async with write_lock:
                stdout.write(out + "\n")
                stdout.flush()
                served += 1

        while (raw := await queue.get()) is not None:
            task = asyncio.ensure_future(handle(raw))
            pending.add(task)
            task.add_done_callback(pending.discard)
        # drain in-flight requests before exiting
        if pending:
            await asyncio.gather(*pending)
    return served


def serve_stdio(
    problems: Mapping[str, Problem],
    reward: RewardConfig | None = None,
    mode: str | None = None,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
    workers: int = 8,
) -> int:
    """Serve until EOF or SIGTERM; returns the number of replies written."""
    return asyncio.run(
        _serve(problems, reward or RewardConfig(), mode, stdin or sys.stdin, stdout or sys.stdout, workers)
    )
