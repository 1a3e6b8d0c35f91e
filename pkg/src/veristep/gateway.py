"""OpenAI-compatible chat-completion client for sampling candidates and judging soundness."""

from __future__ import annotations

import asyncio
import json
import logging
import os
import random
import re
from dataclasses import dataclass, field
from typing import Awaitable, Callable

import httpx

from .problem import Problem, load_asset, render_system_prompt, render_user_prompt

log = logging.getLogger(__name__)

JUDGE_TEMPLATE = "judge_prompt_v1.txt"


class GatewayError(Exception):
    kind = "GatewayError"


class AuthError(GatewayError):
    kind = "AuthError"


class Timeout(GatewayError):
    kind = "Timeout"


class ProviderError(GatewayError):
    kind = "ProviderError"


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay: float = 1.0
    jitter: bool = True

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if self.base_delay < 0:
            raise ValueError("base_delay must be nonnegative")

    def delay(self, retry: int, rng: random.Random) -> float:
        """Wait before retry number ``retry`` (1-based).

        The window for retry k is [b*2^(k-1), b*2^k), so successive delays
        strictly increase even with jitter.
        """
        step = self.base_delay * 2 ** (retry - 1)
        return step + (rng.random() * step if self.jitter else 0.0)


@dataclass(frozen=True)
class GatewayConfig:
    base_url: str = "http://localhost:8000/v1"
    model_name: str = "policy"
    auth_token_env_var_name: str = "VERISTEP_API_KEY"
    max_concurrent_requests: int = 8
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    request_timeout: float = 120.0
    judge_model_name: str | None = None
    judge_temperature: float = 0.0
    judge_max_tokens: int = 2048

    def __post_init__(self) -> None:
        if self.max_concurrent_requests < 1:
            raise ValueError("max_concurrent_requests must be at least 1")
        if not self.request_timeout > 0:
            raise ValueError("request_timeout must be positive")

    def auth_headers(self) -> dict[str, str]:
        token = os.environ.get(self.auth_token_env_var_name)
        return {"Authorization": f"Bearer {token}"} if token else {}


@dataclass(frozen=True)
class Sampling:
    temperature: float = 1.0
    max_tokens: int = 4096


@dataclass(frozen=True)
class JudgeVerdict:
    is_error: bool | None
    error_instance: str | None = None
    error_type: str | None = None
    error_reason: str | None = None
    raw_response: str = ""

    @property
    def judged_sound(self) -> bool | None:
        return None if self.is_error is None else not self.is_error

    @property
    def label(self) -> str:
        return {True: "Unsound", False: "Sound", None: "Unknown"}[self.is_error]

    def to_dict(self) -> dict:
        return {
            "is_error": self.is_error,
            "error_instance": self.error_instance,
            "error_type": self.error_type,
            "error_reason": self.error_reason,
            "verdict": self.label,
            "raw_response": self.raw_response,
        }


def placeholder(exc: GatewayError) -> str:
    """Stand-in text for a slot whose request failed; it scores as Zero."""
    return f"[gateway error {exc.kind}: {exc}]"


class Gateway:
    """One client, one concurrency bound; share it across workers."""

    def __init__(
        self,
        cfg: GatewayConfig,
        transport: httpx.AsyncBaseTransport | None = None,
        sleep: Callable[[float], Awaitable[None]] = asyncio.sleep,
        rng: random.Random | None = None,
    ):
        self.cfg = cfg
        self._transport = transport
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._sem = asyncio.Semaphore(cfg.max_concurrent_requests)
        self._client: httpx.AsyncClient | None = None

    async def __aenter__(self) -> "Gateway":
        self._client = httpx.AsyncClient(
            base_url=self.cfg.base_url.rstrip("/") + "/",
            transport=self._transport,
            timeout=self.cfg.request_timeout,
            headers=self.cfg.auth_headers(),
        )
        return self

    async def __aexit__(self, *exc) -> None:
        if self._client is not None:
            await self._client.aclose()
            self._client = None

    async def _post_once(self, body: dict) -> list[str]:
        assert self._client is not None, "use Gateway as an async context manager"
        async with self._sem:
            try:
                resp = await self._client.post("chat/completions", json=body)
            except httpx.TimeoutException as exc:
                raise Timeout(f"request timed out: {exc}") from exc
            except httpx.TransportError as exc:
                raise ProviderError(f"transport failure: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"provider rejected credentials (HTTP {resp.status_code})")
        if resp.status_code >= 400:
            raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return [c["message"]["content"] for c in resp.json()["choices"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderError(f"unexpected response body: {exc}") from exc

    async def chat(self, messages: list[dict], temperature: float, max_tokens: int, model: str | None = None) -> str:
        body = {
            "model": model or self.cfg.model_name,
            "messages": messages,
            "temperature": temperature,
            "n": 1,
            "max_tokens": max_tokens,
        }
        policy = self.cfg.retry
        for attempt in range(1, policy.max_attempts + 1):
            try:
                contents = await self._post_once(body)
                if not contents:
                    raise ProviderError("response has no choices")
                return contents[0]
            except AuthError:
                raise
            except GatewayError as exc:
                if attempt == policy.max_attempts:
                    raise
                wait = policy.delay(attempt, self._rng)
                log.info("attempt %d failed (%s); retrying in %.2fs", attempt, exc, wait)
                await self._sleep(wait)
        raise AssertionError("unreachable")

    async def generate_candidates(self, problem: Problem, n: int, sampling: Sampling = Sampling()) -> list[str]:
        """n single-completion requests; slot i always holds request i's outcome."""
        if n < 1:
            raise ValueError("n must be at least 1")
        messages = [
            {"role": "system", "content": render_system_prompt(problem.mode)},
            {"role": "user", "content": render_user_prompt(problem)},
        ]

        async def one() -> str:
            try:
                return await self.chat(messages, sampling.temperature, sampling.max_tokens)
            except AuthError:
                raise
            except GatewayError as exc:
                return placeholder(exc)

        return list(await asyncio.gather(*(one() for _ in range(n))))

    async def judge_soundness(self, problem_text: str, reasoning_text: str) -> JudgeVerdict:
        if not problem_text.strip() or not reasoning_text.strip():
            raise ValueError("problem and reasoning texts must be nonempty")
        prompt = render_judge_prompt(problem_text, reasoning_text)
        reply = await self.chat(
            [{"role": "user", "content": prompt}],
            self.cfg.judge_temperature,
            self.cfg.judge_max_tokens,
            self.cfg.judge_model_name,
        )
        return parse_judge_reply(reply)


def render_judge_prompt(problem_text: str, reasoning_text: str) -> str:
    # plain replace so braces inside the texts are left alone
    template = load_asset(JUDGE_TEMPLATE)
    head, _, rest = template.partition("{problem}")
    mid, _, tail = rest.partition("{reasoning}")
    return head + problem_text + mid + reasoning_text + tail


_JSON_BLOCK = re.compile(r"```json\s*(.*?)```", re.DOTALL | re.IGNORECASE)
_PY_LITERALS = re.compile(r"\b(True|False|None)\b")


def _loads_lenient(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        fixed = _PY_LITERALS.sub(lambda m: {"True": "true", "False": "false", "None": "null"}[m.group(1)], text)
        return json.loads(fixed)


def parse_judge_reply(reply: str) -> JudgeVerdict:
    """Read the first fenced json block; anything unusable becomes an Unknown verdict."""
    m = _JSON_BLOCK.search(reply)
    if not m:
        return JudgeVerdict(None, raw_response=reply)
    try:
        data = _loads_lenient(m.group(1).strip())
    except json.JSONDecodeError:
        return JudgeVerdict(None, raw_response=reply)
    if not isinstance(data, dict) or not isinstance(data.get("is_error"), bool):
        return JudgeVerdict(None, raw_response=reply)
    if not data["is_error"]:
        return JudgeVerdict(False, raw_response=reply)

    def text(key):
        v = data.get(key)
        return None if v is None else str(v)

    return JudgeVerdict(True, text("error_instance"), text("error_type"), text("error_reason"), reply)


def generate_candidates(
    problem: Problem, n: int, sampling: Sampling, cfg: GatewayConfig, transport: httpx.AsyncBaseTransport | None = None
) -> list[str]:
    async def run():
        async with Gateway(cfg, transport) as gw:
            return await gw.generate_candidates(problem, n, sampling)

    return asyncio.run(run())


def judge_soundness(
    problem_text: str, reasoning_text: str, cfg: GatewayConfig, transport: httpx.AsyncBaseTransport | None = None
) -> JudgeVerdict:
    async def run():
        async with Gateway(cfg, transport) as gw:
            return await gw.judge_soundness(problem_text, reasoning_text)

    return asyncio.run(run())
