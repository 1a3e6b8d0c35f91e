"""Application configuration: one JSON document, validated into the runtime dataclasses."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from pydantic import ConfigDict, TypeAdapter, ValidationError

from .gateway import GatewayConfig
from .policy import ClipConfig
from .problem import MODES, PROSFI
from .prover import ProverLimits
from .reward import RewardConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServeConfig:
    workers: int = 8
    host: str = "127.0.0.1"
    port: int = 8765

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class AppConfig:
    __pydantic_config__ = ConfigDict(extra="forbid")

    reward: RewardConfig = field(default_factory=RewardConfig)
    prover: ProverLimits = field(default_factory=ProverLimits)
    clip: ClipConfig = field(default_factory=ClipConfig)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    serve: ServeConfig = field(default_factory=ServeConfig)
    dataset: str | None = None
    candidates: str | None = None
    mode: str = PROSFI
    seed: int = 0
    group_size: int = 8

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        # a top-level prover section wins over the copy nested in reward
        if self.prover != self.reward.prover_limits:
            object.__setattr__(self, "reward", dataclasses.replace(self.reward, prover_limits=self.prover))

    def with_overrides(self, **changes: Any) -> "AppConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


_ADAPTER = TypeAdapter(AppConfig)


def load_config(path: str | Path | None = None, check_paths: bool = True) -> AppConfig:
    """Defaults when ``path`` is None; referenced data paths must exist."""
    if path is None:
        return AppConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        cfg = _ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    if check_paths:
        base = Path(path).parent
        for name in ("dataset", "candidates"):
            value = getattr(cfg, name)
            if value is not None and not (base / value).exists():
                raise ConfigError(f"{name} path {value!r} does not exist")
            if value is not None:
                object.__setattr__(cfg, name, str(base / value))
    return cfg


def dump_config(cfg: AppConfig) -> str:
    return _ADAPTER.dump_json(cfg, indent=2).decode()
