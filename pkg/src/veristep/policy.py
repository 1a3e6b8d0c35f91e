"""GRPO forward-value kernels with asymmetric (clip-higher) ratio clipping.

Nothing here differentiates; these are reference values for external training
loops and for checking their losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class GroupTooSmall(ValueError):
    pass


class NonPositiveRatio(ValueError):
    pass


@dataclass(frozen=True)
class ClipConfig:
    eps_low: float = 0.2
    eps_high: float = 0.28
    kl_coefficient: float = 0.001
    std_epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if not 0 < self.eps_low <= self.eps_high:
            raise ValueError("need 0 < eps_low <= eps_high")
        if self.eps_low >= 1:
            raise ValueError("eps_low must be below 1")
        if self.kl_coefficient < 0:
            raise ValueError("kl_coefficient must be nonnegative")
        if self.std_epsilon <= 0:
            raise ValueError("std_epsilon must be positive")


@dataclass(frozen=True)
class TokenStats:
    logp_new: float
    logp_old: float
    logp_ref: float

    def __post_init__(self) -> None:
        for name in ("logp_new", "logp_old", "logp_ref"):
            v = getattr(self, name)
            if not math.isfinite(v) or v > 0:
                raise ValueError(f"{name} must be a finite log-probability <= 0, got {v}")


@dataclass(frozen=True)
class RolloutGroup:
    rewards: tuple[float, ...]
    tokens: tuple[tuple[TokenStats, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rewards) != len(self.tokens):
            raise ValueError("one token list per reward is required")
        if len(self.rewards) < 2:
            raise GroupTooSmall(f"group size {len(self.rewards)} < 2")
        if any(len(t) == 0 for t in self.tokens):
            raise ValueError("every candidate needs at least one token")

    @classmethod
    def from_lists(cls, rewards: Sequence[float], tokens: Sequence[Sequence]) -> "RolloutGroup":
        """Build from plain data; tokens may be dicts or (new, old, ref) triples."""
        def conv(t):
            if isinstance(t, TokenStats):
                return t
            if isinstance(t, dict):
                return TokenStats(float(t["logp_new"]), float(t["logp_old"]), float(t["logp_ref"]))
            return TokenStats(*map(float, t))

        return cls(tuple(map(float, rewards)), tuple(tuple(conv(t) for t in seq) for seq in tokens))


def group_advantages(rewards: Sequence[float], std_epsilon: float = 1e-8) -> list[float]:
    """(r - mean) / max(population std, std_epsilon); all-equal groups give exact zeros."""
    r = np.asarray(rewards, dtype=np.float64)
    if r.ndim != 1 or r.size < 2:
        raise GroupTooSmall(f"group size {r.size} < 2")
    if np.all(r == r[0]):
        return [0.0] * r.size
    centered = r - r.mean()
    std = math.sqrt(float(np.mean(centered * centered)))
    return (centered / max(std, std_epsilon)).tolist()


def clipped_surrogate(ratio: float, advantage: float, clip: ClipConfig = ClipConfig()) -> float:
    if not ratio > 0:
        raise NonPositiveRatio(f"ratio must be positive, got {ratio}")
    clamped = min(max(ratio, 1.0 - clip.eps_low), 1.0 + clip.eps_high)
    return min(ratio * advantage, clamped * advantage)


def kl_estimate(logp_new: float, logp_ref: float) -> float:
    """exp(d) - d - 1 with d = logp_ref - logp_new; nonnegative, zero iff equal."""
    d = logp_ref - logp_new
    # expm1 keeps the small-d regime accurate (~d^2 / 2)
    return max(math.expm1(d) - d, 0.0)


def grpo_objective(group: RolloutGroup, clip: ClipConfig = ClipConfig()) -> dict[str, float]:
    advantages = group_advantages(group.rewards, clip.std_epsilon)
    surrogates, kls = [], []
    for adv, toks in zip(advantages, group.tokens):
        logp_new = np.array([t.logp_new for t in toks])
        logp_old = np.array([t.logp_old for t in toks])
        logp_ref = np.array([t.logp_ref for t in toks])
        ratio = np.exp(logp_new - logp_old)
        clamped = np.clip(ratio, 1.0 - clip.eps_low, 1.0 + clip.eps_high)
        surrogates.append(float(np.mean(np.minimum(ratio * adv, clamped * adv))))
        d = logp_ref - logp_new
        kls.append(float(np.mean(np.maximum(np.expm1(d) - d, 0.0))))
    surrogate = float(np.mean(surrogates))
    kl = float(np.mean(kls))
    return {"surrogate": surrogate, "kl": kl, "total": surrogate - clip.kl_coefficient * kl}
