import math
import random

import pytest

from oracles import advantages as oracle_advantages
from oracles import grpo_objective as oracle_objective
from veristep.policy import (
    ClipConfig,
    GroupTooSmall,
    NonPositiveRatio,
    RolloutGroup,
    TokenStats,
    clipped_surrogate,
    group_advantages,
    grpo_objective,
    kl_estimate,
)


def test_advantage_examples():
    assert group_advantages([0.3, 0.3, 0.3]) == [0.0, 0.0, 0.0]
    assert group_advantages([1, 0]) == [1.0, -1.0]
    got = group_advantages([1.0, 0.3, 0.1, 0.0])
    for a, b in zip(got, oracle_advantages([1.0, 0.3, 0.1, 0.0])):
        assert abs(a - b) <= 1e-12


def test_group_too_small():
    with pytest.raises(GroupTooSmall):
        group_advantages([1.0])
    with pytest.raises(GroupTooSmall):
        group_advantages([])


def test_advantage_properties_random():
    rng = random.Random(0)
    for _ in range(1000):
        g = rng.randint(2, 16)
        r = [rng.choice([0.0, 0.1, 0.3, 1.0]) if rng.random() < 0.5 else rng.uniform(-2, 2) for _ in range(g)]
        a = group_advantages(r)
        if len(set(r)) == 1:
            assert a == [0.0] * g
            continue
        mean = sum(a) / g
        std = math.sqrt(sum((x - mean) ** 2 for x in a) / g)
        assert abs(mean) <= 1e-9 and abs(std - 1) <= 1e-9
        c, k = rng.uniform(-5, 5), rng.uniform(0.1, 10)
        for x, y in zip(group_advantages([v + c for v in r]), a):
            assert abs(x - y) <= 1e-12 * max(1.0, abs(c))
        for x, y in zip(group_advantages([v * k for v in r]), a):
            assert abs(x - y) <= 1e-12


def test_clipped_surrogate_hand_values():
    cfg = ClipConfig(eps_low=0.2, eps_high=0.28)
    assert clipped_surrogate(2.0, 1, cfg) == pytest.approx(1.28, abs=1e-15)
    assert clipped_surrogate(0.5, -1, cfg) == pytest.approx(-0.8, abs=1e-15)
    for a in (-3.0, -0.1, 0.0, 2.5):
        assert clipped_surrogate(1.0, a, cfg) == a


def test_clipped_surrogate_bounds():
    rng = random.Random(1)
    cfg = ClipConfig()
    for _ in range(2000):
        ratio, a = math.exp(rng.uniform(-2, 2)), rng.uniform(-3, 3)
        v = clipped_surrogate(ratio, a, cfg)
        assert v <= ratio * a + 1e-15
        if a > 0:
            assert v <= (1 + cfg.eps_high) * a + 1e-15
            assert v >= min(ratio, 1 - cfg.eps_low) * a - 1e-12
        if a < 0:
            assert v >= max(ratio, 1 - cfg.eps_low) * a - 1e-12


def test_non_positive_ratio():
    with pytest.raises(NonPositiveRatio):
        clipped_surrogate(0.0, 1.0)
    with pytest.raises(NonPositiveRatio):
        clipped_surrogate(-1.0, 1.0)


def test_kl_values():
    assert kl_estimate(-0.7, -0.7) == 0.0
    assert kl_estimate(0.0, 1.0) == pytest.approx(math.e - 2, abs=1e-12)
    assert kl_estimate(0.0, -1.0) == pytest.approx(math.exp(-1), abs=1e-12)
    rng = random.Random(2)
    for _ in range(1000):
        a, b = rng.uniform(-5, 0), rng.uniform(-5, 0)
        assert kl_estimate(a, b) >= 0


def test_kl_second_order_relative():
    for d in (1e-3, -1e-3, 5e-4, -2e-4, 1e-5):
        approx = 0.5 * d * d
        # exp(d) - d - 1 = d^2/2 + d^3/6 + ..., relative gap ~ |d|/3
        assert abs(kl_estimate(0.0, d) - approx) / approx <= abs(d) / 3 + 1e-6


def test_clip_config_validation():
    with pytest.raises(ValueError):
        ClipConfig(eps_low=0.3, eps_high=0.2)
    with pytest.raises(ValueError):
        ClipConfig(kl_coefficient=-1)
    with pytest.raises(ValueError):
        ClipConfig(eps_low=0)


def test_rollout_group_validation():
    t = TokenStats(-1.0, -1.0, -1.0)
    with pytest.raises(GroupTooSmall):
        RolloutGroup((1.0,), ((t,),))
    with pytest.raises(ValueError):
        RolloutGroup((1.0, 0.0), ((t,), ()))
    with pytest.raises(ValueError):
        TokenStats(0.5, -1.0, -1.0)
    with pytest.raises(ValueError):
        TokenStats(float("nan"), -1.0, -1.0)


def test_objective_examples():
    t = TokenStats(-0.5, -0.5, -0.5)
    degenerate = RolloutGroup((0.3, 0.3), ((t, t), (t,)))
    assert grpo_objective(degenerate) == {"surrogate": 0.0, "kl": 0.0, "total": 0.0}
    sym = RolloutGroup((1.0, 0.0), ((t,), (t,)))
    assert grpo_objective(sym)["surrogate"] == 0.0


def test_objective_against_double_loop():
    rng = random.Random(3)
    for _ in range(100):
        g = rng.randint(2, 6)
        rewards = [rng.choice([0.0, 0.1, 0.3, 1.0]) for _ in range(g)]
        tokens = [
            [(rng.uniform(-4, 0), rng.uniform(-4, 0), rng.uniform(-4, 0)) for _ in range(rng.randint(1, 5))]
            for _ in range(g)
        ]
        got = grpo_objective(RolloutGroup.from_lists(rewards, tokens))
        s, k, total = oracle_objective(rewards, tokens)
        assert abs(got["surrogate"] - s) <= 1e-9
        assert abs(got["kl"] - k) <= 1e-9
        assert abs(got["total"] - total) <= 1e-9


def test_from_lists_accepts_dicts():
    g = RolloutGroup.from_lists([1, 0], [[{"logp_new": -1, "logp_old": -1, "logp_ref": -1}], [(-1, -1, -1)]])
    assert g.tokens[0][0] == g.tokens[1][0]
