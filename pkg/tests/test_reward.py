import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_path
from reward_cases import FINAL, OUTCOME_CASES, PROSFI_CASES, S1, step, wrap
from veristep.prover import (
    EntailmentQuery,
    GroundingContext,
    Status,
    TooManyAtoms,
    UniverseTooLarge,
    brute_force_entailment,
)
from veristep.reward import (
    RewardConfig,
    Tier,
    outcome_answer,
    reward_hit,
    score,
    score_batch,
    score_outcome_cot,
    score_prosfi,
)
from veristep.trace import TraceSchemaError, resolve_response


def _response(name, text, hattie_response):
    if name == "worked_response":
        return hattie_response
    if name == "dollar_labels":
        return fixture_path("hattie_response_dollar.txt").read_text()
    return text


def oracle_tier(response, problem, config) -> float:
    """Recompute the tier with schema checks plus truth-table entailment."""
    try:
        trace = resolve_response(response, problem, config.max_dependencies)
    except TraceSchemaError:
        return config.zero_score
    if trace.final_label != problem.gold_label:
        return config.format_score
    for s in trace.steps:
        query = EntailmentQuery(s.dependency_formulas, s.conclusion)
        try:
            # a step over the atom ceiling counts as unverified
            GroundingContext.build(query.formulas, config.prover_limits.max_ground_atoms)
            ok = brute_force_entailment(query, config.prover_limits).status is Status.ENTAILED
        except (UniverseTooLarge, TooManyAtoms):
            ok = False
        if not ok:
            return config.option_score
    return config.full_score


@pytest.mark.parametrize("name, text, value, tier, config", PROSFI_CASES, ids=[c[0] for c in PROSFI_CASES])
def test_prosfi_tiers(name, text, value, tier, config, hattie, hattie_response):
    response = _response(name, text, hattie_response)
    config = config or RewardConfig()
    b = score_prosfi(response, hattie, config)
    assert b.value == value
    assert b.tier.value == tier
    assert oracle_tier(response, hattie, config) == value


@pytest.mark.parametrize("name, text, value", OUTCOME_CASES, ids=[c[0] for c in OUTCOME_CASES])
def test_outcome_tiers(name, text, value, paola):
    assert score_outcome_cot(text, paola) == value


def test_worked_response_details(hattie, hattie_response):
    b = score_prosfi(hattie_response, hattie)
    assert [v.step_id for v in b.step_verdicts] == ["s1", "h_goal_false"]
    assert all(v.status is Status.ENTAILED for v in b.step_verdicts)
    assert b.answer_label == "h_goal_false" and b.schema_valid and b.fully_verified
    assert reward_hit(b)


def test_tamper_reports_countermodel(hattie):
    b = score_prosfi(wrap([{**S1, "conclusion": "stands_up_for_principles Candy"}, FINAL]), hattie)
    s1 = b.step_verdicts[0]
    assert s1.status is Status.NOT_ENTAILED
    assert s1.countermodel["stands_up_for_principles Candy"] is False
    assert not reward_hit(b)


def test_zero_keeps_answer_label_when_known(hattie):
    b = score_prosfi(wrap([step("s1", ["h9"], "p"), FINAL]), hattie)
    assert b.tier is Tier.ZERO and b.answer_label == "h_goal_false"
    assert b.diagnostics[0].kind.value == "UnknownDependency"


def test_wrong_answer_still_verifies_steps(hattie):
    b = score_prosfi(wrap([S1, step("h_goal_true", ["h1", "s1"], "¬gains_community_respect Hattie")]), hattie)
    assert b.tier is Tier.FORMAT_ONLY
    assert [v.status for v in b.step_verdicts] == [Status.ENTAILED, Status.NOT_ENTAILED]


def test_outcome_answer_extraction():
    assert outcome_answer("<think>A)</think> B) then C)") == (True, "C")
    assert outcome_answer("none") == (False, None)


def test_score_dispatch(hattie, paola, hattie_response):
    assert score(hattie_response, hattie).tier is Tier.FULL
    assert score("<think>x</think> A)", paola).tier is Tier.FULL
    with pytest.raises(ValueError):
        score("x", hattie, mode="other")


def test_config_validation():
    with pytest.raises(ValueError):
        RewardConfig(option_score=0.05)
    with pytest.raises(ValueError):
        RewardConfig(max_dependencies=0)
    assert RewardConfig().value(Tier.OPTION_ONLY) == 0.3


def test_score_batch(hattie, paola, hattie_response):
    assert score_batch([]) == []
    group = [hattie_response] * 4 + [wrap([S1, FINAL.copy() | {"dependencies": ["s1"]}])] * 4
    out = score_batch([(hattie, group)])
    assert len(out) == 1 and len(out[0]) == 8
    assert [b.value for b in out[0]] == [1.0] * 4 + [0.3] * 4
    single = score_batch([(hattie, [hattie_response])])
    assert single[0][0] == score_prosfi(hattie_response, hattie)


def _mutations(base: str, rng: random.Random, n: int):
    for _ in range(n):
        chars = list(base)
        for _ in range(rng.randint(1, 8)):
            op = rng.random()
            i = rng.randrange(len(chars) + 1)
            if op < 0.4 and chars:
                del chars[min(i, len(chars) - 1)]
            elif op < 0.8:
                chars.insert(i, rng.choice('[]{}",:¬∧∨→↔⊕∀∃ hsx1_$<>/'))
            elif chars:
                j = rng.randrange(len(chars))
                chars[j], chars[min(i, len(chars) - 1)] = chars[min(i, len(chars) - 1)], chars[j]
        yield "".join(chars)


def test_tier_soundness_and_totality_on_mutations(hattie, hattie_response):
    rng = random.Random(0)
    cfg = RewardConfig()
    seen = set()
    for text in _mutations(hattie_response, rng, 500):
        b = score_prosfi(text, hattie, cfg)
        seen.add(b.tier)
        assert b.value in (1.0, 0.3, 0.1, 0.0)
        if reward_hit(b):
            assert b.answer_label == hattie.gold_label
            assert all(v.status is Status.ENTAILED for v in b.step_verdicts)
    assert Tier.ZERO in seen and Tier.FULL in seen


@settings(max_examples=300, deadline=None)
@given(st.text())
def test_arbitrary_text_never_raises(text):
    from conftest import record
    from veristep.problem import build_problem

    problem = build_problem(record("hattie.json"))
    for t in (text, f"<summary>{text}</summary>", f"<think>{text}</think><summary>[{text}]</summary>"):
        b = score_prosfi(t, problem)
        assert b.tier in Tier


_IDENT = st.from_regex(r"[a-z][a-z_]{2,12}", fullmatch=True)


@settings(max_examples=60, deadline=None)
@given(pred=_IDENT, which=st.integers(0, 1))
def test_tamper_sensitivity(pred, which):
    from conftest import record
    from veristep.problem import build_problem

    problem = build_problem(record("hattie.json"))
    known = {"stands_up_for_principles", "gains_community_respect", "has_moral_courage", "forall", "exists"}
    if pred in known:
        return
    steps = [S1, step("s2", ["h1", "s1"], "gains_community_respect Hattie"),
             step("h_goal_false", ["s2"], "¬(¬gains_community_respect Hattie)")]
    assert score_prosfi(wrap(steps), problem).tier is Tier.FULL
    steps[which] = {**steps[which], "conclusion": f"{pred} Hattie"}
    assert score_prosfi(wrap(steps), problem).tier is Tier.OPTION_ONLY


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from([c[1] for c in PROSFI_CASES if c[1] is not None]), max_size=6))
def test_batch_equals_map(texts):
    from conftest import record
    from veristep.problem import build_problem

    problem = build_problem(record("hattie.json"))
    batch = score_batch([(problem, texts)])
    assert batch == [[score(t, problem) for t in texts]]
