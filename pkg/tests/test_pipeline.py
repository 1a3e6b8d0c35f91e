import json

import httpx
import pytest

from conftest import fixture_path
from reward_cases import FINAL, S1, WRONG_FINAL, wrap
from veristep.gateway import GatewayConfig
from veristep.pipeline import (
    BadLine,
    canonical_json,
    dtv_table,
    evaluate,
    iter_scored,
    read_candidate_lines,
    score_one,
)
from veristep.problem import load_problems
from veristep.reward import RewardConfig, score_prosfi

TAMPER = wrap([{**S1, "conclusion": "stands_up_for_principles Candy"}, FINAL])
WRONG = wrap([S1, WRONG_FINAL])


@pytest.fixture
def problems():
    return load_problems(fixture_path("proverqa_corpus.jsonl"))[0]


def line(pid, cands):
    return json.dumps({"problem_id": pid, "candidates": cands})


def test_score_one_is_canonical(hattie, hattie_response):
    out = score_one(hattie, hattie_response, RewardConfig())
    data = json.loads(out)
    assert data["problem_id"] == "hattie" and data["reward"] == 1.0 and data["tier"] == "Full"
    assert out == canonical_json(data)
    assert [v["status"] for v in data["step_verdicts"]] == ["Entailed", "Entailed"]


def test_read_lines():
    items = list(read_candidate_lines(["", line("a", ["x"]), "{oops", json.dumps([1]), json.dumps({"problem_id": "a", "candidates": [1]})]))
    assert items[0].problem_id == "a" and items[0].line_no == 2
    assert [type(i) for i in items[1:]] == [BadLine] * 3
    assert items[1].record()["line"] == 3


def test_eight_candidates(problems, hattie_response):
    out = list(iter_scored(problems, [line("hattie", [hattie_response] * 8)], RewardConfig()))
    assert len(out) == 1 and len(out[0][1]) == 8
    assert list(iter_scored(problems, [], RewardConfig())) == []


def test_unknown_problem_continues(problems, hattie_response):
    out = list(iter_scored(problems, [line("nope", ["x"]), line("hattie", [hattie_response])], RewardConfig()))
    assert isinstance(out[0][0], BadLine) and out[0][1] is None
    assert out[1][1][0].value == 1.0


def test_evaluate_hand_values(problems, hattie_response):
    lines = [line("hattie", [hattie_response, TAMPER, WRONG, "garbage"])]
    report = evaluate(problems, lines, RewardConfig())
    ps = report["per_sample"]
    # answers: correct, correct, wrong, none; only the first is a reward hit
    assert ps["answer_correct_rate"] == 50.0 and ps["reward_hit_rate"] == 25.0
    assert ps["soundness_rate"] is None and ps["judged_count"] == 0
    assert report["errors"] == [] and report["correlation"]["per_sample"] is None


def test_evaluate_averages_per_problem(problems, hattie_response):
    lines = [line("hattie", [hattie_response] * 3 + ["bad"]), line("0", ["bad"] * 2)]
    report = evaluate(problems, lines, RewardConfig())
    assert report["per_sample"]["answer_correct_rate"] == pytest.approx(50.0)
    # per problem: 0.75 and 0.0
    assert report["per_problem"]["answer_correct_rate"] == pytest.approx(37.5)
    assert report["per_problem"]["problem_count"] == 2


def test_evaluate_with_judge(problems, hattie_response):
    calls = []

    def handler(request):
        body = json.loads(request.content)
        calls.append(body)
        sound = "stands_up_for_principles Candy" not in body["messages"][0]["content"]
        text = '```json\n{"is_error": %s}\n```' % ("false" if sound else "true")
        return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})

    lines = [line("hattie", [hattie_response, TAMPER, hattie_response, WRONG])]
    report = evaluate(problems, lines, RewardConfig(), None, GatewayConfig(), httpx.MockTransport(handler))
    assert len(calls) == 4
    assert report["judge_verdicts"] == ["Sound", "Unsound", "Sound", "Sound"]
    assert report["per_sample"]["soundness_rate"] == 75.0 and report["per_sample"]["judged_count"] == 4
    m = report["correlation"]["per_sample"]
    assert m[1][1] == 1.0
    # the judge's prompt carries the natural-language problem, without formal statements
    assert "Formal statement" not in calls[0]["messages"][0]["content"]


def test_dtv_table(problems, hattie_response):
    lines = [line("hattie", [TAMPER, WRONG, hattie_response, WRONG])]
    selections, rows, errors = dtv_table(problems, lines, RewardConfig(), [1, 2, 4])
    assert errors == []
    assert selections == [{"problem_id": "hattie", "answer": "h_goal_false", "source": "Verified", "chosen_index": 2, "verified_count": 1}]
    by_n = {r["pool_size"]: r for r in rows}
    assert by_n[1]["verified_share"] == 0.0 and by_n[4]["verified_share"] == 1.0
    assert by_n[4]["accuracy"] == 1.0 and by_n[4]["formal_soundness"] == 1.0
    with pytest.raises(ValueError):
        dtv_table(problems, lines, RewardConfig(), [8])


def test_placeholder_scores_zero(hattie):
    assert score_prosfi("[gateway error ProviderError: HTTP 500]", hattie).value == 0.0
