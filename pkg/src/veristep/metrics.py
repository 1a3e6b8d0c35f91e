"""Answer-correct, reward-hit and soundness rates plus their correlation matrix."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

COLUMNS = ("answer_correct", "reward_hit", "judged_sound")


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class ExampleOutcome:
    problem_id: str
    answer_correct: bool
    reward_hit: bool
    judged_sound: bool | None = None

    @property
    def formal_sound(self) -> bool:
        return self.reward_hit and self.answer_correct


@dataclass(frozen=True)
class MetricsReport:
    answer_correct_rate: float
    reward_hit_rate: float
    soundness_rate: float | None
    formal_soundness_rate: float
    sample_count: int
    judged_count: int
    problem_count: int | None = None

    def to_dict(self) -> dict:
        return {
            "answer_correct_rate": self.answer_correct_rate,
            "reward_hit_rate": self.reward_hit_rate,
            "soundness_rate": self.soundness_rate,
            "formal_soundness_rate": self.formal_soundness_rate,
            "sample_count": self.sample_count,
            "judged_count": self.judged_count,
            "problem_count": self.problem_count,
        }


def _pct(count: float, total: int) -> float:
    return 100.0 * count / total


def compute_rates(outcomes: Sequence[ExampleOutcome]) -> MetricsReport:
    """Percent rates; soundness is over judged outcomes only (None if none were judged)."""
    if not outcomes:
        raise EmptyInput("no outcomes")
    n = len(outcomes)
    judged = [o.judged_sound for o in outcomes if o.judged_sound is not None]
    return MetricsReport(
        answer_correct_rate=_pct(sum(o.answer_correct for o in outcomes), n),
        reward_hit_rate=_pct(sum(o.reward_hit for o in outcomes), n),
        soundness_rate=_pct(sum(judged), len(judged)) if judged else None,
        formal_soundness_rate=_pct(sum(o.formal_sound for o in outcomes), n),
        sample_count=n,
        judged_count=len(judged),
    )


def aggregate_multi_sample(per_sample: Mapping[str, Sequence[ExampleOutcome]]) -> MetricsReport:
    """Per-problem means first, then an unweighted mean over problems."""
    if not per_sample:
        raise EmptyInput("no problems")
    acc, hit, formal, sound = [], [], [], []
    judged_total = samples = 0
    for pid, outs in per_sample.items():
        if not outs:
            raise EmptyInput(f"problem {pid} has no samples")
        k = len(outs)
        samples += k
        acc.append(sum(o.answer_correct for o in outs) / k)
        hit.append(sum(o.reward_hit for o in outs) / k)
        formal.append(sum(o.formal_sound for o in outs) / k)
        judged = [o.judged_sound for o in outs if o.judged_sound is not None]
        judged_total += len(judged)
        if judged:
            sound.append(sum(judged) / len(judged))
    m = len(per_sample)
    return MetricsReport(
        answer_correct_rate=100.0 * sum(acc) / m,
        reward_hit_rate=100.0 * sum(hit) / m,
        soundness_rate=100.0 * sum(sound) / len(sound) if sound else None,
        formal_soundness_rate=100.0 * sum(formal) / m,
        sample_count=samples,
        judged_count=judged_total,
        problem_count=m,
    )


def _pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return None
    return sxy / math.sqrt(sxx * syy)


def _matrix(columns: list[list[float]]) -> list[list[float | None]]:
    k = len(columns)
    out: list[list[float | None]] = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            if i == j:
                out[i][i] = 1.0 if _pearson(columns[i], columns[i]) is not None else None
            else:
                out[i][j] = out[j][i] = _pearson(columns[i], columns[j])
    return out


def correlation_matrix(outcomes: Sequence[ExampleOutcome]) -> list[list[float | None]]:
    """3x3 Pearson (phi) matrix over answer_correct, reward_hit, judged_sound.

    Only outcomes carrying a judge verdict contribute, so all three columns are
    aligned. Undefined entries (a constant column) are None.
    """
    rows = [o for o in outcomes if o.judged_sound is not None]
    if len(rows) < 2:
        raise EmptyInput("correlation needs at least two judged outcomes")
    cols = [[float(getattr(o, c)) for o in rows] for c in COLUMNS]
    return _matrix(cols)


def correlation_matrix_per_problem(per_sample: Mapping[str, Sequence[ExampleOutcome]]) -> list[list[float | None]]:
    """Same statistic over per-problem mean indicators."""
    cols: list[list[float]] = [[], [], []]
    for outs in per_sample.values():
        judged = [o for o in outs if o.judged_sound is not None]
        if not judged:
            continue
        for col, name in zip(cols, COLUMNS):
            col.append(sum(float(getattr(o, name)) for o in judged) / len(judged))
    if len(cols[0]) < 2:
        raise EmptyInput("correlation needs at least two judged problems")
    return _matrix(cols)


def matrix_to_csv(matrix: list[list[float | None]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["", *COLUMNS])
    for name, row in zip(COLUMNS, matrix):
        w.writerow([name, *("" if v is None else repr(v) for v in row)])
    return buf.getvalue()
