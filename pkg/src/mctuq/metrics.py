"""Discrimination metrics over scored, labeled questions.

Convention throughout: the positive class is *incorrect* answers, so a good
uncertainty score ranks incorrect answers above correct ones and AUROC > 0.5
means the estimator carries signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateDataError, ValidationError
from .types import Metric

__all__ = [
    "ScoredLabel",
    "MetricReport",
    "auroc",
    "pr_auc",
    "aurac",
    "bootstrap_ci",
    "relative_delta",
    "win_rate",
    "ci_overlap",
    "metric_fn",
]


class ScoredLabel(NamedTuple):
    """One question's uncertainty score and whether its answer was incorrect."""

    question_id: str
    score: float
    incorrect: bool


@dataclass(frozen=True)
class MetricReport:
    """Point estimate with a percentile-bootstrap confidence interval."""

    metric: Optional[Metric]
    point: float
    ci_low: float
    ci_high: float
    n: int
    bootstrap_draws: int

    def __post_init__(self) -> None:
        if not (self.ci_low <= self.point <= self.ci_high):
            raise ValidationError(
                f"metric report requires ci_low <= point <= ci_high, got "
                f"({self.ci_low!r}, {self.point!r}, {self.ci_high!r})"
            )
        if self.n < 1:
            raise ValidationError(f"metric report n must be >= 1, got {self.n}")


def _split(items: Sequence[ScoredLabel]) -> tuple[np.ndarray, np.ndarray]:
    if not items:
        raise ValidationError("metric input must be non-empty")
    n = len(items)
    scores = np.fromiter((it.score for it in items), dtype=float, count=n)
    incorrect = np.fromiter((it.incorrect for it in items), dtype=bool, count=n)
    if not np.all(np.isfinite(scores)):
        raise ValidationError("metric scores must be finite")
    return scores, incorrect


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their group's average rank."""
    _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    # Tie group ending at cumulative position c with size m spans ranks
    # c-m+1 .. c, whose average is c - (m-1)/2.
    ends = np.cumsum(counts)
    group_rank = ends - (counts - 1) / 2.0
    return group_rank[inverse]


def auroc(items: Sequence[ScoredLabel]) -> float:
    """Probability a random incorrect item outscores a random correct one.

    Ties count half, which makes this exactly the Mann-Whitney U statistic
    scaled by n_pos * n_neg. Both classes must be present.
    """
    scores, incorrect = _split(items)
    n_pos = int(incorrect.sum())
    n_neg = len(items) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateDataError(
            f"AUROC undefined with a single class ({n_pos} incorrect, {n_neg} correct)"
        )
    ranks = _average_ranks(scores)
    u = float(ranks[incorrect].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def pr_auc(items: Sequence[ScoredLabel]) -> float:
    """Average precision for retrieving incorrect items by descending score.

    Tied scores are handled as one block: precision and recall only advance
    at block boundaries, so item order within a tie cannot matter.
    """
    scores, incorrect = _split(items)
    n_pos = int(incorrect.sum())
    if n_pos == 0:
        raise DegenerateDataError("PR-AUC undefined without any incorrect item")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = incorrect[order]
    ap = 0.0
    tp = 0
    seen = 0
    prev_recall = 0.0
    i = 0
    n = len(items)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        tp += int(sorted_pos[i:j].sum())
        seen += j - i
        recall = tp / n_pos
        precision = tp / seen
        ap += (recall - prev_recall) * precision
        prev_recall = recall
        i = j
    return ap


def aurac(items: Sequence[ScoredLabel], deciles: int = 10) -> float:
    """Mean accuracy of the retained pool across rejection fractions.

    For each f in {0, 1/deciles, ..., (deciles-1)/deciles} the floor(f*n)
    most-uncertain items are rejected (ties broken by ascending question_id)
    and accuracy is taken over what remains.
    """
    if deciles < 1:
        raise ValidationError(f"deciles must be >= 1, got {deciles}")
    if not items:
        raise ValidationError("metric input must be non-empty")
    n = len(items)
    by_uncertainty = sorted(items, key=lambda it: (-it.score, it.question_id))
    # correct_after[r] = number of correct items once the r most-uncertain go
    correct_suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        correct_suffix[i] = correct_suffix[i + 1] + (0 if by_uncertainty[i].incorrect else 1)
    total = 0.0
    for j in range(deciles):
        rejected = math.floor(j * n / deciles)
        kept = n - rejected
        total += correct_suffix[rejected] / kept
    return total / deciles


def bootstrap_ci(
    items: Sequence[ScoredLabel],
    fn: Callable[[Sequence[ScoredLabel]], float],
    draws: int = 1000,
    level: float = 0.95,
    rng_seed: int = 0,
    *,
    resample: bool = True,
    metric: Optional[Metric] = None,
) -> MetricReport:
    """Percentile bootstrap (n-out-of-n with replacement) around fn(items).

    Resamples on which fn is undefined (DegenerateDataError) are discarded and
    redrawn, up to 10x draws attempts; if the target number of defined
    resamples is never reached the data is declared degenerate.
    """
    if draws < 1:
        raise ValidationError(f"bootstrap draws must be >= 1, got {draws}")
    if not (0.0 < level < 1.0):
        raise ValidationError(f"confidence level must lie in (0, 1), got {level!r}")
    point = fn(items)
    n = len(items)
    rng = np.random.default_rng(rng_seed)
    values = np.empty(draws, dtype=float)
    kept = 0
    attempts = 0
    max_attempts = 10 * draws
    while kept < draws and attempts < max_attempts:
        attempts += 1
        if resample:
            index = rng.integers(0, n, size=n)
            drawn = [items[i] for i in index]
        else:
            drawn = list(items)
        try:
            values[kept] = fn(drawn)
        except DegenerateDataError:
            continue
        kept += 1
    if kept < draws:
        raise DegenerateDataError(
            f"metric undefined on more than 90% of bootstrap resamples "
            f"({kept}/{attempts} defined)"
        )
    alpha = (1.0 - level) / 2.0
    ci_low, ci_high = np.percentile(values, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    # The interval must bracket the full-sample point for downstream records.
    return MetricReport(
        metric=metric,
        point=point,
        ci_low=min(float(ci_low), point),
        ci_high=max(float(ci_high), point),
        n=n,
        bootstrap_draws=draws,
    )


def relative_delta(oracle_value: float, method_value: float) -> float:
    """Percent shortfall from the oracle: 100 * (oracle - method) / oracle."""
    if not (oracle_value > 0.0):
        raise ValidationError(
            f"relative delta needs a positive oracle value, got {oracle_value!r}"
        )
    return 100.0 * (oracle_value - method_value) / oracle_value


def win_rate(deltas_a: Sequence[float], deltas_b: Sequence[float]) -> float:
    """Percent of paired comparisons where method a beats b (lower delta).

    Ties count half.
    """
    if len(deltas_a) != len(deltas_b):
        raise ValidationError(
            f"win rate needs equal-length lists, got {len(deltas_a)} and {len(deltas_b)}"
        )
    if not deltas_a:
        raise ValidationError("win rate undefined on empty lists")
    wins = 0.0
    for a, b in zip(deltas_a, deltas_b):
        if a < b:
            wins += 1.0
        elif a == b:
            wins += 0.5
    return 100.0 * wins / len(deltas_a)


def ci_overlap(low_a: float, high_a: float, low_b: float, high_b: float) -> bool:
    """Whether two closed intervals intersect (the parity criterion)."""
    return low_a <= high_b and low_b <= high_a


def metric_fn(metric: Metric) -> Callable[[Sequence[ScoredLabel]], float]:
    """The plain callable behind a metric name."""
    if metric is Metric.AUROC:
        return auroc
    if metric is Metric.PR_AUC:
        return pr_auc
    if metric is Metric.AURAC:
        return aurac
    raise ValidationError(f"unhandled metric {metric!r}")
