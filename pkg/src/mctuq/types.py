"""Core domain types.

Frozen dataclasses with validating constructors; collections are tuples so
records stay hashable and safe to share. Serialization lives in `records`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import ValidationError

__all__ = [
    "Estimator",
    "Metric",
    "Question",
    "GenerationSample",
    "SampleSet",
    "ClusterPartition",
    "CorrectnessRecord",
    "UQScore",
    "EvalOutcome",
]


class Estimator(str, Enum):
    """Uncertainty estimators, by their wire names."""

    NAIVE_ENTROPY = "ne"
    SEMANTIC_ENTROPY = "se"
    DISCRETE_SEMANTIC_ENTROPY = "dse"
    NUM_SEMANTIC_SETS = "numsets"
    P_TRUE = "ptrue"


class Metric(str, Enum):
    """Evaluation metrics, by their wire names."""

    AUROC = "auroc"
    PR_AUC = "prauc"
    AURAC = "aurac"


# Estimators whose scores require token logprobs from the backend.
LOGPROB_ESTIMATORS = frozenset(
    {Estimator.NAIVE_ENTROPY, Estimator.SEMANTIC_ENTROPY, Estimator.P_TRUE}
)


@dataclass(frozen=True)
class Question:
    """One dataset item."""

    id: str
    text: str
    reference_answer: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("question id must be non-empty")
        if not self.text:
            raise ValidationError(f"question {self.id!r}: text must be non-empty")


@dataclass(frozen=True)
class GenerationSample:
    """One sampled answer and the temperature it was drawn at."""

    text: str
    temperature: float
    token_logprobs: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not (self.temperature > 0.0) or not math.isfinite(self.temperature):
            raise ValidationError(
                f"sample temperature must be a positive real, got {self.temperature!r}"
            )
        if self.token_logprobs is not None:
            if len(self.token_logprobs) == 0:
                raise ValidationError("token_logprobs must be non-empty when present")
            for lp in self.token_logprobs:
                if not math.isfinite(lp) or lp > 0.0:
                    raise ValidationError(
                        f"token logprob must be a finite real <= 0, got {lp!r}"
                    )


@dataclass(frozen=True)
class SampleSet:
    """All generations for one question under one strategy run.

    `samples` holds the k scheduled generations; `low_temp_answer` is the extra
    answer whose correctness gets judged. `p_true_prob`, when present, is the
    judged probability that the low-temperature answer is true.
    """

    question_id: str
    samples: tuple[GenerationSample, ...]
    low_temp_answer: GenerationSample
    p_true_prob: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.question_id:
            raise ValidationError("sample set question_id must be non-empty")
        if len(self.samples) < 2:
            raise ValidationError(
                f"question {self.question_id!r}: a sample set needs at least 2 "
                f"samples, got {len(self.samples)}"
            )
        if self.p_true_prob is not None and not (0.0 <= self.p_true_prob <= 1.0):
            raise ValidationError(
                f"question {self.question_id!r}: p_true_prob must lie in [0, 1], "
                f"got {self.p_true_prob!r}"
            )

    @property
    def k(self) -> int:
        return len(self.samples)

    def texts(self) -> tuple[str, ...]:
        return tuple(s.text for s in self.samples)


@dataclass(frozen=True)
class ClusterPartition:
    """Cluster assignment for one question's samples.

    `assignment[i]` is the cluster index of sample i. Indices are contiguous
    starting at 0, in order of first appearance.
    """

    question_id: str
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.assignment:
            raise ValidationError(
                f"question {self.question_id!r}: cluster assignment must be non-empty"
            )
        seen: set[int] = set()
        next_expected = 0
        for idx in self.assignment:
            if not isinstance(idx, int) or isinstance(idx, bool) or idx < 0:
                raise ValidationError(
                    f"question {self.question_id!r}: cluster indices must be "
                    f"non-negative integers, got {idx!r}"
                )
            if idx not in seen:
                if idx != next_expected:
                    raise ValidationError(
                        f"question {self.question_id!r}: cluster indices must be "
                        f"contiguous in order of first appearance, got {self.assignment}"
                    )
                seen.add(idx)
                next_expected += 1

    @property
    def num_clusters(self) -> int:
        return max(self.assignment) + 1


@dataclass(frozen=True)
class CorrectnessRecord:
    """Judged correctness of one question's low-temperature answer."""

    question_id: str
    correct: bool
    judge_id: str

    def __post_init__(self) -> None:
        if not self.question_id:
            raise ValidationError("correctness record question_id must be non-empty")
        if not self.judge_id:
            raise ValidationError(
                f"question {self.question_id!r}: judge_id must be non-empty"
            )


@dataclass(frozen=True)
class UQScore:
    """One estimator's uncertainty score for one question."""

    question_id: str
    estimator: Estimator
    score: float

    def __post_init__(self) -> None:
        if not self.question_id:
            raise ValidationError("score question_id must be non-empty")
        if not math.isfinite(self.score):
            raise ValidationError(
                f"question {self.question_id!r}: score must be finite, got {self.score!r}"
            )
        est = self.estimator
        if est in (
            Estimator.NAIVE_ENTROPY,
            Estimator.SEMANTIC_ENTROPY,
            Estimator.DISCRETE_SEMANTIC_ENTROPY,
        ):
            # Tiny negative values from float cancellation are rejected here;
            # estimator code clamps before constructing.
            if self.score < 0.0:
                raise ValidationError(
                    f"question {self.question_id!r}: {est.value} score must be "
                    f">= 0, got {self.score!r}"
                )
        elif est is Estimator.NUM_SEMANTIC_SETS:
            if self.score < 1 or self.score != int(self.score):
                raise ValidationError(
                    f"question {self.question_id!r}: numsets score must be a "
                    f"positive integer, got {self.score!r}"
                )
        elif est is Estimator.P_TRUE:
            if not (0.0 <= self.score <= 1.0):
                raise ValidationError(
                    f"question {self.question_id!r}: ptrue score must lie in "
                    f"[0, 1], got {self.score!r}"
                )


@dataclass(frozen=True)
class EvalOutcome:
    """One metric value (with bootstrap CI) for one cell and strategy."""

    backend_id: str
    dataset_id: str
    estimator: Estimator
    strategy: str
    metric: Metric
    point: float
    ci_low: float
    ci_high: float

    def __post_init__(self) -> None:
        for name in ("backend_id", "dataset_id", "strategy"):
            if not getattr(self, name):
                raise ValidationError(f"outcome {name} must be non-empty")
        for name, value in (
            ("point", self.point),
            ("ci_low", self.ci_low),
            ("ci_high", self.ci_high),
        ):
            if not (0.0 <= value <= 1.0):
                raise ValidationError(
                    f"outcome {name} must lie in [0, 1], got {value!r}"
                )
        if not (self.ci_low <= self.point <= self.ci_high):
            raise ValidationError(
                f"outcome requires ci_low <= point <= ci_high, got "
                f"({self.ci_low!r}, {self.point!r}, {self.ci_high!r})"
            )

    @property
    def cell(self) -> tuple[str, str]:
        return (self.backend_id, self.dataset_id)
