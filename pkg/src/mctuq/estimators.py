"""Uncertainty estimators over a question's sampled answers.

All entropies are in nats (natural log), with the 0 * log 0 = 0 convention.
Sequence weights are computed in log space and normalized with a softmax so
long sequences cannot underflow to an all-zero weight vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import CapabilityError, ValidationError
from .types import ClusterPartition, Estimator, GenerationSample, SampleSet, UQScore

__all__ = [
    "NormalizationMode",
    "SampleProbabilities",
    "sequence_probabilities",
    "naive_entropy",
    "semantic_entropy",
    "discrete_semantic_entropy",
    "num_semantic_sets",
    "p_true_score",
    "score_sample_set",
]


class NormalizationMode(str, Enum):
    """How a sample's token logprobs collapse to a sequence weight."""

    JOINT = "joint"                          # weight ~ exp(sum of logprobs)
    LENGTH_NORMALIZED = "length_normalized"  # weight ~ exp(mean logprob)


@dataclass(frozen=True)
class SampleProbabilities:
    """Normalized per-sample weights p_hat(y | x) over one sample set."""

    weights: tuple[float, ...]
    normalization: NormalizationMode

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValidationError("sample probabilities must be non-empty")
        total = 0.0
        for w in self.weights:
            if not math.isfinite(w) or w < 0.0:
                raise ValidationError(f"sample weight must be a real >= 0, got {w!r}")
            total += w
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(
                f"sample weights must sum to 1 within 1e-9, got {total!r}"
            )

    @property
    def k(self) -> int:
        return len(self.weights)


def _softmax(logits: Sequence[float]) -> tuple[float, ...]:
    top = max(logits)
    exps = [math.exp(x - top) for x in logits]
    total = sum(exps)
    return tuple(e / total for e in exps)


def sequence_probabilities(
    samples: Sequence[GenerationSample],
    mode: NormalizationMode = NormalizationMode.LENGTH_NORMALIZED,
) -> SampleProbabilities:
    """Renormalized sequence weights over the k samples.

    Raises CapabilityError when any sample lacks token logprobs; the caller
    marks logprob-based estimators unavailable instead of failing the run.
    """
    if not samples:
        raise ValidationError("cannot compute sequence probabilities of zero samples")
    log_weights: list[float] = []
    for i, sample in enumerate(samples):
        if sample.token_logprobs is None:
            raise CapabilityError(
                f"sample {i} has no token logprobs; the generating backend does "
                f"not expose likelihoods"
            )
        total = math.fsum(sample.token_logprobs)
        if mode is NormalizationMode.LENGTH_NORMALIZED:
            log_weights.append(total / len(sample.token_logprobs))
        else:
            log_weights.append(total)
    return SampleProbabilities(_softmax(log_weights), mode)


def _entropy(weights: Sequence[float]) -> float:
    acc = 0.0
    for w in weights:
        if w > 0.0:
            acc -= w * math.log(w)
    # -0.0 and tiny negatives from cancellation collapse to exactly 0
    return max(acc, 0.0)


def naive_entropy(probs: SampleProbabilities) -> float:
    """Entropy of the per-sample weights, ignoring meaning: H = -sum w ln w."""
    return _entropy(probs.weights)


def semantic_entropy(probs: SampleProbabilities, partition: ClusterPartition) -> float:
    """Entropy over semantic clusters, each weighted by its members' mass."""
    if probs.k != len(partition.assignment):
        raise ValidationError(
            f"question {partition.question_id!r}: {probs.k} weights vs "
            f"{len(partition.assignment)} cluster assignments"
        )
    masses = [0.0] * partition.num_clusters
    for weight, cluster in zip(probs.weights, partition.assignment):
        masses[cluster] += weight
    return _entropy(masses)


def discrete_semantic_entropy(partition: ClusterPartition) -> float:
    """Cluster entropy from relative frequencies alone (no likelihoods needed)."""
    k = len(partition.assignment)
    counts = [0] * partition.num_clusters
    for cluster in partition.assignment:
        counts[cluster] += 1
    return _entropy([c / k for c in counts])


def num_semantic_sets(partition: ClusterPartition) -> int:
    """Number of semantic clusters among the k samples."""
    return partition.num_clusters


def p_true_score(sample_set: SampleSet) -> float:
    """Uncertainty from a self-check: one minus the judged P(answer is true)."""
    if sample_set.p_true_prob is None:
        raise CapabilityError(
            f"question {sample_set.question_id!r}: no p_true probability was "
            f"recorded; the backend cannot expose choice-token likelihoods"
        )
    return 1.0 - sample_set.p_true_prob


def score_sample_set(
    estimator: Estimator,
    sample_set: SampleSet,
    partition: Optional[ClusterPartition] = None,
    mode: NormalizationMode = NormalizationMode.LENGTH_NORMALIZED,
) -> UQScore:
    """Compute one estimator's score for one question."""
    qid = sample_set.question_id
    if estimator is Estimator.P_TRUE:
        return UQScore(qid, estimator, p_true_score(sample_set))
    if estimator is Estimator.NAIVE_ENTROPY:
        probs = sequence_probabilities(sample_set.samples, mode)
        return UQScore(qid, estimator, naive_entropy(probs))
    if partition is None:
        raise ValidationError(
            f"question {qid!r}: estimator {estimator.value} needs a cluster partition"
        )
    if partition.question_id != qid:
        raise ValidationError(
            f"partition for {partition.question_id!r} paired with samples for {qid!r}"
        )
    if estimator is Estimator.SEMANTIC_ENTROPY:
        probs = sequence_probabilities(sample_set.samples, mode)
        return UQScore(qid, estimator, semantic_entropy(probs, partition))
    if estimator is Estimator.DISCRETE_SEMANTIC_ENTROPY:
        return UQScore(qid, estimator, discrete_semantic_entropy(partition))
    if estimator is Estimator.NUM_SEMANTIC_SETS:
        return UQScore(qid, estimator, float(num_semantic_sets(partition)))
    raise ValidationError(f"unhandled estimator {estimator!r}")
