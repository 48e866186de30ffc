"""Greedy semantic clustering by bidirectional entailment.

Each sample joins the first existing cluster whose representative (the
cluster's first member) entails it and is entailed by it, both directions
judged separately; otherwise it opens a new cluster. Directional verdicts are
cached per (question, ordered pair) so repeated texts never re-query the judge.
"""

from __future__ import annotations

from typing import Protocol, Sequence

from .types import ClusterPartition

__all__ = ["EntailmentJudge", "CachedEntailmentJudge", "cluster_answers"]


class EntailmentJudge(Protocol):
    def judge_entailment(self, question_text: str, answer_a: str, answer_b: str) -> bool:
        """Whether answer_a entails answer_b in the context of the question."""
        ...


class CachedEntailmentJudge:
    """Memoizes directional verdicts keyed by (question, premise, hypothesis)."""

    def __init__(self, judge: EntailmentJudge) -> None:
        self._judge = judge
        self._cache: dict[tuple[str, str, str], bool] = {}
        self.calls = 0  # queries that reached the underlying judge

    def judge_entailment(self, question_text: str, answer_a: str, answer_b: str) -> bool:
        key = (question_text, answer_a, answer_b)
        if key not in self._cache:
            self.calls += 1
            self._cache[key] = self._judge.judge_entailment(
                question_text, answer_a, answer_b
            )
        return self._cache[key]

    def __len__(self) -> int:
        return len(self._cache)


def cluster_answers(
    judge: EntailmentJudge,
    question_text: str,
    answers: Sequence[str],
    *,
    question_id: str,
) -> ClusterPartition:
    """Greedy first-fit clustering of the answers, in sample order."""
    representatives: list[str] = []
    assignment: list[int] = []
    for answer in answers:
        placed = False
        for cluster_index, rep in enumerate(representatives):
            # Identical text is entailment by definition; never ask a judge
            # to confirm it (a noisy judge could split duplicates).
            # Otherwise the second direction is only queried when the first holds.
            if answer == rep or (
                judge.judge_entailment(question_text, answer, rep)
                and judge.judge_entailment(question_text, rep, answer)
            ):
                assignment.append(cluster_index)
                placed = True
                break
        if not placed:
            assignment.append(len(representatives))
            representatives.append(answer)
    return ClusterPartition(question_id=question_id, assignment=tuple(assignment))
