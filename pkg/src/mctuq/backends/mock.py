"""Scripted backend: returns exactly what it was told to, in order."""

from __future__ import annotations

import json
import os
from collections import deque
from typing import Mapping, Optional, Sequence

from ..errors import BackendError, ValidationError
from ..temperature import TemperatureSchedule
from ..types import CorrectnessRecord, GenerationSample, Question, SampleSet
from .base import Backend, BackendConfig, BackendKind, DEFAULT_CORRECTNESS_TEMPERATURE
from .prompts import PTrueExemplar

__all__ = ["MockBackend"]


class MockBackend(Backend):
    """Deterministic backend driven by pre-scripted queues.

    `completions` feeds the scheduled samples one text per entry;
    `low_temp_completions` feeds the judged answer, falling back to the last
    scheduled sample's text when its queue is empty. Entailment verdicts come
    from an ordered-pair table, correctness and p-true from call-order queues.
    Running any queue dry is a scripting bug and raises BackendError.
    """

    def __init__(
        self,
        *,
        completions: Sequence[str] = (),
        completion_logprobs: Sequence[Optional[Sequence[float]]] = (),
        low_temp_completions: Sequence[str] = (),
        entailments: Optional[Mapping[tuple[str, str], bool]] = None,
        default_entailment: Optional[bool] = None,
        correctness: Sequence[bool] = (),
        p_true: Sequence[float] = (),
        model_name: str = "mock",
        wants_logprobs: bool = False,
        max_parallel: int = 1,
    ) -> None:
        self.config = BackendConfig(
            kind=BackendKind.MOCK,
            model_name=model_name,
            max_parallel=max_parallel,
            wants_logprobs=wants_logprobs,
        )
        self._completions = deque(completions)
        self._completion_logprobs = deque(completion_logprobs)
        self._low_temp = deque(low_temp_completions)
        self._entailments = dict(entailments or {})
        self._default_entailment = default_entailment
        self._correctness = deque(correctness)
        self._p_true = deque(p_true)

    @classmethod
    def from_script(cls, path: str | os.PathLike[str]) -> "MockBackend":
        """Build from a JSON script file (the CLI's --script flag)."""
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValidationError(f"{path}: mock script must be a JSON object")
        entailments = {
            (a, b): bool(verdict) for a, b, verdict in raw.get("entailments", [])
        }
        return cls(
            completions=raw.get("completions", []),
            completion_logprobs=raw.get("completion_logprobs", []),
            low_temp_completions=raw.get("low_temp_completions", []),
            entailments=entailments,
            default_entailment=raw.get("default_entailment"),
            correctness=[bool(v) for v in raw.get("correctness", [])],
            p_true=[float(v) for v in raw.get("p_true", [])],
            model_name=raw.get("model_name", "mock"),
            wants_logprobs=bool(raw.get("wants_logprobs", False)),
        )

    def _next_completion(self, question_id: str) -> tuple[str, Optional[tuple[float, ...]]]:
        if not self._completions:
            raise BackendError(
                f"question {question_id!r}: mock completion script exhausted"
            )
        text = self._completions.popleft()
        logprobs: Optional[tuple[float, ...]] = None
        if self._completion_logprobs:
            scripted = self._completion_logprobs.popleft()
            if scripted is not None:
                logprobs = tuple(float(x) for x in scripted)
        return text, logprobs

    def generate(
        self,
        question: Question,
        schedule: TemperatureSchedule,
        correctness_temperature: float = DEFAULT_CORRECTNESS_TEMPERATURE,
    ) -> SampleSet:
        samples = []
        for tau in schedule.values:
            text, logprobs = self._next_completion(question.id)
            samples.append(
                GenerationSample(
                    text=text,
                    temperature=tau,
                    token_logprobs=logprobs if self.supports_logprobs else None,
                )
            )
        if self._low_temp:
            low_text = self._low_temp.popleft()
        else:
            low_text = samples[-1].text
        return SampleSet(
            question_id=question.id,
            samples=tuple(samples),
            low_temp_answer=GenerationSample(
                text=low_text, temperature=correctness_temperature
            ),
        )

    def judge_entailment(self, question_text: str, answer_a: str, answer_b: str) -> bool:
        key = (answer_a, answer_b)
        if key in self._entailments:
            return self._entailments[key]
        if self._default_entailment is not None:
            return self._default_entailment
        raise BackendError(
            f"unscripted entailment query {key!r}; add it to the mock's table"
        )

    def judge_correctness(self, question: Question, answer_text: str) -> CorrectnessRecord:
        if not self._correctness:
            raise BackendError(
                f"question {question.id!r}: mock correctness script exhausted"
            )
        return CorrectnessRecord(
            question_id=question.id,
            correct=self._correctness.popleft(),
            judge_id=self.backend_id,
        )

    def p_true_query(
        self,
        question: Question,
        candidate_answers: Sequence[str],
        scored_answer: str,
        few_shot: Sequence[PTrueExemplar] = (),
    ) -> float:
        if not self._p_true:
            raise BackendError(f"question {question.id!r}: mock p_true script exhausted")
        return self._p_true.popleft()
