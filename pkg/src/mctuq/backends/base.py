"""Backend abstraction: anything that can generate answers and judge them."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from ..errors import BackendError, ValidationError
from ..temperature import TemperatureSchedule
from ..types import CorrectnessRecord, Question, SampleSet
from .prompts import PTrueExemplar

__all__ = ["BackendKind", "BackendConfig", "Backend", "generate_batch"]

DEFAULT_CORRECTNESS_TEMPERATURE = 0.1


class BackendKind(str, Enum):
    HTTP = "http"
    MOCK = "mock"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class BackendConfig:
    """Connection and capability settings shared by all backend kinds."""

    kind: BackendKind
    model_name: str = ""
    base_url: Optional[str] = None
    max_parallel: int = 1
    request_timeout: float = 30.0
    wants_logprobs: bool = True

    def __post_init__(self) -> None:
        if self.max_parallel < 1:
            raise ValidationError(
                f"max_parallel must be >= 1, got {self.max_parallel}"
            )
        if not math.isfinite(self.request_timeout) or self.request_timeout <= 0:
            raise ValidationError(
                f"request_timeout must be a positive real, got {self.request_timeout!r}"
            )


class Backend(ABC):
    """Generation plus the three judge roles, behind one interface.

    Generation backends and judge backends are configured independently; a
    harness may generate with one instance and judge with another.
    """

    config: BackendConfig

    @property
    def backend_id(self) -> str:
        return self.config.model_name or self.config.kind.value

    @property
    def supports_logprobs(self) -> bool:
        return self.config.wants_logprobs

    @abstractmethod
    def generate(
        self,
        question: Question,
        schedule: TemperatureSchedule,
        correctness_temperature: float = DEFAULT_CORRECTNESS_TEMPERATURE,
    ) -> SampleSet:
        """One sample per schedule entry plus the low-temperature answer."""

    @abstractmethod
    def judge_entailment(
        self, question_text: str, answer_a: str, answer_b: str
    ) -> bool:
        """Single-direction entailment verdict."""

    @abstractmethod
    def judge_correctness(self, question: Question, answer_text: str) -> CorrectnessRecord:
        """Grade answer_text against the question's reference answer."""

    @abstractmethod
    def p_true_query(
        self,
        question: Question,
        candidate_answers: Sequence[str],
        scored_answer: str,
        few_shot: Sequence[PTrueExemplar] = (),
    ) -> float:
        """Probability assigned to 'the scored answer is true' (choice-A mass)."""


def generate_batch(
    backend: Backend,
    questions: Sequence[Question],
    schedule_for: Callable[[Question], TemperatureSchedule],
    correctness_temperature: float = DEFAULT_CORRECTNESS_TEMPERATURE,
) -> list[SampleSet]:
    """Generate for many questions, in parallel up to config.max_parallel.

    Results come back in input order regardless of completion order, and a
    failure on any question fails the batch (partial batches are errors).
    """

    def one(question: Question) -> SampleSet:
        try:
            return backend.generate(
                question, schedule_for(question), correctness_temperature
            )
        except BackendError as exc:
            if question.id in str(exc):
                raise
            raise BackendError(f"question {question.id!r}: {exc}") from exc

    workers = backend.config.max_parallel
    if workers == 1 or len(questions) <= 1:
        return [one(q) for q in questions]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, questions))
