"""Self-contained synthetic backend: a softmax world with known ground truth.

Each question gets a derived logit vector over m candidate answer strings;
index 0 is the designated correct answer. Sampling at temperature tau draws
from softmax(logits / tau) through the inverse CDF, so the tau -> 0 limit is
exactly the argmax candidate. Judges are exact-match (optionally corrupted by
a misjudge rate), which makes whole pipeline runs reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import CapabilityError, ValidationError
from ..seeding import derive_seed
from ..temperature import TemperatureSchedule
from ..types import CorrectnessRecord, GenerationSample, Question, SampleSet
from .base import Backend, BackendConfig, BackendKind, DEFAULT_CORRECTNESS_TEMPERATURE
from .prompts import PTrueExemplar

__all__ = ["SyntheticWorld", "SyntheticBackend", "make_dataset"]

# Per-question bonus on the correct candidate's logit: N(_SKILL_MEAN, _SKILL_SD).
# Chosen so accuracy lands mid-range and varies question to question.
_SKILL_MEAN = 1.0
_SKILL_SD = 1.5


@dataclass(frozen=True)
class SyntheticWorld:
    """Deterministic ground truth: question id -> logits over m candidates."""

    rng_seed: int
    vocab_per_question: int = 8
    logit_spread: float = 1.0

    def __post_init__(self) -> None:
        if self.vocab_per_question < 2:
            raise ValidationError(
                f"vocab_per_question must be >= 2, got {self.vocab_per_question}"
            )
        if not math.isfinite(self.logit_spread) or self.logit_spread <= 0:
            raise ValidationError(
                f"logit_spread must be a positive real, got {self.logit_spread!r}"
            )

    def question_logits(self, question_id: str) -> np.ndarray:
        rng = np.random.default_rng(derive_seed(self.rng_seed, "logits", question_id))
        logits = self.logit_spread * rng.standard_normal(self.vocab_per_question)
        logits[0] += _SKILL_MEAN + _SKILL_SD * rng.standard_normal()
        return logits

    def candidates(self, question_id: str) -> tuple[str, ...]:
        # Word counts vary with j so joint and length-normalized sequence
        # weights genuinely differ on synthetic data.
        return tuple(
            " ".join(["answer", str(j), "for", question_id] + ["indeed"] * (j % 3))
            for j in range(self.vocab_per_question)
        )

    def correct_answer(self, question_id: str) -> str:
        return self.candidates(question_id)[0]

    def distribution(self, question_id: str, temperature: float) -> np.ndarray:
        """softmax(logits / temperature) for this question."""
        if not math.isfinite(temperature) or temperature <= 0:
            raise ValidationError(
                f"temperature must be a positive real, got {temperature!r}"
            )
        scaled = self.question_logits(question_id) / temperature
        scaled -= scaled.max()
        probs = np.exp(scaled)
        return probs / probs.sum()


class SyntheticBackend(Backend):
    """Backend over a SyntheticWorld; all four roles derive from the world."""

    def __init__(
        self,
        world: SyntheticWorld,
        *,
        model_name: Optional[str] = None,
        wants_logprobs: bool = True,
        misjudge_rate: float = 0.0,
        max_parallel: int = 1,
    ) -> None:
        if not (0.0 <= misjudge_rate <= 1.0):
            raise ValidationError(
                f"misjudge_rate must lie in [0, 1], got {misjudge_rate!r}"
            )
        self.world = world
        self.misjudge_rate = misjudge_rate
        self.config = BackendConfig(
            kind=BackendKind.SYNTHETIC,
            model_name=model_name or f"synthetic-s{world.logit_spread:g}",
            max_parallel=max_parallel,
            wants_logprobs=wants_logprobs,
        )

    def _draw(self, cumulative: np.ndarray, u: float) -> int:
        index = int(np.searchsorted(cumulative, u, side="right"))
        return min(index, len(cumulative) - 1)

    def _sample(
        self,
        question_id: str,
        temperature: float,
        u: float,
        base_logprob_of: np.ndarray,
        candidates: tuple[str, ...],
        with_logprobs: bool,
    ) -> GenerationSample:
        cumulative = np.cumsum(self.world.distribution(question_id, temperature))
        j = self._draw(cumulative, u)
        text = candidates[j]
        logprobs: Optional[tuple[float, ...]] = None
        if with_logprobs:
            # Recorded under the base (tau = 1) distribution, the analog of an
            # API reporting temperature-unadjusted likelihoods, and spread
            # evenly over the answer's whitespace tokens.
            total = float(base_logprob_of[j])
            n_tokens = len(text.split())
            logprobs = (min(total / n_tokens, 0.0),) * n_tokens
        return GenerationSample(text=text, temperature=temperature, token_logprobs=logprobs)

    def generate(
        self,
        question: Question,
        schedule: TemperatureSchedule,
        correctness_temperature: float = DEFAULT_CORRECTNESS_TEMPERATURE,
    ) -> SampleSet:
        candidates = self.world.candidates(question.id)
        base = self.world.distribution(question.id, 1.0)
        base_logprob = np.log(base)
        rng = np.random.default_rng(
            derive_seed(
                self.world.rng_seed,
                "generate",
                question.id,
                *schedule.values,
                correctness_temperature,
            )
        )
        draws = rng.random(schedule.k + 1)
        samples = tuple(
            self._sample(
                question.id,
                tau,
                draws[i],
                base_logprob,
                candidates,
                self.supports_logprobs,
            )
            for i, tau in enumerate(schedule.values)
        )
        low = self._sample(
            question.id,
            correctness_temperature,
            draws[schedule.k],
            base_logprob,
            candidates,
            with_logprobs=False,
        )
        return SampleSet(
            question_id=question.id, samples=samples, low_temp_answer=low
        )

    def judge_entailment(self, question_text: str, answer_a: str, answer_b: str) -> bool:
        return answer_a == answer_b

    def judge_correctness(self, question: Question, answer_text: str) -> CorrectnessRecord:
        truth = answer_text == self.world.correct_answer(question.id)
        if self.misjudge_rate > 0.0:
            rng = np.random.default_rng(
                derive_seed(self.world.rng_seed, "misjudge", question.id, answer_text)
            )
            if rng.random() < self.misjudge_rate:
                truth = not truth
        return CorrectnessRecord(
            question_id=question.id, correct=truth, judge_id=self.backend_id
        )

    def p_true_query(
        self,
        question: Question,
        candidate_answers: Sequence[str],
        scored_answer: str,
        few_shot: Sequence[PTrueExemplar] = (),
    ) -> float:
        if not self.supports_logprobs:
            raise CapabilityError(
                f"{self.backend_id}: backend is configured without likelihoods, "
                f"so the self-check probability is unavailable"
            )
        candidates = self.world.candidates(question.id)
        if scored_answer not in candidates:
            return 0.0
        base = self.world.distribution(question.id, 1.0)
        return float(base[candidates.index(scored_answer)])


def make_dataset(world: SyntheticWorld, dataset_id: str, n_questions: int) -> list[Question]:
    """Questions whose reference answers are the world's designated-correct ones."""
    if n_questions < 1:
        raise ValidationError(f"need at least one question, got {n_questions}")
    questions = []
    for i in range(n_questions):
        qid = f"{dataset_id}/q{i:04d}"
        questions.append(
            Question(
                id=qid,
                text=f"synthetic question {qid}",
                reference_answer=world.correct_answer(qid),
            )
        )
    return questions
