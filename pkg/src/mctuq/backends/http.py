"""OpenAI-compatible HTTP backend.

Speaks the chat-completions wire format: POST {base_url}/chat/completions with
model, messages, temperature, and optional logprobs fields. The base URL comes
from the config or the UQ_API_BASE environment variable (it should include any
version prefix, e.g. https://host/v1); the bearer token, when present, comes
from UQ_API_KEY. Transport failures are retried up to 3 attempts with
exponential backoff; judge verdicts that fail to parse are not retried.
"""

from __future__ import annotations

import math
import os
import time
from typing import Any, Optional, Sequence

import requests

from ..errors import BackendError, CapabilityError, ConfigurationError
from ..temperature import TemperatureSchedule
from ..types import CorrectnessRecord, GenerationSample, Question, SampleSet
from .base import Backend, BackendConfig, DEFAULT_CORRECTNESS_TEMPERATURE
from .prompts import (
    PTrueExemplar,
    build_answer_prompt,
    build_correctness_prompt,
    build_entailment_prompt,
    build_p_true_prompt,
    parse_yes_no,
)

__all__ = ["HttpBackend"]

API_BASE_ENV = "UQ_API_BASE"
API_KEY_ENV = "UQ_API_KEY"

_MAX_ATTEMPTS = 3
_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})
_JUDGE_MAX_TOKENS = 8
_P_TRUE_TOP_LOGPROBS = 20


class HttpBackend(Backend):
    def __init__(
        self,
        config: BackendConfig,
        *,
        api_key: Optional[str] = None,
        session: Optional[requests.Session] = None,
        retry_wait: float = 0.5,
    ) -> None:
        base = config.base_url or os.environ.get(API_BASE_ENV)
        if not base:
            raise ConfigurationError(
                f"http backend needs a base URL: set config.base_url or the "
                f"{API_BASE_ENV} environment variable"
            )
        if not config.model_name:
            raise ConfigurationError("http backend needs a model name")
        self.config = config
        self._endpoint = base.rstrip("/") + "/chat/completions"
        self._api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._session = session or requests.Session()
        self._retry_wait = retry_wait

    # -- wire plumbing ------------------------------------------------------

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        return headers

    def _post(self, payload: dict[str, Any]) -> dict[str, Any]:
        last_error = ""
        for attempt in range(_MAX_ATTEMPTS):
            if attempt > 0 and self._retry_wait > 0:
                time.sleep(self._retry_wait * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    self._endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.config.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                continue
            if response.status_code in _RETRYABLE_STATUS:
                last_error = f"server returned {response.status_code}"
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"{self._endpoint}: request failed with status "
                    f"{response.status_code}: {response.text[:200]}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise BackendError(f"{self._endpoint}: non-JSON response: {exc}") from None
        raise BackendError(
            f"{self._endpoint}: giving up after {_MAX_ATTEMPTS} attempts ({last_error})"
        )

    def _complete(
        self,
        prompt: str,
        temperature: float,
        *,
        logprobs: bool = False,
        top_logprobs: Optional[int] = None,
        max_tokens: Optional[int] = None,
    ) -> tuple[str, Optional[tuple[float, ...]], list[dict[str, Any]]]:
        """One completion; returns (text, token logprobs, raw logprob content)."""
        payload: dict[str, Any] = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        }
        if logprobs:
            payload["logprobs"] = True
            if top_logprobs is not None:
                payload["top_logprobs"] = top_logprobs
        if max_tokens is not None:
            payload["max_tokens"] = max_tokens
        data = self._post(payload)
        try:
            choice = data["choices"][0]
            text = choice["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from None
        if not isinstance(text, str):
            raise BackendError("completion content is not a string")
        content: list[dict[str, Any]] = []
        token_logprobs: Optional[tuple[float, ...]] = None
        if logprobs:
            raw = (choice.get("logprobs") or {}).get("content")
            if not raw:
                raise BackendError(
                    "logprobs were requested but the response carries none"
                )
            content = raw
            # Some servers emit tiny positive values from float noise; clamp.
            token_logprobs = tuple(min(float(t["logprob"]), 0.0) for t in raw)
        return text, token_logprobs, content

    # -- backend interface --------------------------------------------------

    def generate(
        self,
        question: Question,
        schedule: TemperatureSchedule,
        correctness_temperature: float = DEFAULT_CORRECTNESS_TEMPERATURE,
    ) -> SampleSet:
        prompt = build_answer_prompt(question.text)
        samples = []
        for tau in schedule.values:
            text, token_logprobs, _ = self._complete(
                prompt, tau, logprobs=self.config.wants_logprobs
            )
            samples.append(
                GenerationSample(
                    text=text.strip(), temperature=tau, token_logprobs=token_logprobs
                )
            )
        low_text, _, _ = self._complete(prompt, correctness_temperature)
        return SampleSet(
            question_id=question.id,
            samples=tuple(samples),
            low_temp_answer=GenerationSample(
                text=low_text.strip(), temperature=correctness_temperature
            ),
        )

    def _verdict(self, prompt: str, context: str) -> bool:
        text, _, _ = self._complete(prompt, 0.0, max_tokens=_JUDGE_MAX_TOKENS)
        verdict = parse_yes_no(text)
        if verdict is None:
            raise BackendError(f"{context}: judge reply {text!r} is not a yes/no verdict")
        return verdict

    def judge_entailment(self, question_text: str, answer_a: str, answer_b: str) -> bool:
        return self._verdict(
            build_entailment_prompt(question_text, answer_a, answer_b), "entailment"
        )

    def judge_correctness(self, question: Question, answer_text: str) -> CorrectnessRecord:
        verdict = self._verdict(
            build_correctness_prompt(question.text, question.reference_answer, answer_text),
            f"correctness of question {question.id!r}",
        )
        return CorrectnessRecord(
            question_id=question.id, correct=verdict, judge_id=self.backend_id
        )

    def p_true_query(
        self,
        question: Question,
        candidate_answers: Sequence[str],
        scored_answer: str,
        few_shot: Sequence[PTrueExemplar] = (),
    ) -> float:
        if not self.config.wants_logprobs:
            raise CapabilityError(
                f"{self.backend_id}: configured without logprobs, cannot read "
                f"the choice-token probability"
            )
        prompt = build_p_true_prompt(
            question.text, candidate_answers, scored_answer, few_shot
        )
        _, _, content = self._complete(
            prompt,
            0.0,
            logprobs=True,
            top_logprobs=_P_TRUE_TOP_LOGPROBS,
            max_tokens=1,
        )
        first = content[0]
        mass = 0.0
        matched = False
        for entry in first.get("top_logprobs") or []:
            if _is_choice_a(entry.get("token", "")):
                mass += math.exp(float(entry["logprob"]))
                matched = True
        if not matched and _is_choice_a(first.get("token", "")):
            mass = math.exp(min(float(first["logprob"]), 0.0))
        return min(mass, 1.0)


def _is_choice_a(token: str) -> bool:
    return token.strip().lstrip("(").rstrip(")") == "A"
