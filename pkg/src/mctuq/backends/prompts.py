"""Prompt templates for generation and the judge roles.

These are versioned text assets: changing any wording must bump the version so
runs remain comparable. Keep templates free of trailing whitespace; tests pin
the rendered forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

PROMPT_VERSION = "v1"

ANSWER_TEMPLATE = (
    "Answer the following question as briefly as possible.\n"
    "Question: {question}\n"
    "Answer:"
)

ENTAILMENT_TEMPLATE = (
    "We are judging answers to the question: {question}\n"
    "Statement 1: {premise}\n"
    "Statement 2: {hypothesis}\n"
    "Does Statement 1 semantically entail Statement 2? Reply with yes or no."
)

CORRECTNESS_TEMPLATE = (
    "Grade the proposed answer against the expected answer.\n"
    "Question: {question}\n"
    "Expected answer: {reference}\n"
    "Proposed answer: {answer}\n"
    "Is the proposed answer correct? Reply with yes or no."
)

P_TRUE_TEMPLATE = (
    "Question: {question}\n"
    "Brainstormed answers:\n"
    "{candidates}\n"
    "Possible answer: {answer}\n"
    "Is the possible answer:\n"
    "(A) True\n"
    "(B) False\n"
    "The possible answer is: ("
)


@dataclass(frozen=True)
class PTrueExemplar:
    """Few-shot exemplar for the self-check prompt; callers supply these."""

    question: str
    candidates: tuple[str, ...]
    answer: str
    is_true: bool


def build_answer_prompt(question_text: str) -> str:
    return ANSWER_TEMPLATE.format(question=question_text)


def build_entailment_prompt(question_text: str, premise: str, hypothesis: str) -> str:
    return ENTAILMENT_TEMPLATE.format(
        question=question_text, premise=premise, hypothesis=hypothesis
    )


def build_correctness_prompt(question_text: str, reference: str, answer: str) -> str:
    return CORRECTNESS_TEMPLATE.format(
        question=question_text, reference=reference, answer=answer
    )


def _p_true_block(
    question_text: str, candidates: Sequence[str], answer: str, verdict: str = ""
) -> str:
    listed = "\n".join(f"- {c}" for c in candidates)
    return P_TRUE_TEMPLATE.format(
        question=question_text, candidates=listed, answer=answer
    ) + verdict


def build_p_true_prompt(
    question_text: str,
    candidates: Sequence[str],
    answer: str,
    few_shot: Sequence[PTrueExemplar] = (),
) -> str:
    """Self-check prompt; the next token should be the A/B choice letter."""
    parts = [
        _p_true_block(ex.question, ex.candidates, ex.answer, "A)" if ex.is_true else "B)")
        for ex in few_shot
    ]
    parts.append(_p_true_block(question_text, candidates, answer))
    return "\n\n".join(parts)


def parse_yes_no(text: str) -> Optional[bool]:
    """Leading yes/no verdict, case-insensitive; None when unparseable."""
    token = text.strip().lower().lstrip("\"'([ ").split(None, 1)
    if not token:
        return None
    word = token[0].rstrip(".,:;!?\"')]")
    if word == "yes":
        return True
    if word == "no":
        return False
    return None
