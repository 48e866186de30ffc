import math

import pytest

from mctuq import ClusterPartition, GenerationSample, Question, SampleSet


def make_sample(text="alpha", temperature=0.5, logprobs=(-0.2, -0.3)):
    lp = None if logprobs is None else tuple(logprobs)
    return GenerationSample(text=text, temperature=temperature, token_logprobs=lp)


def make_set(texts, *, qid="q1", logprobs=None, low_text=None, p_true=None):
    """Build a SampleSet; logprobs is one tuple per sample (None = no logprobs)."""
    if logprobs is None:
        logprobs = [(-0.1,)] * len(texts)
    samples = tuple(
        make_sample(text=t, temperature=0.5, logprobs=lp)
        for t, lp in zip(texts, logprobs)
    )
    low = make_sample(text=low_text if low_text is not None else texts[0],
                      temperature=0.1, logprobs=None)
    return SampleSet(question_id=qid, samples=samples, low_temp_answer=low,
                     p_true_prob=p_true)


def uniform_weight_logprobs(k, n_tokens=1):
    """Per-sample logprob tuples that normalize to uniform weights."""
    return [tuple([math.log(0.5)] * n_tokens)] * k


@pytest.fixture
def question():
    return Question(id="q1", text="what color is the sky?", reference_answer="blue")


class RecordingJudge:
    """Entailment judge scripted by a directional verdict table."""

    def __init__(self, verdicts=None, default=None):
        self.verdicts = dict(verdicts or {})
        self.default = default
        self.log = []

    def judge_entailment(self, question_text, answer_a, answer_b):
        self.log.append((answer_a, answer_b))
        if (answer_a, answer_b) in self.verdicts:
            return self.verdicts[(answer_a, answer_b)]
        if self.default is None:
            raise AssertionError(f"unscripted pair {(answer_a, answer_b)!r}")
        return self.default


class EqualityJudge:
    def judge_entailment(self, question_text, answer_a, answer_b):
        return answer_a == answer_b


def partition(assignment, qid="q1"):
    return ClusterPartition(question_id=qid, assignment=tuple(assignment))
