"""JSONL persistence for every record type.

One JSON object per line, keys sorted, ASCII-escaped: identical records always
serialize to identical bytes. Loaders validate eagerly and report the file
path and 1-based line number for anything malformed.

Schemas:
    dataset      {"id", "question", "reference_answer"}
    generations  {"question_id", "strategy", "samples": [...], "low_temp_answer"
                  : {"text", "temperature"}, "p_true_prob"}
    clusters     {"question_id", "assignment"}
    labels       {"question_id", "correct", "judge_id"}
    scores       {"question_id", "estimator", "score"}
    outcomes     {"backend_id", "dataset_id", "estimator", "strategy",
                  "metric", "point", "ci_low", "ci_high"}
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

from .errors import ParseError, SchemaError, ValidationError
from .types import (
    ClusterPartition,
    CorrectnessRecord,
    Estimator,
    EvalOutcome,
    GenerationSample,
    Metric,
    Question,
    SampleSet,
    UQScore,
)

__all__ = [
    "GenerationRecord",
    "load_dataset",
    "save_dataset",
    "load_generations",
    "save_generations",
    "append_generations",
    "load_partitions",
    "save_partitions",
    "append_partitions",
    "load_labels",
    "save_labels",
    "append_labels",
    "load_scores",
    "save_scores",
    "append_scores",
    "load_outcomes",
    "save_outcomes",
    "append_outcomes",
]


@dataclass(frozen=True)
class GenerationRecord:
    """A SampleSet plus the strategy string it was generated under."""

    strategy: str
    sample_set: SampleSet


# ---------------------------------------------------------------------------
# Line-level plumbing
# ---------------------------------------------------------------------------


def _dump_line(obj: dict[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=True)


def _iter_lines(path: str | os.PathLike[str]) -> Iterator[tuple[int, dict[str, Any]]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: malformed JSON line: {exc}") from None
            if not isinstance(obj, dict):
                raise SchemaError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _write_lines(
    path: str | os.PathLike[str], lines: Iterable[str], *, append: bool = False
) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _field(obj: dict[str, Any], key: str, path: Any, lineno: int) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}:{lineno}: missing required field {key!r}")
    return obj[key]


def _parse_estimator(name: Any, path: Any, lineno: int) -> Estimator:
    try:
        return Estimator(name)
    except ValueError:
        raise SchemaError(f"{path}:{lineno}: unknown estimator name {name!r}") from None


def _parse_metric(name: Any, path: Any, lineno: int) -> Metric:
    try:
        return Metric(name)
    except ValueError:
        raise SchemaError(f"{path}:{lineno}: unknown metric name {name!r}") from None


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------


def load_dataset(path: str | os.PathLike[str]) -> list[Question]:
    questions: list[Question] = []
    seen: dict[str, int] = {}
    for lineno, obj in _iter_lines(path):
        qid = _field(obj, "id", path, lineno)
        text = _field(obj, "question", path, lineno)
        ref = _field(obj, "reference_answer", path, lineno)
        if not isinstance(qid, str) or not isinstance(text, str) or not isinstance(ref, str):
            raise SchemaError(f"{path}:{lineno}: dataset fields must be strings")
        if qid in seen:
            raise ValidationError(
                f"{path}:{lineno}: duplicate question id {qid!r} "
                f"(first seen on line {seen[qid]})"
            )
        seen[qid] = lineno
        try:
            questions.append(Question(id=qid, text=text, reference_answer=ref))
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return questions


def save_dataset(questions: Sequence[Question], path: str | os.PathLike[str]) -> None:
    _write_lines(
        path,
        (
            _dump_line(
                {"id": q.id, "question": q.text, "reference_answer": q.reference_answer}
            )
            for q in questions
        ),
    )


# ---------------------------------------------------------------------------
# Generations
# ---------------------------------------------------------------------------


def _sample_to_obj(sample: GenerationSample) -> dict[str, Any]:
    return {
        "text": sample.text,
        "temperature": sample.temperature,
        "token_logprobs": (
            None if sample.token_logprobs is None else list(sample.token_logprobs)
        ),
    }


def _sample_from_obj(obj: dict[str, Any], path: Any, lineno: int) -> GenerationSample:
    text = _field(obj, "text", path, lineno)
    temperature = _field(obj, "temperature", path, lineno)
    logprobs = obj.get("token_logprobs")
    return GenerationSample(
        text=text,
        temperature=float(temperature),
        token_logprobs=None if logprobs is None else tuple(float(x) for x in logprobs),
    )


def _generation_to_obj(record: GenerationRecord) -> dict[str, Any]:
    ss = record.sample_set
    return {
        "question_id": ss.question_id,
        "strategy": record.strategy,
        "samples": [_sample_to_obj(s) for s in ss.samples],
        "low_temp_answer": {
            "text": ss.low_temp_answer.text,
            "temperature": ss.low_temp_answer.temperature,
        },
        "p_true_prob": ss.p_true_prob,
    }


def load_generations(path: str | os.PathLike[str]) -> list[GenerationRecord]:
    records: list[GenerationRecord] = []
    for lineno, obj in _iter_lines(path):
        qid = _field(obj, "question_id", path, lineno)
        strategy = _field(obj, "strategy", path, lineno)
        raw_samples = _field(obj, "samples", path, lineno)
        raw_low = _field(obj, "low_temp_answer", path, lineno)
        if not isinstance(raw_samples, list) or not isinstance(raw_low, dict):
            raise SchemaError(f"{path}:{lineno}: bad generations record shape")
        try:
            samples = tuple(_sample_from_obj(s, path, lineno) for s in raw_samples)
            low = GenerationSample(
                text=_field(raw_low, "text", path, lineno),
                temperature=float(_field(raw_low, "temperature", path, lineno)),
            )
            p_true = obj.get("p_true_prob")
            ss = SampleSet(
                question_id=qid,
                samples=samples,
                low_temp_answer=low,
                p_true_prob=None if p_true is None else float(p_true),
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
        records.append(GenerationRecord(strategy=strategy, sample_set=ss))
    return records


def save_generations(
    records: Sequence[GenerationRecord], path: str | os.PathLike[str]
) -> None:
    _write_lines(path, (_dump_line(_generation_to_obj(r)) for r in records))


def append_generations(
    records: Sequence[GenerationRecord], path: str | os.PathLike[str]
) -> None:
    _write_lines(path, (_dump_line(_generation_to_obj(r)) for r in records), append=True)


# ---------------------------------------------------------------------------
# Cluster partitions
# ---------------------------------------------------------------------------


def _partition_from_obj(obj: dict[str, Any], path: Any, lineno: int) -> ClusterPartition:
    qid = _field(obj, "question_id", path, lineno)
    assignment = _field(obj, "assignment", path, lineno)
    if not isinstance(assignment, list):
        raise SchemaError(f"{path}:{lineno}: assignment must be a list")
    return ClusterPartition(question_id=qid, assignment=tuple(assignment))


def load_partitions(path: str | os.PathLike[str]) -> list[ClusterPartition]:
    partitions: list[ClusterPartition] = []
    for lineno, obj in _iter_lines(path):
        try:
            partitions.append(_partition_from_obj(obj, path, lineno))
        except SchemaError:
            raise
        except (ValidationError, TypeError) as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return partitions


def _partition_lines(partitions: Sequence[ClusterPartition]) -> Iterator[str]:
    for p in partitions:
        yield _dump_line({"question_id": p.question_id, "assignment": list(p.assignment)})


def save_partitions(
    partitions: Sequence[ClusterPartition], path: str | os.PathLike[str]
) -> None:
    _write_lines(path, _partition_lines(partitions))


def append_partitions(
    partitions: Sequence[ClusterPartition], path: str | os.PathLike[str]
) -> None:
    _write_lines(path, _partition_lines(partitions), append=True)


# ---------------------------------------------------------------------------
# Correctness labels
# ---------------------------------------------------------------------------


def load_labels(path: str | os.PathLike[str]) -> list[CorrectnessRecord]:
    records: list[CorrectnessRecord] = []
    for lineno, obj in _iter_lines(path):
        correct = _field(obj, "correct", path, lineno)
        if not isinstance(correct, bool):
            raise SchemaError(f"{path}:{lineno}: 'correct' must be a boolean")
        try:
            records.append(
                CorrectnessRecord(
                    question_id=_field(obj, "question_id", path, lineno),
                    correct=correct,
                    judge_id=_field(obj, "judge_id", path, lineno),
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return records


def _label_lines(records: Sequence[CorrectnessRecord]) -> Iterator[str]:
    for r in records:
        yield _dump_line(
            {"question_id": r.question_id, "correct": r.correct, "judge_id": r.judge_id}
        )


def save_labels(records: Sequence[CorrectnessRecord], path: str | os.PathLike[str]) -> None:
    _write_lines(path, _label_lines(records))


def append_labels(
    records: Sequence[CorrectnessRecord], path: str | os.PathLike[str]
) -> None:
    _write_lines(path, _label_lines(records), append=True)


# ---------------------------------------------------------------------------
# Scores
# ---------------------------------------------------------------------------


def load_scores(path: str | os.PathLike[str]) -> list[UQScore]:
    records: list[UQScore] = []
    for lineno, obj in _iter_lines(path):
        estimator = _parse_estimator(_field(obj, "estimator", path, lineno), path, lineno)
        try:
            records.append(
                UQScore(
                    question_id=_field(obj, "question_id", path, lineno),
                    estimator=estimator,
                    score=float(_field(obj, "score", path, lineno)),
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return records


def _score_lines(records: Sequence[UQScore]) -> Iterator[str]:
    for r in records:
        yield _dump_line(
            {
                "question_id": r.question_id,
                "estimator": r.estimator.value,
                "score": r.score,
            }
        )


def save_scores(records: Sequence[UQScore], path: str | os.PathLike[str]) -> None:
    _write_lines(path, _score_lines(records))


def append_scores(records: Sequence[UQScore], path: str | os.PathLike[str]) -> None:
    _write_lines(path, _score_lines(records), append=True)


# ---------------------------------------------------------------------------
# Evaluation outcomes
# ---------------------------------------------------------------------------


def load_outcomes(path: str | os.PathLike[str]) -> list[EvalOutcome]:
    records: list[EvalOutcome] = []
    for lineno, obj in _iter_lines(path):
        estimator = _parse_estimator(_field(obj, "estimator", path, lineno), path, lineno)
        metric = _parse_metric(_field(obj, "metric", path, lineno), path, lineno)
        try:
            records.append(
                EvalOutcome(
                    backend_id=_field(obj, "backend_id", path, lineno),
                    dataset_id=_field(obj, "dataset_id", path, lineno),
                    estimator=estimator,
                    strategy=_field(obj, "strategy", path, lineno),
                    metric=metric,
                    point=float(_field(obj, "point", path, lineno)),
                    ci_low=float(_field(obj, "ci_low", path, lineno)),
                    ci_high=float(_field(obj, "ci_high", path, lineno)),
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return records


def _outcome_lines(records: Sequence[EvalOutcome]) -> Iterator[str]:
    for r in records:
        yield _dump_line(
            {
                "backend_id": r.backend_id,
                "dataset_id": r.dataset_id,
                "estimator": r.estimator.value,
                "strategy": r.strategy,
                "metric": r.metric.value,
                "point": r.point,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
            }
        )


def save_outcomes(records: Sequence[EvalOutcome], path: str | os.PathLike[str]) -> None:
    _write_lines(path, _outcome_lines(records))


def append_outcomes(records: Sequence[EvalOutcome], path: str | os.PathLike[str]) -> None:
    _write_lines(path, _outcome_lines(records), append=True)
