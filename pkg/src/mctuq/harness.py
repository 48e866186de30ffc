"""Experiment orchestration: cells, strategy runs, baselines, evaluation.

A cell is one (backend, dataset) pair. Each cell runs every strategy (the
temperature-randomized schedule plus one fixed schedule per grid temperature),
persisting generations, clusters, scores, and labels as JSONL; runs are
resumable because questions already persisted are skipped. Evaluation turns
each strategy's scores and labels into bootstrap-bracketed metric outcomes,
from which the report derives oracle, leave-one-out, and random baselines.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from . import records
from .backends import (
    Backend,
    BackendConfig,
    BackendKind,
    HttpBackend,
    MockBackend,
    SyntheticBackend,
    SyntheticWorld,
    generate_batch,
)
from .clustering import CachedEntailmentJudge, cluster_answers
from .errors import ConfigurationError, CapabilityError, ValidationError
from .estimators import NormalizationMode, score_sample_set
from .metrics import ScoredLabel, bootstrap_ci, metric_fn
from .records import GenerationRecord
from .seeding import derive_seed
from .temperature import (
    StrategyTag,
    fixed_schedule,
    fixed_strategy_id,
    mct_grid,
    mct_schedule,
    parse_strategy,
    random_fixed_draw,
)
from .types import (
    ClusterPartition,
    CorrectnessRecord,
    Estimator,
    EvalOutcome,
    Metric,
    Question,
    UQScore,
)

__all__ = [
    "ExperimentGrid",
    "StrategyRunResult",
    "default_strategies",
    "load_grid_config",
    "make_backend",
    "generate_stage",
    "cluster_stage",
    "score_stage",
    "label_stage",
    "run_strategy",
    "evaluate_strategy",
    "oracle_select",
    "select_best_avg_tau",
    "best_avg_loocv",
    "random_baseline",
    "run_experiment",
]

Cell = tuple[str, str]  # (backend_id, dataset_id)
CellTau = tuple[str, str, float]


def default_strategies(k: int, tau_min: float, tau_max: float) -> tuple[str, ...]:
    """The standard strategy set: mct plus one fixed run per grid temperature."""
    return ("mct",) + tuple(fixed_strategy_id(t) for t in mct_grid(tau_min, tau_max, k))


@dataclass(frozen=True)
class ExperimentGrid:
    """Everything a full experiment needs, minus the questions themselves."""

    backends: tuple[BackendConfig, ...]
    datasets: tuple[str, ...]
    estimators: tuple[Estimator, ...]
    strategies: tuple[str, ...]
    k: int
    tau_min: float
    tau_max: float
    seeds: tuple[int, ...]
    correctness_temperature: float = 0.1
    bootstrap_draws: int = 1000
    metrics: tuple[Metric, ...] = (Metric.AUROC,)
    backend_options: tuple[Mapping[str, object], ...] = ()

    def __post_init__(self) -> None:
        if not self.backends:
            raise ValidationError("experiment grid needs at least one backend")
        if not self.datasets:
            raise ValidationError("experiment grid needs at least one dataset")
        if not self.estimators:
            raise ValidationError("experiment grid needs at least one estimator")
        if not self.seeds:
            raise ValidationError("experiment grid needs at least one seed")
        if self.bootstrap_draws < 1:
            raise ValidationError(
                f"bootstrap_draws must be >= 1, got {self.bootstrap_draws}"
            )
        if self.backend_options and len(self.backend_options) != len(self.backends):
            raise ValidationError(
                "backend_options must be empty or align one-to-one with backends"
            )
        expected = set(default_strategies(self.k, self.tau_min, self.tau_max))
        actual = set(self.strategies)
        if actual != expected:
            raise ValidationError(
                f"strategy set must be exactly the mct strategy plus one fixed "
                f"strategy per grid temperature; expected {sorted(expected)}, "
                f"got {sorted(actual)}"
            )

    def options_for(self, index: int) -> Mapping[str, object]:
        if self.backend_options:
            return self.backend_options[index]
        return {}


_GRID_KEYS = {
    "k",
    "tau_min",
    "tau_max",
    "seed",
    "seeds",
    "estimators",
    "metrics",
    "datasets",
    "strategies",
    "correctness_temperature",
    "bootstrap_draws",
    "backends",
}

_BACKEND_CONFIG_KEYS = {
    "kind",
    "model_name",
    "base_url",
    "max_parallel",
    "request_timeout",
    "wants_logprobs",
}


def load_grid_config(path: str | Path) -> ExperimentGrid:
    """Parse a TOML experiment config into an ExperimentGrid."""
    with open(path, "rb") as fh:
        try:
            raw = _toml.load(fh)
        except _toml.TOMLDecodeError as exc:
            raise ValidationError(f"{path}: invalid TOML: {exc}") from None
    unknown = set(raw) - _GRID_KEYS
    if unknown:
        raise ValidationError(f"{path}: unknown config keys {sorted(unknown)}")
    if "seeds" in raw:
        seeds = tuple(int(s) for s in raw["seeds"])
    elif "seed" in raw:
        seeds = (int(raw["seed"]),)
    else:
        seeds = (0,)
    k = int(raw.get("k", 5))
    tau_min = float(raw.get("tau_min", 0.1))
    tau_max = float(raw.get("tau_max", 1.0))
    try:
        estimators = tuple(
            Estimator(e) for e in raw.get("estimators", [e.value for e in Estimator])
        )
        metrics = tuple(Metric(m) for m in raw.get("metrics", ["auroc"]))
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    configs: list[BackendConfig] = []
    options: list[dict[str, object]] = []
    for entry in raw.get("backends", []):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ValidationError(f"{path}: each [[backends]] table needs a 'kind'")
        try:
            kind = BackendKind(entry["kind"])
        except ValueError:
            raise ValidationError(
                f"{path}: unknown backend kind {entry['kind']!r}"
            ) from None
        configs.append(
            BackendConfig(
                kind=kind,
                model_name=entry.get("model_name", ""),
                base_url=entry.get("base_url"),
                max_parallel=int(entry.get("max_parallel", 1)),
                request_timeout=float(entry.get("request_timeout", 30.0)),
                wants_logprobs=bool(entry.get("wants_logprobs", True)),
            )
        )
        options.append({k2: v for k2, v in entry.items() if k2 not in _BACKEND_CONFIG_KEYS})
    strategies = tuple(raw.get("strategies", default_strategies(k, tau_min, tau_max)))
    return ExperimentGrid(
        backends=tuple(configs),
        datasets=tuple(str(d) for d in raw.get("datasets", [])),
        estimators=estimators,
        strategies=strategies,
        k=k,
        tau_min=tau_min,
        tau_max=tau_max,
        seeds=seeds,
        correctness_temperature=float(raw.get("correctness_temperature", 0.1)),
        bootstrap_draws=int(raw.get("bootstrap_draws", 1000)),
        metrics=metrics,
        backend_options=tuple(options),
    )


def make_backend(
    config: BackendConfig,
    options: Mapping[str, object] | None = None,
    *,
    default_seed: int = 0,
) -> Backend:
    """Instantiate the backend a config describes."""
    opts = dict(options or {})
    if config.kind is BackendKind.SYNTHETIC:
        world = SyntheticWorld(
            rng_seed=int(opts.get("rng_seed", default_seed)),
            vocab_per_question=int(opts.get("vocab_per_question", 8)),
            logit_spread=float(opts.get("logit_spread", 1.0)),
        )
        return SyntheticBackend(
            world,
            model_name=config.model_name or None,
            wants_logprobs=config.wants_logprobs,
            misjudge_rate=float(opts.get("misjudge_rate", 0.0)),
            max_parallel=config.max_parallel,
        )
    if config.kind is BackendKind.MOCK:
        script = opts.get("script")
        if not script:
            raise ConfigurationError("mock backend needs a 'script' option (JSON file)")
        return MockBackend.from_script(str(script))
    return HttpBackend(config)


# ---------------------------------------------------------------------------
# Strategy runs
# ---------------------------------------------------------------------------


def _safe_component(text: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "-" for c in text)


def run_file_prefix(backend_id: str, dataset_id: str, strategy: str) -> str:
    return "__".join(
        (_safe_component(backend_id), _safe_component(dataset_id), _safe_component(strategy))
    )


@dataclass(frozen=True)
class StrategyRunResult:
    """Where one strategy run persisted its records, and what it skipped."""

    backend_id: str
    dataset_id: str
    strategy: str
    generations_path: Path
    clusters_path: Path
    scores_path: Path
    labels_path: Path
    skipped_estimators: tuple[Estimator, ...] = ()


def _schedules_for_run(
    strategy: str,
    questions: Sequence[Question],
    *,
    k: int,
    tau_min: float,
    tau_max: float,
    seed: int,
):
    """Per-question schedule factory implementing the strategy grammar."""
    parsed = parse_strategy(strategy)
    if parsed.tag is StrategyTag.MCT:
        def factory(question: Question):
            return mct_schedule(
                tau_min, tau_max, k, derive_seed(seed, "schedule", strategy, question.id)
            )
        return factory
    if parsed.tag is StrategyTag.RANDOM_FIXED:
        # One draw per run, not per question: the baseline commits to a single
        # fixed temperature for the whole pass.
        grid = mct_grid(tau_min, tau_max, k)
        tau = random_fixed_draw(grid, derive_seed(seed, "schedule", strategy))
        schedule = fixed_schedule(tau, k, StrategyTag.RANDOM_FIXED)
        return lambda question: schedule
    schedule = fixed_schedule(parsed.tau, k)
    return lambda question: schedule


def _check_unique_ids(questions: Sequence[Question]) -> list[str]:
    ids = [q.id for q in questions]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate question ids in the input dataset")
    return ids


def generate_stage(
    *,
    backend: Backend,
    questions: Sequence[Question],
    strategy: str,
    k: int,
    tau_min: float,
    tau_max: float,
    seed: int,
    path: str | Path,
    correctness_temperature: float = 0.1,
    attach_p_true: bool = False,
) -> list[GenerationRecord]:
    """Sample answers for every question not already persisted at path.

    Returns the full record list in input-question order. When attach_p_true
    is set and the backend can serve it, each new record carries the backend's
    probability that the low-temperature answer is true.
    """
    ids = _check_unique_ids(questions)
    path = Path(path)
    existing: dict[str, GenerationRecord] = {}
    if path.exists():
        for record in records.load_generations(path):
            if record.strategy != strategy:
                raise ValidationError(
                    f"{path}: holds strategy {record.strategy!r}, expected {strategy!r}"
                )
            existing[record.sample_set.question_id] = record
    missing = [q for q in questions if q.id not in existing]
    schedule_for = _schedules_for_run(
        strategy, questions, k=k, tau_min=tau_min, tau_max=tau_max, seed=seed
    )
    new_sets = generate_batch(backend, missing, schedule_for, correctness_temperature)
    want_p_true = attach_p_true and backend.supports_logprobs
    new_records = []
    for question, sample_set in zip(missing, new_sets):
        if want_p_true:
            try:
                prob = backend.p_true_query(
                    question, sample_set.texts(), sample_set.low_temp_answer.text
                )
                sample_set = dataclasses.replace(sample_set, p_true_prob=prob)
            except CapabilityError:
                pass
        new_records.append(GenerationRecord(strategy=strategy, sample_set=sample_set))
    if new_records:
        records.append_generations(new_records, path)
    for record in new_records:
        existing[record.sample_set.question_id] = record
    return [existing[qid] for qid in ids]


def cluster_stage(
    *,
    judge: Backend,
    questions: Sequence[Question],
    generations: Sequence[GenerationRecord],
    path: str | Path,
) -> dict[str, ClusterPartition]:
    """Cluster each question's samples by bidirectional entailment.

    Directional judge calls are cached per question, and questions already
    persisted at path are not re-clustered.
    """
    ids = _check_unique_ids(questions)
    question_by_id = {q.id: q for q in questions}
    record_by_id = {r.sample_set.question_id: r for r in generations}
    path = Path(path)
    clustered: set[str] = set()
    if path.exists():
        clustered = {p.question_id for p in records.load_partitions(path)}
    cached = CachedEntailmentJudge(judge)
    new_partitions = []
    for qid in ids:
        if qid in clustered:
            continue
        if qid not in record_by_id:
            raise ValidationError(f"no generation record for question {qid!r}")
        new_partitions.append(
            cluster_answers(
                cached,
                question_by_id[qid].text,
                record_by_id[qid].sample_set.texts(),
                question_id=qid,
            )
        )
    if new_partitions:
        records.append_partitions(new_partitions, path)
    return {p.question_id: p for p in records.load_partitions(path)}


def score_stage(
    *,
    generations: Sequence[GenerationRecord],
    partitions: Mapping[str, ClusterPartition],
    estimators: Sequence[Estimator],
    path: str | Path,
    normalization: NormalizationMode = NormalizationMode.LENGTH_NORMALIZED,
) -> tuple[list[UQScore], tuple[Estimator, ...]]:
    """Score every (question, estimator) pair not already persisted at path.

    An estimator the records cannot serve (missing token logprobs, missing
    truth probability) is skipped for the whole run and reported back rather
    than raised.
    """
    ids = [r.sample_set.question_id for r in generations]
    record_by_id = {r.sample_set.question_id: r for r in generations}
    path = Path(path)
    scored: set[tuple[str, Estimator]] = set()
    if path.exists():
        scored = {(s.question_id, s.estimator) for s in records.load_scores(path)}
    skipped: list[Estimator] = []
    new_scores: list[UQScore] = []
    for estimator in estimators:
        pending = [qid for qid in ids if (qid, estimator) not in scored]
        if not pending:
            continue
        computed: list[UQScore] = []
        unavailable = False
        for qid in pending:
            if qid not in partitions:
                raise ValidationError(f"no cluster partition for question {qid!r}")
            try:
                computed.append(
                    score_sample_set(
                        estimator,
                        record_by_id[qid].sample_set,
                        partitions[qid],
                        normalization,
                    )
                )
            except CapabilityError:
                # The whole run lacks what this estimator needs; skip it
                # rather than abort.
                unavailable = True
                break
        if unavailable:
            skipped.append(estimator)
        else:
            new_scores.extend(computed)
    if new_scores:
        records.append_scores(new_scores, path)
    loaded = records.load_scores(path) if path.exists() else []
    return loaded, tuple(skipped)


def label_stage(
    *,
    judge: Backend,
    questions: Sequence[Question],
    generations: Sequence[GenerationRecord],
    path: str | Path,
) -> list[CorrectnessRecord]:
    """Judge each low-temperature answer for correctness; resumable."""
    ids = _check_unique_ids(questions)
    question_by_id = {q.id: q for q in questions}
    record_by_id = {r.sample_set.question_id: r for r in generations}
    path = Path(path)
    labeled: set[str] = set()
    if path.exists():
        labeled = {r.question_id for r in records.load_labels(path)}
    new_labels = []
    for qid in ids:
        if qid in labeled:
            continue
        if qid not in record_by_id:
            raise ValidationError(f"no generation record for question {qid!r}")
        new_labels.append(
            judge.judge_correctness(
                question_by_id[qid], record_by_id[qid].sample_set.low_temp_answer.text
            )
        )
    if new_labels:
        records.append_labels(new_labels, path)
    return records.load_labels(path)


def run_strategy(
    *,
    backend: Backend,
    questions: Sequence[Question],
    dataset_id: str,
    strategy: str,
    k: int,
    tau_min: float,
    tau_max: float,
    seed: int,
    estimators: Sequence[Estimator],
    out_dir: str | Path,
    entailment_judge: Optional[Backend] = None,
    correctness_judge: Optional[Backend] = None,
    correctness_temperature: float = 0.1,
    normalization: NormalizationMode = NormalizationMode.LENGTH_NORMALIZED,
) -> StrategyRunResult:
    """Generate, cluster, score, and label one cell under one strategy.

    Every artifact goes to out_dir as JSONL. Questions already present in an
    artifact are skipped, so an interrupted run picks up where it stopped.
    Estimators the backend cannot serve are skipped for the whole cell.
    """
    if not questions:
        raise ValidationError("run_strategy needs at least one question")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = run_file_prefix(backend.backend_id, dataset_id, strategy)
    generations_path = out / f"{prefix}.generations.jsonl"
    clusters_path = out / f"{prefix}.clusters.jsonl"
    scores_path = out / f"{prefix}.scores.jsonl"
    labels_path = out / f"{prefix}.labels.jsonl"

    generations = generate_stage(
        backend=backend,
        questions=questions,
        strategy=strategy,
        k=k,
        tau_min=tau_min,
        tau_max=tau_max,
        seed=seed,
        path=generations_path,
        correctness_temperature=correctness_temperature,
        attach_p_true=Estimator.P_TRUE in estimators,
    )
    partitions = cluster_stage(
        judge=entailment_judge or backend,
        questions=questions,
        generations=generations,
        path=clusters_path,
    )
    _, skipped = score_stage(
        generations=generations,
        partitions=partitions,
        estimators=estimators,
        path=scores_path,
        normalization=normalization,
    )
    label_stage(
        judge=correctness_judge or backend,
        questions=questions,
        generations=generations,
        path=labels_path,
    )
    return StrategyRunResult(
        backend_id=backend.backend_id,
        dataset_id=dataset_id,
        strategy=strategy,
        generations_path=generations_path,
        clusters_path=clusters_path,
        scores_path=scores_path,
        labels_path=labels_path,
        skipped_estimators=skipped,
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate_strategy(
    scores: Sequence[UQScore],
    labels: Sequence[CorrectnessRecord],
    *,
    backend_id: str,
    dataset_id: str,
    strategy: str,
    metrics: Sequence[Metric],
    bootstrap_draws: int,
    seed: int,
) -> list[EvalOutcome]:
    """Bootstrap-bracketed outcomes for every (estimator, metric) present."""
    label_by_id: dict[str, bool] = {}
    for record in labels:
        if record.question_id in label_by_id:
            raise ValidationError(f"duplicate label for question {record.question_id!r}")
        label_by_id[record.question_id] = record.correct
    by_estimator: dict[Estimator, list[UQScore]] = {}
    for score in scores:
        by_estimator.setdefault(score.estimator, []).append(score)
    outcomes: list[EvalOutcome] = []
    for estimator in sorted(by_estimator, key=lambda e: e.value):
        rows = sorted(by_estimator[estimator], key=lambda s: s.question_id)
        items = []
        for row in rows:
            if row.question_id not in label_by_id:
                raise ValidationError(
                    f"score for question {row.question_id!r} has no matching label"
                )
            items.append(
                ScoredLabel(row.question_id, row.score, not label_by_id[row.question_id])
            )
        for metric in metrics:
            report = bootstrap_ci(
                items,
                metric_fn(metric),
                draws=bootstrap_draws,
                level=0.95,
                rng_seed=derive_seed(
                    seed, "bootstrap", backend_id, dataset_id, strategy,
                    estimator.value, metric.value,
                ),
                metric=metric,
            )
            outcomes.append(
                EvalOutcome(
                    backend_id=backend_id,
                    dataset_id=dataset_id,
                    estimator=estimator,
                    strategy=strategy,
                    metric=metric,
                    point=report.point,
                    ci_low=report.ci_low,
                    ci_high=report.ci_high,
                )
            )
    return outcomes


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def oracle_select(values_by_tau: Mapping[float, float]) -> tuple[float, float]:
    """Best fixed temperature in hindsight; ties go to the lower temperature."""
    if not values_by_tau:
        raise ValidationError("oracle selection needs at least one temperature")
    best = max(values_by_tau.values())
    tau = min(t for t, v in values_by_tau.items() if v == best)
    return tau, best


def select_best_avg_tau(
    values: Mapping[CellTau, float], test_cell: Cell
) -> float:
    """Pick the temperature with the best average over admissible cells.

    Cells sharing the test cell's backend or its dataset are excluded, and
    their values are never read during selection.
    """
    test_backend, test_dataset = test_cell
    keys = list(values.keys())
    included = sorted(
        {(b, d) for (b, d, _) in keys if b != test_backend and d != test_dataset}
    )
    if not included:
        raise ConfigurationError(
            f"leave-one-out pool for cell {test_cell!r} is empty: every other "
            f"cell shares its backend or dataset"
        )
    taus = sorted({t for (_, _, t) in keys})
    averages: dict[float, float] = {}
    for tau in taus:
        total = 0.0
        count = 0
        for backend_id, dataset_id in included:
            key = (backend_id, dataset_id, tau)
            if key not in values:
                raise ValidationError(
                    f"incomplete grid: no value for cell {(backend_id, dataset_id)!r} "
                    f"at temperature {tau!r}"
                )
            total += values[key]
            count += 1
        averages[tau] = total / count
    best = max(averages.values())
    return min(t for t, v in averages.items() if v == best)


def best_avg_loocv(
    values: Mapping[CellTau, float], test_cell: Cell
) -> tuple[float, float]:
    """Leave-one-out pick plus the test cell's value at the picked temperature."""
    tau = select_best_avg_tau(values, test_cell)
    key = (test_cell[0], test_cell[1], tau)
    if key not in values:
        raise ValidationError(
            f"no value for test cell {test_cell!r} at selected temperature {tau!r}"
        )
    return tau, values[key]


def random_baseline(
    values_by_tau: Mapping[float, float],
    mode: str = "exact",
    draws: int = 100,
    rng_seed: int = 0,
) -> float:
    """Expected value of picking a grid temperature uniformly at random.

    "exact" averages the grid values directly; "monte-carlo" simulates the
    stated number of seeded draws and averages those.
    """
    if not values_by_tau:
        raise ValidationError("random baseline needs at least one temperature")
    taus = sorted(values_by_tau)
    if mode == "exact":
        return sum(values_by_tau[t] for t in taus) / len(taus)
    if mode == "monte-carlo":
        if draws < 1:
            raise ValidationError(f"monte-carlo baseline needs draws >= 1, got {draws}")
        import random as _random

        rng = _random.Random(rng_seed)
        picks = [values_by_tau[rng.choice(taus)] for _ in range(draws)]
        return sum(picks) / draws
    raise ValidationError(f"unknown random baseline mode {mode!r}")


# ---------------------------------------------------------------------------
# Full experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentResult:
    outcomes: tuple[EvalOutcome, ...]
    outcomes_path: Path
    run_results: tuple[StrategyRunResult, ...] = field(repr=False, default=())


def run_experiment(
    grid: ExperimentGrid,
    out_dir: str | Path,
    *,
    questions_by_dataset: Optional[Mapping[str, Sequence[Question]]] = None,
) -> ExperimentResult:
    """Run every cell and strategy in the grid; persist outcomes.jsonl.

    Datasets are loaded from their paths unless questions_by_dataset supplies
    them directly (keyed by dataset id).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = grid.seeds[0]
    loaded: dict[str, list[Question]] = {}
    for dataset in grid.datasets:
        if questions_by_dataset is not None and dataset in questions_by_dataset:
            loaded[dataset] = list(questions_by_dataset[dataset])
        else:
            loaded[dataset] = records.load_dataset(dataset)
        if not loaded[dataset]:
            raise ValidationError(f"dataset {dataset!r} is empty")

    outcomes: list[EvalOutcome] = []
    run_results: list[StrategyRunResult] = []
    for index, config in enumerate(grid.backends):
        backend = make_backend(config, grid.options_for(index), default_seed=seed)
        for dataset in grid.datasets:
            dataset_id = _dataset_id(dataset)
            for strategy in grid.strategies:
                result = run_strategy(
                    backend=backend,
                    questions=loaded[dataset],
                    dataset_id=dataset_id,
                    strategy=strategy,
                    k=grid.k,
                    tau_min=grid.tau_min,
                    tau_max=grid.tau_max,
                    seed=seed,
                    estimators=grid.estimators,
                    out_dir=out / "runs",
                    correctness_temperature=grid.correctness_temperature,
                )
                run_results.append(result)
                outcomes.extend(
                    evaluate_strategy(
                        records.load_scores(result.scores_path),
                        records.load_labels(result.labels_path),
                        backend_id=result.backend_id,
                        dataset_id=dataset_id,
                        strategy=strategy,
                        metrics=grid.metrics,
                        bootstrap_draws=grid.bootstrap_draws,
                        seed=seed,
                    )
                )
    outcomes_path = out / "outcomes.jsonl"
    records.save_outcomes(outcomes, outcomes_path)
    return ExperimentResult(
        outcomes=tuple(outcomes),
        outcomes_path=outcomes_path,
        run_results=tuple(run_results),
    )


def _dataset_id(dataset: str) -> str:
    """A dataset's id is its basename without the .jsonl suffix."""
    name = Path(dataset).name
    return name[: -len(".jsonl")] if name.endswith(".jsonl") else name
