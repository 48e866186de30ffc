"""Uncertainty quantification for sampled LLM answers, with temperature
schedules that spread a question's samples across a grid instead of
committing to one fixed value.

The pieces compose in pipeline order: build or load a dataset, sample
answers under a temperature strategy, cluster them by bidirectional
entailment, score the clusters with entropy-style estimators, judge
low-temperature answers for correctness, and compare strategies against
oracle, leave-one-out, and random baselines.
"""

from .backends import (
    Backend,
    BackendConfig,
    BackendKind,
    DEFAULT_CORRECTNESS_TEMPERATURE,
    HttpBackend,
    MockBackend,
    SyntheticBackend,
    SyntheticWorld,
    generate_batch,
    make_dataset,
)
from .clustering import CachedEntailmentJudge, EntailmentJudge, cluster_answers
from .errors import (
    BackendError,
    CapabilityError,
    ConfigurationError,
    DegenerateDataError,
    MctuqError,
    ParseError,
    SchemaError,
    ValidationError,
)
from .estimators import (
    NormalizationMode,
    SampleProbabilities,
    discrete_semantic_entropy,
    naive_entropy,
    num_semantic_sets,
    p_true_score,
    score_sample_set,
    semantic_entropy,
    sequence_probabilities,
)
from .harness import (
    ExperimentGrid,
    StrategyRunResult,
    best_avg_loocv,
    cluster_stage,
    default_strategies,
    evaluate_strategy,
    generate_stage,
    label_stage,
    load_grid_config,
    make_backend,
    oracle_select,
    random_baseline,
    run_experiment,
    run_strategy,
    score_stage,
    select_best_avg_tau,
)
from .metrics import (
    MetricReport,
    ScoredLabel,
    aurac,
    auroc,
    bootstrap_ci,
    ci_overlap,
    metric_fn,
    pr_auc,
    relative_delta,
    win_rate,
)
from .records import GenerationRecord
from .report import ReportRow, build_report, build_rows
from .seeding import derive_seed
from .temperature import (
    MCT_STRATEGY,
    RANDOM_FIXED_STRATEGY,
    StrategyTag,
    TemperatureSchedule,
    fixed_schedule,
    fixed_strategy_id,
    mct_grid,
    mct_schedule,
    parse_strategy,
    random_fixed_draw,
    schedule_for_strategy,
)
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

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "MctuqError",
    "ValidationError",
    "ParseError",
    "SchemaError",
    "ConfigurationError",
    "CapabilityError",
    "BackendError",
    "DegenerateDataError",
    # core types
    "Question",
    "GenerationSample",
    "SampleSet",
    "ClusterPartition",
    "CorrectnessRecord",
    "UQScore",
    "EvalOutcome",
    "Estimator",
    "Metric",
    "GenerationRecord",
    # temperature strategies
    "MCT_STRATEGY",
    "RANDOM_FIXED_STRATEGY",
    "StrategyTag",
    "TemperatureSchedule",
    "mct_grid",
    "mct_schedule",
    "fixed_schedule",
    "fixed_strategy_id",
    "random_fixed_draw",
    "parse_strategy",
    "schedule_for_strategy",
    # estimators
    "NormalizationMode",
    "SampleProbabilities",
    "sequence_probabilities",
    "naive_entropy",
    "semantic_entropy",
    "discrete_semantic_entropy",
    "num_semantic_sets",
    "p_true_score",
    "score_sample_set",
    # clustering
    "EntailmentJudge",
    "CachedEntailmentJudge",
    "cluster_answers",
    # metrics
    "ScoredLabel",
    "MetricReport",
    "auroc",
    "pr_auc",
    "aurac",
    "bootstrap_ci",
    "relative_delta",
    "win_rate",
    "ci_overlap",
    "metric_fn",
    # backends
    "Backend",
    "BackendConfig",
    "BackendKind",
    "DEFAULT_CORRECTNESS_TEMPERATURE",
    "HttpBackend",
    "MockBackend",
    "SyntheticBackend",
    "SyntheticWorld",
    "generate_batch",
    "make_dataset",
    # harness
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
    # reporting
    "ReportRow",
    "build_rows",
    "build_report",
    # seeding
    "derive_seed",
]
