"""Command-line interface.

Subcommands mirror the pipeline stages (generate, cluster, label, score,
evaluate, report) plus an end-to-end synthetic run (simulate). Exit codes:
0 success, 1 validation or usage problems, 2 backend transport failures,
3 degenerate data (a metric was undefined on the inputs).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import records
from .backends import BackendConfig, BackendKind, SyntheticWorld, make_dataset
from .errors import (
    BackendError,
    DegenerateDataError,
    MctuqError,
    ValidationError,
)
from .estimators import NormalizationMode
from .harness import (
    ExperimentGrid,
    cluster_stage,
    default_strategies,
    evaluate_strategy,
    generate_stage,
    label_stage,
    load_grid_config,
    make_backend,
    run_experiment,
    score_stage,
)
from .report import build_report
from .seeding import derive_seed
from .types import Estimator, Metric

__all__ = ["main", "main_entry"]

_DEFAULT_SPREADS = "0.6,1.0,1.5,2.2"


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems via exit code 2; we reserve 2 for
    backend transport failures, so usage problems become ValidationError."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _csv_estimators(text: str) -> tuple[Estimator, ...]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ValidationError("estimator list is empty")
    try:
        return tuple(Estimator(name) for name in names)
    except ValueError:
        valid = ", ".join(e.value for e in Estimator)
        raise ValidationError(
            f"unknown estimator in {text!r}; valid names: {valid}"
        ) from None


def _csv_metrics(text: str) -> tuple[Metric, ...]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ValidationError("metric list is empty")
    try:
        return tuple(Metric(name) for name in names)
    except ValueError:
        valid = ", ".join(m.value for m in Metric)
        raise ValidationError(f"unknown metric in {text!r}; valid names: {valid}") from None


def _csv_floats(text: str) -> tuple[float, ...]:
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if not parts:
        raise ValidationError("float list is empty")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"expected comma-separated floats, got {text!r}") from None


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("backend")
    group.add_argument(
        "--backend", required=True, choices=[k.value for k in BackendKind],
        help="which answer/judge backend to use",
    )
    group.add_argument("--model", default="", help="model name (http; label for synthetic)")
    group.add_argument("--base-url", default=None, help="http API base URL (or UQ_API_BASE)")
    group.add_argument("--script", default=None, help="mock backend script (JSON file)")
    group.add_argument("--logit-spread", type=float, default=1.0,
                       help="synthetic: stddev of per-question logits")
    group.add_argument("--vocab", type=int, default=8,
                       help="synthetic: candidate answers per question")
    group.add_argument("--misjudge-rate", type=float, default=0.0,
                       help="synthetic: probability a correctness verdict flips")
    group.add_argument("--world-seed", type=int, default=None,
                       help="synthetic: world seed (defaults to --seed)")
    group.add_argument("--concurrency", type=int, default=1,
                       help="parallel generation requests")
    group.add_argument("--timeout", type=float, default=30.0, help="http request timeout (s)")
    group.add_argument("--no-logprobs", action="store_true",
                       help="do not request token logprobs")


def _build_backend(args: argparse.Namespace):
    kind = BackendKind(args.backend)
    config = BackendConfig(
        kind=kind,
        model_name=args.model,
        base_url=args.base_url,
        max_parallel=args.concurrency,
        request_timeout=args.timeout,
        wants_logprobs=not args.no_logprobs,
    )
    options: dict[str, object] = {}
    if kind is BackendKind.SYNTHETIC:
        seed = args.world_seed if args.world_seed is not None else getattr(args, "seed", 0)
        options = {
            "rng_seed": seed,
            "vocab_per_question": args.vocab,
            "logit_spread": args.logit_spread,
            "misjudge_rate": args.misjudge_rate,
        }
    elif kind is BackendKind.MOCK:
        if not args.script:
            raise ValidationError("--backend mock needs --script")
        options = {"script": args.script}
    return make_backend(config, options, default_seed=getattr(args, "seed", 0))


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_generate(args: argparse.Namespace) -> int:
    questions = records.load_dataset(args.dataset)
    backend = _build_backend(args)
    generations = generate_stage(
        backend=backend,
        questions=questions,
        strategy=args.strategy,
        k=args.k,
        tau_min=args.tmin,
        tau_max=args.tmax,
        seed=args.seed,
        path=args.out,
        correctness_temperature=args.correctness_temperature,
        attach_p_true=Estimator.P_TRUE in args.estimators,
    )
    print(f"{len(generations)} generation records at {args.out}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    questions = records.load_dataset(args.dataset)
    generations = records.load_generations(args.generations)
    backend = _build_backend(args)
    partitions = cluster_stage(
        judge=backend, questions=questions, generations=generations, path=args.out
    )
    print(f"{len(partitions)} cluster partitions at {args.out}")
    return 0


def _cmd_label(args: argparse.Namespace) -> int:
    questions = records.load_dataset(args.dataset)
    generations = records.load_generations(args.generations)
    backend = _build_backend(args)
    labels = label_stage(
        judge=backend, questions=questions, generations=generations, path=args.out
    )
    print(f"{len(labels)} correctness labels at {args.out}")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    generations = records.load_generations(args.generations)
    partitions = {p.question_id: p for p in records.load_partitions(args.clusters)}
    scores, skipped = score_stage(
        generations=generations,
        partitions=partitions,
        estimators=args.estimators,
        path=args.out,
        normalization=NormalizationMode(args.normalization),
    )
    print(f"{len(scores)} scores at {args.out}")
    if skipped:
        names = ", ".join(e.value for e in skipped)
        print(f"skipped estimators without required inputs: {names}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    scores = records.load_scores(args.scores)
    labels = records.load_labels(args.labels)
    outcomes = evaluate_strategy(
        scores,
        labels,
        backend_id=args.backend_id,
        dataset_id=args.dataset_id,
        strategy=args.strategy,
        metrics=args.metrics,
        bootstrap_draws=args.bootstrap,
        seed=args.seed,
    )
    records.append_outcomes(outcomes, args.out)
    print(f"{len(outcomes)} outcomes appended to {args.out}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    outcomes = []
    for path in args.outcomes:
        outcomes.extend(records.load_outcomes(path))
    rows = build_report(
        outcomes,
        args.out,
        random_mode=args.random_mode,
        random_draws=args.random_draws,
        rng_seed=args.seed,
    )
    out = Path(args.out)
    print(f"{len(rows)} report rows")
    for name in ("report.csv", "report.md", "summary.json"):
        print(f"wrote {out / name}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.config:
        grid = load_grid_config(args.config)
        result = run_experiment(grid, out)
        build_report(result.outcomes, out, rng_seed=grid.seeds[0])
        print(f"{len(result.outcomes)} outcomes at {result.outcomes_path}")
        return 0

    spreads = _csv_floats(args.spreads)
    dataset_world = SyntheticWorld(
        rng_seed=derive_seed(args.seed, "dataset-world"), vocab_per_question=args.vocab
    )
    dataset_dir = out / "datasets"
    dataset_dir.mkdir(parents=True, exist_ok=True)
    dataset_paths = []
    for j in range(args.datasets):
        dataset_id = f"synth{j:02d}"
        questions = make_dataset(dataset_world, dataset_id, args.questions)
        path = dataset_dir / f"{dataset_id}.jsonl"
        records.save_dataset(questions, path)
        dataset_paths.append(str(path))
    backends = tuple(
        BackendConfig(kind=BackendKind.SYNTHETIC, model_name=f"synthetic-s{spread:g}")
        for spread in spreads
    )
    backend_options = tuple(
        {
            "rng_seed": derive_seed(args.seed, "world", i),
            "vocab_per_question": args.vocab,
            "logit_spread": spread,
        }
        for i, spread in enumerate(spreads)
    )
    grid = ExperimentGrid(
        backends=backends,
        datasets=tuple(dataset_paths),
        estimators=args.estimators,
        strategies=default_strategies(args.k, args.tmin, args.tmax),
        k=args.k,
        tau_min=args.tmin,
        tau_max=args.tmax,
        seeds=(args.seed,),
        correctness_temperature=args.correctness_temperature,
        bootstrap_draws=args.bootstrap,
        metrics=args.metrics,
        backend_options=backend_options,
    )
    result = run_experiment(grid, out)
    rows = build_report(result.outcomes, out, rng_seed=args.seed)
    print(f"{len(result.outcomes)} outcomes at {result.outcomes_path}")
    print(f"{len(rows)} report rows under {out}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=5, help="samples per question")
    parser.add_argument("--tmin", type=float, default=0.1, help="lowest grid temperature")
    parser.add_argument("--tmax", type=float, default=1.0, help="highest grid temperature")
    parser.add_argument("--seed", type=int, default=0, help="root random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mctuq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("generate", help="sample answers under a temperature strategy")
    p.add_argument("--dataset", required=True, help="dataset JSONL")
    p.add_argument("--out", required=True, help="generations JSONL to write/extend")
    p.add_argument("--strategy", default="mct",
                   help="mct, random-fixed, or fixed:<temperature>")
    _add_grid_flags(p)
    p.add_argument("--correctness-temperature", type=float, default=0.1,
                   help="temperature for the answer that gets graded")
    p.add_argument("--estimators", type=_csv_estimators,
                   default=tuple(Estimator),
                   help="comma-separated estimators (decides whether a truth "
                        "probability is queried)")
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("cluster", help="group sampled answers by bidirectional entailment")
    p.add_argument("--dataset", required=True, help="dataset JSONL")
    p.add_argument("--generations", required=True, help="generations JSONL")
    p.add_argument("--out", required=True, help="clusters JSONL to write/extend")
    p.add_argument("--seed", type=int, default=0, help="root random seed")
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("label", help="judge low-temperature answers for correctness")
    p.add_argument("--dataset", required=True, help="dataset JSONL")
    p.add_argument("--generations", required=True, help="generations JSONL")
    p.add_argument("--out", required=True, help="labels JSONL to write/extend")
    p.add_argument("--seed", type=int, default=0, help="root random seed")
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_label)

    p = sub.add_parser("score", help="compute uncertainty scores from persisted records")
    p.add_argument("--generations", required=True, help="generations JSONL")
    p.add_argument("--clusters", required=True, help="clusters JSONL")
    p.add_argument("--out", required=True, help="scores JSONL to write/extend")
    p.add_argument("--estimators", type=_csv_estimators, default=tuple(Estimator),
                   help="comma-separated estimator names")
    p.add_argument("--normalization",
                   choices=[m.value for m in NormalizationMode],
                   default=NormalizationMode.LENGTH_NORMALIZED.value,
                   help="sequence weight normalization")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("evaluate", help="turn scores and labels into metric outcomes")
    p.add_argument("--scores", required=True, help="scores JSONL")
    p.add_argument("--labels", required=True, help="labels JSONL")
    p.add_argument("--out", required=True, help="outcomes JSONL to append to")
    p.add_argument("--backend-id", required=True, help="backend id for the outcome rows")
    p.add_argument("--dataset-id", required=True, help="dataset id for the outcome rows")
    p.add_argument("--strategy", required=True, help="strategy id for the outcome rows")
    p.add_argument("--metrics", type=_csv_metrics, default=(Metric.AUROC,),
                   help="comma-separated metric names")
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap resamples")
    p.add_argument("--seed", type=int, default=0, help="root random seed")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", help="render comparison tables from outcomes")
    p.add_argument("--outcomes", required=True, nargs="+", help="outcomes JSONL file(s)")
    p.add_argument("--out", required=True, help="directory for report files")
    p.add_argument("--random-mode", choices=["exact", "monte-carlo"], default="exact",
                   help="random baseline: exact expectation or seeded draws")
    p.add_argument("--random-draws", type=int, default=100,
                   help="draws for the monte-carlo random baseline")
    p.add_argument("--seed", type=int, default=0, help="root random seed")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("simulate", help="run the full pipeline on synthetic backends")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", default=None,
                   help="TOML experiment config (overrides the synthetic defaults)")
    p.add_argument("--questions", type=int, default=120, help="questions per dataset")
    p.add_argument("--datasets", type=int, default=5, help="number of datasets")
    p.add_argument("--spreads", default=_DEFAULT_SPREADS,
                   help="comma-separated logit spreads, one synthetic backend each")
    p.add_argument("--vocab", type=int, default=8,
                   help="candidate answers per synthetic question")
    _add_grid_flags(p)
    p.add_argument("--correctness-temperature", type=float, default=0.1,
                   help="temperature for the answer that gets graded")
    p.add_argument("--estimators", type=_csv_estimators, default=tuple(Estimator),
                   help="comma-separated estimator names")
    p.add_argument("--metrics", type=_csv_metrics, default=(Metric.AUROC,),
                   help="comma-separated metric names")
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap resamples")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return int(args.func(args) or 0)
    except SystemExit as exc:
        # argparse --help exits 0; anything else argparse-shaped is usage.
        if exc.code in (None, 0):
            return 0
        return 1 if exc.code == 2 else int(exc.code)
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MctuqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
