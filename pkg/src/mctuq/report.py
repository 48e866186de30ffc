"""Result tables: per-cell comparison rows, CSV/Markdown renderings, summary.

One row compares, for a single (estimator, metric, backend, dataset) cell,
the schedule under study against three references derived from the fixed
runs: the hindsight oracle, the leave-one-out best-average pick, and the
uniform-random expectation. Degradations are percent-of-oracle deltas, so
lower is better and zero means oracle parity.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import ConfigurationError, ValidationError
from .harness import best_avg_loocv, oracle_select, random_baseline
from .metrics import ci_overlap, relative_delta, win_rate
from .temperature import MCT_STRATEGY, parse_strategy, StrategyTag
from .types import Estimator, EvalOutcome, Metric

__all__ = ["ReportRow", "build_rows", "build_report", "render_csv", "render_markdown", "render_summary"]

_ESTIMATOR_TITLES = {
    Estimator.NAIVE_ENTROPY: "Naive Entropy",
    Estimator.SEMANTIC_ENTROPY: "Semantic Entropy",
    Estimator.DISCRETE_SEMANTIC_ENTROPY: "Discrete Semantic Entropy",
    Estimator.NUM_SEMANTIC_SETS: "Semantic Set Count",
    Estimator.P_TRUE: "P(True)",
}

_METRIC_TITLES = {
    Metric.AUROC: "AUROC",
    Metric.PR_AUC: "PR-AUC",
    Metric.AURAC: "AURAC",
}

CSV_COLUMNS = (
    "estimator",
    "metric",
    "backend",
    "dataset",
    "oracle_tau",
    "oracle",
    "oracle_ci_low",
    "oracle_ci_high",
    "mct",
    "mct_ci_low",
    "mct_ci_high",
    "best_avg_tau",
    "best_avg",
    "random",
    "mct_delta_pct",
    "best_avg_delta_pct",
    "random_delta_pct",
    "parity",
)


@dataclass(frozen=True)
class ReportRow:
    """One comparison row; None marks a value that could not be computed."""

    estimator: Estimator
    metric: Metric
    backend_id: str
    dataset_id: str
    oracle_tau: Optional[float] = None
    oracle: Optional[float] = None
    oracle_ci_low: Optional[float] = None
    oracle_ci_high: Optional[float] = None
    mct: Optional[float] = None
    mct_ci_low: Optional[float] = None
    mct_ci_high: Optional[float] = None
    best_avg_tau: Optional[float] = None
    best_avg: Optional[float] = None
    random: Optional[float] = None
    mct_delta_pct: Optional[float] = None
    best_avg_delta_pct: Optional[float] = None
    random_delta_pct: Optional[float] = None
    parity: Optional[bool] = None

    @property
    def complete(self) -> bool:
        return None not in (
            self.oracle, self.mct, self.best_avg, self.random,
            self.mct_delta_pct, self.best_avg_delta_pct, self.random_delta_pct,
        )


def build_rows(
    outcomes: Sequence[EvalOutcome],
    *,
    random_mode: str = "exact",
    random_draws: int = 100,
    rng_seed: int = 0,
) -> list[ReportRow]:
    """Fold raw outcomes into one comparison row per cell."""
    by_key: dict[tuple[Estimator, Metric, str, str], dict[str, EvalOutcome]] = {}
    for outcome in outcomes:
        key = (outcome.estimator, outcome.metric, outcome.backend_id, outcome.dataset_id)
        group = by_key.setdefault(key, {})
        if outcome.strategy in group:
            raise ValidationError(
                f"duplicate outcome for cell {key!r} strategy {outcome.strategy!r}"
            )
        group[outcome.strategy] = outcome

    # The leave-one-out pool spans all cells that share an estimator, metric,
    # and temperature, so gather fixed-point values first.
    fixed_values: dict[tuple[Estimator, Metric], dict[tuple[str, str, float], float]] = {}
    for (estimator, metric, backend_id, dataset_id), group in by_key.items():
        for strategy, outcome in group.items():
            parsed = parse_strategy(strategy)
            if parsed.tag is StrategyTag.FIXED:
                fixed_values.setdefault((estimator, metric), {})[
                    (backend_id, dataset_id, parsed.tau)
                ] = outcome.point

    rows: list[ReportRow] = []
    for key in sorted(
        by_key, key=lambda k: (k[0].value, k[1].value, k[2], k[3])
    ):
        estimator, metric, backend_id, dataset_id = key
        group = by_key[key]
        values_by_tau: dict[float, EvalOutcome] = {}
        for strategy, outcome in group.items():
            parsed = parse_strategy(strategy)
            if parsed.tag is StrategyTag.FIXED:
                values_by_tau[parsed.tau] = outcome

        row = ReportRow(
            estimator=estimator, metric=metric,
            backend_id=backend_id, dataset_id=dataset_id,
        )
        updates: dict[str, object] = {}
        oracle_value: Optional[float] = None
        if values_by_tau:
            oracle_tau, oracle_value = oracle_select(
                {t: o.point for t, o in values_by_tau.items()}
            )
            oracle_outcome = values_by_tau[oracle_tau]
            updates.update(
                oracle_tau=oracle_tau,
                oracle=oracle_value,
                oracle_ci_low=oracle_outcome.ci_low,
                oracle_ci_high=oracle_outcome.ci_high,
                random=random_baseline(
                    {t: o.point for t, o in values_by_tau.items()},
                    mode=random_mode, draws=random_draws, rng_seed=rng_seed,
                ),
            )
        mct_outcome = group.get(MCT_STRATEGY)
        if mct_outcome is not None:
            updates.update(
                mct=mct_outcome.point,
                mct_ci_low=mct_outcome.ci_low,
                mct_ci_high=mct_outcome.ci_high,
            )
        pool = fixed_values.get((estimator, metric), {})
        if pool:
            try:
                best_avg_tau, best_avg = best_avg_loocv(pool, (backend_id, dataset_id))
                updates.update(best_avg_tau=best_avg_tau, best_avg=best_avg)
            except (ConfigurationError, ValidationError):
                # No admissible training cells (or an incomplete grid): leave
                # the leave-one-out columns as gaps rather than fail the report.
                pass
        if oracle_value is not None and oracle_value > 0:
            if "mct" in updates:
                updates["mct_delta_pct"] = relative_delta(oracle_value, updates["mct"])
            if "best_avg" in updates:
                updates["best_avg_delta_pct"] = relative_delta(
                    oracle_value, updates["best_avg"]
                )
            if "random" in updates:
                updates["random_delta_pct"] = relative_delta(
                    oracle_value, updates["random"]
                )
        if mct_outcome is not None and values_by_tau:
            oracle_outcome = values_by_tau[updates["oracle_tau"]]
            updates["parity"] = ci_overlap(
                mct_outcome.ci_low, mct_outcome.ci_high,
                oracle_outcome.ci_low, oracle_outcome.ci_high,
            )
        rows.append(dataclasses.replace(row, **updates))
    return rows


# ---------------------------------------------------------------------------
# Renderings
# ---------------------------------------------------------------------------


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def _fmt_tau(value: Optional[float]) -> str:
    return "" if value is None else f"{value:g}"


def render_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.estimator.value,
                row.metric.value,
                row.backend_id,
                row.dataset_id,
                _fmt_tau(row.oracle_tau),
                _fmt(row.oracle),
                _fmt(row.oracle_ci_low),
                _fmt(row.oracle_ci_high),
                _fmt(row.mct),
                _fmt(row.mct_ci_low),
                _fmt(row.mct_ci_high),
                _fmt_tau(row.best_avg_tau),
                _fmt(row.best_avg),
                _fmt(row.random),
                _fmt(row.mct_delta_pct),
                _fmt(row.best_avg_delta_pct),
                _fmt(row.random_delta_pct),
                "" if row.parity is None else ("1" if row.parity else "0"),
            ]
        )
    return buf.getvalue()


def _md_cell(value: Optional[float], bold: bool = False) -> str:
    if value is None:
        return "—"
    text = f"{value:.4f}"
    return f"**{text}**" if bold else text


def render_markdown(rows: Sequence[ReportRow]) -> str:
    """Markdown tables, one section per (estimator, metric) pair.

    The lowest degradation in each row is bolded; ties all get bolded.
    """
    lines: list[str] = ["# Temperature strategy comparison", ""]
    sections: dict[tuple[Estimator, Metric], list[ReportRow]] = {}
    for row in rows:
        sections.setdefault((row.estimator, row.metric), []).append(row)
    for (estimator, metric) in sorted(
        sections, key=lambda k: (k[0].value, k[1].value)
    ):
        lines.append(f"## {_ESTIMATOR_TITLES[estimator]} ({_METRIC_TITLES[metric]})")
        lines.append("")
        lines.append(
            "| Model | Dataset | Oracle | MCT | Best Avg. | Random "
            "| MCT Δ (%) | Best Avg. Δ (%) | Random Δ (%) |"
        )
        lines.append("|---|---|---|---|---|---|---|---|---|")
        for row in sections[(estimator, metric)]:
            deltas = [row.mct_delta_pct, row.best_avg_delta_pct, row.random_delta_pct]
            present = [d for d in deltas if d is not None]
            lowest = min(present) if present else None
            bold = [d is not None and d == lowest for d in deltas]
            lines.append(
                "| "
                + " | ".join(
                    [
                        row.backend_id,
                        row.dataset_id,
                        _md_cell(row.oracle),
                        _md_cell(row.mct),
                        _md_cell(row.best_avg),
                        _md_cell(row.random),
                        _md_cell(row.mct_delta_pct, bold[0]),
                        _md_cell(row.best_avg_delta_pct, bold[1]),
                        _md_cell(row.random_delta_pct, bold[2]),
                    ]
                )
                + " |"
            )
        lines.append("")
    return "\n".join(lines)


def render_summary(rows: Sequence[ReportRow]) -> dict:
    """Per-metric aggregates over complete rows; gap rows are left out."""
    summary: dict[str, dict] = {}
    by_metric: dict[Metric, list[ReportRow]] = {}
    for row in rows:
        by_metric.setdefault(row.metric, []).append(row)
    for metric, metric_rows in by_metric.items():
        complete = [r for r in metric_rows if r.complete]
        entry: dict[str, object] = {
            "rows": len(metric_rows),
            "complete_rows": len(complete),
        }
        if complete:
            mct = [r.mct_delta_pct for r in complete]
            best = [r.best_avg_delta_pct for r in complete]
            rand = [r.random_delta_pct for r in complete]
            entry["mean_delta_pct"] = {
                "mct": sum(mct) / len(mct),
                "best_avg": sum(best) / len(best),
                "random": sum(rand) / len(rand),
            }
            entry["win_rate_pct"] = {
                "mct_vs_best_avg": win_rate(mct, best),
                "mct_vs_random": win_rate(mct, rand),
            }
            parities = [r.parity for r in complete if r.parity is not None]
            if parities:
                entry["parity_fraction"] = sum(parities) / len(parities)
        summary[metric.value] = entry
    return summary


def build_report(
    outcomes: Sequence[EvalOutcome],
    out_dir: str | Path,
    *,
    random_mode: str = "exact",
    random_draws: int = 100,
    rng_seed: int = 0,
) -> list[ReportRow]:
    """Write report.csv, report.md, and summary.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = build_rows(
        outcomes, random_mode=random_mode, random_draws=random_draws, rng_seed=rng_seed
    )
    (out / "report.csv").write_text(render_csv(rows), encoding="utf-8")
    (out / "report.md").write_text(render_markdown(rows), encoding="utf-8")
    (out / "summary.json").write_text(
        json.dumps(render_summary(rows), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return rows
