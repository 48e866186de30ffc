import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mctuq import (
    DegenerateDataError,
    Metric,
    MetricReport,
    ScoredLabel,
    ValidationError,
    aurac,
    auroc,
    bootstrap_ci,
    ci_overlap,
    metric_fn,
    pr_auc,
    relative_delta,
    win_rate,
)


def items_from(pairs):
    return [
        ScoredLabel(f"q{i:03d}", float(score), bool(incorrect))
        for i, (score, incorrect) in enumerate(pairs)
    ]


def auroc_oracle(items):
    """O(n^2) pairwise count in exact rational arithmetic."""
    pos = [Fraction(it.score) for it in items if it.incorrect]
    neg = [Fraction(it.score) for it in items if not it.incorrect]
    total = Fraction(0)
    for p in pos:
        for q in neg:
            if p > q:
                total += 1
            elif p == q:
                total += Fraction(1, 2)
    return total / (len(pos) * len(neg))


class TestAuroc:
    def test_perfect_separation(self):
        items = items_from([(0.9, True), (0.7, True), (0.4, False), (0.2, False)])
        assert auroc(items) == 1.0

    def test_anti_separation(self):
        items = items_from([(0.9, False), (0.7, False), (0.4, True), (0.2, True)])
        assert auroc(items) == 0.0

    def test_tied_pair_counts_half(self):
        items = items_from([(0.5, True), (0.5, False), (0.7, True), (0.3, False)])
        assert auroc(items) == pytest.approx(0.875, abs=1e-12)

    def test_single_class_is_degenerate(self):
        with pytest.raises(DegenerateDataError):
            auroc(items_from([(0.5, True), (0.7, True)]))
        with pytest.raises(DegenerateDataError):
            auroc(items_from([(0.5, False), (0.7, False)]))

    def test_matches_pairwise_oracle_with_ties(self):
        rng = random.Random(4)
        for _ in range(50):
            n = rng.randint(2, 40)
            items = items_from(
                [(rng.randint(0, 6) / 4.0, rng.random() < 0.4) for _ in range(n)]
            )
            if not any(it.incorrect for it in items) or all(it.incorrect for it in items):
                continue
            assert abs(auroc(items) - float(auroc_oracle(items))) < 1e-12

    def test_complement_symmetry(self):
        rng = random.Random(5)
        for _ in range(30):
            items = items_from(
                [(rng.randint(0, 8) / 8.0, rng.random() < 0.5) for _ in range(20)]
            )
            flipped = [ScoredLabel(it.question_id, it.score, not it.incorrect)
                       for it in items]
            try:
                a = auroc(items)
            except DegenerateDataError:
                continue
            assert abs(a + auroc(flipped) - 1.0) < 1e-12

    def test_doubling_scores_changes_nothing(self):
        # multiplying by 2 is exact in binary floats, so equality is bitwise
        items = items_from([(0.3, True), (0.3, False), (0.9, True), (0.1, False)])
        doubled = [ScoredLabel(it.question_id, it.score * 2.0, it.incorrect)
                   for it in items]
        assert auroc(items) == auroc(doubled)

    def test_empty_input_rejected(self):
        with pytest.raises(ValidationError):
            auroc([])

    def test_nan_scores_rejected(self):
        with pytest.raises(ValidationError):
            auroc(items_from([(math.nan, True), (0.5, False)]))


@st.composite
def scored_items(draw, max_n=25):
    n = draw(st.integers(2, max_n))
    pool = draw(st.integers(1, 6))  # small score pool makes ties frequent
    pairs = [
        (draw(st.integers(0, pool)) / pool, draw(st.booleans())) for _ in range(n)
    ]
    return items_from(pairs)


class TestAurocProperties:
    @given(scored_items())
    @settings(max_examples=60)
    def test_oracle_equivalence(self, items):
        try:
            got = auroc(items)
        except DegenerateDataError:
            return
        assert abs(got - float(auroc_oracle(items))) < 1e-12
        assert 0.0 <= got <= 1.0

    @given(scored_items())
    @settings(max_examples=60)
    def test_permutation_invariance(self, items):
        try:
            a = auroc(items)
        except DegenerateDataError:
            return
        assert auroc(list(reversed(items))) == a


class TestPrAuc:
    def test_all_incorrect(self):
        assert pr_auc(items_from([(0.9, True), (0.1, True)])) == 1.0

    def test_positive_ranked_first(self):
        assert pr_auc(items_from([(0.7, True), (0.3, False)])) == 1.0

    def test_positive_ranked_last(self):
        assert pr_auc(items_from([(0.7, False), (0.3, True)])) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_interleaved(self):
        items = items_from([(0.9, True), (0.8, False), (0.7, True), (0.6, False)])
        assert pr_auc(items) == pytest.approx(1 / 2 + 1 / 3, abs=1e-12)

    def test_tie_block_is_order_independent(self):
        a = items_from([(0.8, True), (0.8, False), (0.5, True)])
        b = items_from([(0.8, False), (0.8, True), (0.5, True)])
        want = 0.25 + 1 / 3  # one mixed block, then the final positive
        assert pr_auc(a) == pytest.approx(want, abs=1e-12)
        assert pr_auc(b) == pytest.approx(want, abs=1e-12)

    def test_all_tied_scores(self):
        items = items_from([(0.5, True), (0.5, False), (0.5, True), (0.5, False)])
        assert pr_auc(items) == pytest.approx(0.5, abs=1e-12)

    def test_no_positive_is_degenerate(self):
        with pytest.raises(DegenerateDataError):
            pr_auc(items_from([(0.9, False), (0.1, False)]))


class TestAurac:
    def test_all_correct(self):
        assert aurac(items_from([(s / 10, False) for s in range(10)])) == 1.0

    def test_all_incorrect(self):
        assert aurac(items_from([(s / 10, True) for s in range(10)])) == 0.0

    def test_ten_item_fixture(self):
        # ten items, the five most-uncertain all incorrect; decile accuracies
        # are 1/2, 5/9, 5/8, 5/7, 5/6 and then five 1s
        items = items_from(
            [(1.0 - i / 10.0, i < 5) for i in range(10)]
        )
        expected = Fraction(1, 2)
        for kept in (9, 8, 7, 6):
            expected += Fraction(5, kept)
        expected += 5
        expected /= 10
        assert expected == Fraction(4147, 5040)
        assert aurac(items) == pytest.approx(float(expected), abs=1e-12)
        assert aurac(items) == pytest.approx(0.8228175, abs=1e-4)

    def test_single_decile_is_raw_accuracy(self):
        items = items_from([(0.9, True), (0.5, False), (0.1, False)])
        assert aurac(items, deciles=1) == pytest.approx(2 / 3, abs=1e-12)

    def test_ties_reject_by_ascending_question_id(self):
        items = [
            ScoredLabel("a", 1.0, False),
            ScoredLabel("b", 1.0, True),
        ]
        # rejecting one item at f=1/2 removes "a" (tie, lower id first),
        # leaving only the incorrect answer
        assert aurac(items, deciles=2) == pytest.approx(0.25, abs=1e-12)

    def test_rejects_bad_args(self):
        with pytest.raises(ValidationError):
            aurac([])
        with pytest.raises(ValidationError):
            aurac(items_from([(0.5, True)]), deciles=0)

    @given(scored_items())
    @settings(max_examples=40)
    def test_deciles_one_property(self, items):
        accuracy = sum(1 for it in items if not it.incorrect) / len(items)
        assert aurac(items, deciles=1) == pytest.approx(accuracy, abs=1e-12)


class TestBootstrap:
    def test_constant_metric(self):
        items = items_from([(0.5, True), (0.6, False), (0.7, True)])
        report = bootstrap_ci(items, lambda _: 0.7, draws=50, rng_seed=1)
        assert (report.point, report.ci_low, report.ci_high) == (0.7, 0.7, 0.7)
        assert report.n == 3
        assert report.bootstrap_draws == 50

    def test_same_seed_same_interval(self):
        items = items_from([(i / 10, i % 3 == 0) for i in range(10)])
        a = bootstrap_ci(items, auroc, draws=200, rng_seed=42)
        b = bootstrap_ci(items, auroc, draws=200, rng_seed=42)
        assert (a.ci_low, a.ci_high) == (b.ci_low, b.ci_high)

    def test_different_seeds_differ(self):
        items = items_from([(i / 10, i % 3 == 0) for i in range(10)])
        lows = {bootstrap_ci(items, auroc, draws=100, rng_seed=s).ci_low
                for s in range(6)}
        assert len(lows) > 1

    def test_resample_disabled_collapses_to_point(self):
        items = items_from([(0.9, True), (0.1, False)])
        report = bootstrap_ci(items, auroc, draws=1, resample=False, rng_seed=0)
        assert report.point == report.ci_low == report.ci_high == 1.0

    def test_interval_always_brackets_the_point(self):
        # a metric whose resampled values sit below the full-sample value
        def unique_or_low(items):
            ids = [it.question_id for it in items]
            return 0.9 if len(set(ids)) == len(ids) else 0.1

        items = items_from([(i / 12, False) for i in range(12)])
        report = bootstrap_ci(items, unique_or_low, draws=100, rng_seed=3)
        assert report.point == 0.9
        assert report.ci_low <= report.point <= report.ci_high
        assert report.ci_low == pytest.approx(0.1)

    def test_degenerate_resamples_are_redrawn(self):
        # 2 of 10 incorrect: some resamples are single-class and get discarded
        items = items_from([(i / 10, i < 2) for i in range(10)])
        report = bootstrap_ci(items, auroc, draws=300, rng_seed=7)
        assert report.bootstrap_draws == 300
        assert 0.0 <= report.ci_low <= report.ci_high <= 1.0

    def test_mostly_undefined_metric_raises(self):
        state = {"calls": 0}

        def fn(items):
            state["calls"] += 1
            if state["calls"] == 1:
                return 0.5
            raise DegenerateDataError("resample rejected")

        items = items_from([(0.5, True), (0.6, False)])
        with pytest.raises(DegenerateDataError, match="90%"):
            bootstrap_ci(items, fn, draws=20, rng_seed=0)

    def test_argument_validation(self):
        items = items_from([(0.5, True), (0.6, False)])
        with pytest.raises(ValidationError):
            bootstrap_ci(items, auroc, draws=0)
        with pytest.raises(ValidationError):
            bootstrap_ci(items, auroc, draws=10, level=1.0)

    def test_metric_tag_round_trips(self):
        items = items_from([(0.9, True), (0.1, False)])
        report = bootstrap_ci(items, auroc, draws=10, rng_seed=0, metric=Metric.AUROC)
        assert report.metric is Metric.AUROC

    def test_report_invariant(self):
        with pytest.raises(ValidationError):
            MetricReport(None, 0.5, 0.6, 0.7, n=3, bootstrap_draws=1)


class TestComparisons:
    def test_relative_delta_exact(self):
        got = relative_delta(0.7462, 0.7498)
        assert got == pytest.approx(-0.4824443848834157, abs=1e-12)
        # agrees with the two-decimal print -0.49 at rounding resolution
        assert got == pytest.approx(-0.49, abs=0.01)

    def test_relative_delta_second_table_row(self):
        assert relative_delta(0.8028, 0.7832) == pytest.approx(2.44, abs=0.005)

    def test_relative_delta_zero_and_sign(self):
        assert relative_delta(0.8, 0.8) == 0.0
        assert relative_delta(0.5, 0.6) < 0  # method beat the oracle

    def test_relative_delta_needs_positive_oracle(self):
        with pytest.raises(ValidationError):
            relative_delta(0.0, 0.5)
        with pytest.raises(ValidationError):
            relative_delta(-0.1, 0.5)

    def test_win_rate_examples(self):
        assert win_rate([1, 2], [3, 1]) == 50.0
        assert win_rate([0, 0, 0], [1, 1, 1]) == 100.0
        assert win_rate([1, 2, 2], [2, 2, 3]) == pytest.approx(250 / 3, abs=1e-9)
        assert win_rate([1, 2, 2], [2, 2, 3]) == pytest.approx(83.33, abs=0.005)

    def test_win_rate_validation(self):
        with pytest.raises(ValidationError):
            win_rate([1], [1, 2])
        with pytest.raises(ValidationError):
            win_rate([], [])

    def test_ci_overlap(self):
        assert ci_overlap(0.1, 0.5, 0.4, 0.9)
        assert ci_overlap(0.4, 0.9, 0.1, 0.5)
        assert ci_overlap(0.1, 0.5, 0.5, 0.9)  # shared endpoint counts
        assert not ci_overlap(0.1, 0.4, 0.5, 0.9)

    def test_metric_fn_dispatch(self):
        assert metric_fn(Metric.AUROC) is auroc
        assert metric_fn(Metric.PR_AUC) is pr_auc
        assert metric_fn(Metric.AURAC) is aurac
