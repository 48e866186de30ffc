import json

import pytest

from mctuq import (
    BackendConfig,
    BackendKind,
    ConfigurationError,
    CorrectnessRecord,
    Estimator,
    ExperimentGrid,
    HttpBackend,
    Metric,
    MockBackend,
    SyntheticBackend,
    SyntheticWorld,
    UQScore,
    ValidationError,
    best_avg_loocv,
    cluster_stage,
    default_strategies,
    evaluate_strategy,
    generate_stage,
    label_stage,
    load_grid_config,
    make_backend,
    make_dataset,
    mct_grid,
    oracle_select,
    random_baseline,
    run_experiment,
    run_strategy,
    score_stage,
    select_best_avg_tau,
)
from mctuq import records
from mctuq.harness import run_file_prefix

ALL_ESTIMATORS = tuple(Estimator)
GRID = mct_grid(0.1, 1.0, 5)


def synth_backend(seed=0, **kwargs):
    return SyntheticBackend(SyntheticWorld(rng_seed=seed), **kwargs)


def questions_for(n, dataset_id="ds", seed=0):
    return make_dataset(SyntheticWorld(rng_seed=seed), dataset_id, n)


class TestDefaultStrategies:
    def test_mct_plus_one_fixed_per_grid_point(self):
        assert default_strategies(5, 0.1, 1.0) == (
            "mct",
            "fixed:0.1",
            "fixed:0.325",
            "fixed:0.55",
            "fixed:0.775",
            "fixed:1",
        )


def valid_grid(**overrides):
    fields = dict(
        backends=(BackendConfig(kind=BackendKind.SYNTHETIC),),
        datasets=("ds",),
        estimators=(Estimator.DISCRETE_SEMANTIC_ENTROPY,),
        strategies=default_strategies(5, 0.1, 1.0),
        k=5,
        tau_min=0.1,
        tau_max=1.0,
        seeds=(0,),
    )
    fields.update(overrides)
    return ExperimentGrid(**fields)


class TestExperimentGrid:
    def test_valid(self):
        grid = valid_grid()
        assert grid.correctness_temperature == 0.1
        assert grid.metrics == (Metric.AUROC,)
        assert grid.options_for(0) == {}

    def test_strategy_set_must_match_the_grid(self):
        with pytest.raises(ValidationError, match="strategy set"):
            valid_grid(strategies=("mct", "fixed:0.1"))
        with pytest.raises(ValidationError, match="strategy set"):
            valid_grid(strategies=default_strategies(5, 0.1, 1.0) + ("fixed:2",))

    def test_strategy_order_and_duplicates_do_not_matter(self):
        shuffled = tuple(reversed(default_strategies(5, 0.1, 1.0)))
        assert valid_grid(strategies=shuffled).strategies == shuffled

    @pytest.mark.parametrize(
        "field", ["backends", "datasets", "estimators", "seeds"]
    )
    def test_empty_fields_rejected(self, field):
        with pytest.raises(ValidationError, match="at least one"):
            valid_grid(**{field: ()})

    def test_bootstrap_draws_positive(self):
        with pytest.raises(ValidationError, match="bootstrap_draws"):
            valid_grid(bootstrap_draws=0)

    def test_backend_options_alignment(self):
        with pytest.raises(ValidationError, match="one-to-one"):
            valid_grid(backend_options=({"a": 1}, {"b": 2}))
        grid = valid_grid(backend_options=({"rng_seed": 3},))
        assert grid.options_for(0) == {"rng_seed": 3}


class TestLoadGridConfig:
    def test_full_round_trip(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text(
            """
            k = 3
            tau_min = 0.2
            tau_max = 0.8
            seeds = [1, 2]
            estimators = ["dse", "numsets"]
            metrics = ["auroc", "aurac"]
            datasets = ["a.jsonl", "b.jsonl"]
            correctness_temperature = 0.05
            bootstrap_draws = 250

            [[backends]]
            kind = "synthetic"
            model_name = "w1"
            rng_seed = 7
            logit_spread = 2.0

            [[backends]]
            kind = "http"
            model_name = "m"
            base_url = "http://host/v1"
            max_parallel = 4
            wants_logprobs = false
            """
        )
        grid = load_grid_config(path)
        assert grid.k == 3
        assert grid.seeds == (1, 2)
        assert grid.estimators == (
            Estimator.DISCRETE_SEMANTIC_ENTROPY,
            Estimator.NUM_SEMANTIC_SETS,
        )
        assert grid.metrics == (Metric.AUROC, Metric.AURAC)
        assert grid.datasets == ("a.jsonl", "b.jsonl")
        assert grid.correctness_temperature == 0.05
        assert grid.bootstrap_draws == 250
        assert grid.strategies == default_strategies(3, 0.2, 0.8)
        assert grid.backends[0].kind is BackendKind.SYNTHETIC
        assert grid.options_for(0) == {"rng_seed": 7, "logit_spread": 2.0}
        assert grid.backends[1].base_url == "http://host/v1"
        assert grid.backends[1].max_parallel == 4
        assert grid.backends[1].wants_logprobs is False
        assert grid.options_for(1) == {}

    def test_defaults(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text(
            """
            datasets = ["d.jsonl"]
            [[backends]]
            kind = "synthetic"
            """
        )
        grid = load_grid_config(path)
        assert (grid.k, grid.tau_min, grid.tau_max) == (5, 0.1, 1.0)
        assert grid.seeds == (0,)
        assert grid.estimators == ALL_ESTIMATORS
        assert grid.strategies == default_strategies(5, 0.1, 1.0)

    def test_singular_seed_key(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text(
            'seed = 9\ndatasets = ["d"]\n[[backends]]\nkind = "synthetic"\n'
        )
        assert load_grid_config(path).seeds == (9,)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text('datasets = ["d"]\nbanana = 1\n')
        with pytest.raises(ValidationError, match="banana"):
            load_grid_config(path)

    def test_backend_without_kind_rejected(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text('datasets = ["d"]\n[[backends]]\nmodel_name = "m"\n')
        with pytest.raises(ValidationError, match="kind"):
            load_grid_config(path)

    def test_unknown_backend_kind_rejected(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text('datasets = ["d"]\n[[backends]]\nkind = "quantum"\n')
        with pytest.raises(ValidationError, match="quantum"):
            load_grid_config(path)

    def test_invalid_toml_rejected(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text("datasets = [unclosed")
        with pytest.raises(ValidationError, match="invalid TOML"):
            load_grid_config(path)

    def test_unknown_estimator_rejected(self, tmp_path):
        path = tmp_path / "grid.toml"
        path.write_text(
            'datasets = ["d"]\nestimators = ["zeal"]\n[[backends]]\nkind = "synthetic"\n'
        )
        with pytest.raises(ValidationError):
            load_grid_config(path)


class TestMakeBackend:
    def test_synthetic_with_options(self):
        config = BackendConfig(kind=BackendKind.SYNTHETIC, model_name="w")
        backend = make_backend(
            config,
            {"rng_seed": 11, "vocab_per_question": 4, "logit_spread": 2.5,
             "misjudge_rate": 0.25},
        )
        assert isinstance(backend, SyntheticBackend)
        assert backend.backend_id == "w"
        assert backend.world.rng_seed == 11
        assert backend.world.vocab_per_question == 4
        assert backend.world.logit_spread == 2.5

    def test_synthetic_default_seed(self):
        config = BackendConfig(kind=BackendKind.SYNTHETIC)
        backend = make_backend(config, {}, default_seed=42)
        assert backend.world.rng_seed == 42

    def test_mock_requires_script(self, tmp_path):
        config = BackendConfig(kind=BackendKind.MOCK)
        with pytest.raises(ConfigurationError, match="script"):
            make_backend(config, {})
        script = tmp_path / "s.json"
        script.write_text('{"completions": ["a"], "model_name": "scripted"}')
        backend = make_backend(config, {"script": str(script)})
        assert isinstance(backend, MockBackend)
        assert backend.backend_id == "scripted"

    def test_http(self):
        config = BackendConfig(
            kind=BackendKind.HTTP, model_name="m", base_url="http://host/v1"
        )
        assert isinstance(make_backend(config, {}), HttpBackend)


class TestOracleSelect:
    def test_picks_the_max(self):
        values = {0.1: 0.70, 0.325: 0.72, 0.55: 0.75, 0.775: 0.74, 1.0: 0.71}
        assert oracle_select(values) == (0.55, 0.75)

    def test_ties_go_to_the_lower_temperature(self):
        assert oracle_select({1.0: 0.75, 0.1: 0.75, 0.55: 0.7}) == (0.1, 0.75)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            oracle_select({})


class TestRandomBaseline:
    VALUES = {0.1: 0.70, 0.325: 0.72, 0.55: 0.75, 0.775: 0.74, 1.0: 0.71}

    def test_exact_is_the_grid_mean(self):
        assert random_baseline(self.VALUES) == pytest.approx(0.724, abs=1e-12)

    def test_monte_carlo_is_seeded(self):
        a = random_baseline(self.VALUES, mode="monte-carlo", draws=50, rng_seed=3)
        b = random_baseline(self.VALUES, mode="monte-carlo", draws=50, rng_seed=3)
        assert a == b
        assert min(self.VALUES.values()) <= a <= max(self.VALUES.values())

    def test_monte_carlo_converges_to_exact(self):
        got = random_baseline(self.VALUES, mode="monte-carlo", draws=20000, rng_seed=0)
        assert got == pytest.approx(0.724, abs=0.002)

    def test_validation(self):
        with pytest.raises(ValidationError, match="mode"):
            random_baseline(self.VALUES, mode="psychic")
        with pytest.raises(ValidationError, match="draws"):
            random_baseline(self.VALUES, mode="monte-carlo", draws=0)
        with pytest.raises(ValidationError):
            random_baseline({})


class TracingValues(dict):
    """Dict that logs every value actually read."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.reads = []

    def __getitem__(self, key):
        self.reads.append(key)
        return super().__getitem__(key)


def loocv_grid():
    """3 backends x 3 datasets x 3 temperatures, poisoned outside the pool.

    For test cell (b1, d1) the admissible pool is the four cells sharing
    neither backend nor dataset. Their averages peak at 0.55. Every excluded
    cell carries 0.99 at tau=1.0, so any leak would flip the selection.
    """
    values = TracingValues()
    taus = (0.1, 0.55, 1.0)
    pool_value = {0.1: 0.60, 0.55: 0.70, 1.0: 0.65}
    for b in ("b1", "b2", "b3"):
        for d in ("d1", "d2", "d3"):
            excluded = b == "b1" or d == "d1"
            for t in taus:
                if excluded:
                    values[(b, d, t)] = 0.99 if t == 1.0 else 0.10
                else:
                    values[(b, d, t)] = pool_value[t]
    return values


class TestBestAvgLOOCV:
    def test_selection_never_reads_excluded_cells(self):
        values = loocv_grid()
        tau = select_best_avg_tau(values, ("b1", "d1"))
        assert tau == 0.55
        assert values.reads, "selection must read the pool"
        for b, d, _ in values.reads:
            assert b != "b1", "read a cell sharing the test backend"
            assert d != "d1", "read a cell sharing the test dataset"

    def test_loocv_reads_one_test_cell_value(self):
        values = loocv_grid()
        tau, value = best_avg_loocv(values, ("b1", "d1"))
        assert (tau, value) == (0.55, 0.10)
        test_reads = [k for k in values.reads if k[0] == "b1" or k[1] == "d1"]
        assert test_reads == [("b1", "d1", 0.55)]

    def test_average_ties_go_to_the_lower_temperature(self):
        values = loocv_grid()
        for b in ("b2", "b3"):
            for d in ("d2", "d3"):
                values[(b, d, 0.1)] = 0.70
        assert select_best_avg_tau(values, ("b1", "d1")) == 0.1

    def test_empty_pool_when_all_cells_share_the_backend(self):
        values = {("b1", d, t): 0.5 for d in ("d1", "d2") for t in (0.1, 1.0)}
        with pytest.raises(ConfigurationError, match="empty"):
            select_best_avg_tau(values, ("b1", "d1"))

    def test_empty_pool_when_all_cells_share_the_dataset(self):
        values = {(b, "d1", t): 0.5 for b in ("b1", "b2") for t in (0.1, 1.0)}
        with pytest.raises(ConfigurationError, match="empty"):
            select_best_avg_tau(values, ("b1", "d1"))

    def test_incomplete_grid_rejected(self):
        values = loocv_grid()
        del values[("b2", "d2", 0.55)]
        with pytest.raises(ValidationError, match="incomplete grid"):
            select_best_avg_tau(values, ("b1", "d1"))

    def test_missing_test_cell_value_rejected(self):
        values = loocv_grid()
        del values[("b1", "d1", 0.55)]
        with pytest.raises(ValidationError, match="test cell"):
            best_avg_loocv(values, ("b1", "d1"))


class TestGenerateStage:
    def run(self, tmp_path, strategy, n=6, seed=0, name="gen.jsonl", **kwargs):
        backend = kwargs.pop("backend", None) or synth_backend()
        return generate_stage(
            backend=backend,
            questions=questions_for(n),
            strategy=strategy,
            k=5,
            tau_min=0.1,
            tau_max=1.0,
            seed=seed,
            path=tmp_path / name,
            **kwargs,
        )

    def test_mct_samples_cover_the_grid_in_varied_order(self, tmp_path):
        got = self.run(tmp_path, "mct", n=10)
        orders = set()
        for record in got:
            temps = tuple(s.temperature for s in record.sample_set.samples)
            assert sorted(temps) == sorted(GRID)
            orders.add(temps)
        assert len(orders) > 1, "every question drew the same permutation"

    def test_mct_schedules_are_seed_stable(self, tmp_path):
        a = self.run(tmp_path, "mct", name="a.jsonl")
        b = self.run(tmp_path, "mct", name="b.jsonl")
        assert a == b
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_fixed_strategy_pins_every_sample(self, tmp_path):
        got = self.run(tmp_path, "fixed:0.55")
        for record in got:
            assert all(s.temperature == 0.55 for s in record.sample_set.samples)

    def test_random_fixed_draws_once_per_run(self, tmp_path):
        got = self.run(tmp_path, "random-fixed")
        drawn = {s.temperature for r in got for s in r.sample_set.samples}
        assert len(drawn) == 1, "random-fixed must commit to one temperature"
        assert drawn.pop() in GRID
        again = self.run(tmp_path, "random-fixed", name="again.jsonl")
        assert got == again

    def test_resume_skips_persisted_questions(self, tmp_path):
        path = tmp_path / "gen.jsonl"
        full = self.run(tmp_path, "mct")
        whole = path.read_bytes()
        lines = whole.splitlines(keepends=True)
        path.write_bytes(b"".join(lines[:3]))

        class NoGenBackend(SyntheticBackend):
            def generate(self, question, schedule, correctness_temperature=0.1):
                calls.append(question.id)
                return super().generate(question, schedule, correctness_temperature)

        calls = []
        resumed = generate_stage(
            backend=NoGenBackend(SyntheticWorld(rng_seed=0)),
            questions=questions_for(6),
            strategy="mct",
            k=5,
            tau_min=0.1,
            tau_max=1.0,
            seed=0,
            path=path,
        )
        assert resumed == full
        assert calls == [q.id for q in questions_for(6)[3:]]
        assert path.read_bytes() == whole

    def test_strategy_mismatch_rejected(self, tmp_path):
        self.run(tmp_path, "mct")
        with pytest.raises(ValidationError, match="strategy"):
            self.run(tmp_path, "fixed:0.55")

    def test_duplicate_question_ids_rejected(self, tmp_path):
        qs = questions_for(2)
        with pytest.raises(ValidationError, match="duplicate"):
            generate_stage(
                backend=synth_backend(),
                questions=[qs[0], qs[0]],
                strategy="mct",
                k=5,
                tau_min=0.1,
                tau_max=1.0,
                seed=0,
                path=tmp_path / "gen.jsonl",
            )

    def test_attach_p_true(self, tmp_path):
        got = self.run(tmp_path, "mct", attach_p_true=True)
        assert all(r.sample_set.p_true_prob is not None for r in got)
        assert all(0.0 <= r.sample_set.p_true_prob <= 1.0 for r in got)

    def test_p_true_silently_absent_without_logprobs(self, tmp_path):
        got = self.run(
            tmp_path,
            "mct",
            backend=synth_backend(wants_logprobs=False),
            attach_p_true=True,
        )
        assert all(r.sample_set.p_true_prob is None for r in got)


class CountingEqualityJudge:
    def __init__(self):
        self.calls = 0

    def judge_entailment(self, question_text, answer_a, answer_b):
        self.calls += 1
        return answer_a == answer_b


class TestClusterLabelScoreStages:
    @pytest.fixture()
    def generated(self, tmp_path):
        questions = questions_for(6)
        generations = generate_stage(
            backend=synth_backend(),
            questions=questions,
            strategy="mct",
            k=5,
            tau_min=0.1,
            tau_max=1.0,
            seed=0,
            path=tmp_path / "gen.jsonl",
            attach_p_true=True,
        )
        return questions, generations

    def test_cluster_stage_partitions_every_question(self, tmp_path, generated):
        questions, generations = generated
        partitions = cluster_stage(
            judge=synth_backend(),
            questions=questions,
            generations=generations,
            path=tmp_path / "cl.jsonl",
        )
        assert set(partitions) == {q.id for q in questions}
        for qid, part in partitions.items():
            texts = next(
                r.sample_set.texts() for r in generations
                if r.sample_set.question_id == qid
            )
            # equality judge: same text, same cluster, and vice versa
            for i, a in enumerate(texts):
                for j, b in enumerate(texts):
                    same = part.assignment[i] == part.assignment[j]
                    assert same == (a == b)

    def test_cluster_stage_resume_skips_done_questions(self, tmp_path, generated):
        questions, generations = generated
        path = tmp_path / "cl.jsonl"
        cluster_stage(
            judge=synth_backend(),
            questions=questions[:4],
            generations=generations,
            path=path,
        )
        judge = CountingEqualityJudge()
        partitions = cluster_stage(
            judge=judge,
            questions=questions,
            generations=generations,
            path=path,
        )
        assert set(partitions) == {q.id for q in questions}
        done_again = cluster_stage(
            judge=CountingEqualityJudge(),
            questions=questions,
            generations=generations,
            path=path,
        )
        assert done_again == partitions

    def test_cluster_stage_missing_generation_rejected(self, tmp_path, generated):
        questions, generations = generated
        with pytest.raises(ValidationError, match="no generation record"):
            cluster_stage(
                judge=synth_backend(),
                questions=questions,
                generations=generations[:-1],
                path=tmp_path / "cl.jsonl",
            )

    def test_score_stage_scores_all_estimators(self, tmp_path, generated):
        questions, generations = generated
        partitions = cluster_stage(
            judge=synth_backend(),
            questions=questions,
            generations=generations,
            path=tmp_path / "cl.jsonl",
        )
        scores, skipped = score_stage(
            generations=generations,
            partitions=partitions,
            estimators=ALL_ESTIMATORS,
            path=tmp_path / "sc.jsonl",
        )
        assert skipped == ()
        assert len(scores) == len(questions) * len(ALL_ESTIMATORS)
        seen = {(s.question_id, s.estimator) for s in scores}
        assert len(seen) == len(scores)

    def test_score_stage_skips_what_the_records_cannot_serve(self, tmp_path):
        questions = questions_for(4)
        backend = synth_backend(wants_logprobs=False)
        generations = generate_stage(
            backend=backend,
            questions=questions,
            strategy="mct",
            k=5,
            tau_min=0.1,
            tau_max=1.0,
            seed=0,
            path=tmp_path / "gen.jsonl",
            attach_p_true=True,
        )
        partitions = cluster_stage(
            judge=backend,
            questions=questions,
            generations=generations,
            path=tmp_path / "cl.jsonl",
        )
        scores, skipped = score_stage(
            generations=generations,
            partitions=partitions,
            estimators=ALL_ESTIMATORS,
            path=tmp_path / "sc.jsonl",
        )
        assert set(skipped) == {
            Estimator.NAIVE_ENTROPY,
            Estimator.SEMANTIC_ENTROPY,
            Estimator.P_TRUE,
        }
        present = {s.estimator for s in scores}
        assert present == {
            Estimator.DISCRETE_SEMANTIC_ENTROPY,
            Estimator.NUM_SEMANTIC_SETS,
        }

    def test_score_stage_resume_adds_only_missing_pairs(self, tmp_path, generated):
        questions, generations = generated
        partitions = cluster_stage(
            judge=synth_backend(),
            questions=questions,
            generations=generations,
            path=tmp_path / "cl.jsonl",
        )
        path = tmp_path / "sc.jsonl"
        score_stage(
            generations=generations[:3],
            partitions=partitions,
            estimators=(Estimator.DISCRETE_SEMANTIC_ENTROPY,),
            path=path,
        )
        scores, skipped = score_stage(
            generations=generations,
            partitions=partitions,
            estimators=(Estimator.DISCRETE_SEMANTIC_ENTROPY, Estimator.NUM_SEMANTIC_SETS),
            path=path,
        )
        assert skipped == ()
        assert len(scores) == len(questions) * 2
        assert len({(s.question_id, s.estimator) for s in scores}) == len(scores)

    def test_score_stage_missing_partition_rejected(self, tmp_path, generated):
        questions, generations = generated
        with pytest.raises(ValidationError, match="no cluster partition"):
            score_stage(
                generations=generations,
                partitions={},
                estimators=(Estimator.NUM_SEMANTIC_SETS,),
                path=tmp_path / "sc.jsonl",
            )

    def test_label_stage_grades_low_temp_answers(self, tmp_path, generated):
        questions, generations = generated
        labels = label_stage(
            judge=synth_backend(),
            questions=questions,
            generations=generations,
            path=tmp_path / "lb.jsonl",
        )
        assert {r.question_id for r in labels} == {q.id for q in questions}
        assert all(isinstance(r.correct, bool) for r in labels)

    def test_label_stage_resume(self, tmp_path, generated):
        questions, generations = generated
        path = tmp_path / "lb.jsonl"
        label_stage(
            judge=synth_backend(),
            questions=questions[:2],
            generations=generations,
            path=path,
        )
        first_two = path.read_bytes()
        labels = label_stage(
            judge=synth_backend(),
            questions=questions,
            generations=generations,
            path=path,
        )
        assert len(labels) == len(questions)
        assert path.read_bytes().startswith(first_two)


class TestRunStrategy:
    def test_end_to_end_outputs(self, tmp_path):
        result = run_strategy(
            backend=synth_backend(),
            questions=questions_for(5),
            dataset_id="ds",
            strategy="fixed:0.55",
            k=5,
            tau_min=0.1,
            tau_max=1.0,
            seed=0,
            estimators=ALL_ESTIMATORS,
            out_dir=tmp_path,
        )
        assert result.skipped_estimators == ()
        prefix = "synthetic-s1__ds__fixed-0.55"
        assert result.generations_path.name == f"{prefix}.generations.jsonl"
        for path in (
            result.generations_path,
            result.clusters_path,
            result.scores_path,
            result.labels_path,
        ):
            assert path.exists()
        assert len(records.load_scores(result.scores_path)) == 5 * len(ALL_ESTIMATORS)
        assert len(records.load_labels(result.labels_path)) == 5

    def test_capability_skips_surface_in_the_result(self, tmp_path):
        result = run_strategy(
            backend=synth_backend(wants_logprobs=False),
            questions=questions_for(4),
            dataset_id="ds",
            strategy="mct",
            k=5,
            tau_min=0.1,
            tau_max=1.0,
            seed=0,
            estimators=ALL_ESTIMATORS,
            out_dir=tmp_path,
        )
        assert set(result.skipped_estimators) == {
            Estimator.NAIVE_ENTROPY,
            Estimator.SEMANTIC_ENTROPY,
            Estimator.P_TRUE,
        }

    def test_no_questions_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="at least one question"):
            run_strategy(
                backend=synth_backend(),
                questions=[],
                dataset_id="ds",
                strategy="mct",
                k=5,
                tau_min=0.1,
                tau_max=1.0,
                seed=0,
                estimators=ALL_ESTIMATORS,
                out_dir=tmp_path,
            )

    def test_prefix_sanitizes_awkward_characters(self):
        assert run_file_prefix("org/model:v1", "trivia qa", "fixed:0.1") == (
            "org-model-v1__trivia-qa__fixed-0.1"
        )


def scored_labels(values, flags):
    scores = [
        UQScore(question_id=f"q{i:02d}", estimator=Estimator.DISCRETE_SEMANTIC_ENTROPY,
                score=v)
        for i, v in enumerate(values)
    ]
    labels = [
        CorrectnessRecord(question_id=f"q{i:02d}", correct=c, judge_id="j")
        for i, c in enumerate(flags)
    ]
    return scores, labels


class TestEvaluateStrategy:
    def kwargs(self, **overrides):
        fields = dict(
            backend_id="b",
            dataset_id="d",
            strategy="mct",
            metrics=(Metric.AUROC,),
            bootstrap_draws=50,
            seed=0,
        )
        fields.update(overrides)
        return fields

    def test_outcome_fields_and_point(self):
        # high uncertainty on the wrong answers: separable, so AUROC is 1
        scores, labels = scored_labels(
            [0.9, 0.8, 0.2, 0.1], [False, False, True, True]
        )
        outcomes = evaluate_strategy(scores, labels, **self.kwargs())
        assert len(outcomes) == 1
        out = outcomes[0]
        assert (out.backend_id, out.dataset_id, out.strategy) == ("b", "d", "mct")
        assert out.estimator is Estimator.DISCRETE_SEMANTIC_ENTROPY
        assert out.metric is Metric.AUROC
        assert out.point == 1.0
        assert out.ci_low <= out.point <= out.ci_high

    def test_deterministic_given_seed(self):
        scores, labels = scored_labels(
            [0.9, 0.4, 0.8, 0.2, 0.6, 0.1], [False, True, False, True, False, True]
        )
        a = evaluate_strategy(scores, labels, **self.kwargs())
        b = evaluate_strategy(scores, labels, **self.kwargs())
        assert a == b

    def test_multiple_metrics_per_estimator(self):
        scores, labels = scored_labels(
            [0.9, 0.4, 0.8, 0.2], [False, True, False, True]
        )
        outcomes = evaluate_strategy(
            scores, labels, **self.kwargs(metrics=(Metric.AUROC, Metric.AURAC))
        )
        assert [o.metric for o in outcomes] == [Metric.AUROC, Metric.AURAC]

    def test_duplicate_label_rejected(self):
        scores, labels = scored_labels([0.9, 0.1], [False, True])
        with pytest.raises(ValidationError, match="duplicate label"):
            evaluate_strategy(scores, labels + [labels[0]], **self.kwargs())

    def test_score_without_label_rejected(self):
        scores, labels = scored_labels([0.9, 0.1], [False, True])
        with pytest.raises(ValidationError, match="no matching label"):
            evaluate_strategy(scores, labels[:1], **self.kwargs())


class TestRunExperiment:
    def grid(self, **overrides):
        fields = dict(
            backends=(
                BackendConfig(kind=BackendKind.SYNTHETIC, model_name="w1"),
                BackendConfig(kind=BackendKind.SYNTHETIC, model_name="w2"),
            ),
            datasets=("alpha", "beta"),
            estimators=(Estimator.DISCRETE_SEMANTIC_ENTROPY, Estimator.NUM_SEMANTIC_SETS),
            strategies=default_strategies(3, 0.1, 1.0),
            k=3,
            tau_min=0.1,
            tau_max=1.0,
            seeds=(0,),
            bootstrap_draws=25,
            backend_options=({"rng_seed": 1, "logit_spread": 1.0},
                             {"rng_seed": 2, "logit_spread": 1.8}),
        )
        fields.update(overrides)
        return ExperimentGrid(**fields)

    def questions(self):
        world = SyntheticWorld(rng_seed=0)
        return {
            "alpha": make_dataset(world, "alpha", 8),
            "beta": make_dataset(world, "beta", 8),
        }

    def test_full_grid_produces_all_outcomes(self, tmp_path):
        grid = self.grid()
        result = run_experiment(grid, tmp_path, questions_by_dataset=self.questions())
        # backends x datasets x strategies x estimators x metrics
        assert len(result.outcomes) == 2 * 2 * 4 * 2 * 1
        assert result.outcomes_path.exists()
        assert records.load_outcomes(result.outcomes_path) == list(result.outcomes)
        cells = {(o.backend_id, o.dataset_id) for o in result.outcomes}
        assert cells == {("w1", "alpha"), ("w1", "beta"), ("w2", "alpha"), ("w2", "beta")}
        strategies = {o.strategy for o in result.outcomes}
        assert strategies == set(default_strategies(3, 0.1, 1.0))

    def test_rerun_is_a_no_op_resume(self, tmp_path):
        grid = self.grid()
        first = run_experiment(grid, tmp_path, questions_by_dataset=self.questions())
        snapshot = {
            p.name: p.read_bytes() for p in (tmp_path / "runs").iterdir()
        }
        second = run_experiment(grid, tmp_path, questions_by_dataset=self.questions())
        assert second.outcomes == first.outcomes
        for p in (tmp_path / "runs").iterdir():
            assert p.read_bytes() == snapshot[p.name]

    def test_dataset_paths_load_from_disk(self, tmp_path):
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        world = SyntheticWorld(rng_seed=0)
        path = data_dir / "alpha.jsonl"
        records.save_dataset(make_dataset(world, "alpha", 6), path)
        grid = self.grid(
            backends=(BackendConfig(kind=BackendKind.SYNTHETIC, model_name="w1"),),
            backend_options=({"rng_seed": 1},),
            datasets=(str(path),),
        )
        result = run_experiment(grid, tmp_path / "out")
        assert {o.dataset_id for o in result.outcomes} == {"alpha"}

    def test_empty_dataset_rejected(self, tmp_path):
        grid = self.grid(datasets=("alpha",), backends=self.grid().backends[:1],
                         backend_options=())
        with pytest.raises(ValidationError, match="empty"):
            run_experiment(grid, tmp_path, questions_by_dataset={"alpha": []})
