import math
from dataclasses import dataclass, replace

import numpy as np
import pytest

from mrma.classifiers import LinearClassifier, TrainConfig
from mrma.datagen import SlopeSpec
from mrma.ensemble import MajorityVote
from mrma.experiment import (
    ExperimentConfig,
    FixedTrials,
    MultiServerConfig,
    SyntheticCurves,
    VectorPool,
    misclassification_rate,
    preset,
    real_data_config,
    run_experiment,
    run_multi_experiment,
    summarize,
)


def tiny_config(**overrides):
    base = dict(
        epsilons=(1.0,), trials=2, test_size=60, n_train=40, n_eval=80,
        subsample_size=20, eval_subset_size=20, n_members=4,
        train=TrainConfig(iterations=40), grid_size=64, seed=11,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestMisclassificationRate:
    def test_perfect_predictor(self):
        clf = LinearClassifier(0.0, np.array([1.0]))
        Z = np.array([[1.0], [-1.0], [0.5]])
        y = np.array([1, -1, 1])
        assert misclassification_rate(clf, Z, y) == 0.0

    def test_negated_perfect_predictor(self):
        from mrma.classifiers import negate
        clf = LinearClassifier(0.0, np.array([1.0]))
        Z = np.array([[1.0], [-1.0], [0.5]])
        y = np.array([1, -1, 1])
        assert misclassification_rate(negate(clf), Z, y) == 1.0

    def test_constant_on_balanced_set(self):
        clf = LinearClassifier(1.0, np.zeros(1))
        Z = np.zeros((10, 1))
        y = np.array([1, -1] * 5)
        assert misclassification_rate(clf, Z, y) == 0.5

    def test_empty_set_rejected(self):
        clf = LinearClassifier(0.0, np.ones(1))
        with pytest.raises(ValueError):
            misclassification_rate(clf, np.zeros((0, 1)), np.zeros(0))

    def test_voting_predictor_supported(self):
        vote = MajorityVote([LinearClassifier(1.0, np.zeros(1))])
        assert misclassification_rate(vote, np.zeros((4, 1)), np.ones(4)) == 0.0


class TestRunExperiment:
    def test_row_count_and_rates_in_range(self):
        config = tiny_config(methods=("weak", "mrma", "all-data"))
        results, diagnostics = run_experiment(config)
        assert len(results) == 2 * 3
        assert all(0.0 <= r.misclassification <= 1.0 for r in results)
        assert len(diagnostics) == 2 * config.n_members

    def test_deterministic(self):
        config = tiny_config()
        a, _ = run_experiment(config)
        b, _ = run_experiment(config)
        assert a == b

    def test_jobs_do_not_change_results(self):
        config = tiny_config(trials=3)
        serial, diag_serial = run_experiment(config, jobs=1)
        parallel, diag_parallel = run_experiment(config, jobs=2)
        assert serial == parallel
        assert diag_serial == diag_parallel

    def test_no_noise_mrma_beats_chance_hard(self):
        config = tiny_config(epsilons=(math.inf,), trials=1,
                             methods=("mrma",), test_size=200)
        results, _ = run_experiment(config)
        assert results[0].misclassification < 0.25

    def test_methods_subset_respected(self):
        config = tiny_config(methods=("voting",))
        results, diagnostics = run_experiment(config)
        assert {r.method for r in results} == {"voting"}
        assert diagnostics == []


@dataclass
class RecordingProvider:
    inner: SyntheticCurves
    store: dict

    def __call__(self, rng, n_clients, n_test, trial_key=None):
        data = self.inner(rng, n_clients, n_test, trial_key)
        self.store[trial_key] = data
        return data


class TestFunctionalVectorEquivalence:
    def test_precomputed_coefficients_reproduce_results(self):
        config = tiny_config(trials=3)
        recorder = RecordingProvider(config.provider(), {})
        functional, diag_functional = run_experiment(config, provider=recorder)
        vector, diag_vector = run_experiment(
            config, provider=FixedTrials(recorder.store))
        assert functional == vector
        assert diag_functional == diag_vector


class TestVectorPool:
    def make_pool(self, n=300, d=3, seed=0):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((n, d)) * np.array([1.0, 10.0, 0.1])
        y = np.where(X[:, 0] >= 0, 1, -1)
        return VectorPool(X, y)

    def test_scaling_fit_on_clients_only(self):
        pool = self.make_pool()
        rng = np.random.default_rng(1)
        Z, y, Z_test, y_test = pool(rng, 200, 50)
        assert Z.shape == (200, 3) and Z_test.shape == (50, 3)
        assert np.max(np.abs(Z)) <= 1.0
        assert np.max(np.abs(Z_test)) <= 1.0  # clipped, not rescaled to fit
        assert np.max(np.abs(Z)) == pytest.approx(1.0)

    def test_pool_exhaustion_rejected(self):
        pool = self.make_pool(n=100)
        with pytest.raises(ValueError):
            pool(np.random.default_rng(0), 90, 20)

    def test_zero_one_labels_accepted(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((50, 2))
        pool = VectorPool(X, (X[:, 0] >= 0).astype(int))
        Z, y, _, _ = pool(np.random.default_rng(3), 30, 10)
        assert set(np.unique(y)) <= {-1, 1}

    def test_real_data_config_dimension(self):
        pool = self.make_pool()
        config = real_data_config(pool, epsilons=(1.0,), trials=2, test_size=50,
                                  n_train=60, n_eval=150, subsample_size=30,
                                  eval_subset_size=30, n_members=5)
        assert config.dimension == 3
        results, _ = run_experiment(config, provider=pool)
        assert len(results) == 2 * len(config.methods)


class TestSummarize:
    def test_mean_and_stderr(self):
        from mrma.experiment import TrialResult
        results = [TrialResult(1.0, 0, "weak", 0.4),
                   TrialResult(1.0, 1, "weak", 0.6)]
        rows = summarize(results)
        assert rows == [(1.0, "weak", pytest.approx(0.5),
                         pytest.approx(np.std([0.4, 0.6], ddof=1) / np.sqrt(2)), 2)]


class TestPresets:
    def test_sec61_values(self):
        config = preset("sec6.1")
        assert (config.n_train, config.n_eval) == (500, 2500)
        assert (config.subsample_size, config.eval_subset_size) == (50, 50)
        assert config.n_members == 50 and config.cutoff == 0.8
        assert config.trials == 500 and config.test_size == 500
        assert config.dimension == 4 and config.rescale_kind == "tanh"

    @pytest.mark.parametrize("case,expected", [
        (1, (500, 2500, 100, 100, 25)),
        (4, (500, 2500, 100, 50, 50)),
        (5, (500, 2500, 50, 50, 50)),
        (8, (2500, 5000, 250, 100, 50)),
    ])
    def test_case_tables(self, case, expected):
        config = preset(f"case{case}")
        assert (config.n_train, config.n_eval, config.subsample_size,
                config.eval_subset_size, config.n_members) == expected

    def test_sec62_is_multi(self):
        config = preset("sec6.2")
        assert isinstance(config, MultiServerConfig)
        assert config.group_sizes == (10, 5, 10)
        # 50 internal + 25 external subsets must fit in the evaluation pool
        assert (config.n_members + config.n_servers) * config.eval_subset_size \
            <= config.n_eval

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset("case99")
        with pytest.raises(ValueError):
            preset("nope")


class TestMultiExperiment:
    def test_shapes_and_determinism(self):
        config = MultiServerConfig(
            epsilons=(2.0,), trials=2, group_sizes=(1, 1, 1), test_size=50,
            n_train=60, n_eval=240, subsample_size=30, eval_subset_size=30,
            n_members=4, train=TrainConfig(iterations=40), grid_size=64, seed=5,
        )
        res_a = run_multi_experiment(config)
        res_b = run_multi_experiment(config, jobs=2)
        assert res_a == res_b
        results, cross, classifiers = res_a
        assert len(results) == 2 * 3 * 2  # trials * servers * {local, multi}
        assert len(cross) == 2 * 3 * 3
        assert len(classifiers) == 2 * 3
        assert all(0.0 <= row[-1] <= 1.0 for row in results)


class TestMrAtMostWeakInvariant:
    @pytest.mark.slow
    @pytest.mark.parametrize("epsilon", [0.5, 2.0])
    def test_reversal_never_hurts_on_average(self, epsilon):
        config = ExperimentConfig(
            epsilons=(epsilon,), trials=100, test_size=200, n_train=100,
            n_eval=500, subsample_size=30, eval_subset_size=50, n_members=10,
            methods=("weak", "mr"), seed=77,
        )
        results, _ = run_experiment(config, jobs=4)
        weak = np.mean([r.misclassification for r in results if r.method == "weak"])
        mr = np.mean([r.misclassification for r in results if r.method == "mr"])
        assert mr <= weak + 0.02
