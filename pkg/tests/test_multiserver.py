import math

import numpy as np
import pytest

from mrma.classifiers import LinearClassifier, TrainConfig, negate, predict_label
from mrma.ensemble import MrmaConfig
from mrma.feedback import evaluate_classifier
from mrma.mechanisms import NO_PRIVACY, split_budget
from mrma.multiserver import ServerSpec, run_round


def make_pool(seed, n, w, margin=0.25, d=3):
    rng = np.random.default_rng(seed)
    Z = rng.uniform(-1, 1, size=(n, d))
    y = np.where(Z @ w >= 0, 1, -1)
    Z = np.clip(Z + margin * y[:, None] * w / np.linalg.norm(w), -1, 1)
    return Z, np.where(Z @ w >= 0, 1, -1)


def make_server(server_id, seed, w, budget, n_members=3, n1=25):
    n_train, n_eval = 80, 200
    Z, y = make_pool(seed, n_train + n_eval, w)
    config = MrmaConfig(n_train=n_train, n_eval=n_eval, subsample_size=40,
                        eval_subset_size=n1, n_members=n_members, budget=budget,
                        train=TrainConfig(iterations=300))
    return ServerSpec(server_id, Z, y, config, cross_cutoff=0.8)


W = np.array([1.0, -0.5, 0.25])


class TestRunRound:
    def test_needs_two_servers(self):
        server = make_server(0, 1, W, NO_PRIVACY)
        with pytest.raises(ValueError):
            run_round([server], np.random.default_rng(0))

    def test_insufficient_eval_pool_rejected(self):
        # 3 members + 5 servers at subset 25 needs 200 clients; 6 servers do not fit
        servers = [make_server(i, i, W, NO_PRIVACY, n_members=3, n1=30)
                   for i in range(6)]
        with pytest.raises(ValueError):
            run_round(servers, np.random.default_rng(0))

    def test_homogeneous_no_noise_agreement(self):
        # every cross-estimate should sit within 3 sqrt(bound) of the true
        # accuracy of the shared classifier
        servers = [make_server(i, 100 + i, W, NO_PRIVACY) for i in range(3)]
        rng = np.random.default_rng(5)
        result = run_round(servers, rng)
        probe_Z, probe_y = make_pool(999, 4000, W)
        for k, spec in enumerate(servers):
            for entry in result.cross[k]:
                shared = result.shared[entry.peer_id]
                truth = np.mean(predict_label(shared, probe_Z) == probe_y)
                tolerance = 3 * math.sqrt(entry.estimate.variance_bound)
                assert entry.estimate.debiased == pytest.approx(truth, abs=tolerance)

    def test_finals_beat_chance_on_homogeneous_servers(self):
        servers = [make_server(i, 200 + i, W, NO_PRIVACY) for i in range(3)]
        result = run_round(servers, np.random.default_rng(6))
        Z, y = make_pool(998, 2000, W)
        for final in result.finals:
            assert np.mean(predict_label(final, Z) == y) > 0.9

    def test_opposite_sign_peer_gets_reversed_or_zero_weight(self):
        # two servers with opposed labeling rules: after reversal the peer
        # classifier must contribute non-destructively
        budget = NO_PRIVACY
        a = make_server(0, 300, W, budget)
        b = make_server(1, 301, -W, budget)
        result = run_round([a, b], np.random.default_rng(7))
        for k, spec in (enumerate((a, b))):
            entry = result.cross[k][1 - k]  # the other server's classifier
            assert entry.reversed_flag or entry.weight == 0.0

    def test_budget_split_halves_evaluation(self):
        budget = split_budget(2.0, 3)
        servers = [make_server(i, 400 + i, W, budget) for i in range(2)]
        result = run_round(servers, np.random.default_rng(8))
        for k in range(2):
            run = result.local_runs[k]
            assert run.estimates[0].epsilon_v == pytest.approx(1.0)
            for entry in result.cross[k]:
                assert entry.estimate.epsilon_v == pytest.approx(1.0)

    def test_no_client_answers_twice(self):
        # phase-1 slices end before phase-2 slices begin
        servers = [make_server(i, 500 + i, W, NO_PRIVACY) for i in range(2)]
        result = run_round(servers, np.random.default_rng(9))
        for k, spec in enumerate(servers):
            cfg = spec.config
            phase1_end = cfg.n_members * cfg.eval_subset_size
            phase2_end = phase1_end + len(servers) * cfg.eval_subset_size
            assert phase2_end <= cfg.n_eval
            assert result.local_runs[k].eval_queries[phase1_end:].sum() == 0


class TestNoisePeerDownweighting:
    # labels depend only on the first two coordinates; a classifier reading
    # the third has true accuracy exactly one half on this data
    ORTHO = np.array([0.0, 0.0, 1.0])

    @pytest.mark.parametrize("n1,min_rate", [(20, 0.85), (200, 0.999)])
    def test_uninformative_peer_weight_vanishes_with_n1(self, n1, min_rate):
        from mrma.ensemble import averaging_weights, model_reversal
        rng = np.random.default_rng(11)
        labeler = np.array([1.0, -0.5, 0.0])
        peer = LinearClassifier(0.0, self.ORTHO)
        epsilon_v = 2.0
        reps = 300
        zero_weight = 0
        for _ in range(reps):
            Z = rng.uniform(-1, 1, size=(n1, 3))
            y = np.where(Z @ labeler >= 0, 1, -1)
            est = evaluate_classifier(peer, Z, y, epsilon_v, rng)
            _, r_star = model_reversal(peer, est)
            # a strong local classifier is present, so no fallback happens
            weights = averaging_weights([0.95, r_star], 0.8)
            zero_weight += weights[1] == 0.0
        assert zero_weight / reps >= min_rate


class TestCrossEstimateComplementation:
    def test_estimates_of_negated_classifier_sum_to_one(self):
        rng = np.random.default_rng(10)
        Z, y = make_pool(600, 3000, W)
        clf = LinearClassifier(0.1, W)
        reps = 400
        totals = np.empty(reps)
        for i in range(reps):
            idx = rng.choice(3000, size=50, replace=False)
            a = evaluate_classifier(clf, Z[idx], y[idx], 1.0, rng).debiased
            b = evaluate_classifier(negate(clf), Z[idx], y[idx], 1.0, rng).debiased
            totals[i] = a + b
        se = totals.std(ddof=1) / math.sqrt(reps)
        assert totals.mean() == pytest.approx(1.0, abs=3 * se)
