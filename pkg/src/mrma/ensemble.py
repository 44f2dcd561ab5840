"""Model reversal, utility-weighted model averaging, and the single-server
protocol that ties collection, training, evaluation, and averaging together.

The server never sees raw client data. Training clients upload one perturbed
feature/label pair each; evaluation clients answer exactly one privatized
correctness query each. Weak classifiers whose estimated accuracy falls below
one half are negated (their mistakes are informative), and the survivors are
averaged with weights proportional to estimated accuracy above a cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSpec
from .classifiers import LinearClassifier, TrainConfig, combine, negate, predict_label, train
from .feedback import AccuracyEstimate, evaluate_classifier
from .mechanisms import PrivacyBudget, perturb_features, randomized_response
from .validation import as_feature_matrix, as_pm1_labels, check_unit_box


@dataclass(frozen=True)
class MrmaConfig:
    """Sizes, budget, and cutoff for one single-server run.

    ``n_train`` clients upload perturbed pairs, ``n_eval`` clients answer
    feedback queries. Each of the ``n_members`` weak classifiers trains on a
    fresh draw of ``subsample_size`` perturbed pairs (draws are without
    replacement within a draw, independent across members) and is evaluated
    on its own ``eval_subset_size`` clients.
    """

    n_train: int
    n_eval: int
    subsample_size: int
    eval_subset_size: int
    n_members: int
    budget: PrivacyBudget
    cutoff: float = 0.8
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.n_members < 1:
            raise ValueError("n_members must be >= 1")
        if not 0 < self.subsample_size <= self.n_train:
            raise ValueError("subsample_size must be in [1, n_train]")
        if self.eval_subset_size < 1:
            raise ValueError("eval_subset_size must be >= 1")
        if self.n_members * self.eval_subset_size > self.n_eval:
            raise ValueError(
                f"n_members * eval_subset_size = "
                f"{self.n_members * self.eval_subset_size} exceeds n_eval = {self.n_eval}"
            )
        if not 0.5 < self.cutoff < 1.0:
            raise ValueError("cutoff must lie in (0.5, 1)")


def model_reversal(clf: LinearClassifier, est: AccuracyEstimate) -> tuple[LinearClassifier, float]:
    """Negate the classifier when its estimated accuracy is below one half.

    Returns the (possibly negated) classifier and its updated estimate
    max(r, 1 - r). An estimate of exactly 0.5 keeps the original classifier.
    """
    if est.debiased < 0.5:
        return negate(clf), 1.0 - est.debiased
    return clf, est.debiased


def averaging_weights(reversed_estimates, cutoff: float) -> np.ndarray:
    """Weights proportional to estimated accuracy above the cutoff.

    Members at or below the cutoff get weight zero. If every estimate falls
    at or below the cutoff the whole mass goes to the single best estimate
    (lowest index on ties); a zero classifier would otherwise silently
    predict +1 everywhere.
    """
    estimates = np.asarray(reversed_estimates, dtype=float)
    if estimates.size == 0:
        raise ValueError("need at least one estimate")
    excess = np.maximum(estimates - cutoff, 0.0)
    total = excess.sum()
    if total > 0.0:
        return excess / total
    weights = np.zeros(estimates.size)
    weights[int(np.argmax(estimates))] = 1.0
    return weights


def collect_perturbed(Z, y, budget: PrivacyBudget, rng: np.random.Generator):
    """One perturbed (features, label) upload per client."""
    Z = check_unit_box(as_feature_matrix(Z))
    y = as_pm1_labels(y)
    Z_noisy = perturb_features(Z, budget.epsilon_z, rng)
    y_noisy = randomized_response(y, budget.epsilon_y, rng, domain="pm1")
    return Z_noisy, y_noisy


@dataclass
class SingleServerRun:
    """Everything one protocol run produced, for diagnostics and reuse.

    ``final`` is the reversal-then-averaging classifier. ``weights_plain``
    are the averaging weights computed from the unreversed estimates, which
    is what averaging-without-reversal uses. Debiased estimates are kept
    unclipped, so values outside [0, 1] can and do appear under heavy noise.
    """

    members: list[LinearClassifier]
    reversed_members: list[LinearClassifier]
    estimates: list[AccuracyEstimate]
    r_tilde: np.ndarray
    r_star: np.ndarray
    reversed_flags: np.ndarray
    weights: np.ndarray
    weights_plain: np.ndarray
    fallback: bool
    fallback_plain: bool
    final: LinearClassifier
    eval_queries: np.ndarray
    dropped_eval: int

    @property
    def final_plain(self) -> LinearClassifier:
        """Averaging of the unreversed members (no model reversal)."""
        return combine(self.members, self.weights_plain)


def run_single_server(config: MrmaConfig, Z, y, rng: np.random.Generator,
                      basis: BasisSpec | None = None) -> SingleServerRun:
    """Full single-server protocol on a pool of n_train + n_eval clients.

    The first ``n_train`` rows are the training clients, the next ``n_eval``
    rows the evaluation clients (callers shuffle if their pool is ordered).
    Evaluation clients keep their true data and answer exactly one
    randomized-response query; any remainder of the evaluation pool beyond
    n_members * eval_subset_size is never queried.
    """
    Z = check_unit_box(as_feature_matrix(Z))
    y = as_pm1_labels(y)
    if Z.shape[0] != y.size:
        raise ValueError("Z and y must have matching lengths")
    needed = config.n_train + config.n_eval
    if Z.shape[0] < needed:
        raise ValueError(f"need at least {needed} clients, got {Z.shape[0]}")

    Z_train, y_train = Z[:config.n_train], y[:config.n_train]
    eval_lo = config.n_train
    Z_eval = Z[eval_lo:eval_lo + config.n_eval]
    y_eval = y[eval_lo:eval_lo + config.n_eval]

    Z_up, y_up = collect_perturbed(Z_train, y_train, config.budget, rng)

    n1 = config.eval_subset_size
    eval_queries = np.zeros(config.n_eval, dtype=int)
    members, estimates = [], []
    for b in range(config.n_members):
        picked = rng.choice(config.n_train, size=config.subsample_size, replace=False)
        members.append(train(Z_up[picked], y_up[picked], config.train, basis))
        subset = slice(b * n1, (b + 1) * n1)
        eval_queries[subset] += 1
        estimates.append(
            evaluate_classifier(members[-1], Z_eval[subset], y_eval[subset],
                                config.budget.epsilon_v, rng)
        )
    assert int(eval_queries.max()) <= 1, "an evaluation client was queried twice"

    r_tilde = np.array([est.debiased for est in estimates])
    reversed_pairs = [model_reversal(clf, est) for clf, est in zip(members, estimates)]
    reversed_members = [clf for clf, _ in reversed_pairs]
    r_star = np.array([r for _, r in reversed_pairs])
    reversed_flags = r_tilde < 0.5

    weights = averaging_weights(r_star, config.cutoff)
    weights_plain = averaging_weights(r_tilde, config.cutoff)
    return SingleServerRun(
        members=members,
        reversed_members=reversed_members,
        estimates=estimates,
        r_tilde=r_tilde,
        r_star=r_star,
        reversed_flags=reversed_flags,
        weights=weights,
        weights_plain=weights_plain,
        fallback=bool(np.all(r_star <= config.cutoff)),
        fallback_plain=bool(np.all(r_tilde <= config.cutoff)),
        final=combine(reversed_members, weights),
        eval_queries=eval_queries,
        dropped_eval=config.n_eval - config.n_members * n1,
    )


class MajorityVote:
    """Predict by majority over member labels, ties resolved to +1."""

    def __init__(self, members: list[LinearClassifier]):
        if not members:
            raise ValueError("need at least one member")
        self.members = list(members)

    def predict(self, Z):
        Z = as_feature_matrix(Z)
        totals = np.zeros(Z.shape[0])
        for clf in self.members:
            totals += predict_label(clf, Z)
        return np.where(totals >= 0, 1, -1)


@dataclass
class BaselineSet:
    """Reference methods sharing one round of perturbed uploads."""

    members: list[LinearClassifier]
    voting: MajorityVote
    averaging: LinearClassifier
    all_data: LinearClassifier


def perturbed_baselines(Z, y, config: MrmaConfig, rng: np.random.Generator,
                        basis: BasisSpec | None = None) -> BaselineSet:
    """Train the voting/averaging ensemble and the pooled classifier.

    All clients (training and evaluation pools alike) upload one perturbed
    pair. The ensemble members train on disjoint chunks of size
    floor(N / n_members); the pooled classifier trains on all N pairs.
    """
    Z = check_unit_box(as_feature_matrix(Z))
    y = as_pm1_labels(y)
    Z_up, y_up = collect_perturbed(Z, y, config.budget, rng)
    n = Z_up.shape[0]
    chunk = n // config.n_members
    if chunk < 2:
        raise ValueError("not enough clients for the requested ensemble size")
    members = [
        train(Z_up[b * chunk:(b + 1) * chunk], y_up[b * chunk:(b + 1) * chunk],
              config.train, basis)
        for b in range(config.n_members)
    ]
    equal = np.full(config.n_members, 1.0 / config.n_members)
    return BaselineSet(
        members=members,
        voting=MajorityVote(members),
        averaging=combine(members, equal),
        all_data=train(Z_up, y_up, config.train, basis),
    )


def baseline_voting(Z, y, config: MrmaConfig, rng: np.random.Generator,
                    basis: BasisSpec | None = None) -> MajorityVote:
    return perturbed_baselines(Z, y, config, rng, basis).voting


def baseline_averaging(Z, y, config: MrmaConfig, rng: np.random.Generator,
                       basis: BasisSpec | None = None) -> LinearClassifier:
    return perturbed_baselines(Z, y, config, rng, basis).averaging


def baseline_all_data(Z, y, config: MrmaConfig, rng: np.random.Generator,
                      basis: BasisSpec | None = None) -> LinearClassifier:
    return perturbed_baselines(Z, y, config, rng, basis).all_data
