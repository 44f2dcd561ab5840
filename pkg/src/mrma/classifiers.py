"""Weak linear classifiers on coefficient vectors.

Training is deliberately plain: fixed-iteration full-batch gradient descent
for logistic loss and a deterministic Pegasos-style subgradient loop for the
hinge loss. Determinism matters more than speed here because every simulated
run must replay exactly from its seed. The classifier algebra (negation and
weighted combination) is what model reversal and model averaging operate on.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .basis import BasisSpec, FunctionalSample, reconstruct
from .validation import as_feature_matrix, as_pm1_labels, require_positive_int

TRAIN_METHODS = ("logistic", "linear-svm")


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings for the weak learners.

    The iteration count doubles as early-stopping regularization: under
    heavy feature noise the log-loss saturates within a few steps and every
    further full-batch iteration just drifts the intercept along a constant
    gradient, which flattens the ensemble's diversity. A hundred iterations
    keeps members diverse while converging fine on clean data.
    """

    method: str = "logistic"
    learning_rate: float = 0.1
    iterations: int = 100
    regularization: float = 1e-3

    def __post_init__(self):
        if self.method not in TRAIN_METHODS:
            raise ValueError(f"method must be one of {TRAIN_METHODS}, got {self.method!r}")
        require_positive_int("iterations", self.iterations)
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.regularization < 0.0:
            raise ValueError("regularization must be nonnegative")
        if self.method == "linear-svm" and self.regularization == 0.0:
            raise ValueError("linear-svm needs regularization > 0 (step size is 1/(reg*t))")


@dataclass(frozen=True)
class LinearClassifier:
    """Intercept plus coefficient vector; scores are alpha + z . b.

    When the coefficients live in a basis-projected space, ``basis`` records
    which basis, so the slope can be mapped back to a function of t.
    """

    alpha: float
    b: np.ndarray
    basis: BasisSpec | None = None

    def __post_init__(self):
        b = np.array(self.b, dtype=float)
        if b.ndim != 1:
            raise ValueError("b must be a 1-D coefficient vector")
        b.setflags(write=False)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "b", b)

    @property
    def dimension(self) -> int:
        return self.b.size


def predict_score(clf: LinearClassifier, z):
    """alpha + z . b for one vector (scalar out) or row vectors (array out)."""
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    Z = as_feature_matrix(z)
    if Z.shape[1] != clf.dimension:
        raise ValueError(f"expected {clf.dimension} features, got {Z.shape[1]}")
    scores = clf.alpha + Z @ clf.b
    return float(scores[0]) if single else scores


def predict_label(clf: LinearClassifier, z):
    """Sign of the score, with the tie score == 0 resolved to +1."""
    scores = predict_score(clf, z)
    if np.isscalar(scores):
        return 1 if scores >= 0.0 else -1
    return np.where(scores >= 0.0, 1, -1)


def negate(clf: LinearClassifier) -> LinearClassifier:
    """Flip the decision boundary; every prediction is exactly complemented."""
    return replace(clf, alpha=-clf.alpha, b=-np.asarray(clf.b))


def combine(clfs: list[LinearClassifier], weights) -> LinearClassifier:
    """Convex combination of classifiers; the score of the result is the
    weighted sum of member scores."""
    if not clfs:
        raise ValueError("need at least one classifier to combine")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(clfs),):
        raise ValueError("weights must match the number of classifiers")
    if np.any(weights < 0.0):
        raise ValueError("weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {weights.sum()}")
    first = clfs[0]
    for clf in clfs[1:]:
        if clf.dimension != first.dimension or clf.basis != first.basis:
            raise ValueError("all classifiers must share dimension and basis")
    alpha = float(np.dot(weights, [c.alpha for c in clfs]))
    b = np.einsum("i,ij->j", weights, np.vstack([c.b for c in clfs]))
    return LinearClassifier(alpha, b, first.basis)


def slope_function(clf: LinearClassifier, times) -> FunctionalSample:
    """Slope of the classifier as a curve, sum_k b_k phi_k(t)."""
    if clf.basis is None:
        raise ValueError("classifier has no basis attached")
    return reconstruct(clf.b, clf.basis, times)


def classifier_record(clf: LinearClassifier, method: str) -> list:
    """Flat serialization (method, alpha, coefficients..., basis descriptor)."""
    basis = clf.basis.describe() if clf.basis is not None else f"vector:{clf.dimension}"
    return [method, clf.alpha, *clf.b.tolist(), basis]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def logistic_loss_gradient(alpha: float, b: np.ndarray, Z: np.ndarray, y: np.ndarray,
                           regularization: float):
    """Mean log-loss with an l2 penalty on b, and its gradient in (alpha, b)."""
    scores = alpha + Z @ b
    margins = y * scores
    # log(1 + exp(-m)) computed stably
    loss = float(np.mean(np.logaddexp(0.0, -margins))) + 0.5 * regularization * float(b @ b)
    weight = -y * _sigmoid(-margins) / y.size
    grad_alpha = float(np.sum(weight))
    grad_b = Z.T @ weight + regularization * b
    return loss, grad_alpha, grad_b


def _train_logistic(Z, y, config: TrainConfig):
    alpha, b = 0.0, np.zeros(Z.shape[1])
    for _ in range(config.iterations):
        _, g_alpha, g_b = logistic_loss_gradient(alpha, b, Z, y, config.regularization)
        alpha -= config.learning_rate * g_alpha
        b -= config.learning_rate * g_b
    return alpha, b


def _train_linear_svm(Z, y, config: TrainConfig):
    # Full-batch subgradient on hinge loss with the Pegasos step 1/(reg * t).
    alpha, b = 0.0, np.zeros(Z.shape[1])
    reg = config.regularization
    for t in range(1, config.iterations + 1):
        margins = y * (alpha + Z @ b)
        active = margins < 1.0
        step = 1.0 / (reg * t)
        g_alpha = -np.sum(y[active]) / y.size
        g_b = reg * b - (y[active] @ Z[active]) / y.size
        alpha -= step * g_alpha
        b -= step * g_b
    return alpha, b


def train(Z, y, config: TrainConfig | None = None,
          basis: BasisSpec | None = None) -> LinearClassifier:
    """Fit a linear classifier on labeled coefficient vectors.

    Labels are +-1 (0/1 accepted and mapped). A single-class sample yields
    the constant classifier (alpha = label, b = 0) rather than an error, so
    heavily noised subsamples never abort a run.
    """
    config = config or TrainConfig()
    Z = as_feature_matrix(Z)
    y = as_pm1_labels(y)
    if Z.shape[0] != y.size:
        raise ValueError("Z and y must have matching lengths")
    if y.size < 2:
        raise ValueError("need at least two training samples")
    if np.all(y == y[0]):
        return LinearClassifier(float(y[0]), np.zeros(Z.shape[1]), basis)
    if config.method == "logistic":
        alpha, b = _train_logistic(Z, y, config)
    else:
        alpha, b = _train_linear_svm(Z, y, config)
    if not (np.isfinite(alpha) and np.all(np.isfinite(b))):
        raise ArithmeticError("training diverged to non-finite parameters")
    return LinearClassifier(alpha, b, basis)
