"""Privatized binary-feedback evaluation of a trained classifier.

Each evaluation client holds its TRUE (unperturbed) data, checks whether the
classifier labels it correctly, and reports that single bit through
randomized response. Averaging the reported bits and inverting the response
map gives an unbiased estimate of the classifier's true accuracy together
with a distribution-free variance bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifiers import LinearClassifier, predict_label
from .mechanisms import randomized_response, rr_keep_probability
from .validation import as_feature_matrix, as_pm1_labels, require_positive


def debiased_accuracy(raw_mean: float, epsilon_v: float) -> float:
    """Invert the randomized-response expectation map: (r_hat + q - 1)/(2q - 1).

    Not clipped to [0, 1]; clipping would bias the estimator, and the
    averaging weights already floor at zero.
    """
    require_positive("epsilon_v", epsilon_v, allow_inf=True)
    q = rr_keep_probability(epsilon_v)
    if math.isinf(epsilon_v):
        return float(raw_mean)
    return (raw_mean + q - 1.0) / (2.0 * q - 1.0)


def accuracy_variance_bound(epsilon_v: float, n1: int) -> float:
    """Upper bound ((e^eps + 1)/(e^eps - 1))^2 / (4 n1) on Var of the estimate."""
    require_positive("epsilon_v", epsilon_v, allow_inf=True)
    if n1 < 1:
        raise ValueError("n1 must be positive")
    # (e^eps + 1)/(e^eps - 1) = 1/tanh(eps/2), which handles eps = inf cleanly
    ratio = 1.0 / math.tanh(epsilon_v / 2.0) if math.isfinite(epsilon_v) else 1.0
    return ratio * ratio / (4.0 * n1)


@dataclass(frozen=True)
class AccuracyEstimate:
    """Debiased accuracy of one classifier from privatized feedback bits."""

    n1: int
    raw_mean: float
    debiased: float
    epsilon_v: float
    variance_bound: float


def client_feedback(clf: LinearClassifier, z_true, y_true: int,
                    epsilon_v: float, rng: np.random.Generator) -> int:
    """One client's privatized correctness bit for one classifier.

    The prediction runs on the client's unperturbed features; only the
    resulting 0/1 correctness indicator passes through randomized response.
    """
    correct = int(predict_label(clf, np.asarray(z_true, dtype=float)) == y_true)
    return randomized_response(correct, epsilon_v, rng, domain="01")


def estimate_accuracy(bits, epsilon_v: float) -> AccuracyEstimate:
    """Aggregate privatized feedback bits into a debiased accuracy estimate."""
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("need at least one feedback bit")
    if not set(np.unique(bits).tolist()) <= {0, 1}:
        raise ValueError("bits must be 0/1 values")
    require_positive("epsilon_v", epsilon_v, allow_inf=True)
    raw = float(np.mean(bits))
    return AccuracyEstimate(
        n1=int(bits.size),
        raw_mean=raw,
        debiased=debiased_accuracy(raw, epsilon_v),
        epsilon_v=float(epsilon_v),
        variance_bound=accuracy_variance_bound(epsilon_v, int(bits.size)),
    )


def evaluate_classifier(clf: LinearClassifier, Z_eval, y_eval,
                        epsilon_v: float, rng: np.random.Generator) -> AccuracyEstimate:
    """Query each evaluation client once and aggregate the privatized bits."""
    Z = as_feature_matrix(Z_eval, "Z_eval")
    y = as_pm1_labels(y_eval, "y_eval")
    if Z.shape[0] != y.size:
        raise ValueError("Z_eval and y_eval must have matching lengths")
    if y.size == 0:
        raise ValueError("need at least one evaluation client")
    correct = (predict_label(clf, Z) == y).astype(int)
    bits = randomized_response(correct, epsilon_v, rng, domain="01")
    return estimate_accuracy(bits, epsilon_v)
