"""Scikit-learn style wrappers so the pipeline composes with the wider
ecosystem: a curve-to-coefficients transformer, the train-portion max-abs
scaler for vector data, the weak-learner classifier, and the full
privacy-preserving ensemble as a fit/predict estimator.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .basis import BasisSpec, basis_matrix, project_rows, rescale
from .classifiers import TrainConfig, predict_label, predict_score, train
from .datagen import time_grid
from .ensemble import MrmaConfig, run_single_server
from .mechanisms import split_budget
from .validation import as_pm1_labels


class CurveBasisFeatures(BaseEstimator, TransformerMixin):
    """Project curves observed on a shared grid to rescaled basis coefficients.

    Rows of X are curve values. The grid defaults to an equispaced grid on
    [0, 1] matching the column count; pass ``times`` to override.
    """

    def __init__(self, basis="fourier", dimension=4, rescale_kind="tanh", times=None):
        self.basis = basis
        self.dimension = dimension
        self.rescale_kind = rescale_kind
        self.times = times

    def fit(self, X, y=None):
        X = check_array(X)
        times = np.asarray(self.times, dtype=float) if self.times is not None \
            else time_grid(X.shape[1])
        if times.size != X.shape[1]:
            raise ValueError("times length must match the number of columns")
        self.times_ = times
        self.design_ = basis_matrix(BasisSpec(self.basis, self.dimension), times)
        return self

    def transform(self, X):
        check_is_fitted(self, "design_")
        X = check_array(X)
        if X.shape[1] != self.times_.size:
            raise ValueError("X has a different grid than the fitted one")
        coeffs = project_rows(X, self.design_)
        if self.rescale_kind is None:
            return coeffs
        return rescale(coeffs, self.rescale_kind)


class TrainPortionMaxAbsScaler(BaseEstimator, TransformerMixin):
    """Per-feature max-abs scaling fitted on the training portion only.

    Transform divides by the fitted scales and clips to [-1, 1], so unseen
    rows can never violate the sensitivity bound the noise assumes.
    """

    def fit(self, X, y=None):
        X = check_array(X)
        scale = np.max(np.abs(X), axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        X = check_array(X)
        return np.clip(X / self.scale_, -1.0, 1.0)


class LinearGDClassifier(BaseEstimator, ClassifierMixin):
    """Deterministic fixed-iteration linear classifier (logistic or hinge)."""

    def __init__(self, method="logistic", learning_rate=0.1, iterations=500,
                 regularization=1e-3):
        self.method = method
        self.learning_rate = learning_rate
        self.iterations = iterations
        self.regularization = regularization

    def _config(self) -> TrainConfig:
        return TrainConfig(self.method, self.learning_rate, self.iterations,
                           self.regularization)

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.model_ = train(X, as_pm1_labels(y), self._config())
        self.classes_ = np.array([-1, 1])
        self.coef_ = self.model_.b[None, :]
        self.intercept_ = np.array([self.model_.alpha])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        return predict_score(self.model_, check_array(X))

    def predict(self, X):
        check_is_fitted(self, "model_")
        return predict_label(self.model_, check_array(X))


class MRMAClassifier(BaseEstimator, ClassifierMixin):
    """The full single-server protocol as a fit/predict estimator.

    ``fit`` treats the rows of X as the client pool holding true rescaled
    features in [-1, 1]: the first ``n_train`` rows upload perturbed pairs,
    the next ``n_eval`` rows answer privatized feedback queries. The fitted
    attributes expose the averaged classifier and the run diagnostics.
    """

    def __init__(self, epsilon=1.0, n_train=500, n_eval=2500, subsample_size=50,
                 eval_subset_size=50, n_members=50, cutoff=0.8, method="logistic",
                 learning_rate=0.1, iterations=500, regularization=1e-3,
                 random_state=None):
        self.epsilon = epsilon
        self.n_train = n_train
        self.n_eval = n_eval
        self.subsample_size = subsample_size
        self.eval_subset_size = eval_subset_size
        self.n_members = n_members
        self.cutoff = cutoff
        self.method = method
        self.learning_rate = learning_rate
        self.iterations = iterations
        self.regularization = regularization
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        config = MrmaConfig(
            n_train=self.n_train,
            n_eval=self.n_eval,
            subsample_size=self.subsample_size,
            eval_subset_size=self.eval_subset_size,
            n_members=self.n_members,
            budget=split_budget(self.epsilon, X.shape[1]),
            cutoff=self.cutoff,
            train=TrainConfig(self.method, self.learning_rate, self.iterations,
                              self.regularization),
        )
        rng = np.random.default_rng(self.random_state)
        self.run_ = run_single_server(config, X, as_pm1_labels(y), rng)
        self.final_ = self.run_.final
        self.classes_ = np.array([-1, 1])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "final_")
        return predict_score(self.final_, check_array(X))

    def predict(self, X):
        check_is_fitted(self, "final_")
        return predict_label(self.final_, check_array(X))
