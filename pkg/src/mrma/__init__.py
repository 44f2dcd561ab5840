"""Classification under local differential privacy with model reversal and
model averaging, plus the simulation harness that exercises it."""

__version__ = "0.1.0"

from .basis import BasisSpec, FunctionalSample, evaluate_basis, project, reconstruct, rescale
from .classifiers import (
    LinearClassifier,
    TrainConfig,
    combine,
    negate,
    predict_label,
    predict_score,
    slope_function,
    train,
)
from .ensemble import (
    MrmaConfig,
    SingleServerRun,
    averaging_weights,
    baseline_all_data,
    baseline_averaging,
    baseline_voting,
    model_reversal,
    run_single_server,
)
from .feedback import AccuracyEstimate, client_feedback, estimate_accuracy, evaluate_classifier
from .mechanisms import (
    NO_PRIVACY,
    LaplaceParams,
    PrivacyBudget,
    laplace_sample,
    perturb_features,
    randomized_response,
    rr_keep_probability,
    split_budget,
)
from .multiserver import ServerRound, ServerSpec, run_round
from .theory import (
    mc_total_variation,
    posterior_drift_eta,
    reversal_success_probability,
    utility_g,
    weight_omega,
)

__all__ = [
    "AccuracyEstimate",
    "BasisSpec",
    "FunctionalSample",
    "LaplaceParams",
    "LinearClassifier",
    "MrmaConfig",
    "NO_PRIVACY",
    "PrivacyBudget",
    "ServerRound",
    "ServerSpec",
    "SingleServerRun",
    "TrainConfig",
    "averaging_weights",
    "baseline_all_data",
    "baseline_averaging",
    "baseline_voting",
    "client_feedback",
    "combine",
    "estimate_accuracy",
    "evaluate_classifier",
    "evaluate_basis",
    "laplace_sample",
    "mc_total_variation",
    "model_reversal",
    "negate",
    "perturb_features",
    "posterior_drift_eta",
    "predict_label",
    "predict_score",
    "project",
    "randomized_response",
    "reconstruct",
    "rescale",
    "reversal_success_probability",
    "rr_keep_probability",
    "run_round",
    "run_single_server",
    "slope_function",
    "split_budget",
    "train",
    "utility_g",
    "weight_omega",
]
