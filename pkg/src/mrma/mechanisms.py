"""Randomness injection for epsilon-LDP.

Budget splitting between features and labels, Laplace noise for bounded
feature vectors, and randomized response for binary values. Every sampling
function takes its random generator explicitly, so replay is exact given a
seed and call order, and concurrent callers just need distinct generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_unit_box, require_positive, require_positive_int

INF = math.inf

#: Sensitivity of a single coordinate bounded in [-1, 1].
COORDINATE_SENSITIVITY = 2.0


@dataclass(frozen=True)
class PrivacyBudget:
    """Allocation of a total privacy budget across protocol channels.

    ``epsilon_z`` protects uploaded feature vectors, ``epsilon_y`` uploaded
    labels, and ``epsilon_v`` the binary evaluation feedback. ``math.inf`` is
    the explicit no-noise sentinel for any component. When both epsilon_z and
    epsilon_y are finite they must sum to epsilon_total.
    """

    epsilon_total: float
    epsilon_z: float
    epsilon_y: float
    epsilon_v: float

    def __post_init__(self):
        for name in ("epsilon_total", "epsilon_z", "epsilon_y", "epsilon_v"):
            require_positive(name, getattr(self, name), allow_inf=True)
        if math.isfinite(self.epsilon_z) and math.isfinite(self.epsilon_y):
            total = self.epsilon_z + self.epsilon_y
            if not math.isclose(total, self.epsilon_total, rel_tol=1e-12, abs_tol=0.0):
                raise ValueError(
                    f"epsilon_z + epsilon_y = {total} does not match "
                    f"epsilon_total = {self.epsilon_total}"
                )

    def with_evaluation(self, epsilon_v: float) -> "PrivacyBudget":
        """Same feature/label split with a different evaluation budget."""
        return PrivacyBudget(self.epsilon_total, self.epsilon_z, self.epsilon_y, epsilon_v)


#: Budget sentinel for noise-free runs.
NO_PRIVACY = PrivacyBudget(INF, INF, INF, INF)


def split_budget(epsilon: float, d: int) -> PrivacyBudget:
    """Split a total budget for a d-dimensional feature vector plus its label.

    The label channel receives epsilon/(d+1) and the feature channel the
    remaining d*epsilon/(d+1), i.e. one (d+1)-th per reported coordinate.
    The evaluation budget defaults to the full epsilon because dedicated
    evaluation clients answer exactly one query.
    """
    require_positive("epsilon", epsilon, allow_inf=True)
    require_positive_int("d", d)
    if math.isinf(epsilon):
        return PrivacyBudget(INF, INF, INF, INF)
    epsilon_y = epsilon / (d + 1)
    epsilon_z = epsilon - epsilon_y
    return PrivacyBudget(epsilon, epsilon_z, epsilon_y, epsilon)


@dataclass(frozen=True)
class LaplaceParams:
    """Scale of the per-coordinate Laplace noise, lambda = d * 2 / epsilon_z."""

    scale: float

    def __post_init__(self):
        require_positive("scale", self.scale)


def feature_noise_scale(d: int, epsilon_z: float) -> float:
    """Per-coordinate Laplace scale for a d-dimensional vector in [-1, 1]^d.

    Returns 0.0 for an infinite budget (no noise).
    """
    require_positive_int("d", d)
    require_positive("epsilon_z", epsilon_z, allow_inf=True)
    if math.isinf(epsilon_z):
        return 0.0
    return d * COORDINATE_SENSITIVITY / epsilon_z


def laplace_sample(rng: np.random.Generator, scale: float, size=None):
    """Draw from Laplace(0, scale) by inverting the CDF on one uniform draw.

    Inverse-CDF sampling keeps replay bit-stable across platforms: one
    uniform variate is consumed per output value.
    """
    require_positive("scale", scale)
    u = rng.random(size) - 0.5
    value = -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    if size is None:
        return float(value)
    return value


def perturb_features(z_star, epsilon_z: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. Laplace noise to a rescaled feature vector (or rows of them).

    Every entry must already lie in [-1, 1]; out-of-range coordinates are an
    error because the noise scale assumes that sensitivity bound. The scale is
    d * 2 / epsilon_z per coordinate, where d is the length of the last axis.
    With an infinite budget the input is returned unchanged.
    """
    z = np.asarray(z_star, dtype=float)
    if z.ndim not in (1, 2):
        raise ValueError("z_star must be a vector or a matrix of row vectors")
    check_unit_box(z, "z_star")
    require_positive("epsilon_z", epsilon_z, allow_inf=True)
    if math.isinf(epsilon_z):
        return z.copy()
    scale = feature_noise_scale(z.shape[-1], epsilon_z)
    return z + laplace_sample(rng, scale, z.shape)


def rr_keep_probability(epsilon: float) -> float:
    """Probability q = e^eps / (1 + e^eps) that randomized response is truthful.

    Accepts epsilon = 0 (returns exactly 0.5, a pure boundary value) and
    epsilon = inf (returns 1.0); the sampling mechanisms themselves reject
    epsilon = 0 because a half-half response carries no signal.
    """
    epsilon = float(epsilon)
    if math.isnan(epsilon) or epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    if math.isinf(epsilon):
        return 1.0
    if epsilon == 0.0:
        return 0.5
    # 1 / (1 + e^-eps), stable for large eps
    return 1.0 / (1.0 + math.exp(-epsilon))


def randomized_response(bits, epsilon: float, rng: np.random.Generator, domain: str = "pm1"):
    """Report ``bits`` truthfully with probability q, flipped otherwise.

    ``domain`` selects the flip rule: "pm1" maps v -> -v for v in {-1,+1},
    "01" maps v -> 1-v for v in {0,1}. The domain is explicit because an
    all-ones input is ambiguous. Scalar in, scalar out; with an infinite
    budget the input is returned unchanged (and no randomness is consumed).
    """
    require_positive("epsilon", epsilon, allow_inf=True)
    if domain not in ("pm1", "01"):
        raise ValueError(f"domain must be 'pm1' or '01', got {domain!r}")
    arr = np.asarray(bits)
    values = set(np.unique(arr).tolist())
    allowed = {-1, 1} if domain == "pm1" else {0, 1}
    if not values <= allowed:
        raise ValueError(f"bits must take values in {sorted(allowed)}, got {sorted(values)}")
    scalar = np.isscalar(bits) or arr.ndim == 0
    if math.isinf(epsilon):
        return bits if scalar else arr.copy()
    q = rr_keep_probability(epsilon)
    keep = rng.random(arr.shape) < q
    flipped = -arr if domain == "pm1" else 1 - arr
    out = np.where(keep, arr, flipped)
    if scalar:
        return int(out)
    return out.astype(int)
