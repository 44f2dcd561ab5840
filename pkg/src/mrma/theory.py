"""Numeric counterparts of the analysis quantities, used for validation and
figure data: pointwise dataset utility, the posterior-drift map, the
importance weight of a perturbed feature point, the probability that
reversal picks the better of a classifier and its negation, and a Monte
Carlo estimate of the marginal distortion of the feature distribution.
"""

from __future__ import annotations

import math

import numpy as np

from .mechanisms import feature_noise_scale
from .validation import require_positive, require_positive_int


def utility_g(eta: float, eta_eps: float) -> float:
    """Agreement probability 2 (eta - 1/2)(eta_eps - 1/2) + 1/2.

    At or above one half exactly when the two conditional probabilities
    deviate from one half in the same direction.
    """
    for name, value in (("eta", eta), ("eta_eps", eta_eps)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return 2.0 * (eta - 0.5) * (eta_eps - 0.5) + 0.5


def posterior_drift_eta(eta: float, q: float) -> float:
    """Label-noise-only drift of the conditional: 1/2 + 2 (q - 1/2)(eta - 1/2)."""
    return 0.5 + 2.0 * (q - 0.5) * (eta - 0.5)


def _laplace_density(x: np.ndarray, scale: float) -> np.ndarray:
    return np.exp(-np.abs(x) / scale) / (2.0 * scale)


def weight_omega(z, z0: float, epsilon_z: float, quad_panels: int = 10_000):
    """Importance weight of a true feature value given an observed one.

    For the 1-D illustration (true feature uniform on (-1, 1), Laplace noise
    of scale 2/epsilon_z) this is the noise density at z0 - z divided by its
    average over the uniform distribution, so its expectation over z is one
    by construction. The normalizer uses trapezoid quadrature with panel
    doubling from ``quad_panels`` until it stabilizes.
    """
    require_positive("epsilon_z", epsilon_z)
    scale = 2.0 / epsilon_z
    z = np.asarray(z, dtype=float)
    if z.size and (np.min(z) < -1.0 or np.max(z) > 1.0):
        raise ValueError("z must lie in [-1, 1]")

    def average(panels: int) -> float:
        grid = np.linspace(-1.0, 1.0, panels + 1)
        return float(np.trapezoid(_laplace_density(z0 - grid, scale), grid)) / 2.0

    panels = quad_panels
    denom = average(panels)
    for _ in range(6):
        refined = average(2 * panels)
        if abs(refined - denom) <= 1e-12 + 1e-9 * abs(refined):
            denom = refined
            break
        panels *= 2
        denom = refined
    out = _laplace_density(z0 - z, scale) / denom
    return float(out) if out.ndim == 0 else out


# Rational tail expansion of the standard normal CDF (Abramowitz & Stegun
# 26.2.17); absolute error below 7.5e-8, far inside the tolerances used here.
_NCDF_COEF = (0.319381530, -0.356563782, 1.781477937, -1.821255978, 1.330274429)


def normal_cdf(x: float) -> float:
    ax = abs(x)
    k = 1.0 / (1.0 + 0.2316419 * ax)
    poly = 0.0
    for c in reversed(_NCDF_COEF):
        poly = (poly + c) * k
    tail = math.exp(-0.5 * ax * ax) / math.sqrt(2.0 * math.pi) * poly
    return 1.0 - tail if x >= 0.0 else tail


def reversal_success_probability(r: float, n1: int) -> float:
    """Probability that n1 evaluation samples rank a classifier of true
    accuracy r above its negation: Phi(sqrt(n1) |r - 1/2| / sqrt(r (1 - r)))."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie strictly inside (0, 1), got {r}")
    require_positive_int("n1", n1)
    return normal_cdf(math.sqrt(n1) * abs(r - 0.5) / math.sqrt(r * (1.0 - r)))


def mc_total_variation(d: int, epsilon_z: float, n_samples: int, bins_per_axis: int,
                       rng: np.random.Generator) -> float:
    """Histogram estimate of the distortion between the uniform feature
    distribution on [-1, 1]^d and its Laplace-perturbed counterpart.

    Reported as the per-coordinate marginal total variation averaged over
    coordinates (for d = 1 that is the plain histogram estimate). Joint
    histograms are infeasible beyond a couple of dimensions, and mixing
    joint and marginal estimates across d would break comparability, so the
    marginal statistic is used for every d. Both samples share a common
    binning over [-1 - 8 lambda, 1 + 8 lambda] with lambda capped at one:
    an uncapped window would scale with the noise and starve the unit box
    of resolution, which destroys comparability across d. Mass outside the
    window (heavy-noise tails) is folded into the edge bins.
    """
    require_positive_int("d", d)
    require_positive("epsilon_z", epsilon_z, allow_inf=True)
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10000")
    if bins_per_axis < 4:
        raise ValueError("bins_per_axis must be at least 4")
    scale = feature_noise_scale(d, epsilon_z)
    reach = 1.0 + 8.0 * min(scale, 1.0)
    edges = np.linspace(-reach, reach, bins_per_axis + 1)

    original = rng.uniform(-1.0, 1.0, size=(n_samples, d))
    perturbed = rng.uniform(-1.0, 1.0, size=(n_samples, d))
    if scale > 0.0:
        u = rng.random((n_samples, d)) - 0.5
        perturbed = perturbed - scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
        np.clip(perturbed, -reach, reach, out=perturbed)

    tv = 0.0
    for k in range(d):
        p_hat, _ = np.histogram(original[:, k], bins=edges)
        q_hat, _ = np.histogram(perturbed[:, k], bins=edges)
        tv += 0.5 * np.abs(p_hat - q_hat).sum() / n_samples
    return tv / d
