"""Synthetic functional data for the simulation studies.

Covariate curves are random cosine series with unit-variance uniform scores;
labels follow a logistic model driven by the inner product of the curve with
a slope function. Slopes come in three flavors: a fixed damped series, a
randomized damped series (heterogeneous servers), and a rough Gaussian
process (pure-noise servers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, basis_matrix
from .validation import as_float_array

#: Number of series terms in the generative model.
N_SERIES_TERMS = 50

#: Observation grid size; fine enough to resolve all 50 cosine frequencies.
DEFAULT_GRID_SIZE = 256

SLOPE_KINDS = ("fixed-series", "uniform-random-series", "gaussian-process")


def time_grid(n: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Equispaced observation grid on [0, 1]."""
    return np.linspace(0.0, 1.0, n)


@dataclass(frozen=True)
class SlopeSpec:
    """How a server's slope function is built.

    For the series kinds the slope is sum_j gamma_j (-1)^(j+1) j^-2 phi_j(t)
    over the 50 cosine basis functions, with gamma_j either a fixed vector
    or independent uniform draws from ``gamma_range``. The Gaussian-process
    kind draws the slope directly on the grid from a zero-mean process with
    covariance exp(-rate |s - t|).
    """

    kind: str
    gammas: tuple | None = None
    gamma_range: tuple[float, float] | None = None
    gp_rate: float = 15.0
    alpha0: float = 0.1

    def __post_init__(self):
        if self.kind not in SLOPE_KINDS:
            raise ValueError(f"kind must be one of {SLOPE_KINDS}, got {self.kind!r}")
        if self.kind == "fixed-series":
            if self.gammas is None or len(self.gammas) != N_SERIES_TERMS:
                raise ValueError(f"fixed-series needs {N_SERIES_TERMS} gamma values")
            object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if self.kind == "uniform-random-series" and self.gamma_range is None:
            raise ValueError("uniform-random-series needs gamma_range")


def single_server_slope(alpha0: float = 0.1) -> SlopeSpec:
    """The fixed damped-series slope used by the single-server study."""
    return SlopeSpec(kind="fixed-series", gammas=(4.0,) * N_SERIES_TERMS, alpha0=alpha0)


def _series_matrix(times: np.ndarray) -> np.ndarray:
    """Cosine basis functions phi_1..phi_50 evaluated on the grid, (50, T)."""
    return basis_matrix(BasisSpec("fourier", N_SERIES_TERMS), times).T


def series_slope_values(gammas, times) -> np.ndarray:
    """Slope curve sum_j gamma_j (-1)^(j+1) j^-2 phi_j(t) on the grid."""
    gammas = as_float_array(gammas, "gammas")
    j = np.arange(1, gammas.size + 1)
    coeffs = gammas * ((-1.0) ** (j + 1)) / j**2
    return coeffs @ _series_matrix(np.asarray(times, dtype=float))


def sample_slope(spec: SlopeSpec, times, rng: np.random.Generator) -> np.ndarray:
    """Materialize a slope curve on the grid (random kinds consume the rng)."""
    times = as_float_array(times, "times")
    if spec.kind == "fixed-series":
        return series_slope_values(spec.gammas, times)
    if spec.kind == "uniform-random-series":
        low, high = spec.gamma_range
        gammas = rng.uniform(low, high, size=N_SERIES_TERMS)
        return series_slope_values(gammas, times)
    gap = np.abs(times[:, None] - times[None, :])
    cov = np.exp(-spec.gp_rate * gap)
    # tiny jitter keeps the Cholesky factorization of the dense kernel stable
    chol = np.linalg.cholesky(cov + 1e-10 * np.eye(times.size))
    return chol @ rng.standard_normal(times.size)


def generate_covariates(n: int, times, rng: np.random.Generator) -> np.ndarray:
    """Draw n covariate curves on the grid; one row per curve.

    Each curve is sum_j xi_j zeta_j phi_j(t) with xi_j uniform on
    (-sqrt(3), sqrt(3)) (unit variance) and zeta_j = (-1)^(j+1) / j.
    """
    times = as_float_array(times, "times")
    j = np.arange(1, N_SERIES_TERMS + 1)
    zeta = ((-1.0) ** (j + 1)) / j
    xi = rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=(n, N_SERIES_TERMS))
    return (xi * zeta) @ _series_matrix(times)


def generate_covariate(rng: np.random.Generator, times=None) -> np.ndarray:
    """A single covariate curve on the (default) grid."""
    times = time_grid() if times is None else np.asarray(times, dtype=float)
    return generate_covariates(1, times, rng)[0]


def classification_scores(curves, slope_values, alpha0: float, times) -> np.ndarray:
    """f(X) = alpha0 + integral X(t) beta(t) dt via the trapezoid rule."""
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    return alpha0 + np.trapezoid(curves * np.asarray(slope_values, dtype=float),
                                 np.asarray(times, dtype=float), axis=1)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def generate_labels(curves, slope_values, alpha0: float, times,
                    rng: np.random.Generator) -> np.ndarray:
    """Draw +-1 labels with P(Y = 1) = logistic(f(X))."""
    p = _sigmoid(classification_scores(curves, slope_values, alpha0, times))
    return np.where(rng.random(p.size) < p, 1, -1)


def generate_label(curve, slope_values, alpha0: float, times,
                   rng: np.random.Generator) -> int:
    return int(generate_labels(curve, slope_values, alpha0, times, rng)[0])


def bayes_accuracy(spec: SlopeSpec, n_mc: int, rng: np.random.Generator,
                   times=None, slope_values=None) -> float:
    """Monte Carlo estimate of the best achievable accuracy, 1/2 + E|p - 1/2|.

    Random slope kinds are materialized once (pass ``slope_values`` to pin a
    particular draw).
    """
    if n_mc < 1000:
        raise ValueError("n_mc must be at least 1000")
    times = time_grid() if times is None else np.asarray(times, dtype=float)
    if slope_values is None:
        slope_values = sample_slope(spec, times, rng)
    total = 0.0
    done = 0
    while done < n_mc:
        block = min(100_000, n_mc - done)
        curves = generate_covariates(block, times, rng)
        p = _sigmoid(classification_scores(curves, slope_values, spec.alpha0, times))
        total += float(np.sum(np.abs(p - 0.5)))
        done += block
    return 0.5 + total / n_mc
