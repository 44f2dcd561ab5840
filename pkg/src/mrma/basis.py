"""Functional-data representation.

Curves observed on a grid in [0, 1] are projected onto a finite basis
(Fourier cosine or clamped cubic B-spline) by ordinary least squares, and the
resulting coefficient vectors are rescaled into [-1, 1] so downstream noise
mechanisms have a fixed sensitivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_float_array

BASIS_KINDS = ("fourier", "cubic-bspline")
RESCALE_KINDS = ("tanh", "max-abs")

_SPLINE_ORDER = 4  # cubic


@dataclass(frozen=True)
class BasisSpec:
    """A basis family and its truncation dimension on the domain [0, 1]."""

    kind: str
    dimension: int

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"kind must be one of {BASIS_KINDS}, got {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == "cubic-bspline" and self.dimension < _SPLINE_ORDER:
            raise ValueError("cubic-bspline basis needs dimension >= 4")

    def describe(self) -> str:
        return f"{self.kind}:{self.dimension}"


@dataclass(frozen=True)
class FunctionalSample:
    """A curve observed at strictly increasing time points in [0, 1]."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = as_float_array(self.times, "times")
        values = as_float_array(self.values, "values")
        if times.ndim != 1 or values.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if times.size and (times[0] < 0.0 or times[-1] > 1.0):
            raise ValueError("times must lie in [0, 1]")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def _spline_knots(dimension: int) -> np.ndarray:
    """Clamped equidistant knot vector for ``dimension`` cubic B-splines."""
    interior = np.linspace(0.0, 1.0, dimension - _SPLINE_ORDER + 2)[1:-1]
    return np.concatenate([np.zeros(_SPLINE_ORDER), interior, np.ones(_SPLINE_ORDER)])


def _spline_matrix(dimension: int, t: np.ndarray) -> np.ndarray:
    """Cox-de Boor recursion, vectorized over evaluation points."""
    knots = _spline_knots(dimension)
    n_knots = knots.size
    # Order-1 indicators on half-open spans; the final span also owns t = 1.
    B = np.zeros((t.size, n_knots - 1))
    for i in range(n_knots - 1):
        if knots[i + 1] > knots[i]:
            inside = (t >= knots[i]) & (t < knots[i + 1])
            if knots[i + 1] == knots[-1]:
                inside |= t == knots[-1]
            B[inside, i] = 1.0
    for k in range(2, _SPLINE_ORDER + 1):
        nxt = np.zeros((t.size, n_knots - k))
        for i in range(n_knots - k):
            den1 = knots[i + k - 1] - knots[i]
            den2 = knots[i + k] - knots[i + 1]
            if den1 > 0.0:
                nxt[:, i] += (t - knots[i]) / den1 * B[:, i]
            if den2 > 0.0:
                nxt[:, i] += (knots[i + k] - t) / den2 * B[:, i + 1]
        B = nxt
    return B


def basis_matrix(spec: BasisSpec, times) -> np.ndarray:
    """Evaluate every basis function on a grid; shape (len(times), dimension)."""
    t = np.atleast_1d(as_float_array(times, "times"))
    if t.size and (t.min() < 0.0 or t.max() > 1.0):
        raise ValueError("times must lie in [0, 1]")
    if spec.kind == "fourier":
        cols = [np.ones_like(t)]
        for j in range(2, spec.dimension + 1):
            cols.append(np.sqrt(2.0) * np.cos((j - 1) * np.pi * t))
        return np.column_stack(cols)
    return _spline_matrix(spec.dimension, t)


def evaluate_basis(spec: BasisSpec, t: float) -> np.ndarray:
    """Values of all basis functions at one point in [0, 1]."""
    return basis_matrix(spec, [float(t)])[0]


def project(sample: FunctionalSample, spec: BasisSpec) -> np.ndarray:
    """Least-squares basis coefficients of a discretely observed curve.

    Solves the normal equations with a Cholesky factorization; a
    rank-deficient design (too few points, or duplicated basis columns)
    raises numpy.linalg.LinAlgError.
    """
    if sample.times.size < spec.dimension:
        raise ValueError(
            f"need at least dimension={spec.dimension} observation points, "
            f"got {sample.times.size}"
        )
    design = basis_matrix(spec, sample.times)
    gram = design.T @ design
    chol = np.linalg.cholesky(gram)  # raises LinAlgError when rank-deficient
    rhs = design.T @ sample.values
    return _cho_solve(chol, rhs)


def _cho_solve(chol: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    y = np.linalg.solve(chol, rhs)
    return np.linalg.solve(chol.T, y)


def project_rows(values: np.ndarray, design: np.ndarray) -> np.ndarray:
    """Project many curves (rows) observed on a shared grid with one design.

    ``design`` is a precomputed ``basis_matrix`` for that grid.
    """
    gram = design.T @ design
    chol = np.linalg.cholesky(gram)
    rhs = values @ design
    return _cho_solve(chol, rhs.T).T


def rescale(z, kind: str) -> np.ndarray:
    """Map coefficient vectors into [-1, 1] componentwise.

    "tanh" squashes each entry; "max-abs" divides each vector by its own
    largest magnitude, preserving signs and relative sizes. An all-zero
    vector stays all-zero under max-abs (it carries no signal either way).
    Accepts a single vector or a matrix of row vectors.
    """
    if kind not in RESCALE_KINDS:
        raise ValueError(f"kind must be one of {RESCALE_KINDS}, got {kind!r}")
    z = as_float_array(z, "z")
    if kind == "tanh":
        return np.tanh(z)
    peak = np.max(np.abs(z), axis=-1, keepdims=True)
    return np.divide(z, peak, out=np.zeros_like(z), where=peak > 0.0)


def reconstruct(coeffs, spec: BasisSpec, times) -> FunctionalSample:
    """Evaluate the basis expansion with the given coefficients on a grid."""
    coeffs = as_float_array(coeffs, "coeffs")
    if coeffs.shape != (spec.dimension,):
        raise ValueError(f"coeffs must have length {spec.dimension}")
    t = np.atleast_1d(as_float_array(times, "times"))
    return FunctionalSample(t, basis_matrix(spec, t) @ coeffs)
