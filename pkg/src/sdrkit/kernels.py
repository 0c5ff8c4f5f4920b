"""Scalar similarity machinery: angles between response differences and
translation-invariant kernels, plus the pairwise weight matrices they induce.

The three kernel families all satisfy ``K(0) = 1``:

* ``gaussian``              ``K(delta) = exp(-||delta||^2 / gamma)``
* ``laplace``               ``K(delta) = exp(-||delta|| / gamma)``
* ``rational_quadratic``    ``K(delta) = 1 - ||delta||^2 / (||delta||^2 + gamma)``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, InvalidVector

KERNEL_FAMILIES = ("gaussian", "laplace", "rational_quadratic")

# Degenerate-pair cutoff: norms at or below 1e-12 * max(|u|, |v|, 1) count as
# zero vectors, and the angle at a zero vector is taken to be 0.  Cosines
# within 1e-12 of +-1 snap to the exact endpoint; collinear pairs would
# otherwise miss 0/pi by ~1e-8 because sqrt(s)^2 != s in floating point.
_NORM_EPS = 1e-12
_COS_SNAP = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its bandwidth ``gamma > 0``."""

    family: str
    gamma: float

    def __post_init__(self) -> None:
        if self.family not in KERNEL_FAMILIES:
            raise InvalidSpec(
                f"unknown kernel family {self.family!r}; choose from {KERNEL_FAMILIES}"
            )
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise InvalidSpec(f"kernel bandwidth must be positive, got {self.gamma}")


def _check_finite_vector(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).ravel()
    if not np.all(np.isfinite(v)):
        raise InvalidVector(f"{name} contains non-finite entries")
    return v


def ang(u: np.ndarray, v: np.ndarray) -> float:
    """Angle in ``[0, pi]`` between two vectors.

    Returns 0 when either argument is numerically zero (the degenerate-pair
    convention used by the triple-sum estimators, where differences of equal
    responses appear as zero vectors).
    """
    u = _check_finite_vector(u, "u")
    v = _check_finite_vector(v, "v")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    eps = _NORM_EPS * max(nu, nv, 1.0)
    if nu <= eps or nv <= eps:
        return 0.0
    c = float(np.dot(u, v)) / (nu * nv)
    if c >= 1.0 - _COS_SNAP:
        return 0.0
    if c <= -1.0 + _COS_SNAP:
        return float(np.pi)
    return float(np.arccos(c))


def kernel_eval(spec: KernelSpec, delta: np.ndarray) -> float:
    """Evaluate ``K(delta)`` for one difference vector; always in ``(0, 1]``."""
    delta = _check_finite_vector(delta, "delta")
    sq = float(np.dot(delta, delta))
    if spec.family == "gaussian":
        return float(np.exp(-sq / spec.gamma))
    if spec.family == "laplace":
        return float(np.exp(-np.sqrt(sq) / spec.gamma))
    return float(spec.gamma / (sq + spec.gamma))


def _as_response_matrix(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    if y.ndim != 2:
        raise InvalidVector(f"expected an (n, q) response array, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidVector("responses contain non-finite entries")
    return y


def _exact_sym(a: np.ndarray) -> np.ndarray:
    """``(a + a.T) / 2``: exactly symmetric since IEEE addition commutes."""
    return (a + a.T) / 2.0


def _pairwise_sq_raw(y: np.ndarray) -> np.ndarray:
    """Squared distances, symmetric only up to gram-product roundoff.

    Skips the transpose-traffic symmetrization pass; use this inside
    estimators whose output is symmetrized at the (p, p) level anyway.
    """
    sq = np.einsum("ij,ij->i", y, y)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (y @ y.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def pairwise_sq_dists(y: np.ndarray) -> np.ndarray:
    """Exactly symmetric matrix of squared Euclidean distances between rows."""
    y = _as_response_matrix(y)
    return _exact_sym(_pairwise_sq_raw(y))


def apply_kernel(spec: KernelSpec, d2: np.ndarray) -> np.ndarray:
    """Entrywise kernel transform of a squared-distance array."""
    if spec.family == "gaussian":
        return np.exp(-d2 / spec.gamma)
    if spec.family == "laplace":
        return np.exp(-np.sqrt(d2) / spec.gamma)
    return spec.gamma / (d2 + spec.gamma)


def kernel_gram(spec: KernelSpec, y: np.ndarray) -> np.ndarray:
    """Gram matrix ``K(Y_i - Y_j)`` of a kernel over response rows.

    Exactly symmetric with unit diagonal; positive semidefinite for all
    three families.
    """
    g = apply_kernel(spec, pairwise_sq_dists(y))
    np.fill_diagonal(g, 1.0)
    return g


def angle_aggregate(y: np.ndarray) -> np.ndarray:
    """Average angle matrix ``W[i, j] = (1/n) sum_k ang(Y_i - Y_k, Y_j - Y_k)``.

    Triples with a numerically zero difference (``i == k`` or ``j == k``, or
    exactly tied responses) contribute 0, matching :func:`ang`.  Cost is
    ``Theta(n^3 q)``; the loop below vectorizes the inner ``(i, j)`` pair
    sweep for each ``k`` with a fixed summation order, and the accumulated
    sum is symmetrized once at the end, so the result is exactly symmetric
    and independent of any outer parallelism.
    """
    y = _as_response_matrix(y)
    n = y.shape[0]
    w = np.zeros((n, n))
    for k in range(n):
        u = y - y[k]
        norms = np.linalg.norm(u, axis=1)
        denom = np.outer(norms, norms)
        with np.errstate(divide="ignore", invalid="ignore"):
            cos = (u @ u.T) / denom
        angles = np.arccos(np.clip(cos, -1.0, 1.0))
        angles[cos >= 1.0 - _COS_SNAP] = 0.0
        angles[cos <= -1.0 + _COS_SNAP] = np.pi
        eps = _NORM_EPS * np.maximum(np.maximum(norms[:, None], norms[None, :]), 1.0)
        degenerate = (norms[:, None] <= eps) | (norms[None, :] <= eps)
        angles[degenerate] = 0.0
        np.fill_diagonal(angles, 0.0)
        w += angles
    return _exact_sym(w) / n
