"""Candidate-matrix estimators and subspace extraction.

Every estimator maps an ``n``-sample :class:`DataSet` to a ``(p, p)``
symmetric candidate matrix whose leading eigenvectors, after whitening by
the predictor covariance, estimate the central subspace of the regression
of ``Y`` on ``X``.

All estimators are V-statistics: sums run over every index tuple, moments
use divisor ``n``, and predictors enter only through ``Z_i = X_i - mean(X)``.
The cubic-cost triple sums are evaluated through their exact matrix
factorizations; tests check those factorizations against literal tuple sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidSpec,
    InvalidVector,
    MissingKernelSpec,
    SingularCovariance,
    SliceTooSmall,
    TooFewSamples,
    TooManySlices,
    UnivariateOnly,
)
from .kernels import (
    KernelSpec,
    _pairwise_sq_raw,
    angle_aggregate,
    apply_kernel,
    kernel_gram,
)
from .linalg import SubspaceEstimate, spd_inv_sqrt, sym_eig, symmetrize

METHODS = ("im_pr", "im_k", "iv_pr", "iv_k", "icmi_id", "cume", "mddm", "sir", "save")
KERNEL_METHODS = ("im_k", "iv_k")
SLICED_METHODS = ("sir", "save")

# Row-block size for the gram-free accumulation path of the kernel
# estimators; keeps memory at O(block * n) for large n.
_GRAM_CHUNK = 4096


@dataclass(frozen=True)
class DataSet:
    """Predictor matrix ``X (n, p)`` paired with response matrix ``Y (n, q)``."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.Y, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if y.ndim == 1:
            y = y[:, None]
        if x.ndim != 2 or y.ndim != 2:
            raise InvalidVector("X and Y must be 1- or 2-dimensional arrays")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"X has {x.shape[0]} rows but Y has {y.shape[0]}"
            )
        if x.shape[0] < 1:
            raise TooFewSamples("need at least one observation")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidVector("data contains non-finite entries")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "Y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def q(self) -> int:
        return self.Y.shape[1]


@dataclass(frozen=True)
class CenteredDesign:
    """Centered predictors ``Z``, their mean, and covariance with divisor ``n``."""

    Z: np.ndarray
    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class MethodSpec:
    """One estimator choice: method name plus kernel or slice parameters.

    ``kernel`` is required for the kernel-weighted methods (``im_k``,
    ``iv_k``) and forbidden otherwise; ``slices`` applies only to ``sir``
    and ``save`` (default 5).
    """

    method: str
    kernel: Optional[KernelSpec] = None
    slices: Optional[int] = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise InvalidSpec(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.method in KERNEL_METHODS:
            if self.kernel is None:
                raise MissingKernelSpec(f"method {self.method!r} requires a kernel")
        elif self.kernel is not None:
            raise InvalidSpec(f"method {self.method!r} does not take a kernel")
        if self.method in SLICED_METHODS:
            if self.slices is None:
                object.__setattr__(self, "slices", 5)
            elif self.slices < 1:
                raise InvalidSpec("slice count must be a positive integer")
        elif self.slices is not None:
            raise InvalidSpec(f"method {self.method!r} does not take slices")

    @property
    def label(self) -> str:
        """Short name used in result tables, e.g. ``im_gauss`` or ``sir``."""
        if self.method in KERNEL_METHODS:
            suffix = {"gaussian": "gauss", "laplace": "lap", "rational_quadratic": "rq"}
            return f"{self.method[:2]}_{suffix[self.kernel.family]}"
        return self.method


def center(x: np.ndarray) -> CenteredDesign:
    """Center the predictors and form the covariance ``Z'Z / n``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise TooFewSamples("centering needs at least two observations")
    if not np.all(np.isfinite(x)):
        raise InvalidVector("predictors contain non-finite entries")
    mean = x.mean(axis=0)
    z = x - mean
    cov = symmetrize(z.T @ z / x.shape[0])
    return CenteredDesign(z, mean, cov)


def _weighted_outer_sum(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``sum_ij w_ij Z_i Z_j' / n^2`` as ``Z' W Z / n^2``."""
    n = z.shape[0]
    return z.T @ (w @ z) / (n * n)


def icmi_pr(data: DataSet) -> np.ndarray:
    """Projection-weighted inverse-mean candidate matrix.

    Equals ``-(1/n^3) sum_ijk Z_i Z_j' ang(Y_i - Y_k, Y_j - Y_k)``, computed
    as ``-Z' W Z / n^2`` with ``W`` the average-angle matrix.
    """
    z = center(data.X).Z
    w = angle_aggregate(data.Y)
    return symmetrize(-_weighted_outer_sum(z, w))


def _kernel_weighted_sum(z: np.ndarray, y: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    """``Z' G Z / n^2`` with ``G`` the kernel gram, chunked for large ``n``.

    Works on the raw distance matrix; the ulp-level gram asymmetry is
    absorbed when the caller symmetrizes the (p, p) result.
    """
    n = z.shape[0]
    if n <= _GRAM_CHUNK:
        g = apply_kernel(kernel, _pairwise_sq_raw(y))
        return _weighted_outer_sum(z, g)
    sq = np.einsum("ij,ij->i", y, y)
    acc = np.zeros((z.shape[1], z.shape[1]))
    for start in range(0, n, _GRAM_CHUNK):
        stop = min(start + _GRAM_CHUNK, n)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * (y[start:stop] @ y.T)
        np.maximum(d2, 0.0, out=d2)
        acc += z[start:stop].T @ (apply_kernel(kernel, d2) @ z)
    return acc / (n * n)


def icmi_kernel(data: DataSet, kernel: KernelSpec) -> np.ndarray:
    """Kernel-weighted inverse-mean candidate matrix.

    ``(1/n^2) sum_ij Z_i Z_j' K(Y_i - Y_j)``; positive semidefinite because
    the kernel gram is.
    """
    if kernel is None:
        raise MissingKernelSpec("icmi_kernel requires a kernel")
    z = center(data.X).Z
    return symmetrize(_kernel_weighted_sum(z, _as_2d(data.Y), kernel))


def _as_2d(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    return y[:, None] if y.ndim == 1 else y


def _centered_second_moment_sum(z: np.ndarray, cov: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``sum_ij w_ij A_i A_j`` for ``A_i = Z_i Z_i' - cov``, without forming the ``A_i``.

    Expanding the product gives four matrix terms driven by the row sums of
    ``w`` and the predictor gram ``Z Z'``.
    """
    gx = z @ z.T
    row = w.sum(axis=1)
    total = float(row.sum())
    t_pair = z.T @ ((w * gx) @ z)
    t_row = z.T @ (row[:, None] * z)
    return t_pair - t_row @ cov - cov @ t_row + total * (cov @ cov)


def icvi_pr(data: DataSet) -> np.ndarray:
    """Projection-weighted inverse-variance candidate matrix.

    ``-(1/n^3) sum_ijk (Z_i Z_i' - S)(Z_j Z_j' - S) ang(Y_i - Y_k, Y_j - Y_k)``
    with ``S`` the covariance; evaluated through the factorized quadratic
    form rather than the literal triple sum.
    """
    design = center(data.X)
    w = angle_aggregate(data.Y)
    n = data.n
    return symmetrize(-_centered_second_moment_sum(design.Z, design.cov, w) / (n * n))


def icvi_kernel(data: DataSet, kernel: KernelSpec) -> np.ndarray:
    """Kernel-weighted inverse-variance candidate matrix.

    ``(1/n^2) sum_ij (Z_i Z_i' - S)(Z_j Z_j' - S) K(Y_i - Y_j)``.
    """
    if kernel is None:
        raise MissingKernelSpec("icvi_kernel requires a kernel")
    design = center(data.X)
    g = kernel_gram(kernel, data.Y)
    n = data.n
    return symmetrize(_centered_second_moment_sum(design.Z, design.cov, g) / (n * n))


def icmi_id(data: DataSet) -> np.ndarray:
    """Indicator-weighted inverse-mean candidate matrix.

    ``(1/n^3) sum_ijk Z_i Z_j' I(Y_i <= Y_k) I(Y_j <= Y_k)`` with the
    inequality taken component-wise for multivariate responses.  For a
    univariate response this is the cumulative-mean (CUME) estimator.
    """
    z = center(data.X).Z
    y = _as_2d(data.Y)
    below = np.all(y[:, None, :] <= y[None, :, :], axis=2).astype(np.float64)
    c = symmetrize(below @ below.T) / data.n
    return symmetrize(_weighted_outer_sum(z, c))


def mddm(data: DataSet) -> np.ndarray:
    """Distance-weighted inverse-mean candidate matrix.

    ``-(1/n^2) sum_ij Z_i Z_j' ||Y_i - Y_j||``; the diagonal terms vanish.
    """
    z = center(data.X).Z
    d = np.sqrt(_pairwise_sq_raw(data.Y))
    return symmetrize(-_weighted_outer_sum(z, d))


def _slice_indices(y: np.ndarray, n_slices: int) -> list[np.ndarray]:
    """Partition row indices into near-equal slices by the empirical quantiles
    of a univariate response, ties going to the lower slice."""
    n = y.shape[0]
    if n_slices > n:
        raise TooManySlices(f"cannot form {n_slices} slices from {n} observations")
    order = np.sort(y)
    cuts = np.array(
        [order[math.ceil(k * n / n_slices) - 1] for k in range(1, n_slices)]
    )
    labels = np.searchsorted(cuts, y, side="left")
    return [np.flatnonzero(labels == h) for h in range(n_slices)]


def _require_univariate(data: DataSet, method: str) -> np.ndarray:
    if data.q != 1:
        raise UnivariateOnly(f"{method} requires a univariate response, got q={data.q}")
    return data.Y[:, 0]


def sir(data: DataSet, n_slices: int = 5) -> np.ndarray:
    """Sliced inverse regression candidate matrix.

    Slices a univariate response into ``n_slices`` near-equal groups and
    accumulates ``(n_h/n) (m_h - mean(X)) (m_h - mean(X))'`` over the slice
    means ``m_h``.
    """
    y = _require_univariate(data, "sir")
    design = center(data.X)
    out = np.zeros((data.p, data.p))
    for idx in _slice_indices(y, n_slices):
        if idx.size == 0:
            continue
        delta = data.X[idx].mean(axis=0) - design.mean
        out += (idx.size / data.n) * np.outer(delta, delta)
    return symmetrize(out)


def save(data: DataSet, n_slices: int = 5) -> np.ndarray:
    """Sliced average variance estimation candidate matrix.

    Accumulates ``(n_h/n) (S - S_h)^2`` where ``S_h`` is the within-slice
    predictor covariance (divisor ``n_h``).
    """
    y = _require_univariate(data, "save")
    design = center(data.X)
    out = np.zeros((data.p, data.p))
    for idx in _slice_indices(y, n_slices):
        if idx.size == 0:
            continue
        if idx.size < 2:
            raise SliceTooSmall(
                f"slice with {idx.size} observation(s); reduce the slice count"
            )
        slice_cov = center(data.X[idx]).cov
        delta = design.cov - slice_cov
        out += (idx.size / data.n) * (delta @ delta)
    return symmetrize(out)


def candidate_matrix(data: DataSet, spec: MethodSpec) -> np.ndarray:
    """Dispatch to the estimator named by ``spec``."""
    if data.n < 2:
        raise TooFewSamples("estimators need at least two observations")
    if spec.method == "im_pr":
        return icmi_pr(data)
    if spec.method == "im_k":
        return icmi_kernel(data, spec.kernel)
    if spec.method == "iv_pr":
        return icvi_pr(data)
    if spec.method == "iv_k":
        return icvi_kernel(data, spec.kernel)
    if spec.method in ("icmi_id", "cume"):
        return icmi_id(data)
    if spec.method == "mddm":
        return mddm(data)
    if spec.method == "sir":
        return sir(data, spec.slices)
    return save(data, spec.slices)


def subspace_from_candidate(
    data: DataSet, lam: np.ndarray, d: int, ridge: float = 0.0
) -> SubspaceEstimate:
    """Extract a ``d``-dimensional basis from a precomputed candidate matrix.

    Whitens the candidate matrix symmetrically, ``S = C^-1/2 L C^-1/2``
    (equivalent to the generalized eigenproblem ``L v = lambda C v``), keeps
    the ``d`` eigenvectors of largest absolute eigenvalue, maps them back
    through ``C^-1/2`` and orthonormalizes.

    If the covariance is singular and no ridge was given, a default ridge of
    ``1e-10 * trace(C) / p`` is retried once before giving up.
    """
    if not 1 <= d <= data.p:
        raise DimensionMismatch(f"d={d} must lie in [1, p={data.p}]")
    cov = center(data.X).cov
    try:
        white = spd_inv_sqrt(cov, ridge)
    except SingularCovariance:
        if ridge != 0.0:
            raise
        white = spd_inv_sqrt(cov, 1e-10 * np.trace(cov) / data.p)
    s = symmetrize(white @ lam @ white)
    decomp = sym_eig(s)
    keep = np.argsort(-np.abs(decomp.values), kind="stable")[:d]
    beta = white @ decomp.vectors[:, keep]
    basis, _ = np.linalg.qr(beta)
    largest = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[largest, np.arange(d)])
    signs[signs == 0] = 1.0
    return SubspaceEstimate(basis * signs, decomp.values[keep].copy(), d)


def estimate_subspace(
    data: DataSet, spec: MethodSpec, d: int, ridge: float = 0.0
) -> SubspaceEstimate:
    """Run the estimator named by ``spec`` and extract a ``d``-dim basis."""
    if not 1 <= d <= data.p:
        raise DimensionMismatch(f"d={d} must lie in [1, p={data.p}]")
    return subspace_from_candidate(data, candidate_matrix(data, spec), d, ridge)
