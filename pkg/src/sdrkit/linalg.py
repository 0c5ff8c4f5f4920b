"""Dense symmetric linear algebra used throughout the package.

Everything here operates on plain ``numpy`` arrays.  Symmetric matrices are
represented as ``(p, p)`` float64 arrays that are *exactly* symmetric; the
estimators enforce this on construction via :func:`symmetrize`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, InvalidMatrix, RankDeficient, SingularCovariance


class EigenDecomposition(NamedTuple):
    """Full spectral decomposition of a symmetric matrix.

    ``values`` are sorted in descending (signed) order and ``vectors[:, k]``
    is the unit eigenvector paired with ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SubspaceEstimate:
    """A ``(p, d)`` column-orthonormal basis with its eigenvalues.

    ``eigenvalues`` holds the ``d`` retained eigenvalues of the whitened
    candidate matrix, sorted by descending absolute value.
    """

    basis: np.ndarray
    eigenvalues: np.ndarray
    d: int


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return ``(a + a.T) / 2``, which is exactly symmetric in IEEE arithmetic."""
    a = np.asarray(a, dtype=np.float64)
    return (a + a.T) / 2.0


def _check_square_finite(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix contains non-finite entries")
    return a


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip column signs so the largest-magnitude component of each is positive.

    Ties resolve to the first index, so the output is deterministic.
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(a: np.ndarray) -> EigenDecomposition:
    """Spectral decomposition of a symmetric matrix.

    Eigenvalues come back sorted descending by signed value, eigenvectors
    carry a fixed sign convention (largest-magnitude component positive),
    so the result is deterministic for a fixed input.

    Raises
    ------
    InvalidMatrix
        If the input is not square or contains non-finite entries.
    """
    a = _check_square_finite(a)
    values, vectors = np.linalg.eigh(symmetrize(a))
    order = np.arange(values.shape[0])[::-1]  # eigh returns ascending
    return EigenDecomposition(values[order].copy(), _fix_signs(vectors[:, order]))


def spd_inv_sqrt(a: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Inverse square root ``B`` of ``a + ridge*I`` with ``B (a+ridge*I) B = I``.

    Parameters
    ----------
    a : (p, p) symmetric array
    ridge : nonnegative float
        Added to the diagonal before inversion.

    Raises
    ------
    SingularCovariance
        If any eigenvalue of ``a + ridge*I`` is ``<= 1e-14 * trace(a) / p``.
    """
    a = _check_square_finite(a)
    if ridge < 0:
        raise InvalidMatrix("ridge must be nonnegative")
    p = a.shape[0]
    m = symmetrize(a)
    if ridge:
        m = m + ridge * np.eye(p)
    values, vectors = np.linalg.eigh(m)
    threshold = 1e-14 * np.trace(a) / p
    if np.min(values) <= threshold:
        raise SingularCovariance(
            f"matrix is not positive definite (min eigenvalue {np.min(values):.3e})"
        )
    return symmetrize((vectors / np.sqrt(values)) @ vectors.T)


def projection_matrix(g: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the column span of ``g``.

    Computed from an orthonormal basis, which equals ``g (g'g)^-1 g'`` for
    full-column-rank ``g``.

    Raises
    ------
    RankDeficient
        If the smallest singular value is ``<= 1e-10`` times the largest.
    """
    g = np.asarray(g, dtype=np.float64)
    if g.ndim == 1:
        g = g[:, None]
    if not np.all(np.isfinite(g)):
        raise InvalidMatrix("basis contains non-finite entries")
    u, s, _ = np.linalg.svd(g, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= 1e-10 * s[0]:
        raise RankDeficient(
            f"basis is rank deficient (singular values {s[0]:.3e} .. {s[-1]:.3e})"
        )
    return symmetrize(u @ u.T)


def subspace_distance(g1: np.ndarray, g2: np.ndarray) -> float:
    """Frobenius distance between the projections onto two column spans.

    Symmetric in its arguments, zero iff the spans coincide, and at most
    ``sqrt(d1 + d2)``.
    """
    return float(np.linalg.norm(projection_matrix(g1) - projection_matrix(g2), "fro"))


def trace_correlation(g1: np.ndarray, g2: np.ndarray) -> float:
    """Trace correlation ``sqrt(trace(P1 @ P2) / d)`` between equal-dimension spans.

    Equals 1 iff the spans coincide and 0 iff they are orthogonal.

    Raises
    ------
    DimensionMismatch
        If the two bases have a different number of columns.
    """
    g1 = np.asarray(g1, dtype=np.float64)
    g2 = np.asarray(g2, dtype=np.float64)
    if g1.ndim == 1:
        g1 = g1[:, None]
    if g2.ndim == 1:
        g2 = g2[:, None]
    if g1.shape[1] != g2.shape[1]:
        raise DimensionMismatch(
            f"subspace dimensions differ: {g1.shape[1]} vs {g2.shape[1]}"
        )
    p1 = projection_matrix(g1)
    p2 = projection_matrix(g2)
    r2 = np.trace(p1 @ p2) / g1.shape[1]
    return float(np.sqrt(min(max(r2, 0.0), 1.0)))
