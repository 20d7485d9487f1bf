"""Bounded-rank matrix sets: rank, distance, and nearest-point truncation.

``R_{<=r}`` denotes the set of ``m x n`` real matrices of rank at most
``r``.  Distances are Frobenius; by the classical truncation theorem the
nearest point of ``R_{<=r}`` to ``X`` is the rank-``r`` singular value
truncation of ``X`` and the distance is the root-sum-square of the
discarded singular values.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .errors import InvalidInput, InvalidRank

__all__ = [
    "DEFAULT_TOL",
    "numerical_rank",
    "distance_to_variety",
    "truncate_rank",
    "is_member",
]

DEFAULT_TOL = 1e-9


def _check_rank_arg(X: np.ndarray, r: int) -> None:
    if not isinstance(r, (int, np.integer)):
        raise InvalidRank(f"rank must be an integer, got {r!r}")
    if r < 0 or r > min(X.shape):
        raise InvalidRank(f"rank {r} outside [0, {min(X.shape)}] for shape {X.shape}")


def numerical_rank(X, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values exceeding ``tol`` times the largest.

    Parameters
    ----------
    X : array_like
        Matrix with positive dimensions.
    tol : float
        Relative cutoff, required to lie strictly between 0 and 1.
    """
    M = matcore.as_matrix(X)
    if not 0.0 < tol < 1.0:
        raise InvalidInput(f"tol must lie in (0, 1), got {tol}")
    if M.shape[0] == 0 or M.shape[1] == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return matcore.rank_from_sigma(s, tol)


def distance_to_variety(X, r: int) -> float:
    """Frobenius distance from ``X`` to ``R_{<=r}``.

    Equals ``sqrt(sigma_{r+1}^2 + ... + sigma_k^2)``; in particular 0 when
    ``r = min(m, n)``.

    Raises
    ------
    InvalidRank
        If ``r`` is negative or exceeds ``min(m, n)``.
    """
    M = matcore.as_matrix(X)
    _check_rank_arg(M, r)
    s = np.linalg.svd(M, compute_uv=False)
    tail = s[r:]
    return float(np.sqrt(np.sum(tail * tail)))


def truncate_rank(X, r: int) -> np.ndarray:
    """Best Frobenius approximation of ``X`` in ``R_{<=r}``.

    Keeps the ``r`` largest singular triplets.  When singular value ``r``
    ties singular value ``r+1`` any minimizer is acceptable; this
    implementation keeps the deterministic choice made by :func:`matcore.svd`.
    """
    M = matcore.as_matrix(X)
    _check_rank_arg(M, r)
    if r == 0:
        return np.zeros_like(M)
    f = matcore.svd(M)
    return (f.U[:, :r] * f.sigma[:r]) @ f.V[:, :r].T


def is_member(X, r: int, tol: float = DEFAULT_TOL) -> bool:
    """Whether the numerical rank of ``X`` at cutoff ``tol`` is at most ``r``."""
    M = matcore.as_matrix(X)
    _check_rank_arg(M, r)
    return numerical_rank(M, tol) <= r
