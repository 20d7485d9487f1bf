"""Rank certificates for 2x2 block matrices with a rank-bounded corner.

For a block matrix ``M = [[A, B], [C, D]]`` with ``A`` of size ``k x k``,
``D`` of size ``p x q`` and ``rank D <= s``, the rank of ``M`` never
exceeds ``k + min(k + s, p, q)``, and the bound is attained by an explicit
0/1 witness built from anti-identity blocks.

The module also provides the converse rotation: any ``(k+p) x (k+q)``
matrix of rank at most ``2k + s`` can be rotated by orthogonal factors so
that its lower-right ``p x q`` corner has rank at most
``min(s, max(min(p, q) - k, 0))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import matcore, variety
from .errors import InvalidInput, RankTooHigh

__all__ = [
    "BlockShape",
    "rank_bound",
    "tight_witness",
    "exact_rank",
    "rotate_to_low_rank_corner",
    "corner_rank_budget",
]


@dataclass(frozen=True)
class BlockShape:
    """Shape data ``(k, p, q, s)`` for the block-rank bound.

    ``k``: side of the square upper-left block (>= 1).
    ``p``, ``q``: rows/columns of the lower-right block (>= 1).
    ``s``: rank budget of the lower-right block, ``0 <= s <= min(p, q)``.
    """

    k: int
    p: int
    q: int
    s: int

    def __post_init__(self) -> None:
        for name in ("k", "p", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidInput(f"require {name} >= 1, got {v!r}")
        if not isinstance(self.s, (int, np.integer)) or not 0 <= self.s <= min(self.p, self.q):
            raise InvalidInput(f"require 0 <= s <= min(p, q) = {min(self.p, self.q)}, got s={self.s!r}")
        for name in ("k", "p", "q", "s"):
            object.__setattr__(self, name, int(getattr(self, name)))

    @property
    def rows(self) -> int:
        return self.k + self.p

    @property
    def cols(self) -> int:
        return self.k + self.q


def rank_bound(shape: BlockShape) -> int:
    """The bound ``k + min(k + s, p, q)`` on the rank of the block matrix."""
    return shape.k + min(shape.k + shape.s, shape.p, shape.q)


def tight_witness(shape: BlockShape) -> np.ndarray:
    """A 0/1 matrix attaining :func:`rank_bound` with corner rank exactly
    ``min(s, ...)`` within budget.

    The construction places an ``a x a`` anti-identity at the top left with
    ``a = k + min(k, min(p, q) - s)``, an ``s x s`` anti-identity
    immediately after it on the diagonal, and zeros elsewhere.  Its rank is
    ``a + s = rank_bound(shape)`` exactly, and its lower-right ``p x q``
    block has rank at most ``s``.
    """
    k, p, q, s = shape.k, shape.p, shape.q, shape.s
    a = k + min(k, min(p, q) - s)
    W = np.zeros((shape.rows, shape.cols))
    W[:a, :a] = matcore.reversal(a)
    W[a : a + s, a : a + s] = matcore.reversal(s)
    return W


def exact_rank(M) -> int:
    """Rank of an integer matrix computed in exact rational arithmetic.

    Entries must be integral (e.g. a 0/1 witness); elimination runs over
    ``fractions.Fraction`` so no floating-point cutoff is involved.
    """
    A = matcore.as_matrix(M, "integer matrix")
    if A.size and not np.all(A == np.round(A)):
        raise InvalidInput("exact_rank requires integer entries")
    rows = [[Fraction(int(round(x))) for x in row] for row in A.tolist()]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        for i in range(rank + 1, nrows):
            if rows[i][c]:
                f = rows[i][c] / prow[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        rank += 1
        if rank == nrows:
            break
    return rank


def corner_rank_budget(k: int, p: int, q: int, s: int) -> int:
    """Rank budget ``min(s, max(min(p, q) - k, 0))`` of the rotated corner."""
    return min(s, max(min(p, q) - k, 0))


def rotate_to_low_rank_corner(M, k: int, s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rotate ``M`` so its lower-right corner has small rank.

    Given ``M`` of shape ``(k+p) x (k+q)`` with numerical rank at most
    ``2k + s``, returns orthogonal ``U_rot`` (``(k+p) x (k+p)``), ``V_rot``
    (``(k+q) x (k+q)``) and ``M_prime`` with::

        | M - U_rot @ M_prime @ V_rot.T |_F <= 1e-10 |M|_F

    and the lower-right ``p x q`` block of ``M_prime`` of numerical rank at
    most ``min(s, max(min(p, q) - k, 0))``.

    The construction reverses the leading ``r = rank M`` left singular
    columns and places the singular values on the anti-diagonal of the
    leading ``r x r`` corner of ``M_prime``, which pushes all but
    ``max(r - 2k, 0)`` of them out of the lower-right block.

    Raises
    ------
    InvalidInput
        If ``k`` or ``s`` is out of range or ``M`` is too small for ``k``.
    RankTooHigh
        If the numerical rank of ``M`` exceeds ``2k + s``.
    """
    A = matcore.as_matrix(M)
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidInput(f"require k >= 1, got {k!r}")
    if not isinstance(s, (int, np.integer)) or s < 0:
        raise InvalidInput(f"require s >= 0, got {s!r}")
    rows, cols = A.shape
    p, q = rows - k, cols - k
    if p < 1 or q < 1:
        raise InvalidInput(f"matrix shape {A.shape} too small for block size k={k}")
    r = variety.numerical_rank(A)
    if r > 2 * k + s:
        raise RankTooHigh(f"numerical rank {r} exceeds 2k + s = {2 * k + s}")
    W, sigma, Z = matcore.svd_full(A)
    U_rot = W.copy()
    U_rot[:, :r] = W[:, :r][:, ::-1]
    V_rot = Z
    M_prime = np.zeros_like(A)
    for i in range(r):
        M_prime[i, r - 1 - i] = sigma[r - 1 - i]
    return U_rot, V_rot, M_prime
