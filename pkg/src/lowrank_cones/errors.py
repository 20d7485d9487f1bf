"""Exception hierarchy shared by every module in the package.

All failures raised on purpose derive from :class:`LowRankConesError`, so
callers (including the command-line layer) can distinguish deliberate
domain errors from genuine bugs.
"""

from __future__ import annotations

__all__ = [
    "LowRankConesError",
    "InvalidInput",
    "InvalidRank",
    "InvalidParams",
    "RankExceedsVariety",
    "RankMismatch",
    "RankTooHigh",
    "NotInCone",
    "NoConvergentSubsequence",
    "BudgetExceeded",
]


class LowRankConesError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(LowRankConesError):
    """An argument fails a structural precondition (shape, finiteness,
    orthonormality, tolerance range, malformed text)."""


class InvalidRank(LowRankConesError):
    """A rank argument is outside ``0..min(rows, cols)`` for its matrix."""


class InvalidParams(LowRankConesError):
    """A parameter combination violates a documented constraint; the
    message names the constraint (e.g. ``require rbar < min(m, n)``)."""


class RankExceedsVariety(LowRankConesError):
    """The base point's rank exceeds the rank budget of the requested set
    (``rank X > rbar``), so the point is not in the set at all."""


class RankMismatch(LowRankConesError):
    """Sequence elements do not have the rank the operation requires."""


class RankTooHigh(LowRankConesError):
    """A matrix argument's rank exceeds what the operation supports."""


class NotInCone(LowRankConesError):
    """A vector required to belong to a cone fails its membership test."""


class NoConvergentSubsequence(LowRankConesError):
    """No subsequence satisfying the requested stability constraints was
    found in the given finite sequence."""


class BudgetExceeded(LowRankConesError):
    """A requested rank increment does not fit in the ambient dimensions."""
