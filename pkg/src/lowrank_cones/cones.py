"""Tangent and normal cone calculus on bounded-rank matrix sets.

Fix a base point ``X`` of rank ``r`` inside ``R_{<=rbar}`` (so ``r <=
rbar``).  Orthonormal singular frames ``[U U_perp]`` and ``[V V_perp]``
of ``X`` split any direction ``eta`` into four blocks::

    eta = [U U_perp] [[A, B], [C, D]] [V V_perp].T

with ``A`` of size ``r x r`` and ``D`` of size ``(m-r) x (n-r)``.  The five
cones handled here are characterized entirely by conditions on the blocks:

==================  ==========================================================
kind                condition on ``(A, B, C, D)``
==================  ==========================================================
tangent             ``rank D <= rbar - r``
regular_tangent     ``D = 0``
normal              ``A = B = C = 0`` and ``rank D <= min(m, n) - rbar``
regular_normal      ``{0}`` when ``r < rbar``; else ``A = B = C = 0``
clarke_normal       ``A = B = C = 0`` (``D`` unconstrained)
==================  ==========================================================

Because each condition is block-separable, the metric projection onto each
cone is exact: free blocks are kept, forbidden blocks are zeroed, and
rank-budgeted blocks are singular-value truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import matcore, variety
from .errors import InvalidInput, NotInCone, RankExceedsVariety

__all__ = [
    "ConeKind",
    "ConeSpec",
    "ConeFrame",
    "BlockDecomposition",
    "cone_frame",
    "decompose",
    "assemble",
    "cone_membership",
    "project_cone",
    "cone_distance",
    "polar_pairing_check",
    "MEMBERSHIP_TOL",
    "PAIRING_TOL",
]

# Membership checks on freshly projected vectors and on polar-pairing
# arguments run at this tolerance.
MEMBERSHIP_TOL = 1e-8
# Two cone members are declared polar when |<eta, nu>| <= PAIRING_TOL * |eta| * |nu|.
PAIRING_TOL = 1e-8


class ConeKind(str, Enum):
    """The five cone families supported at a base point."""

    TANGENT = "tangent"
    REGULAR_TANGENT = "regular_tangent"
    NORMAL = "normal"
    REGULAR_NORMAL = "regular_normal"
    CLARKE_NORMAL = "clarke_normal"


@dataclass(frozen=True)
class ConeSpec:
    """Which cone, relative to which rank budget.

    Attributes
    ----------
    kind : ConeKind
        Cone family.
    rbar : int
        Rank bound of the ambient set ``R_{<=rbar}``; must be >= 1.
    """

    kind: ConeKind
    rbar: int

    def __post_init__(self) -> None:
        kind = self.kind
        if not isinstance(kind, ConeKind):
            try:
                kind = ConeKind(kind)
            except ValueError as exc:
                names = ", ".join(k.value for k in ConeKind)
                raise InvalidInput(f"unknown cone kind {self.kind!r}; expected one of {names}") from exc
            object.__setattr__(self, "kind", kind)
        if not isinstance(self.rbar, (int, np.integer)) or self.rbar < 1:
            raise InvalidInput(f"require rbar >= 1, got {self.rbar!r}")
        object.__setattr__(self, "rbar", int(self.rbar))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "rbar": self.rbar}

    @classmethod
    def from_dict(cls, d: dict) -> "ConeSpec":
        if not isinstance(d, dict) or set(d) != {"kind", "rbar"}:
            raise InvalidInput(f"cone spec must have exactly the keys 'kind' and 'rbar', got {d!r}")
        return cls(kind=d["kind"], rbar=d["rbar"])


@dataclass(frozen=True)
class ConeFrame:
    """Base point with orthonormal singular frames.

    Attributes
    ----------
    X : numpy.ndarray
        The ``m x n`` base point.
    r : int
        Numerical rank of ``X``.
    U, V : numpy.ndarray
        ``m x r`` / ``n x r`` orthonormal bases of the column / row space.
    U_perp, V_perp : numpy.ndarray
        Orthonormal bases of the complements, ``m x (m-r)`` / ``n x (n-r)``.
    sigma : numpy.ndarray
        The ``r`` positive singular values, nonincreasing.
    """

    X: np.ndarray
    r: int
    U: np.ndarray
    U_perp: np.ndarray
    V: np.ndarray
    V_perp: np.ndarray
    sigma: np.ndarray

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class BlockDecomposition:
    """Coordinates of a direction in a frame's block splitting.

    ``A`` is ``r x r``, ``B`` is ``r x (n-r)``, ``C`` is ``(m-r) x r`` and
    ``D`` is ``(m-r) x (n-r)``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


def cone_frame(X, tol: float = variety.DEFAULT_TOL) -> ConeFrame:
    """Build orthonormal singular frames at ``X``.

    The rank is the numerical rank at relative cutoff ``tol``; frames come
    from one full SVD with the package sign convention, so the result is a
    pure function of ``X``.  Rank 0 (the zero matrix) yields empty ``U``,
    ``V`` and identity complements.
    """
    M = matcore.as_matrix(X)
    if M.shape[0] == 0 or M.shape[1] == 0:
        raise InvalidInput(f"matrix must have positive dimensions, got {M.shape}")
    if not 0.0 < tol < 1.0:
        raise InvalidInput(f"tol must lie in (0, 1), got {tol}")
    W, s, Z = matcore.svd_full(M)
    r = matcore.rank_from_sigma(s, tol)
    return ConeFrame(
        X=M,
        r=r,
        U=W[:, :r],
        U_perp=W[:, r:],
        V=Z[:, :r],
        V_perp=Z[:, r:],
        sigma=s[:r].copy(),
    )


def decompose(frame: ConeFrame, eta) -> BlockDecomposition:
    """Coordinates of ``eta`` in the frame's block splitting.

    Raises
    ------
    InvalidInput
        If ``eta`` is not ``m x n`` for the frame.
    """
    E = matcore.as_matrix(eta, "direction")
    if E.shape != (frame.m, frame.n):
        raise InvalidInput(f"direction shape {E.shape} does not match base point shape {(frame.m, frame.n)}")
    return BlockDecomposition(
        A=frame.U.T @ E @ frame.V,
        B=frame.U.T @ E @ frame.V_perp,
        C=frame.U_perp.T @ E @ frame.V,
        D=frame.U_perp.T @ E @ frame.V_perp,
    )


def assemble(frame: ConeFrame, blocks: BlockDecomposition) -> np.ndarray:
    """Inverse of :func:`decompose`: rebuild the ambient matrix from blocks."""
    return (
        frame.U @ blocks.A @ frame.V.T
        + frame.U @ blocks.B @ frame.V_perp.T
        + frame.U_perp @ blocks.C @ frame.V.T
        + frame.U_perp @ blocks.D @ frame.V_perp.T
    )


def _check_spec(frame: ConeFrame, spec: ConeSpec) -> None:
    """Enforce ``r <= rbar < min(m, n)`` at an operation site."""
    if spec.rbar >= min(frame.m, frame.n):
        raise InvalidInput(f"require rbar < min(m, n); got rbar={spec.rbar} with min(m, n)={min(frame.m, frame.n)}")
    if frame.r > spec.rbar:
        raise RankExceedsVariety(f"base point rank {frame.r} exceeds rbar={spec.rbar}")


def cone_membership(frame: ConeFrame, spec: ConeSpec, eta, tol: float = variety.DEFAULT_TOL) -> bool:
    """Whether ``eta`` belongs to the cone ``spec`` at the frame's base point.

    Membership is the metric-projection residual test: ``eta`` is a member
    iff its distance to the cone is at most ``tol * max(1, |eta|_F)``.
    Because the projection is exact, this cannot misclassify a block that is
    numerically zero as full rank (a rank cutoff relative to the block's own
    leading singular value would).

    Raises
    ------
    RankExceedsVariety
        If the base point's rank exceeds ``spec.rbar``.
    InvalidInput
        If ``rbar >= min(m, n)`` or ``eta`` has the wrong shape.
    """
    E = matcore.as_matrix(eta, "eta")
    residual = cone_distance(frame, spec, E)
    return residual <= tol * max(1.0, matcore.frobenius_norm(E))


def _truncate_block(D: np.ndarray, budget: int) -> np.ndarray:
    if D.size == 0 or budget >= min(D.shape):
        return D.copy()
    return variety.truncate_rank(D, budget)


def project_cone(frame: ConeFrame, spec: ConeSpec, eta) -> np.ndarray:
    """Metric projection of ``eta`` onto the cone ``spec`` at the base point.

    The projection is exact because the cone conditions are separable across
    blocks: kept blocks minimize their own distance trivially, zeroed blocks
    are the nearest admissible value, and rank-budgeted blocks use the best
    bounded-rank approximation.  The result passes :func:`cone_membership`
    at tolerance :data:`MEMBERSHIP_TOL`.
    """
    _check_spec(frame, spec)
    blocks = decompose(frame, eta)
    m, n, r = frame.m, frame.n, frame.r
    zero_A = np.zeros_like(blocks.A)
    zero_B = np.zeros_like(blocks.B)
    zero_C = np.zeros_like(blocks.C)
    kind = spec.kind
    if kind is ConeKind.TANGENT:
        out = BlockDecomposition(blocks.A, blocks.B, blocks.C, _truncate_block(blocks.D, spec.rbar - r))
    elif kind is ConeKind.REGULAR_TANGENT:
        out = BlockDecomposition(blocks.A, blocks.B, blocks.C, np.zeros_like(blocks.D))
    elif kind is ConeKind.NORMAL:
        out = BlockDecomposition(zero_A, zero_B, zero_C, _truncate_block(blocks.D, min(m, n) - spec.rbar))
    elif kind is ConeKind.REGULAR_NORMAL:
        if r < spec.rbar:
            return np.zeros((m, n))
        out = BlockDecomposition(zero_A, zero_B, zero_C, blocks.D)
    elif kind is ConeKind.CLARKE_NORMAL:
        out = BlockDecomposition(zero_A, zero_B, zero_C, blocks.D)
    else:  # pragma: no cover
        raise InvalidInput(f"unknown cone kind {kind!r}")
    return assemble(frame, out)


def cone_distance(frame: ConeFrame, spec: ConeSpec, eta) -> float:
    """Frobenius distance from ``eta`` to the cone ``spec`` at the base point."""
    E = matcore.as_matrix(eta, "direction")
    return matcore.frobenius_norm(E - project_cone(frame, spec, E))


_POLAR_PRIMAL_FOR = {
    ConeKind.CLARKE_NORMAL: ConeKind.REGULAR_TANGENT,
    ConeKind.REGULAR_NORMAL: ConeKind.TANGENT,
}


def polar_pairing_check(frame: ConeFrame, eta, nu_spec: ConeSpec, nu) -> bool:
    """Check the polar inequality between a tangent-side and normal-side pair.

    The supported pairings are regular-tangent against clarke-normal and
    tangent against regular-normal (each normal kind is the polar of its
    partner).  ``eta`` must pass the partner tangent membership and ``nu``
    must pass ``nu_spec`` membership, both at :data:`MEMBERSHIP_TOL`.

    Returns
    -------
    bool
        True iff ``<eta, nu> <= PAIRING_TOL * |eta|_F * |nu|_F``.

    Raises
    ------
    InvalidInput
        If ``nu_spec.kind`` is not one of the two normal kinds above.
    NotInCone
        If either vector fails its required membership.
    """
    if nu_spec.kind not in _POLAR_PRIMAL_FOR:
        raise InvalidInput(
            "polar pairing requires nu_spec.kind in {clarke_normal, regular_normal}; " f"got {nu_spec.kind.value!r}"
        )
    eta_spec = ConeSpec(_POLAR_PRIMAL_FOR[nu_spec.kind], nu_spec.rbar)
    if not cone_membership(frame, eta_spec, eta, tol=MEMBERSHIP_TOL):
        raise NotInCone(f"eta fails {eta_spec.kind.value} membership at rbar={eta_spec.rbar}")
    if not cone_membership(frame, nu_spec, nu, tol=MEMBERSHIP_TOL):
        raise NotInCone(f"nu fails {nu_spec.kind.value} membership at rbar={nu_spec.rbar}")
    E = matcore.as_matrix(eta, "eta")
    Nv = matcore.as_matrix(nu, "nu")
    inner = float(np.sum(E * Nv))
    return inner <= PAIRING_TOL * matcore.frobenius_norm(E) * matcore.frobenius_norm(Nv)
