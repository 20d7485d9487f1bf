"""Labeled matrix sequences converging to a base point, with aligned frames.

A :class:`SequenceBundle` packages a target ``X`` of rank ``r_low``, a
sequence ``X_i`` of constant rank ``r_seq >= r_low`` converging to ``X``,
and per-index orthonormal frame data:

``U_i / V_i``
    bases of the column/row space of the rank-``r_low`` part of ``X_i``
    (of ``X_i`` itself when ``r_seq == r_low``), aligned with the target's
    frames wherever the alignment map is well conditioned;
``U_bar_i / V_bar_i``
    bases of the complementary part of the column/row space of ``X_i``
    (the directions that vanish in the limit), present when
    ``r_seq > r_low``;
``U_perp_i / V_perp_i``
    bases of the orthogonal complement of the column/row space of ``X_i``.

Three constructors cover the regimes the limit machinery needs: constant
rank (alignment only), decreasing rank (splitting plus subsequence
extraction), and synthetic rank-``r`` perturbations of a rank-``r_low``
target whose vanishing directions sweep the complement (dense sweep,
constant planted frame, or recurrent planted frame).

The alignment maps project the target frames onto the element's spaces;
they are guaranteed well conditioned only near the limit, so any index
where the projected frame leaves the unit Frobenius ball around its target
falls back to the element's own SVD frames — a deterministic valid choice
standing in for the finitely many discarded indices of the underlying
limit argument.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import matcore, variety
from .cones import ConeFrame, ConeSpec, ConeKind, cone_frame, cone_membership, decompose
from .errors import (
    BudgetExceeded,
    InvalidInput,
    NoConvergentSubsequence,
    NotInCone,
    RankMismatch,
)
from .matcore import RandomSource

__all__ = [
    "IndexFrames",
    "SequenceBundle",
    "LiftedVectorSequence",
    "align_frames_constant_rank",
    "split_and_align_decreasing_rank",
    "dense_cluster_sequence",
    "constant_frame_sequence",
    "planted_recurrence_sequence",
    "lift_tangent_vector",
    "lift_membership_verdicts",
    "save_bundle",
    "load_bundle",
    "SUBSEQUENCE_JOIN_TOL",
    "TAIL_VARIATION_TOL",
]

# Projector-distance threshold for joining an index to the running
# convergent-subsequence candidate, and for declaring the selected tail
# stable.  Constructed bundles repeat frames exactly, so these are loose
# for them; genuinely drifting sequences fall back to short subsequences.
SUBSEQUENCE_JOIN_TOL = 1e-6
TAIL_VARIATION_TOL = 1e-6

# An alignment map is trusted only while the aligned frame stays in the
# open unit Frobenius ball around its target.
_ALIGN_BALL_RADIUS = 1.0


@dataclass(frozen=True)
class IndexFrames:
    """Per-index orthonormal frame data of a sequence element."""

    U: np.ndarray
    V: np.ndarray
    U_perp: np.ndarray
    V_perp: np.ndarray
    U_bar: np.ndarray | None = None
    V_bar: np.ndarray | None = None


@dataclass
class SequenceBundle:
    """A convergent constant-rank matrix sequence with aligned frames.

    Attributes
    ----------
    target : numpy.ndarray
        The limit ``X`` (rank ``r_low``).
    x_seq : list of numpy.ndarray
        Sequence elements, each of rank ``r_seq``.
    r_low, r_seq : int
        Rank of the target and common rank of the elements.
    frames : list of IndexFrames
        Per-index frame data (see module docstring).
    provenance : str
        How the bundle was built.
    subsequence : list of int or None
        Indices of the designated convergent subsequence, when one was
        extracted.
    limit_u_bar, limit_v_bar : numpy.ndarray or None
        Limit of the vanishing-direction frames along the subsequence.
    seed : int or None
        Root seed of the generating stream, for reproducibility.
    seed_path : tuple or None
        Derivation path of the generating stream.
    scale : float or None
        Perturbation scale used by synthetic constructors.
    """

    target: np.ndarray
    x_seq: list
    r_low: int
    r_seq: int
    frames: list
    provenance: str
    subsequence: list | None = None
    limit_u_bar: np.ndarray | None = None
    limit_v_bar: np.ndarray | None = None
    seed: int | None = None
    seed_path: tuple | None = None
    scale: float | None = None
    _frames_cache: list | None = field(default=None, init=False, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.x_seq)

    @property
    def m(self) -> int:
        return self.target.shape[0]

    @property
    def n(self) -> int:
        return self.target.shape[1]

    def gaps(self) -> list:
        """Frobenius distances ``|X_i - X|`` per index."""
        return [matcore.frobenius_norm(Xi - self.target) for Xi in self.x_seq]

    def cone_frames(self) -> list:
        """Fresh singular frames of every element (cached)."""
        if self._frames_cache is None:
            self._frames_cache = [cone_frame(Xi) for Xi in self.x_seq]
        return self._frames_cache


@dataclass(frozen=True)
class LiftedVectorSequence:
    """A tangent vector at the target lifted along a bundle.

    ``eta_seq[i]`` is tangent at ``X_i`` (with the budget reduced by the
    rank the element gained) and converges back to ``eta``.
    """

    eta: np.ndarray
    eta_seq: list
    rbar: int

    def residuals(self) -> list:
        return [matcore.frobenius_norm(e - self.eta) for e in self.eta_seq]


def _aligned_or_fallback(projected: np.ndarray, target_frame: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Keep the projected frame while it stays near its target, else fall back."""
    if matcore.frobenius_norm(projected - target_frame) < _ALIGN_BALL_RADIUS:
        return projected
    return fallback


def align_frames_constant_rank(X, x_seq, tol: float = variety.DEFAULT_TOL) -> SequenceBundle:
    """Bundle a constant-rank sequence with frames aligned to the target's.

    Every element must have the same numerical rank as ``X`` and the last
    element must satisfy ``|X_last - X| <= 0.1 * d(X, R_{<r})`` (so the
    alignment maps are well conditioned at the tail).  Aligned frames are
    the target frames projected onto each element's spaces; the distance of
    the last aligned frame to the target frame is bounded by
    ``10 |X_i - X| / sigma_r(X)``.

    Raises
    ------
    RankMismatch
        If some element's rank differs from ``rank X``.
    InvalidInput
        If the sequence is empty or the tail is not close enough.
    """
    fx = cone_frame(X, tol)
    if not x_seq:
        raise InvalidInput("x_seq must be nonempty")
    x_list = [matcore.as_matrix(Xi, f"x_seq[{i}]") for i, Xi in enumerate(x_seq)]
    r = fx.r
    for i, Xi in enumerate(x_list):
        ri = variety.numerical_rank(Xi, tol)
        if ri != r:
            raise RankMismatch(f"x_seq[{i}] has rank {ri}, expected rank {r} of the target")
    if r >= 1:
        last_gap = matcore.frobenius_norm(x_list[-1] - fx.X)
        if last_gap > 0.1 * fx.sigma[-1]:
            raise InvalidInput(
                f"require |X_last - X| <= 0.1 * d(X, R_<r); got {last_gap:.3e} > {0.1 * fx.sigma[-1]:.3e}"
            )
    frames = []
    for Xi in x_list:
        fi = cone_frame(Xi, tol)
        P = fi.U @ fi.U.T
        Q = fi.V @ fi.V.T
        U_i = _aligned_or_fallback(P @ fx.U, fx.U, fi.U)
        V_i = _aligned_or_fallback(Q @ fx.V, fx.V, fi.V)
        U_perp_i = _aligned_or_fallback(fx.U_perp - P @ fx.U_perp, fx.U_perp, fi.U_perp)
        V_perp_i = _aligned_or_fallback(fx.V_perp - Q @ fx.V_perp, fx.V_perp, fi.V_perp)
        frames.append(IndexFrames(U=U_i, V=V_i, U_perp=U_perp_i, V_perp=V_perp_i))
    return SequenceBundle(
        target=fx.X,
        x_seq=x_list,
        r_low=r,
        r_seq=r,
        frames=frames,
        provenance="constant_rank",
    )


def _projector_distance(P1, Q1, P2, Q2) -> float:
    return max(matcore.frobenius_norm(P1 - P2), matcore.frobenius_norm(Q1 - Q2))


def _top_eigvecs(P: np.ndarray, count: int) -> np.ndarray:
    """Orthonormal basis of the top-``count`` eigenspace of a symmetric PSD matrix."""
    w, W = np.linalg.eigh((P + P.T) / 2.0)
    top = W[:, ::-1][:, :count]
    top, _ = matcore._fix_signs(top, None)
    return top


def split_and_align_decreasing_rank(
    X,
    x_seq,
    tol: float = variety.DEFAULT_TOL,
    min_run: int = 1,
    join_tol: float = SUBSEQUENCE_JOIN_TOL,
) -> SequenceBundle:
    """Split a rank-dropping sequence and extract a convergent subsequence.

    Each element ``X_i`` of rank ``r > rank X`` is split into its best
    rank-``r_low`` part ``X_i_low`` (converging to ``X``) and the remainder
    ``X_i_tilde`` (vanishing, but along directions that need not settle).
    A designated subsequence along which the vanishing directions do settle
    is extracted greedily: starting from the last index, the unused index
    whose vanishing-space projectors are closest to the running candidate
    (the mean over current members) is joined while within ``join_tol``.
    Convergence is declared when the selected tail's pairwise projector
    variation is at most :data:`TAIL_VARIATION_TOL`; on a finite sequence a
    singleton subsequence is always convergent, so failure is only possible
    through ``min_run``.

    Raises
    ------
    RankMismatch
        If element ranks are not all equal and strictly above ``rank X``.
    NoConvergentSubsequence
        If fewer than ``min_run`` indices join the stable group, or the
        selected tail does not settle.
    """
    fx = cone_frame(X, tol)
    if not x_seq:
        raise InvalidInput("x_seq must be nonempty")
    x_list = [matcore.as_matrix(Xi, f"x_seq[{i}]") for i, Xi in enumerate(x_seq)]
    r_low = fx.r
    ranks = [variety.numerical_rank(Xi, tol) for Xi in x_list]
    r = ranks[0]
    for i, ri in enumerate(ranks):
        if ri != r:
            raise RankMismatch(f"x_seq[{i}] has rank {ri}, expected constant rank {r}")
    if r <= r_low:
        raise RankMismatch(f"sequence rank {r} must exceed target rank {r_low}")
    d = r - r_low
    n_items = len(x_list)

    low_frames = []
    bar_frames = []
    for Xi in x_list:
        X_low = variety.truncate_rank(Xi, r_low)
        X_bar = Xi - X_low
        flow = cone_frame(X_low, tol)
        fbar = cone_frame(X_bar, tol)
        low_frames.append(flow)
        bar_frames.append(fbar)
    proj_u = [f.U @ f.U.T for f in bar_frames]
    proj_v = [f.V @ f.V.T for f in bar_frames]

    # Greedy extraction of the designated subsequence.
    members = [n_items - 1]
    remaining = list(range(n_items - 1))
    mean_u = proj_u[-1].copy()
    mean_v = proj_v[-1].copy()
    while remaining:
        dists = [_projector_distance(proj_u[i], proj_v[i], mean_u, mean_v) for i in remaining]
        j = int(np.argmin(dists))
        if dists[j] > join_tol:
            break
        idx = remaining.pop(j)
        members.append(idx)
        k = len(members)
        mean_u += (proj_u[idx] - mean_u) / k
        mean_v += (proj_v[idx] - mean_v) / k
    members.sort()
    if len(members) < max(1, min_run):
        raise NoConvergentSubsequence(f"stable group has {len(members)} indices, require at least {min_run}")
    tail_count = max(1, int(np.ceil(0.25 * len(members))))
    tail = members[-tail_count:]
    variation = 0.0
    for a in range(len(tail)):
        for b in range(a + 1, len(tail)):
            variation = max(
                variation,
                _projector_distance(proj_u[tail[a]], proj_v[tail[a]], proj_u[tail[b]], proj_v[tail[b]]),
            )
    if variation > TAIL_VARIATION_TOL:
        raise NoConvergentSubsequence(f"selected tail varies by {variation:.3e} > {TAIL_VARIATION_TOL:.1e}")

    # Limit frames of the vanishing directions along the subsequence.
    mean_pu = sum(proj_u[i] for i in members) / len(members)
    mean_pv = sum(proj_v[i] for i in members) / len(members)
    limit_u_bar = _top_eigvecs(mean_pu, d)
    limit_v_bar = _top_eigvecs(mean_pv, d)

    # Reference complement of the limit total column/row space.
    comb_u = matcore.orthonormalize(np.hstack([fx.U, limit_u_bar]))
    comb_v = matcore.orthonormalize(np.hstack([fx.V, limit_v_bar]))
    u_perp_ref = matcore.orth_complement(comb_u)
    v_perp_ref = matcore.orth_complement(comb_v)

    member_set = set(members)
    frames = []
    for i in range(n_items):
        flow, fbar = low_frames[i], bar_frames[i]
        P = flow.U @ flow.U.T
        Q = flow.V @ flow.V.T
        U_i = _aligned_or_fallback(P @ fx.U, fx.U, flow.U)
        V_i = _aligned_or_fallback(Q @ fx.V, fx.V, flow.V)
        if i in member_set:
            pu = u_perp_ref - P @ u_perp_ref - proj_u[i] @ u_perp_ref
            pv = v_perp_ref - Q @ v_perp_ref - proj_v[i] @ v_perp_ref
            U_perp_i = _aligned_or_fallback(pu, u_perp_ref, cone_frame(x_list[i], tol).U_perp)
            V_perp_i = _aligned_or_fallback(pv, v_perp_ref, cone_frame(x_list[i], tol).V_perp)
        else:
            fi = cone_frame(x_list[i], tol)
            U_perp_i = fi.U_perp
            V_perp_i = fi.V_perp
        frames.append(
            IndexFrames(U=U_i, V=V_i, U_perp=U_perp_i, V_perp=V_perp_i, U_bar=fbar.U, V_bar=fbar.V)
        )
    return SequenceBundle(
        target=fx.X,
        x_seq=x_list,
        r_low=r_low,
        r_seq=r,
        frames=frames,
        provenance="decreasing_rank",
        subsequence=members,
        limit_u_bar=limit_u_bar,
        limit_v_bar=limit_v_bar,
    )


def _check_synthetic_args(fx: ConeFrame, r: int, N: int) -> int:
    r_low = fx.r
    if not isinstance(r, (int, np.integer)) or r < r_low:
        raise InvalidInput(f"require r >= rank X = {r_low}, got {r!r}")
    if r - r_low > min(fx.m, fx.n) - r_low:
        raise BudgetExceeded(
            f"require r - rank X <= min(m, n) - rank X = {min(fx.m, fx.n) - r_low}, got {r - r_low}"
        )
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidInput(f"require N >= 1, got {N!r}")
    return int(r) - r_low


def _synthetic_bundle(
    fx: ConeFrame,
    r: int,
    N: int,
    rng: RandomSource,
    rotations,
    provenance: str,
    scale: float | None,
) -> SequenceBundle:
    """Common body of the synthetic constructors.

    ``rotations(i)`` yields the coordinate rotations ``(Q_u, Q_v)`` of index
    ``i`` inside the target's complement spaces.  Element ``i`` is
    ``X + (c / (i + 1)) * U_bar_i @ V_bar_i.T`` with ``c`` the perturbation
    scale (the smallest positive singular value of the target by default),
    so each element has rank exactly ``r`` and its best rank-``r_low``
    approximation is the target itself for every index past the first.
    """
    d = r - fx.r
    c = scale if scale is not None else (float(fx.sigma[-1]) if fx.r >= 1 else 1.0)
    if c <= 0:
        raise InvalidInput(f"perturbation scale must be positive, got {c}")
    x_list = []
    frames = []
    for i in range(N):
        Q_u, Q_v = rotations(i)
        U_bar = fx.U_perp @ Q_u[:, :d]
        U_perp = fx.U_perp @ Q_u[:, d:]
        V_bar = fx.V_perp @ Q_v[:, :d]
        V_perp = fx.V_perp @ Q_v[:, d:]
        if d:
            Xi = fx.X + (c / (i + 1)) * (U_bar @ V_bar.T)
        else:
            Xi = fx.X.copy()
        x_list.append(Xi)
        frames.append(
            IndexFrames(
                U=fx.U,
                V=fx.V,
                U_perp=U_perp,
                V_perp=V_perp,
                U_bar=U_bar if d else None,
                V_bar=V_bar if d else None,
            )
        )
    return SequenceBundle(
        target=fx.X,
        x_seq=x_list,
        r_low=fx.r,
        r_seq=int(r),
        frames=frames,
        provenance=provenance,
        seed=rng.seed if isinstance(rng, RandomSource) else None,
        seed_path=rng.path if isinstance(rng, RandomSource) else None,
        scale=c,
    )


def dense_cluster_sequence(X, r: int, N: int, rng: RandomSource, scale: float | None = None) -> SequenceBundle:
    """Rank-``r`` perturbations of ``X`` whose vanishing directions sweep the
    whole complement.

    Index ``i`` draws independent Haar rotations of the complement spaces
    (derived streams ``rng.derive(i, 0)`` / ``rng.derive(i, 1)``, so draws
    are independent of evaluation order), takes their leading ``r - rank X``
    columns as the vanishing directions, and perturbs ``X`` by
    ``sigma_min(X) / (i + 1)`` along them.  As ``N`` grows the sampled
    direction frames become dense in the complement — every admissible
    frame is a cluster point in distribution.

    Raises
    ------
    BudgetExceeded
        If ``r - rank X`` exceeds ``min(m, n) - rank X``.
    """
    fx = cone_frame(X)
    _check_synthetic_args(fx, r, N)
    if not isinstance(rng, RandomSource):
        raise InvalidInput("rng must be a RandomSource")
    m_c = fx.m - fx.r
    n_c = fx.n - fx.r

    def rotations(i: int):
        return (
            matcore.haar_orthogonal(m_c, rng.derive(i, 0)) if m_c else np.zeros((0, 0)),
            matcore.haar_orthogonal(n_c, rng.derive(i, 1)) if n_c else np.zeros((0, 0)),
        )

    return _synthetic_bundle(fx, r, N, rng, rotations, "dense_cluster", scale)


def _check_rotation(Q: np.ndarray, dim: int, name: str) -> np.ndarray:
    Q = matcore.as_matrix(Q, name)
    if Q.shape != (dim, dim):
        raise InvalidInput(f"{name} must be {dim} x {dim}, got {Q.shape}")
    if dim and not np.allclose(Q.T @ Q, np.eye(dim), atol=1e-8):
        raise InvalidInput(f"{name} is not orthogonal")
    return Q


def constant_frame_sequence(
    X,
    r: int,
    N: int,
    rng: RandomSource,
    q_u: np.ndarray | None = None,
    q_v: np.ndarray | None = None,
    scale: float | None = None,
) -> SequenceBundle:
    """Like :func:`dense_cluster_sequence` but with one complement rotation
    reused at every index.

    This realizes a designated convergent subsequence directly: the
    vanishing-direction frames are constant, so every frame limit exists
    trivially.  ``q_u`` / ``q_v`` plant a caller-chosen rotation (expressed
    in the target's complement coordinates); by default a single Haar pair
    is drawn from ``rng``.
    """
    fx = cone_frame(X)
    _check_synthetic_args(fx, r, N)
    m_c = fx.m - fx.r
    n_c = fx.n - fx.r
    if q_u is None:
        q_u = matcore.haar_orthogonal(m_c, rng.derive(0)) if m_c else np.zeros((0, 0))
    if q_v is None:
        q_v = matcore.haar_orthogonal(n_c, rng.derive(1)) if n_c else np.zeros((0, 0))
    q_u = _check_rotation(q_u, m_c, "q_u")
    q_v = _check_rotation(q_v, n_c, "q_v")

    def rotations(i: int):
        return q_u, q_v

    return _synthetic_bundle(fx, r, N, rng, rotations, "dense_cluster_constant", scale)


def planted_recurrence_sequence(
    X,
    r: int,
    N: int,
    rng: RandomSource,
    q_u: np.ndarray,
    q_v: np.ndarray,
    period: int = 4,
    scale: float | None = None,
) -> SequenceBundle:
    """Independent Haar draws with a planted rotation recurring periodically.

    Indices ``i`` with ``i % period == period - 1`` reuse the planted
    rotation pair exactly; all other indices draw fresh Haar rotations.
    The planted frames therefore recur all the way into the tail — the
    finite stand-in for a subsequence converging to them.
    """
    fx = cone_frame(X)
    _check_synthetic_args(fx, r, N)
    if not isinstance(period, (int, np.integer)) or period < 2:
        raise InvalidInput(f"require period >= 2, got {period!r}")
    m_c = fx.m - fx.r
    n_c = fx.n - fx.r
    q_u = _check_rotation(q_u, m_c, "q_u")
    q_v = _check_rotation(q_v, n_c, "q_v")

    def rotations(i: int):
        if i % period == period - 1:
            return q_u, q_v
        return (
            matcore.haar_orthogonal(m_c, rng.derive(i, 0)) if m_c else np.zeros((0, 0)),
            matcore.haar_orthogonal(n_c, rng.derive(i, 1)) if n_c else np.zeros((0, 0)),
        )

    return _synthetic_bundle(fx, r, N, rng, rotations, "dense_cluster_recurrent", scale)


def lift_tangent_vector(bundle: SequenceBundle, rbar: int, eta, tol: float = variety.DEFAULT_TOL) -> LiftedVectorSequence:
    """Lift a tangent vector at the target along the bundle.

    ``eta`` must be tangent at ``X`` with the reduced budget
    ``rbar - r_seq + r_low`` (the rank the elements gained is subtracted
    from the budget available at them).  The lift keeps the block
    coordinates of ``eta`` constant and re-expresses them in frames aligned
    to the rank-``r_low`` part of each element, so every ``eta_i`` is
    tangent at ``X_i`` with budget ``rbar - r_seq`` and
    ``|eta_i - eta| -> 0`` at the rate of ``|X_i - X|``.

    Raises
    ------
    NotInCone
        If ``eta`` fails the reduced-budget tangent membership at ``X``.
    InvalidInput
        If ``rbar < r_seq`` or ``rbar >= min(m, n)``.
    """
    fx = cone_frame(bundle.target)
    if rbar < bundle.r_seq:
        raise InvalidInput(f"require r_seq <= rbar, got rbar={rbar} < r_seq={bundle.r_seq}")
    if rbar >= min(bundle.m, bundle.n):
        raise InvalidInput(f"require rbar < min(m, n); got rbar={rbar} with min(m, n)={min(bundle.m, bundle.n)}")
    lower_rbar = rbar - bundle.r_seq + bundle.r_low
    E = matcore.as_matrix(eta, "eta")
    if lower_rbar >= 1:
        if not cone_membership(fx, ConeSpec(ConeKind.TANGENT, lower_rbar), E, tol=tol):
            raise NotInCone(f"eta is not tangent at the target with reduced budget rbar={lower_rbar}")
    else:
        if matcore.frobenius_norm(E) > tol:
            raise NotInCone("reduced tangent budget is zero; only the zero vector lifts")
    blocks = decompose(fx, E)
    r_low = bundle.r_low
    eta_seq = []
    for Xi in bundle.x_seq:
        X_low = variety.truncate_rank(Xi, r_low)
        flow = cone_frame(X_low)
        P = flow.U @ flow.U.T
        Q = flow.V @ flow.V.T
        U_i = _aligned_or_fallback(P @ fx.U, fx.U, flow.U)
        V_i = _aligned_or_fallback(Q @ fx.V, fx.V, flow.V)
        W_i = _aligned_or_fallback(fx.U_perp - P @ fx.U_perp, fx.U_perp, flow.U_perp)
        Z_i = _aligned_or_fallback(fx.V_perp - Q @ fx.V_perp, fx.V_perp, flow.V_perp)
        eta_i = U_i @ blocks.A @ V_i.T + U_i @ blocks.B @ Z_i.T + W_i @ blocks.C @ V_i.T + W_i @ blocks.D @ Z_i.T
        eta_seq.append(eta_i)
    return LiftedVectorSequence(eta=E, eta_seq=eta_seq, rbar=int(rbar))


def lift_membership_verdicts(bundle: SequenceBundle, lifted: LiftedVectorSequence, tol: float = 1e-8) -> list:
    """Tangent membership of each lifted vector at its element."""
    spec = ConeSpec(ConeKind.TANGENT, lifted.rbar)
    return [cone_membership(fr, spec, e, tol=tol) for fr, e in zip(bundle.cone_frames(), lifted.eta_seq)]


_MANIFEST_FORMAT = "lowrank-cones/sequence-bundle/v1"
_FRAME_KEYS = ("U", "V", "U_perp", "V_perp", "U_bar", "V_bar")


def save_bundle(bundle: SequenceBundle, out_dir) -> str:
    """Write a bundle to a directory; returns the manifest path.

    Layout: ``manifest.json`` plus one matrix text file per stored matrix
    (target, every element, every non-empty frame, limit frames).  The
    manifest records dimensions, ranks, provenance, seed data and relative
    file references, and is deterministic for a deterministic bundle.
    """
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    matcore.write_matrix_text(os.path.join(out_dir, "target.txt"), bundle.target)
    entries = []
    for i, (Xi, fr) in enumerate(zip(bundle.x_seq, bundle.frames)):
        x_name = f"x_{i:04d}.txt"
        matcore.write_matrix_text(os.path.join(out_dir, x_name), Xi)
        frame_refs = {}
        for key in _FRAME_KEYS:
            mat = getattr(fr, key)
            if mat is None:
                continue
            f_name = f"{key.lower()}_{i:04d}.txt"
            matcore.write_matrix_text(os.path.join(out_dir, f_name), mat)
            frame_refs[key] = f_name
        entries.append({"x": x_name, "frames": frame_refs})
    limit_refs = None
    if bundle.limit_u_bar is not None and bundle.limit_v_bar is not None:
        matcore.write_matrix_text(os.path.join(out_dir, "limit_u_bar.txt"), bundle.limit_u_bar)
        matcore.write_matrix_text(os.path.join(out_dir, "limit_v_bar.txt"), bundle.limit_v_bar)
        limit_refs = {"U_bar": "limit_u_bar.txt", "V_bar": "limit_v_bar.txt"}
    manifest = {
        "format": _MANIFEST_FORMAT,
        "m": bundle.m,
        "n": bundle.n,
        "r_low": bundle.r_low,
        "r_seq": bundle.r_seq,
        "length": len(bundle),
        "provenance": bundle.provenance,
        "seed": bundle.seed,
        "seed_path": list(bundle.seed_path) if bundle.seed_path is not None else None,
        "scale": bundle.scale,
        "subsequence": list(bundle.subsequence) if bundle.subsequence is not None else None,
        "target": "target.txt",
        "limit_frames": limit_refs,
        "entries": entries,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def load_bundle(in_dir) -> SequenceBundle:
    """Read a bundle written by :func:`save_bundle`.

    Raises
    ------
    InvalidInput
        If the manifest is malformed or references are inconsistent.
    OSError
        If a referenced file cannot be read.
    """
    in_dir = os.fspath(in_dir)
    manifest_path = os.path.join(in_dir, "manifest.json")
    with open(manifest_path, "r", encoding="ascii") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"malformed bundle manifest: {exc}") from exc
    if manifest.get("format") != _MANIFEST_FORMAT:
        raise InvalidInput(f"unsupported bundle format {manifest.get('format')!r}")

    def load_ref(name):
        return matcore.read_matrix_text(os.path.join(in_dir, name))

    target = load_ref(manifest["target"])
    x_seq = []
    frames = []
    for entry in manifest["entries"]:
        x_seq.append(load_ref(entry["x"]))
        kwargs = {}
        for key in _FRAME_KEYS:
            ref = entry["frames"].get(key)
            kwargs[key] = load_ref(ref) if ref is not None else None
        frames.append(IndexFrames(**kwargs))
    if len(x_seq) != manifest["length"]:
        raise InvalidInput(f"manifest length {manifest['length']} does not match {len(x_seq)} entries")
    limit_u_bar = limit_v_bar = None
    if manifest.get("limit_frames"):
        limit_u_bar = load_ref(manifest["limit_frames"]["U_bar"])
        limit_v_bar = load_ref(manifest["limit_frames"]["V_bar"])
    return SequenceBundle(
        target=target,
        x_seq=x_seq,
        r_low=int(manifest["r_low"]),
        r_seq=int(manifest["r_seq"]),
        frames=frames,
        provenance=str(manifest["provenance"]),
        subsequence=manifest.get("subsequence"),
        limit_u_bar=limit_u_bar,
        limit_v_bar=limit_v_bar,
        seed=manifest.get("seed"),
        seed_path=tuple(manifest["seed_path"]) if manifest.get("seed_path") is not None else None,
        scale=manifest.get("scale"),
    )
