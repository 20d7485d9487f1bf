"""Finite verification suites for cone limits along convergent sequences.

Each ``verify_*`` operation runs seeded trials of a limit statement about
tangent/normal cones along rank-constrained sequences and returns a
:class:`LimitReport` with one entry per clause:

``verify_main_theorem``
    sandwich of the tangent cone correspondence: the reduced-budget cone at
    the target is inner-certified along the sequence, cluster points of
    sampled members land in the enlarged-budget cone at the target, the
    inclusion is strict when the rank drops, and the correspondence is
    continuous when it does not.
``verify_regular_tangent_limits``
    the same sandwich for the regular (linearized) tangent cone.
``verify_normal_cone_limits``
    collapse of the inner limit of normal-type cones when the rank drops,
    recovery of normal-cone members as cluster points, and the two-sided
    limit of the convexified normal cone along constant-rank sequences.
``whitney_a_regularity_check``
    tangent-space gap decay along rank-``r`` sequences converging into a
    lower stratum, with inner certification of the stratum's tangent space.
``polar_limit_check``
    polarity between tangent-side and normal-side limits in three regimes.

Inner certification fits a constant ``C`` on the first half of a residual
profile and validates ``residual_i <= C * |X_i - X| + tol`` on the second
half; a probe engineered to violate the statement must come out NOT
certified, and every suite includes such a negative control.

Reports are deterministic functions of their parameters and seed; only the
``timestamp`` and ``runtime_ms`` fields vary between reruns.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import matcore, variety
from .cones import (
    ConeFrame,
    ConeKind,
    ConeSpec,
    assemble,
    cone_distance,
    cone_frame,
    cone_membership,
    decompose,
    BlockDecomposition,
)
from .blockrank import rotate_to_low_rank_corner
from .errors import InvalidInput, InvalidParams
from .matcore import RandomSource
from .seqlab import (
    SequenceBundle,
    align_frames_constant_rank,
    constant_frame_sequence,
    dense_cluster_sequence,
    planted_recurrence_sequence,
)

__all__ = [
    "INNER_TOL",
    "OUTER_TOL",
    "PAIRING_LIMIT_TOL",
    "Subspace",
    "gap_distance",
    "ClauseReport",
    "LimitReport",
    "certify_inner",
    "cluster_candidates",
    "inner_residual_profile",
    "outer_cluster_check",
    "tangent_space_subspace",
    "verify_main_theorem",
    "verify_regular_tangent_limits",
    "verify_normal_cone_limits",
    "whitney_a_regularity_check",
    "PolarSequenceSpec",
    "polar_limit_check",
]

# Additive tolerance of the inner certification model
# residual_i <= C * |X_i - X| + INNER_TOL.
INNER_TOL = 1e-6
# Cluster candidates must sit within OUTER_TOL * max(1, |candidate|) of the
# upper-bound cone at the target.
OUTER_TOL = 1e-6
# Polar pairings along limits: |<eta, nu>| <= PAIRING_LIMIT_TOL * |eta| * |nu|.
PAIRING_LIMIT_TOL = 1e-6
# Cluster detection: group tail values whose pairwise distance is below this.
CLUSTER_JOIN_TOL = 1e-4
CLUSTER_TAIL_FRACTION = 0.25
# Collapse clause: excluded probes must keep at least this fraction of their
# norm as residual at every tail index.
COLLAPSE_FLOOR_FACTOR = 0.5
# Continuity clause: engineered non-members must keep at least this fraction.
CONTINUITY_FLOOR_FACTOR = 0.1


# ---------------------------------------------------------------------------
# Subspaces and gaps


@dataclass(frozen=True)
class Subspace:
    """An orthonormally based linear subspace of R^ambient.

    ``basis`` is ``ambient x p`` with orthonormal columns (checked to
    1e-10 via the Gram matrix).
    """

    ambient: int
    basis: np.ndarray

    def __post_init__(self) -> None:
        B = matcore.as_matrix(self.basis, "basis")
        if B.shape[0] != self.ambient:
            raise InvalidInput(f"basis has {B.shape[0]} rows, ambient is {self.ambient}")
        p = B.shape[1]
        if p > self.ambient:
            raise InvalidInput(f"basis has more columns than ambient dimension: {B.shape}")
        if p and not np.allclose(B.T @ B, np.eye(p), atol=1e-10):
            raise InvalidInput("basis is not column-orthonormal to 1e-10")
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def gap_distance(s1: Subspace, s2: Subspace) -> float:
    """Gap between equal-dimensional subspaces: the spectral norm of the
    difference of their orthogonal projectors (the sine of the largest
    principal angle; always in [0, 1]).

    Raises
    ------
    InvalidInput
        If ambient dimensions or subspace dimensions differ.
    """
    if not isinstance(s1, Subspace) or not isinstance(s2, Subspace):
        raise InvalidInput("gap_distance expects two Subspace arguments")
    if s1.ambient != s2.ambient:
        raise InvalidInput(f"ambient dimensions differ: {s1.ambient} != {s2.ambient}")
    if s1.dim != s2.dim:
        raise InvalidInput(f"subspace dimensions differ: {s1.dim} != {s2.dim}")
    P1 = s1.basis @ s1.basis.T
    P2 = s2.basis @ s2.basis.T
    return matcore.spectral_norm(P1 - P2)


def tangent_space_subspace(U: np.ndarray, V: np.ndarray, U_perp: np.ndarray, V_perp: np.ndarray) -> Subspace:
    """Tangent space of the fixed-rank manifold at a point with the given
    frames, as a subspace of row-major vectorized matrices.

    An orthonormal basis is ``{u_a z_c^T}`` for ``z`` running over the
    columns of ``[V V_perp]`` plus ``{w_d v_b^T}`` for ``w`` over the
    columns of ``U_perp``; its dimension is ``r (m + n - r)``.
    """
    m, r = U.shape
    n = V.shape[0]
    cols = []
    Z = np.hstack([V, V_perp])
    for a in range(r):
        for c in range(n):
            cols.append(np.outer(U[:, a], Z[:, c]).reshape(-1))
    for d in range(U_perp.shape[1]):
        for b in range(r):
            cols.append(np.outer(U_perp[:, d], V[:, b]).reshape(-1))
    basis = np.stack(cols, axis=1) if cols else np.zeros((m * n, 0))
    return Subspace(ambient=m * n, basis=basis)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class ClauseReport:
    """Verdict and evidence for one clause of a verification suite."""

    name: str
    verdict: str  # "pass" | "fail" | "vacuous"
    residual_summary: dict
    probes: list


@dataclass
class LimitReport:
    """Outcome of one verification suite run.

    ``residual_rows`` holds every recorded ``(index, probe_id, residual)``
    triple and is written to the CSV side file; everything else lands in
    the JSON report.  ``timestamp`` and ``runtime_ms`` are the only fields
    that vary between reruns with the same parameters and seed.
    """

    params: dict
    seed: int
    clauses: list
    runtime_ms: float
    timestamp: str
    residual_rows: list = field(default_factory=list)

    VOLATILE_FIELDS = ("timestamp", "runtime_ms")

    def passed(self) -> bool:
        return all(c.verdict in ("pass", "vacuous") for c in self.clauses)

    def to_dict(self, include_volatile: bool = True) -> dict:
        d = {
            "params": self.params,
            "seed": self.seed,
            "clauses": [
                {
                    "name": c.name,
                    "verdict": c.verdict,
                    "residual_summary": c.residual_summary,
                    "probes": c.probes,
                }
                for c in self.clauses
            ],
            "passed": self.passed(),
        }
        if include_volatile:
            d["timestamp"] = self.timestamp
            d["runtime_ms"] = self.runtime_ms
        return d

    def to_json_bytes(self, include_volatile: bool = True) -> bytes:
        text = json.dumps(self.to_dict(include_volatile), indent=2, sort_keys=True, allow_nan=False)
        return (text + "\n").encode("ascii")

    def csv_bytes(self) -> bytes:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["index", "probe_id", "residual"])
        for idx, pid, res in self.residual_rows:
            writer.writerow([idx, pid, f"{res:.17g}"])
        return out.getvalue().encode("ascii")

    def write(self, out_dir, stem: str) -> tuple:
        """Write ``<stem>.json`` and ``<stem>.csv`` under ``out_dir``."""
        out_dir = os.fspath(out_dir)
        os.makedirs(out_dir, exist_ok=True)
        json_path = os.path.join(out_dir, f"{stem}.json")
        csv_path = os.path.join(out_dir, f"{stem}.csv")
        with open(json_path, "wb") as fh:
            fh.write(self.to_json_bytes())
        with open(csv_path, "wb") as fh:
            fh.write(self.csv_bytes())
        return json_path, csv_path


def _finish_report(params: dict, seed: int, clauses: list, rows: list, t0: float) -> LimitReport:
    return LimitReport(
        params=params,
        seed=seed,
        clauses=clauses,
        runtime_ms=round((time.perf_counter() - t0) * 1000.0, 3),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        residual_rows=rows,
    )


# ---------------------------------------------------------------------------
# Certification and clustering primitives


def certify_inner(residuals, gaps, tol: float = INNER_TOL) -> tuple:
    """Fit/validate inner certification of a residual profile.

    A constant ``C`` is fitted on the first half of the indices as the
    smallest value with ``residual_i <= C * gap_i + tol`` there (indices
    with ``gap_i == 0`` must satisfy ``residual_i <= tol`` outright); the
    certificate holds iff the same inequality is satisfied on the entire
    second half.

    Returns
    -------
    (certified, C) : tuple of (bool, float)
    """
    res = [float(x) for x in residuals]
    gp = [float(x) for x in gaps]
    if len(res) != len(gp):
        raise InvalidInput(f"residuals ({len(res)}) and gaps ({len(gp)}) differ in length")
    n = len(res)
    if n < 2:
        raise InvalidInput("certification requires at least 2 indices")
    half = n // 2
    C = 0.0
    ok = True
    for i in range(half):
        if gp[i] > 0.0:
            C = max(C, (res[i] - tol) / gp[i])
        elif res[i] > tol:
            ok = False
    C = max(C, 0.0)
    if ok:
        ok = all(res[i] <= C * gp[i] + tol for i in range(half, n))
    return ok, C


def cluster_candidates(
    values,
    tail_fraction: float = CLUSTER_TAIL_FRACTION,
    join_tol: float = CLUSTER_JOIN_TOL,
) -> list:
    """Cluster-point candidates from the tail of a matrix sequence.

    The last ``ceil(tail_fraction * N)`` values are grouped greedily: a
    value joins the first group all of whose members are within
    ``join_tol`` in Frobenius norm, else starts a new group.  Each group
    yields its mean as a candidate.  Singleton groups are legitimate
    candidates — on a finite window every tail value is trivially the limit
    of a subsequence.

    Returns
    -------
    list of dict
        Each with keys ``value`` (the mean matrix) and ``members`` (the
        index list).
    """
    n = len(values)
    if n == 0:
        return []
    start = n - max(1, int(np.ceil(tail_fraction * n)))
    groups: list = []
    for i in range(start, n):
        placed = False
        for g in groups:
            if all(matcore.frobenius_norm(values[i] - values[j]) <= join_tol for j in g):
                g.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])
    out = []
    for g in groups:
        mean = sum(values[j] for j in g) / len(g)
        out.append({"value": mean, "members": list(g)})
    return out


# ---------------------------------------------------------------------------
# Samplers and sequence builders


def _random_rank_matrix(m: int, n: int, r: int, rng: RandomSource) -> np.ndarray:
    """Seeded m x n matrix of exact rank r with well-separated singular
    values (gaps of 0.5, smallest 1.0)."""
    if r == 0:
        return np.zeros((m, n))
    gen = rng.generator()
    W = matcore.haar_orthogonal(m, gen)
    Z = matcore.haar_orthogonal(n, gen)
    sigma = 1.0 + 0.5 * np.arange(r - 1, -1, -1, dtype=float)
    return (W[:, :r] * sigma) @ Z[:, :r].T


def _rotation_sequence(X, N: int, rng: RandomSource, theta0: float = 0.1, decay: float = 0.6) -> list:
    """Constant-rank sequence X_i = Q_u(theta_i) X Q_v(theta_i)^T with
    Cayley rotations of seeded unit-norm skew generators and geometrically
    decaying angles theta_i = theta0 * decay**i.

    The decay is fast so the tail enters the asymptotic regime within a few
    dozen indices: residual profiles become proportional to the gaps there
    (the inner certification's additive tolerance absorbs what is left) and
    tail cluster values sit within no more than the tolerance of their
    limit.  Deep-tail elements may equal ``X`` to the last bit; zero gaps
    are legitimate for the certification model.
    """
    X = matcore.as_matrix(X)
    m, n = X.shape
    gen = rng.generator()

    def unit_skew(k: int) -> np.ndarray:
        G = gen.standard_normal((k, k))
        S = (G - G.T) / 2.0
        return S / matcore.spectral_norm(S)

    Su = unit_skew(m)
    Sv = unit_skew(n)

    def cayley(S: np.ndarray, theta: float) -> np.ndarray:
        k = S.shape[0]
        return np.linalg.solve(np.eye(k) + theta * S, np.eye(k) - theta * S)

    x_seq = []
    for i in range(N):
        theta = theta0 * decay**i
        Qu = cayley(Su, theta)
        Qv = cayley(Sv, theta)
        x_seq.append(Qu @ X @ Qv.T)
    return x_seq


def _sample_blocks(frame: ConeFrame, spec: ConeSpec, gen: np.random.Generator) -> BlockDecomposition:
    """Random block coordinates of a member of the cone ``spec`` at the frame."""
    m, n, r = frame.m, frame.n, frame.r
    kind = spec.kind
    zero_A = np.zeros((r, r))
    zero_B = np.zeros((r, n - r))
    zero_C = np.zeros((m - r, r))

    def bounded_rank_D(budget: int) -> np.ndarray:
        if budget <= 0:
            return np.zeros((m - r, n - r))
        if budget >= min(m - r, n - r):
            return gen.standard_normal((m - r, n - r))
        return gen.standard_normal((m - r, budget)) @ gen.standard_normal((budget, n - r))

    if kind is ConeKind.TANGENT:
        return BlockDecomposition(
            gen.standard_normal((r, r)),
            gen.standard_normal((r, n - r)),
            gen.standard_normal((m - r, r)),
            bounded_rank_D(spec.rbar - r),
        )
    if kind is ConeKind.REGULAR_TANGENT:
        return BlockDecomposition(
            gen.standard_normal((r, r)),
            gen.standard_normal((r, n - r)),
            gen.standard_normal((m - r, r)),
            np.zeros((m - r, n - r)),
        )
    if kind is ConeKind.NORMAL:
        return BlockDecomposition(zero_A, zero_B, zero_C, bounded_rank_D(min(m, n) - spec.rbar))
    if kind is ConeKind.CLARKE_NORMAL:
        return BlockDecomposition(zero_A, zero_B, zero_C, gen.standard_normal((m - r, n - r)))
    if kind is ConeKind.REGULAR_NORMAL:
        if r < spec.rbar:
            return BlockDecomposition(zero_A, zero_B, zero_C, np.zeros((m - r, n - r)))
        return BlockDecomposition(zero_A, zero_B, zero_C, gen.standard_normal((m - r, n - r)))
    raise InvalidInput(f"unknown cone kind {kind!r}")  # pragma: no cover


def sample_cone_member(frame: ConeFrame, spec: ConeSpec, gen: np.random.Generator, normalize: bool = True) -> np.ndarray:
    """Random member of the cone ``spec`` at the frame (unit Frobenius norm
    when ``normalize`` and the draw is nonzero)."""
    eta = assemble(frame, _sample_blocks(frame, spec, gen))
    nrm = matcore.frobenius_norm(eta)
    if normalize and nrm > 0:
        eta = eta / nrm
    return eta


def _reassemble_at_index(bundle: SequenceBundle, i: int, blocks: BlockDecomposition) -> np.ndarray:
    """Re-express block coordinates in the bundle's aligned frames at index i.

    For constant-rank bundles the aligned ``U_i / U_perp_i`` frames span the
    element's column space and its complement exactly, so reassembled
    vectors with a rank-budgeted ``D`` block are exact members of the
    corresponding tangent cone at ``X_i``.
    """
    fr = bundle.frames[i]
    return (
        fr.U @ blocks.A @ fr.V.T
        + fr.U @ blocks.B @ fr.V_perp.T
        + fr.U_perp @ blocks.C @ fr.V.T
        + fr.U_perp @ blocks.D @ fr.V_perp.T
    )


def _spread_partial_isometry(rows: int, cols: int, rank: int, gen: np.random.Generator) -> np.ndarray:
    """Random rank-``rank`` partial isometry scaled to unit Frobenius norm
    (all nonzero singular values equal)."""
    W = matcore.haar_orthogonal(rows, gen)
    Z = matcore.haar_orthogonal(cols, gen)
    return (W[:, :rank] @ Z[:, :rank].T) / np.sqrt(rank)


# ---------------------------------------------------------------------------
# Profiles and cluster checks (public primitives)


def inner_residual_profile(bundle: SequenceBundle, spec: ConeSpec, probe) -> list:
    """Distance from ``probe`` to the cone ``spec`` at every element of the
    bundle (fresh singular frames per element, so the profile is
    basis-independent)."""
    E = matcore.as_matrix(probe, "probe")
    return [cone_distance(fr, spec, E) for fr in bundle.cone_frames()]


def outer_cluster_check(
    bundle: SequenceBundle,
    spec: ConeSpec,
    sampler,
    upper_rbar: int,
    upper_kind: ConeKind = ConeKind.TANGENT,
    tail_fraction: float = CLUSTER_TAIL_FRACTION,
    join_tol: float = CLUSTER_JOIN_TOL,
) -> dict:
    """Sample one member of ``spec`` at every element, cluster the tail, and
    test every cluster candidate against the upper-bound cone at the target.

    Parameters
    ----------
    sampler : callable
        ``sampler(frame, index) -> matrix`` returning a member of ``spec``
        at that element (the cone membership of sampled values is part of
        the sampler's contract and is re-checked here at 1e-8).
    upper_rbar : int
        Rank budget of the upper-bound cone at the target.
    upper_kind : ConeKind
        Kind of the upper-bound cone (tangent for the sandwich theorems).

    Returns
    -------
    dict
        ``candidates`` (list of member-index lists), ``distances``,
        ``membership_failures`` (count of sampled values rejected by the
        membership re-check), ``verdict``.
    """
    frames = bundle.cone_frames()
    values = [matcore.as_matrix(sampler(frames[i], i), f"sample[{i}]") for i in range(len(bundle))]
    bad_members = sum(
        0 if cone_membership(frames[i], spec, values[i], tol=1e-8) else 1 for i in range(len(values))
    )
    fx = cone_frame(bundle.target)
    upper_spec = ConeSpec(upper_kind, upper_rbar)
    cands = cluster_candidates(values, tail_fraction, join_tol)
    distances = []
    ok = bad_members == 0
    for cand in cands:
        dist = cone_distance(fx, upper_spec, cand["value"])
        distances.append(dist)
        if dist > OUTER_TOL * max(1.0, matcore.frobenius_norm(cand["value"])):
            ok = False
    return {
        "candidates": [c["members"] for c in cands],
        "distances": distances,
        "membership_failures": bad_members,
        "verdict": "pass" if ok else "fail",
    }


# ---------------------------------------------------------------------------
# Parameter validation


def _positive(name: str, value) -> int:
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidParams(f"require {name} >= 1, got {value!r}")
    return int(value)


def _validate_rank_chain(m: int, n: int, r_low: int, r: int, rbar: int | None = None) -> None:
    _positive("m", m)
    _positive("n", n)
    if not isinstance(r_low, (int, np.integer)) or r_low < 1:
        raise InvalidParams(f"require 1 <= r_low, got r_low={r_low!r}")
    if not isinstance(r, (int, np.integer)) or r < r_low:
        raise InvalidParams(f"require r_low <= r, got r_low={r_low}, r={r!r}")
    if rbar is None:
        if r >= min(m, n):
            raise InvalidParams(f"require r < min(m, n), got r={r} with min(m, n)={min(m, n)}")
        return
    if not isinstance(rbar, (int, np.integer)) or rbar < r:
        raise InvalidParams(f"require r <= rbar, got r={r}, rbar={rbar!r}")
    if rbar >= min(m, n):
        raise InvalidParams(f"require rbar < min(m, n), got rbar={rbar} with min(m, n)={min(m, n)}")


def _validate_budgets(trials: int, N: int) -> None:
    _positive("trials", trials)
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidParams(f"require N >= 2, got {N!r}")


def _as_rng(rng) -> RandomSource:
    if isinstance(rng, RandomSource):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RandomSource(int(rng))
    raise InvalidParams(f"rng must be a RandomSource or integer seed, got {type(rng).__name__}")


def _probe_row_block(rows: list, profile, probe_id: str) -> None:
    for i, res in enumerate(profile):
        rows.append((i, probe_id, float(res)))


def _summary_stats(values) -> dict:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return {"count": 0}
    return {
        "count": int(arr.size),
        "min": float(np.min(arr)),
        "median": float(np.median(arr)),
        "max": float(np.max(arr)),
    }


# ---------------------------------------------------------------------------
# Main sandwich suite


def _engineered_tangent_violator(fx: ConeFrame, budget: int, gen: np.random.Generator) -> np.ndarray | None:
    """A probe whose trailing block has maximal spread rank (> budget when
    possible), with small free blocks — engineered to sit outside the
    budget-``budget`` tangent cone at the frame with a stable margin."""
    m, n, r = fx.m, fx.n, fx.r
    spread = min(m - r, n - r)
    if spread <= budget:
        return None
    A = gen.standard_normal((r, r))
    B = gen.standard_normal((r, n - r))
    C = gen.standard_normal((m - r, r))
    off_norm = np.sqrt(sum(float(np.sum(M * M)) for M in (A, B, C)))
    scale = 0.5 / off_norm if off_norm > 0 else 0.0
    D = _spread_partial_isometry(m - r, n - r, spread, gen) * np.sqrt(spread)
    blocks = BlockDecomposition(A * scale, B * scale, C * scale, D)
    return assemble(fx, blocks)


def verify_main_theorem(m: int, n: int, r_low: int, r: int, rbar: int, trials: int, N: int, rng) -> LimitReport:
    """Run the tangent-cone sandwich suite.

    Requires ``1 <= r_low <= r <= rbar < min(m, n)``.  Each trial draws a
    rank-``r_low`` target and a rank-``r`` sequence converging to it
    (a complement-sweeping perturbation bundle when ``r_low < r``; a
    constant-rank rotation sequence when ``r_low == r``) and evaluates:

    ``lower_inner``
        members of the reduced-budget tangent cone at the target are
        inner-certified along the sequence (and sit inside the
        enlarged-budget cone at the target — the sandwich consistency check);
    ``upper_outer``
        cluster candidates of sampled members along the sequence lie in the
        enlarged-budget tangent cone at the target, or ``vacuous`` when the
        enlarged budget saturates ``min(m, n)``;
    ``strictness`` (``r_low < r``)
        a planted candidate sequence of exact members whose cluster value
        fails the reduced-budget cone but passes the enlarged one;
    ``continuity`` (``r_low == r``)
        an engineered non-member keeps residual >= 0.1 of its norm at every
        index;
    ``negative_control``
        the engineered non-member is reported NOT certified.
    """
    _validate_rank_chain(m, n, r_low, r, rbar)
    _validate_budgets(trials, N)
    rng = _as_rng(rng)
    t0 = time.perf_counter()
    lower_rbar = rbar - r + r_low
    upper_rbar = rbar + r - r_low
    seq_spec = ConeSpec(ConeKind.TANGENT, rbar)
    upper_active = upper_rbar < min(m, n)

    lower_probes, upper_probes, strict_probes, continuity_probes, control_probes = [], [], [], [], []
    rows: list = []

    for t in range(trials):
        t_rng = rng.derive(t)
        X = _random_rank_matrix(m, n, r_low, t_rng.derive(0))
        fx = cone_frame(X)
        if r_low < r:
            bundle = dense_cluster_sequence(X, r, N, t_rng.derive(1))
        else:
            bundle = align_frames_constant_rank(X, _rotation_sequence(X, N, t_rng.derive(1)))
        gaps = bundle.gaps()
        gen = t_rng.derive(2).generator()

        # --- lower_inner: members of the reduced-budget cone at the target.
        pool = []
        for j in range(3):
            if lower_rbar >= 1:
                probe = sample_cone_member(fx, ConeSpec(ConeKind.TANGENT, lower_rbar), gen)
            else:
                probe = np.zeros((m, n))
            pool.append(probe)
            pid = f"t{t:02d}.member{j}"
            profile = inner_residual_profile(bundle, seq_spec, probe)
            certified, C = certify_inner(profile, gaps)
            _probe_row_block(rows, profile, pid)
            sandwich = cone_distance(fx, ConeSpec(ConeKind.TANGENT, min(upper_rbar, min(m, n) - 1)), probe)
            lower_probes.append(
                {
                    "probe_id": pid,
                    "provenance": f"tangent member at target, budget rbar={lower_rbar}",
                    "norm": matcore.frobenius_norm(probe),
                    "certified": bool(certified),
                    "C": C,
                    "max_tail_residual": float(max(profile[N // 2 :])),
                    "sandwich_distance": sandwich,
                    "sandwich_ok": bool(sandwich <= OUTER_TOL * max(1.0, matcore.frobenius_norm(probe))),
                }
            )

        # --- upper_outer: cluster candidates of sampled members.
        if upper_active:
            if r_low < r:
                def sampler(frame, i, _rng=t_rng):
                    return sample_cone_member(frame, seq_spec, _rng.derive(3, i).generator())
            else:
                pool_blocks = [decompose(fx, p) for p in pool]

                def sampler(frame, i, _bundle=bundle, _blocks=pool_blocks):
                    return _reassemble_at_index(_bundle, i, _blocks[i % len(_blocks)])

            outer = outer_cluster_check(bundle, seq_spec, sampler, upper_rbar)
            for c_idx, dist in enumerate(outer["distances"]):
                rows.append((outer["candidates"][c_idx][0], f"t{t:02d}.upper_cand{c_idx}", float(dist)))
            upper_probes.append(
                {
                    "probe_id": f"t{t:02d}.upper",
                    "provenance": "cluster candidates of sampled members along the sequence",
                    "candidates": len(outer["candidates"]),
                    "max_distance": float(max(outer["distances"])) if outer["distances"] else 0.0,
                    "membership_failures": outer["membership_failures"],
                    "ok": outer["verdict"] == "pass",
                }
            )

        # --- strictness (rank drop) / continuity (constant rank).
        if r_low < r:
            strict = _strictness_exhibit(fx, bundle, r, rbar, t_rng.derive(4), rows, f"t{t:02d}")
            if strict is not None:
                strict_probes.append(strict)
        else:
            control = _engineered_tangent_violator(fx, rbar - r, gen)
            if control is not None:
                pid = f"t{t:02d}.nonmember"
                profile = inner_residual_profile(bundle, seq_spec, control)
                _probe_row_block(rows, profile, pid)
                floor = float(min(profile))
                norm = matcore.frobenius_norm(control)
                continuity_probes.append(
                    {
                        "probe_id": pid,
                        "provenance": "engineered non-member (spread trailing block beyond budget)",
                        "norm": norm,
                        "floor": floor,
                        "floor_ok": bool(floor >= CONTINUITY_FLOOR_FACTOR * norm),
                    }
                )

        # --- negative control: engineered violator must NOT be certified.
        ctrl = _engineered_tangent_violator(fx, rbar - r, t_rng.derive(5).generator())
        if ctrl is not None:
            pid = f"t{t:02d}.control"
            profile = inner_residual_profile(bundle, seq_spec, ctrl)
            certified, C = certify_inner(profile, gaps)
            _probe_row_block(rows, profile, pid)
            control_probes.append(
                {
                    "probe_id": pid,
                    "provenance": "engineered non-member used as certification control",
                    "norm": matcore.frobenius_norm(ctrl),
                    "certified": bool(certified),
                    "C": C,
                    "min_tail_residual": float(min(profile[N // 2 :])),
                }
            )

    clauses = [
        ClauseReport(
            name="lower_inner",
            verdict="pass"
            if all(p["certified"] and p["sandwich_ok"] for p in lower_probes)
            else "fail",
            residual_summary={
                "probes_total": len(lower_probes),
                "probes_certified": sum(p["certified"] for p in lower_probes),
                "max_C": max((p["C"] for p in lower_probes), default=0.0),
                "max_tail_residual": max((p["max_tail_residual"] for p in lower_probes), default=0.0),
            },
            probes=lower_probes,
        )
    ]
    if upper_active:
        clauses.append(
            ClauseReport(
                name="upper_outer",
                verdict="pass" if upper_probes and all(p["ok"] for p in upper_probes) else "fail",
                residual_summary={
                    "trials": len(upper_probes),
                    "max_distance": max((p["max_distance"] for p in upper_probes), default=0.0),
                    "upper_rbar": upper_rbar,
                },
                probes=upper_probes,
            )
        )
    else:
        clauses.append(
            ClauseReport(
                name="upper_outer",
                verdict="vacuous",
                residual_summary={
                    "note": f"enlarged budget rbar={upper_rbar} reaches min(m, n)={min(m, n)}; "
                    "the upper-bound cone is the whole space",
                },
                probes=[],
            )
        )
    if r_low < r:
        clauses.append(
            ClauseReport(
                name="strictness",
                verdict="pass"
                if strict_probes and all(p["ok"] for p in strict_probes)
                else ("vacuous" if not strict_probes else "fail"),
                residual_summary={
                    "trials": len(strict_probes),
                    "min_lower_residual": min((p["lower_residual"] for p in strict_probes), default=0.0),
                    "max_upper_distance": max((p["upper_distance"] for p in strict_probes), default=0.0),
                },
                probes=strict_probes,
            )
        )
    else:
        clauses.append(
            ClauseReport(
                name="continuity",
                verdict="pass"
                if continuity_probes and all(p["floor_ok"] for p in continuity_probes)
                else ("vacuous" if not continuity_probes else "fail"),
                residual_summary={
                    "trials": len(continuity_probes),
                    "min_floor": min((p["floor"] for p in continuity_probes), default=0.0),
                    "floor_factor": CONTINUITY_FLOOR_FACTOR,
                },
                probes=continuity_probes,
            )
        )
    clauses.append(
        ClauseReport(
            name="negative_control",
            verdict="pass"
            if control_probes and not any(p["certified"] for p in control_probes)
            else ("vacuous" if not control_probes else "fail"),
            residual_summary={
                "controls_total": len(control_probes),
                "controls_rejected": sum(not p["certified"] for p in control_probes),
                "min_tail_residual": min((p["min_tail_residual"] for p in control_probes), default=0.0),
            },
            probes=control_probes,
        )
    )
    params = {"m": m, "n": n, "r_low": r_low, "r": r, "rbar": rbar, "trials": trials, "N": N, "suite": "main"}
    return _finish_report(params, rng.seed, clauses, rows, t0)


def _strictness_exhibit(
    fx: ConeFrame,
    bundle: SequenceBundle,
    r: int,
    rbar: int,
    rng: RandomSource,
    rows: list,
    tag: str,
) -> dict | None:
    """Planted sequence of exact tangent members whose cluster value fails
    the reduced-budget cone at the target but passes the enlarged one.

    The trailing-block coordinate matrix has exact rank
    ``min(rbar + r - 2 r_low, m - r_low, n - r_low)``; rotating its mass
    into the leading corner (the low-rank-corner rotation) makes every
    re-expressed member exactly tangent with budget ``rbar - r`` at its
    element while the merged trailing block at the target keeps full
    planted rank — strictly above the reduced budget ``rbar - r``.
    """
    m, n, r_low = fx.m, fx.n, fx.r
    k = r - r_low
    s = rbar - r
    rho = min(rbar + r - 2 * r_low, m - r_low, n - r_low)
    if rho <= s:
        return None
    gen = rng.generator()
    Wl = matcore.haar_orthogonal(m - r_low, gen)
    Wr = matcore.haar_orthogonal(n - r_low, gen)
    sigma = 1.0 + 0.1 * np.arange(rho - 1, -1, -1, dtype=float)
    M0 = (Wl[:, :rho] * sigma) @ Wr[:, :rho].T
    Ru, Rv, Mp = rotate_to_low_rank_corner(M0, k, s)
    A = gen.standard_normal((r_low, r_low))
    B = gen.standard_normal((r_low, n - r_low)) @ Rv
    C = Ru.T @ gen.standard_normal((m - r_low, r_low))

    seq_spec = ConeSpec(ConeKind.TANGENT, rbar)
    lower_spec = ConeSpec(ConeKind.TANGENT, rbar - r + r_low)
    upper_rbar = rbar + r - r_low
    upper_spec = ConeSpec(ConeKind.TANGENT, upper_rbar) if upper_rbar < min(m, n) else None
    frames = bundle.cone_frames()
    values = []
    member_fail = 0
    for i in range(len(bundle)):
        fr = bundle.frames[i]
        Fu = np.hstack([fr.U_bar, fr.U_perp])
        Fv = np.hstack([fr.V_bar, fr.V_perp])
        eta_i = fx.U @ A @ fx.V.T + fx.U @ B @ Fv.T + Fu @ C @ fx.V.T + Fu @ Mp @ Fv.T
        values.append(eta_i)
        if not cone_membership(frames[i], seq_spec, eta_i, tol=1e-8):
            member_fail += 1
    cands = cluster_candidates(values)
    lower_res = []
    upper_dist = []
    for cand in cands:
        lower_res.append(cone_distance(fx, lower_spec, cand["value"]))
        # A saturated enlarged budget makes the upper cone the whole space.
        upper_dist.append(cone_distance(fx, upper_spec, cand["value"]) if upper_spec is not None else 0.0)
    for c_idx, res in enumerate(lower_res):
        rows.append((cands[c_idx]["members"][0], f"{tag}.strict_cand{c_idx}", float(res)))
    norms = [matcore.frobenius_norm(c["value"]) for c in cands]
    ok = (
        member_fail == 0
        and all(res > 0.1 * max(1.0, nrm) for res, nrm in zip(lower_res, norms))
        and all(dist <= OUTER_TOL * max(1.0, nrm) for dist, nrm in zip(upper_dist, norms))
    )
    return {
        "probe_id": f"{tag}.strict",
        "provenance": f"planted trailing-block rank {rho} member sequence",
        "planted_rank": rho,
        "candidates": len(cands),
        "membership_failures": member_fail,
        "lower_residual": float(min(lower_res)) if lower_res else 0.0,
        "upper_distance": float(max(upper_dist)) if upper_dist else 0.0,
        "ok": bool(ok),
    }


# ---------------------------------------------------------------------------
# Regular tangent suite


def verify_regular_tangent_limits(m: int, n: int, r_low: int, r: int, trials: int, N: int, rng) -> LimitReport:
    """Sandwich suite for the regular (linearized) tangent cone.

    Requires ``1 <= r_low <= r < min(m, n)``.  Clauses: inner certification
    of the tangent space at the target along the sequence
    (``tangent_space_inner``), cluster candidates inside the tangent cone
    with doubled budget ``2r - r_low`` at the target (``outer_bound``),
    planted strictness when the rank drops (``strictness``), and a
    negative control with a nonzero trailing block.
    """
    _validate_rank_chain(m, n, r_low, r, None)
    _validate_budgets(trials, N)
    rng = _as_rng(rng)
    t0 = time.perf_counter()
    upper_rbar = 2 * r - r_low
    upper_active = upper_rbar < min(m, n)
    seq_spec = ConeSpec(ConeKind.REGULAR_TANGENT, r)

    inner_probes, outer_probes, strict_probes, control_probes = [], [], [], []
    rows: list = []
    for t in range(trials):
        t_rng = rng.derive(t)
        X = _random_rank_matrix(m, n, r_low, t_rng.derive(0))
        fx = cone_frame(X)
        if r_low < r:
            bundle = dense_cluster_sequence(X, r, N, t_rng.derive(1))
        else:
            bundle = align_frames_constant_rank(X, _rotation_sequence(X, N, t_rng.derive(1)))
        gaps = bundle.gaps()
        gen = t_rng.derive(2).generator()

        pool = [sample_cone_member(fx, ConeSpec(ConeKind.REGULAR_TANGENT, max(r_low, 1)), gen) for _ in range(3)]
        for j, probe in enumerate(pool):
            pid = f"t{t:02d}.member{j}"
            profile = inner_residual_profile(bundle, seq_spec, probe)
            certified, C = certify_inner(profile, gaps)
            _probe_row_block(rows, profile, pid)
            inner_probes.append(
                {
                    "probe_id": pid,
                    "provenance": "tangent-space member at the target",
                    "norm": matcore.frobenius_norm(probe),
                    "certified": bool(certified),
                    "C": C,
                    "max_tail_residual": float(max(profile[N // 2 :])),
                }
            )

        if upper_active:
            if r_low < r:
                def sampler(frame, i, _rng=t_rng):
                    return sample_cone_member(frame, seq_spec, _rng.derive(3, i).generator())
            else:
                pool_blocks = [decompose(fx, p) for p in pool]

                def sampler(frame, i, _bundle=bundle, _blocks=pool_blocks):
                    return _reassemble_at_index(_bundle, i, _blocks[i % len(_blocks)])

            outer = outer_cluster_check(bundle, seq_spec, sampler, upper_rbar)
            for c_idx, dist in enumerate(outer["distances"]):
                rows.append((outer["candidates"][c_idx][0], f"t{t:02d}.outer_cand{c_idx}", float(dist)))
            outer_probes.append(
                {
                    "probe_id": f"t{t:02d}.outer",
                    "provenance": "cluster candidates of sampled tangent-space members",
                    "candidates": len(outer["candidates"]),
                    "max_distance": float(max(outer["distances"])) if outer["distances"] else 0.0,
                    "membership_failures": outer["membership_failures"],
                    "ok": outer["verdict"] == "pass",
                }
            )

        if r_low < r:
            strict = _regular_strictness_exhibit(fx, bundle, r, t_rng.derive(4), rows, f"t{t:02d}")
            if strict is not None:
                strict_probes.append(strict)

        ctrl = _engineered_tangent_violator(fx, 0, t_rng.derive(5).generator())
        if ctrl is not None:
            pid = f"t{t:02d}.control"
            profile = inner_residual_profile(bundle, seq_spec, ctrl)
            certified, C = certify_inner(profile, gaps)
            _probe_row_block(rows, profile, pid)
            control_probes.append(
                {
                    "probe_id": pid,
                    "provenance": "probe with spread trailing block (outside the tangent space)",
                    "norm": matcore.frobenius_norm(ctrl),
                    "certified": bool(certified),
                    "min_tail_residual": float(min(profile[N // 2 :])),
                }
            )

    clauses = [
        ClauseReport(
            name="tangent_space_inner",
            verdict="pass" if all(p["certified"] for p in inner_probes) else "fail",
            residual_summary={
                "probes_total": len(inner_probes),
                "probes_certified": sum(p["certified"] for p in inner_probes),
                "max_C": max((p["C"] for p in inner_probes), default=0.0),
            },
            probes=inner_probes,
        ),
        ClauseReport(
            name="outer_bound",
            verdict=(
                "vacuous"
                if not upper_active
                else ("pass" if outer_probes and all(p["ok"] for p in outer_probes) else "fail")
            ),
            residual_summary=(
                {"note": f"doubled budget 2r - r_low = {upper_rbar} reaches min(m, n)"}
                if not upper_active
                else {
                    "trials": len(outer_probes),
                    "max_distance": max((p["max_distance"] for p in outer_probes), default=0.0),
                    "upper_rbar": upper_rbar,
                }
            ),
            probes=outer_probes,
        ),
        ClauseReport(
            name="strictness",
            verdict=(
                "vacuous"
                if r_low == r
                else ("pass" if strict_probes and all(p["ok"] for p in strict_probes) else "fail")
            ),
            residual_summary=(
                {"note": "constant rank: the regular tangent cone limit is the tangent space itself"}
                if r_low == r
                else {
                    "trials": len(strict_probes),
                    "min_lower_residual": min((p["lower_residual"] for p in strict_probes), default=0.0),
                }
            ),
            probes=strict_probes,
        ),
        ClauseReport(
            name="negative_control",
            verdict="pass" if control_probes and not any(p["certified"] for p in control_probes) else "fail",
            residual_summary={
                "controls_total": len(control_probes),
                "controls_rejected": sum(not p["certified"] for p in control_probes),
            },
            probes=control_probes,
        ),
    ]
    params = {"m": m, "n": n, "r_low": r_low, "r": r, "trials": trials, "N": N, "suite": "regular-tangent"}
    return _finish_report(params, rng.seed, clauses, rows, t0)


def _regular_strictness_exhibit(
    fx: ConeFrame,
    bundle: SequenceBundle,
    r: int,
    rng: RandomSource,
    rows: list,
    tag: str,
) -> dict | None:
    """Planted exact members of the regular tangent cone along the sequence
    whose cluster value leaves the tangent space at the target but stays in
    the doubled-budget tangent cone."""
    m, n, r_low = fx.m, fx.n, fx.r
    k = r - r_low
    rho = min(2 * k, m - r_low, n - r_low)
    if rho < 1:
        return None
    gen = rng.generator()
    Wl = matcore.haar_orthogonal(m - r_low, gen)
    Wr = matcore.haar_orthogonal(n - r_low, gen)
    sigma = 1.0 + 0.1 * np.arange(rho - 1, -1, -1, dtype=float)
    M0 = (Wl[:, :rho] * sigma) @ Wr[:, :rho].T
    Ru, Rv, Mp = rotate_to_low_rank_corner(M0, k, 0)
    A = gen.standard_normal((r_low, r_low))
    B = gen.standard_normal((r_low, n - r_low)) @ Rv
    C = Ru.T @ gen.standard_normal((m - r_low, r_low))
    seq_spec = ConeSpec(ConeKind.REGULAR_TANGENT, r)
    lower_spec = ConeSpec(ConeKind.REGULAR_TANGENT, max(r_low, 1))
    upper_rbar = 2 * r - r_low
    upper_spec = ConeSpec(ConeKind.TANGENT, upper_rbar) if upper_rbar < min(m, n) else None
    frames = bundle.cone_frames()
    values = []
    member_fail = 0
    for i in range(len(bundle)):
        fr = bundle.frames[i]
        Fu = np.hstack([fr.U_bar, fr.U_perp])
        Fv = np.hstack([fr.V_bar, fr.V_perp])
        eta_i = fx.U @ A @ fx.V.T + fx.U @ B @ Fv.T + Fu @ C @ fx.V.T + Fu @ Mp @ Fv.T
        values.append(eta_i)
        if not cone_membership(frames[i], seq_spec, eta_i, tol=1e-8):
            member_fail += 1
    cands = cluster_candidates(values)
    lower_res = [cone_distance(fx, lower_spec, c["value"]) for c in cands]
    # A saturated doubled budget makes the upper cone the whole space.
    upper_dist = [
        cone_distance(fx, upper_spec, c["value"]) if upper_spec is not None else 0.0 for c in cands
    ]
    for c_idx, res in enumerate(lower_res):
        rows.append((cands[c_idx]["members"][0], f"{tag}.strict_cand{c_idx}", float(res)))
    norms = [matcore.frobenius_norm(c["value"]) for c in cands]
    ok = (
        member_fail == 0
        and all(res > 0.1 * max(1.0, nrm) for res, nrm in zip(lower_res, norms))
        and all(dist <= OUTER_TOL * max(1.0, nrm) for dist, nrm in zip(upper_dist, norms))
    )
    return {
        "probe_id": f"{tag}.strict",
        "provenance": f"planted trailing-block rank {rho} regular-tangent member sequence",
        "planted_rank": rho,
        "candidates": len(cands),
        "membership_failures": member_fail,
        "lower_residual": float(min(lower_res)) if lower_res else 0.0,
        "upper_distance": float(max(upper_dist)) if upper_dist else 0.0,
        "ok": bool(ok),
    }


# ---------------------------------------------------------------------------
# Normal cone suite


def verify_normal_cone_limits(m: int, n: int, r_low: int, r: int, rbar: int, trials: int, N: int, rng) -> LimitReport:
    """Normal-type cone limits along rank-``r`` sequences.

    Requires ``1 <= r_low <= r <= rbar < min(m, n)``.  Clauses:

    ``inner_collapse`` (``r_low < r``)
        for each cone kind (normal, clarke_normal, and regular_normal when
        ``r == rbar``), a unit probe at the target is excluded with residual
        at least ``0.5 |probe|`` at every tail index along a witness
        sequence whose constant complement frames align against the probe's
        top singular directions.  The same probes along a generic
        complement-sweeping bundle are reported as informational statistics
        only: each nonzero probe is itself a cluster point of cone members
        along generic sequences (that is what ``outer_recovery`` certifies),
        so per-index floors cannot hold there.
    ``outer_recovery``
        random normal-cone members at the target are recovered as cluster
        candidates along a recurrent planted bundle, with membership of the
        member sequence checked in the normal and convexified cones.
    ``clarke_two_sided``
        along constant-rank sequences at rank ``r``, convexified-normal
        members converge onto the normal cone at the limit in both
        directions (sampled members' candidates land in it; its sampled
        members are recovered).
    """
    _validate_rank_chain(m, n, r_low, r, rbar)
    _validate_budgets(trials, N)
    rng = _as_rng(rng)
    t0 = time.perf_counter()
    d = r - r_low
    collapse_probes, recovery_probes, clarke_probes = [], [], []
    rows: list = []

    def collapse_kinds():
        kinds = [(ConeKind.NORMAL, min(m, n) - rbar), (ConeKind.CLARKE_NORMAL, min(m - r_low, n - r_low))]
        if r == rbar:
            kinds.append((ConeKind.REGULAR_NORMAL, min(m - r_low, n - r_low)))
        return kinds

    for t in range(trials):
        t_rng = rng.derive(t)
        X = _random_rank_matrix(m, n, r_low, t_rng.derive(0))
        fx = cone_frame(X)

        # --- inner_collapse with probe-adapted witness sequences.
        if d >= 1:
            for kind_idx, (kind, spread) in enumerate(collapse_kinds()):
                gen = t_rng.derive(1, kind_idx).generator()
                coords = _spread_partial_isometry(m - r_low, n - r_low, spread, gen)
                nu = fx.U_perp @ coords @ fx.V_perp.T
                W, _, Z = matcore.svd_full(coords)
                witness = constant_frame_sequence(X, r, N, t_rng.derive(2, kind_idx), q_u=W, q_v=Z)
                spec = ConeSpec(kind, rbar)
                pid = f"t{t:02d}.{kind.value}"
                profile = inner_residual_profile(witness, spec, nu)
                _probe_row_block(rows, profile, pid)
                floor = float(min(profile[N // 2 :]))
                norm = matcore.frobenius_norm(nu)
                generic = dense_cluster_sequence(X, r, N, t_rng.derive(3, kind_idx))
                generic_profile = inner_residual_profile(generic, spec, nu)
                _probe_row_block(rows, generic_profile, pid + ".generic")
                collapse_probes.append(
                    {
                        "probe_id": pid,
                        "provenance": f"unit spread-{spread} {kind.value} probe at the target",
                        "kind": kind.value,
                        "norm": norm,
                        "floor": floor,
                        "floor_ok": bool(floor >= COLLAPSE_FLOOR_FACTOR * norm),
                        "analytic_floor": float(np.sqrt(min(d, spread) / spread)),
                        "generic_tail": _summary_stats(generic_profile[N // 2 :]),
                        "note": "generic_tail is informational; see outer_recovery for why generic "
                        "sequences dip",
                    }
                )

        # --- outer_recovery along a recurrent planted bundle.
        gen = t_rng.derive(4).generator()
        b = min(m, n) - rbar
        G1 = gen.standard_normal((m - r_low, b))
        G2 = gen.standard_normal((b, n - r_low))
        coords = G1 @ G2
        coords = coords / matcore.frobenius_norm(coords)
        nu = fx.U_perp @ coords @ fx.V_perp.T
        W, _, Z = matcore.svd_full(coords)
        # Planted rotation: trailing complement columns carry the probe's
        # image, so the re-expressed member at planted indices is exactly nu.
        q_u = np.hstack([W[:, m - r :], W[:, : m - r]])
        q_v = np.hstack([Z[:, n - r :], Z[:, : n - r]])
        bundle = planted_recurrence_sequence(X, r, N, t_rng.derive(5), q_u=q_u, q_v=q_v, period=4)
        coords_seq = W[:, : m - r].T @ coords @ Z[:, : n - r]
        values = []
        member_fail = 0
        frames = bundle.cone_frames()
        for i in range(len(bundle)):
            fr = bundle.frames[i]
            nu_i = fr.U_perp @ coords_seq @ fr.V_perp.T
            values.append(nu_i)
            ok_n = cone_membership(frames[i], ConeSpec(ConeKind.NORMAL, rbar), nu_i, tol=1e-8)
            ok_c = cone_membership(frames[i], ConeSpec(ConeKind.CLARKE_NORMAL, rbar), nu_i, tol=1e-8)
            if not (ok_n and ok_c):
                member_fail += 1
        cands = cluster_candidates(values)
        recovery = min(matcore.frobenius_norm(c["value"] - nu) for c in cands)
        rows.append((cands[0]["members"][0] if cands else 0, f"t{t:02d}.recovery", float(recovery)))
        recovery_probes.append(
            {
                "probe_id": f"t{t:02d}.recovery",
                "provenance": f"unit rank-{b} normal member at the target, recurrent planted frames",
                "norm": matcore.frobenius_norm(nu),
                "candidates": len(cands),
                "membership_failures": member_fail,
                "recovery_distance": float(recovery),
                "ok": bool(member_fail == 0 and recovery <= OUTER_TOL),
            }
        )

        # --- clarke_two_sided along a constant-rank sequence at rank r.
        Xc = _random_rank_matrix(m, n, r, t_rng.derive(6))
        fc = cone_frame(Xc)
        cbundle = align_frames_constant_rank(Xc, _rotation_sequence(Xc, N, t_rng.derive(7)))
        gen = t_rng.derive(8).generator()
        pool = [sample_cone_member(fc, ConeSpec(ConeKind.CLARKE_NORMAL, r), gen) for _ in range(3)]
        pool_blocks = [decompose(fc, p) for p in pool]

        def sampler(frame, i, _bundle=cbundle, _blocks=pool_blocks):
            return _reassemble_at_index(_bundle, i, _blocks[i % len(_blocks)])

        outer = outer_cluster_check(cbundle, ConeSpec(ConeKind.CLARKE_NORMAL, r), sampler, r, upper_kind=ConeKind.NORMAL)
        recov = []
        for j, target in enumerate(pool):
            series = [_reassemble_at_index(cbundle, i, pool_blocks[j]) for i in range(len(cbundle))]
            cands_c = cluster_candidates(series)
            recov.append(min(matcore.frobenius_norm(c["value"] - target) for c in cands_c))
        rows.append((0, f"t{t:02d}.clarke_outer", float(max(outer["distances"]) if outer["distances"] else 0.0)))
        clarke_probes.append(
            {
                "probe_id": f"t{t:02d}.clarke",
                "provenance": "convexified normal members along a constant-rank rotation sequence",
                "max_candidate_distance": float(max(outer["distances"])) if outer["distances"] else 0.0,
                "membership_failures": outer["membership_failures"],
                "max_recovery_distance": float(max(recov)),
                "ok": bool(
                    outer["verdict"] == "pass" and max(recov) <= OUTER_TOL
                ),
            }
        )

    clauses = [
        ClauseReport(
            name="inner_collapse",
            verdict=(
                "vacuous"
                if d == 0
                else ("pass" if collapse_probes and all(p["floor_ok"] for p in collapse_probes) else "fail")
            ),
            residual_summary=(
                {"note": "constant rank: normal cones converge without collapse (see clarke_two_sided)"}
                if d == 0
                else {
                    "probes_total": len(collapse_probes),
                    "min_floor": min((p["floor"] for p in collapse_probes), default=0.0),
                    "floor_factor": COLLAPSE_FLOOR_FACTOR,
                    "regular_normal_note": (
                        "regular_normal probes exist only when r == rbar; below that the cone at "
                        "the target is already {0}"
                        if r < rbar
                        else "regular_normal probes active (r == rbar)"
                    ),
                }
            ),
            probes=collapse_probes,
        ),
        ClauseReport(
            name="outer_recovery",
            verdict="pass" if recovery_probes and all(p["ok"] for p in recovery_probes) else "fail",
            residual_summary={
                "trials": len(recovery_probes),
                "max_recovery_distance": max((p["recovery_distance"] for p in recovery_probes), default=0.0),
            },
            probes=recovery_probes,
        ),
        ClauseReport(
            name="clarke_two_sided",
            verdict="pass" if clarke_probes and all(p["ok"] for p in clarke_probes) else "fail",
            residual_summary={
                "trials": len(clarke_probes),
                "max_candidate_distance": max((p["max_candidate_distance"] for p in clarke_probes), default=0.0),
                "max_recovery_distance": max((p["max_recovery_distance"] for p in clarke_probes), default=0.0),
            },
            probes=clarke_probes,
        ),
    ]
    params = {"m": m, "n": n, "r_low": r_low, "r": r, "rbar": rbar, "trials": trials, "N": N, "suite": "normal"}
    return _finish_report(params, rng.seed, clauses, rows, t0)


# ---------------------------------------------------------------------------
# Stratification regularity suite


def whitney_a_regularity_check(m: int, n: int, r_low: int, r: int, N: int, rng, trials: int = 1) -> LimitReport:
    """Condition-(a) regularity of the rank stratification at a stratum drop.

    Requires ``1 <= r_low < r < min(m, n)``.  Along rank-``r`` sequences
    with constant planted complement frames converging to a rank-``r_low``
    target, the tangent spaces of the rank-``r`` manifold converge: their
    gap to the limit space decays below 1e-6 (``tangent_gap_decay``, checked
    from fresh per-element frames), the tangent space of the rank-``r_low``
    stratum at the target is inner-certified against them
    (``a_regularity_inner``), sampled members of the moving tangent spaces
    cluster inside the limit space (``painleve_outer``), and a probe built
    from the planted complement is rejected (``negative_control``).
    """
    _positive("m", m)
    _positive("n", n)
    if not isinstance(r_low, (int, np.integer)) or r_low < 1:
        raise InvalidParams(f"require 1 <= r_low, got r_low={r_low!r}")
    if not isinstance(r, (int, np.integer)) or r <= r_low:
        raise InvalidParams(f"require r_low < r, got r_low={r_low}, r={r!r}")
    if r >= min(m, n):
        raise InvalidParams(f"require r < min(m, n), got r={r} with min(m, n)={min(m, n)}")
    _validate_budgets(trials, N)
    rng = _as_rng(rng)
    t0 = time.perf_counter()

    gap_probes, inner_probes, outer_probes, control_probes = [], [], [], []
    rows: list = []
    for t in range(trials):
        t_rng = rng.derive(t)
        X = _random_rank_matrix(m, n, r_low, t_rng.derive(0))
        fx = cone_frame(X)
        bundle = constant_frame_sequence(X, r, N, t_rng.derive(1))
        fr0 = bundle.frames[0]
        ref_u = np.hstack([fx.U, fr0.U_bar])
        ref_v = np.hstack([fx.V, fr0.V_bar])
        ref = tangent_space_subspace(ref_u, ref_v, fr0.U_perp, fr0.V_perp)
        frames = bundle.cone_frames()
        gaps = bundle.gaps()

        gap_profile = [
            gap_distance(tangent_space_subspace(fi.U, fi.V, fi.U_perp, fi.V_perp), ref) for fi in frames
        ]
        _probe_row_block(rows, gap_profile, f"t{t:02d}.gap")
        gap_probes.append(
            {
                "probe_id": f"t{t:02d}.gap",
                "provenance": "projector gap between moving tangent spaces and the limit space",
                "max_tail_gap": float(max(gap_profile[N // 2 :])),
                "final_gap": float(gap_profile[-1]),
                "ok": bool(gap_profile[-1] <= 1e-6 and max(gap_profile[N // 2 :]) <= 1e-6),
            }
        )

        gen = t_rng.derive(2).generator()
        for j in range(3):
            probe = sample_cone_member(fx, ConeSpec(ConeKind.REGULAR_TANGENT, max(r_low, 1)), gen)
            pid = f"t{t:02d}.stratum{j}"
            profile = [matcore.frobenius_norm(fi.U_perp.T @ probe @ fi.V_perp) for fi in frames]
            certified, C = certify_inner(profile, gaps)
            _probe_row_block(rows, profile, pid)
            inner_probes.append(
                {
                    "probe_id": pid,
                    "provenance": "tangent-space member of the lower stratum at the target",
                    "norm": matcore.frobenius_norm(probe),
                    "certified": bool(certified),
                    "C": C,
                }
            )

        values = []
        for i in range(len(bundle)):
            gen_i = t_rng.derive(3, i).generator()
            fr = bundle.frames[i]
            Ui = np.hstack([fr.U, fr.U_bar])
            Vi = np.hstack([fr.V, fr.V_bar])
            A = gen_i.standard_normal((r, r))
            B = gen_i.standard_normal((r, n - r))
            C_blk = gen_i.standard_normal((m - r, r))
            val = Ui @ A @ Vi.T + Ui @ B @ fr.V_perp.T + fr.U_perp @ C_blk @ Vi.T
            nrm = matcore.frobenius_norm(val)
            values.append(val / nrm if nrm > 0 else val)
        cands = cluster_candidates(values)
        dists = [
            matcore.frobenius_norm(fr0.U_perp.T @ c["value"] @ fr0.V_perp) for c in cands
        ]
        for c_idx, dist in enumerate(dists):
            rows.append((cands[c_idx]["members"][0], f"t{t:02d}.outer_cand{c_idx}", float(dist)))
        outer_probes.append(
            {
                "probe_id": f"t{t:02d}.outer",
                "provenance": "sampled members of the moving tangent spaces",
                "candidates": len(cands),
                "max_distance": float(max(dists)) if dists else 0.0,
                "ok": bool(all(dd <= OUTER_TOL for dd in dists)),
            }
        )

        control = np.outer(fr0.U_perp[:, 0], fr0.V_perp[:, 0])
        pid = f"t{t:02d}.control"
        profile = [matcore.frobenius_norm(fi.U_perp.T @ control @ fi.V_perp) for fi in frames]
        certified, _ = certify_inner(profile, gaps)
        _probe_row_block(rows, profile, pid)
        control_probes.append(
            {
                "probe_id": pid,
                "provenance": "rank-one probe in the planted complement",
                "norm": matcore.frobenius_norm(control),
                "certified": bool(certified),
                "floor": float(min(profile)),
            }
        )

    clauses = [
        ClauseReport(
            name="tangent_gap_decay",
            verdict="pass" if all(p["ok"] for p in gap_probes) else "fail",
            residual_summary={
                "trials": len(gap_probes),
                "max_final_gap": max((p["final_gap"] for p in gap_probes), default=0.0),
            },
            probes=gap_probes,
        ),
        ClauseReport(
            name="a_regularity_inner",
            verdict="pass" if all(p["certified"] for p in inner_probes) else "fail",
            residual_summary={
                "probes_total": len(inner_probes),
                "probes_certified": sum(p["certified"] for p in inner_probes),
            },
            probes=inner_probes,
        ),
        ClauseReport(
            name="painleve_outer",
            verdict="pass" if all(p["ok"] for p in outer_probes) else "fail",
            residual_summary={
                "trials": len(outer_probes),
                "max_distance": max((p["max_distance"] for p in outer_probes), default=0.0),
            },
            probes=outer_probes,
        ),
        ClauseReport(
            name="negative_control",
            verdict="pass" if control_probes and not any(p["certified"] for p in control_probes) else "fail",
            residual_summary={
                "controls_total": len(control_probes),
                "controls_rejected": sum(not p["certified"] for p in control_probes),
                "min_floor": min((p["floor"] for p in control_probes), default=0.0),
            },
            probes=control_probes,
        ),
    ]
    params = {"m": m, "n": n, "r_low": r_low, "r": r, "trials": trials, "N": N, "suite": "whitney"}
    return _finish_report(params, rng.seed, clauses, rows, t0)


# ---------------------------------------------------------------------------
# Polarity suite


@dataclass(frozen=True)
class PolarSequenceSpec:
    """Sequence regime of a polarity check: dimensions, target rank
    ``r_low``, sequence rank ``r``, and length ``N``."""

    m: int
    n: int
    r_low: int
    r: int
    N: int

    def __post_init__(self) -> None:
        _validate_rank_chain(self.m, self.n, self.r_low, self.r, None)
        if self.N < 2:
            raise InvalidParams(f"require N >= 2, got {self.N!r}")


def polar_limit_check(seq_spec: PolarSequenceSpec, trials: int, rng) -> LimitReport:
    """Polarity between tangent-side and normal-side limits.

    Clauses:

    ``fixed_space_polarity``
        along the constant sequence at a rank-``r`` point, convexified
        normal members are inner-certified and annihilate tangent-space
        members exactly;
    ``annihilation_along_sequence`` (``r_low < r``)
        cluster candidates of convexified normal members along a
        complement-sweeping rank-``r`` bundle annihilate tangent-space
        members at the target (the polar of the tangent-side outer bound
        collapses, so pairings must vanish in the limit);
    ``zero_cone_trivial``
        the regular normal cone along a strict-rank-gap sequence is {0}, so
        its cluster candidates pair trivially with everything.
    """
    if not isinstance(seq_spec, PolarSequenceSpec):
        raise InvalidParams("seq_spec must be a PolarSequenceSpec")
    _positive("trials", trials)
    rng = _as_rng(rng)
    t0 = time.perf_counter()
    m, n, r_low, r, N = seq_spec.m, seq_spec.n, seq_spec.r_low, seq_spec.r, seq_spec.N

    fixed_probes, annih_probes, zero_probes = [], [], []
    rows: list = []
    for t in range(trials):
        t_rng = rng.derive(t)

        # --- fixed point, constant sequence.
        Xc = _random_rank_matrix(m, n, r, t_rng.derive(0))
        fc = cone_frame(Xc)
        cbundle = align_frames_constant_rank(Xc, [Xc.copy() for _ in range(N)])
        gen = t_rng.derive(1).generator()
        normal_pool = [sample_cone_member(fc, ConeSpec(ConeKind.CLARKE_NORMAL, r), gen) for _ in range(3)]
        tangent_pool = [sample_cone_member(fc, ConeSpec(ConeKind.REGULAR_TANGENT, r), gen) for _ in range(3)]
        max_pair = 0.0
        all_cert = True
        for j, nu in enumerate(normal_pool):
            pid = f"t{t:02d}.fixed_normal{j}"
            profile = inner_residual_profile(cbundle, ConeSpec(ConeKind.CLARKE_NORMAL, r), nu)
            certified, _ = certify_inner(profile, cbundle.gaps())
            all_cert = all_cert and certified
            _probe_row_block(rows, profile, pid)
            for eta in tangent_pool:
                max_pair = max(max_pair, abs(float(np.sum(nu * eta))))
        fixed_probes.append(
            {
                "probe_id": f"t{t:02d}.fixed",
                "provenance": "constant sequence at a rank-r point",
                "max_pairing": max_pair,
                "all_certified": bool(all_cert),
                "ok": bool(all_cert and max_pair <= PAIRING_LIMIT_TOL),
            }
        )

        # --- annihilation along a rank-gap sequence.
        if r_low < r:
            X = _random_rank_matrix(m, n, r_low, t_rng.derive(2))
            fx = cone_frame(X)
            bundle = dense_cluster_sequence(X, r, N, t_rng.derive(3))
            frames = bundle.cone_frames()
            gen = t_rng.derive(4).generator()
            tangent_probes = [
                sample_cone_member(fx, ConeSpec(ConeKind.REGULAR_TANGENT, max(r_low, 1)), gen) for _ in range(3)
            ]
            values = []
            member_fail = 0
            for i in range(len(bundle)):
                gen_i = t_rng.derive(5, i).generator()
                val = sample_cone_member(frames[i], ConeSpec(ConeKind.CLARKE_NORMAL, r), gen_i)
                values.append(val)
                if not cone_membership(frames[i], ConeSpec(ConeKind.CLARKE_NORMAL, r), val, tol=1e-8):
                    member_fail += 1
            cands = cluster_candidates(values)
            max_pair = 0.0
            for cand in cands:
                for eta in tangent_probes:
                    max_pair = max(max_pair, abs(float(np.sum(cand["value"] * eta))))
            rows.append((cands[0]["members"][0] if cands else 0, f"t{t:02d}.annihilation", float(max_pair)))
            annih_probes.append(
                {
                    "probe_id": f"t{t:02d}.annihilation",
                    "provenance": "convexified normal members along a complement-sweeping bundle",
                    "candidates": len(cands),
                    "membership_failures": member_fail,
                    "max_pairing": max_pair,
                    "ok": bool(member_fail == 0 and max_pair <= PAIRING_LIMIT_TOL),
                }
            )

        # --- zero cone regime.
        rbar_strict = r + 1
        if rbar_strict < min(m, n):
            X = _random_rank_matrix(m, n, r_low, t_rng.derive(6))
            bundle = (
                dense_cluster_sequence(X, r, N, t_rng.derive(7))
                if r_low < r
                else align_frames_constant_rank(X, _rotation_sequence(X, N, t_rng.derive(7)))
            )
            frames = bundle.cone_frames()
            max_norm = 0.0
            for i in range(len(bundle)):
                gen_i = t_rng.derive(8, i).generator()
                val = sample_cone_member(frames[i], ConeSpec(ConeKind.REGULAR_NORMAL, rbar_strict), gen_i, normalize=False)
                max_norm = max(max_norm, matcore.frobenius_norm(val))
            zero_probes.append(
                {
                    "probe_id": f"t{t:02d}.zero",
                    "provenance": f"regular normal cone along the sequence at rbar={rbar_strict} > rank",
                    "max_member_norm": max_norm,
                    "ok": bool(max_norm <= PAIRING_LIMIT_TOL),
                    "note": "the cone is {0} along the sequence; its polar is the whole space",
                }
            )

    clauses = [
        ClauseReport(
            name="fixed_space_polarity",
            verdict="pass" if fixed_probes and all(p["ok"] for p in fixed_probes) else "fail",
            residual_summary={
                "trials": len(fixed_probes),
                "max_pairing": max((p["max_pairing"] for p in fixed_probes), default=0.0),
            },
            probes=fixed_probes,
        ),
        ClauseReport(
            name="annihilation_along_sequence",
            verdict=(
                "vacuous"
                if r_low == r
                else ("pass" if annih_probes and all(p["ok"] for p in annih_probes) else "fail")
            ),
            residual_summary=(
                {"note": "requires a rank gap (r_low < r)"}
                if r_low == r
                else {
                    "trials": len(annih_probes),
                    "max_pairing": max((p["max_pairing"] for p in annih_probes), default=0.0),
                }
            ),
            probes=annih_probes,
        ),
        ClauseReport(
            name="zero_cone_trivial",
            verdict=(
                "vacuous"
                if not zero_probes
                else ("pass" if all(p["ok"] for p in zero_probes) else "fail")
            ),
            residual_summary=(
                {"note": f"requires r + 1 < min(m, n), got r={r}"}
                if not zero_probes
                else {
                    "trials": len(zero_probes),
                    "max_member_norm": max((p["max_member_norm"] for p in zero_probes), default=0.0),
                }
            ),
            probes=zero_probes,
        ),
    ]
    params = {
        "m": m,
        "n": n,
        "r_low": r_low,
        "r": r,
        "N": N,
        "trials": trials,
        "suite": "polar",
    }
    return _finish_report(params, rng.seed, clauses, rows, t0)
