"""Command-line interface.

One process, no services: every command reads plain-text matrix files
(``rows cols`` header then one whitespace-separated row per line), runs in
memory, and writes text or JSON/CSV reports.

Exit codes
----------
0   success (including ``membership`` queries that answer "false")
1   a verification suite ran and at least one clause failed
2   I/O failure (missing or unreadable file)
3   invalid parameters or malformed input (also argparse usage errors)
4   domain violations (rank exceeds the variety bound, probe outside the
    cone, trailing-block rank too high, rank mismatch along a sequence)

The environment variable ``LOWRANK_CONES_SEED`` supplies the default seed
for commands that sample; an explicit ``--seed`` always wins.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import blockrank, limits, matcore, seqlab, variety
from .cones import ConeKind, ConeSpec, cone_distance, cone_frame, cone_membership, project_cone
from .errors import (
    BudgetExceeded,
    InvalidInput,
    InvalidParams,
    InvalidRank,
    NoConvergentSubsequence,
    NotInCone,
    RankExceedsVariety,
    RankMismatch,
    RankTooHigh,
)

__all__ = ["build_parser", "main", "entrypoint"]

_KIND_CHOICES = ("tangent", "regular-tangent", "normal", "regular-normal", "clarke-normal")
_VERIFY_CHOICES = ("main", "regular-tangent", "normal", "whitney", "polar")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LOWRANK_CONES_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InvalidParams(f"LOWRANK_CONES_SEED must be an integer, got {env!r}") from None


def _kind(text: str) -> ConeKind:
    return ConeKind(text.replace("-", "_"))


def _inputs(args, count: int) -> list:
    paths = args.input or []
    if len(paths) != count:
        raise InvalidParams(
            f"expected {count} --input file(s), got {len(paths)}"
        )
    return [matcore.read_matrix_text(p) for p in paths]


def _print_matrix(M: np.ndarray) -> None:
    sys.stdout.write(matcore.format_matrix_text(M))


# ---------------------------------------------------------------------------
# Command handlers


def _cmd_distance(args) -> int:
    (X,) = _inputs(args, 1)
    print(f"distance: {_fmt(variety.distance_to_variety(X, args.r))}")
    return 0


def _cmd_project(args) -> int:
    X, eta = _inputs(args, 2)
    frame = cone_frame(X, tol=args.tol)
    spec = ConeSpec(_kind(args.kind), args.rbar)
    out = project_cone(frame, spec, eta)
    print(f"rank: {frame.r}")
    print(f"distance: {_fmt(matcore.frobenius_norm(eta - out))}")
    if args.output:
        matcore.write_matrix_text(args.output, out)
        print(f"wrote: {args.output}")
    else:
        _print_matrix(out)
    return 0


def _cmd_membership(args) -> int:
    X, eta = _inputs(args, 2)
    frame = cone_frame(X, tol=args.tol)
    spec = ConeSpec(_kind(args.kind), args.rbar)
    member = cone_membership(frame, spec, eta, tol=args.membership_tol)
    residual = cone_distance(frame, spec, eta)
    print(f"member: {'true' if member else 'false'}")
    print(f"residual: {_fmt(residual)}")
    return 0


def _cmd_frame(args) -> int:
    (X,) = _inputs(args, 1)
    frame = cone_frame(X, tol=args.tol)
    print(f"rank: {frame.r}")
    print("sigma: " + " ".join(_fmt(s) for s in frame.sigma))
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        for name, M in (
            ("u", frame.U),
            ("v", frame.V),
            ("u_perp", frame.U_perp),
            ("v_perp", frame.V_perp),
            ("sigma", frame.sigma.reshape(1, -1)),
        ):
            matcore.write_matrix_text(os.path.join(args.output, f"{name}.txt"), M)
        print(f"wrote: {args.output}")
    return 0


def _cmd_sequence(args) -> int:
    rng = matcore.RandomSource(_resolve_seed(args))
    X = limits._random_rank_matrix(args.m, args.n, args.rlow, rng.derive(0))
    bundle = seqlab.dense_cluster_sequence(X, args.r, args.N, rng.derive(1))
    print(f"elements: {len(bundle)}")
    print(f"target_rank: {bundle.r_low}")
    print(f"sequence_rank: {bundle.r_seq}")
    print(f"final_gap: {_fmt(bundle.gaps()[-1])}")
    if args.output:
        seqlab.save_bundle(bundle, args.output)
        print(f"wrote: {args.output}")
    return 0


def _cmd_witness(args) -> int:
    shape = blockrank.BlockShape(args.k, args.p, args.q, args.s)
    bound = blockrank.rank_bound(shape)
    W = blockrank.tight_witness(shape)
    print(f"bound: {bound}")
    print(f"rank: {blockrank.exact_rank(W)}")
    _print_matrix(W)
    return 0


def _cmd_rotate(args) -> int:
    (M,) = _inputs(args, 1)
    U_rot, V_rot, M_prime = blockrank.rotate_to_low_rank_corner(M, args.k, args.s)
    rows, cols = M.shape
    budget = blockrank.corner_rank_budget(args.k, rows - args.k, cols - args.k, args.s)
    corner = M_prime[args.k :, args.k :] if args.k < min(rows, cols) else np.zeros((0, 0))
    corner_rank = variety.numerical_rank(corner) if corner.size else 0
    print(f"corner_budget: {budget}")
    print(f"corner_rank: {corner_rank}")
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        for name, mat in (("u_rot", U_rot), ("v_rot", V_rot), ("m_prime", M_prime)):
            matcore.write_matrix_text(os.path.join(args.output, f"{name}.txt"), mat)
        print(f"wrote: {args.output}")
    else:
        _print_matrix(M_prime)
    return 0


def _cmd_gap(args) -> int:
    B1, B2 = _inputs(args, 2)
    s1 = limits.Subspace(ambient=B1.shape[0], basis=B1)
    s2 = limits.Subspace(ambient=B2.shape[0], basis=B2)
    print(f"gap: {_fmt(limits.gap_distance(s1, s2))}")
    return 0


def _cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    rng = matcore.RandomSource(seed)
    target = args.target
    if target == "main":
        report = limits.verify_main_theorem(args.m, args.n, args.rlow, args.r, args.rbar, args.trials, args.N, rng)
    elif target == "regular-tangent":
        report = limits.verify_regular_tangent_limits(args.m, args.n, args.rlow, args.r, args.trials, args.N, rng)
    elif target == "normal":
        report = limits.verify_normal_cone_limits(args.m, args.n, args.rlow, args.r, args.rbar, args.trials, args.N, rng)
    elif target == "whitney":
        report = limits.whitney_a_regularity_check(args.m, args.n, args.rlow, args.r, args.N, rng, trials=args.trials)
    else:
        spec = limits.PolarSequenceSpec(m=args.m, n=args.n, r_low=args.rlow, r=args.r, N=args.N)
        report = limits.polar_limit_check(spec, args.trials, rng)
    stem = "verify_" + target.replace("-", "_")
    json_path, csv_path = report.write(args.output, stem)
    for clause in report.clauses:
        print(f"clause {clause.name}: {clause.verdict}")
    print(f"report: {json_path}")
    print(f"residuals: {csv_path}")
    passed = report.passed()
    print(f"result: {'pass' if passed else 'fail'}")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowrank-cones",
        description="Tangent and normal cones to bounded-rank matrix sets: "
        "projections, membership queries, and finite verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, inputs_help: str) -> None:
        p.add_argument("--input", action="append", metavar="FILE", help=inputs_help)
        p.add_argument("--output", help="output file or directory")

    p = sub.add_parser("distance", help="distance to the bounded-rank set")
    p.add_argument("--input", action="append", metavar="FILE", help="matrix file")
    p.add_argument("--r", type=int, required=True, help="rank bound")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("project", help="metric projection onto a cone")
    p.add_argument("kind", choices=_KIND_CHOICES)
    add_io(p, "base point file, then direction file (give --input twice)")
    p.add_argument("--rbar", type=int, required=True, help="variety rank bound")
    p.add_argument("--tol", type=float, default=variety.DEFAULT_TOL, help="numerical rank tolerance")
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("membership", help="cone membership query (always exits 0)")
    p.add_argument("kind", choices=_KIND_CHOICES)
    p.add_argument("--input", action="append", metavar="FILE", help="base point file, then direction file")
    p.add_argument("--rbar", type=int, required=True, help="variety rank bound")
    p.add_argument("--tol", type=float, default=variety.DEFAULT_TOL, help="numerical rank tolerance")
    p.add_argument("--membership-tol", type=float, default=1e-8, help="membership residual tolerance")
    p.set_defaults(func=_cmd_membership)

    p = sub.add_parser("frame", help="orthonormal frames and singular values of a point")
    add_io(p, "matrix file")
    p.add_argument("--tol", type=float, default=variety.DEFAULT_TOL, help="numerical rank tolerance")
    p.set_defaults(func=_cmd_frame)

    p = sub.add_parser("sequence", help="build and save a convergent rank-r sequence bundle")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--rlow", type=int, default=1, help="target rank")
    p.add_argument("--r", type=int, default=2, help="sequence rank")
    p.add_argument("--N", type=int, default=50, help="sequence length")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", help="bundle directory")
    p.set_defaults(func=_cmd_sequence)

    p = sub.add_parser("witness", help="block matrix attaining the block-rank bound")
    p.add_argument("k", type=int)
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("s", type=int)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("rotate", help="rotate trailing-block mass into the leading corner")
    p.add_argument("k", type=int, help="leading corner size")
    p.add_argument("s", type=int, help="trailing-block rank budget")
    add_io(p, "matrix file")
    p.set_defaults(func=_cmd_rotate)

    p = sub.add_parser("gap", help="gap between two column-spanned subspaces")
    p.add_argument("--input", action="append", metavar="FILE", help="two orthonormal basis files")
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("verify", help="run a verification suite and write JSON/CSV reports")
    p.add_argument("target", choices=_VERIFY_CHOICES)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--rlow", type=int, default=1, help="target rank")
    p.add_argument("--r", type=int, default=2, help="sequence rank")
    p.add_argument("--rbar", type=int, default=2, help="variety rank bound")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--N", type=int, default=200, help="sequence length per trial")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=".", help="report directory")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 3
    try:
        return args.func(args)
    except (InvalidInput, InvalidParams, InvalidRank, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (RankExceedsVariety, NotInCone, RankTooHigh, RankMismatch, NoConvergentSubsequence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main(sys.argv[1:]))
