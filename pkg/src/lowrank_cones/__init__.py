"""Tangent and normal cones to bounded-rank matrix sets.

Numerical primitives for the set of ``m x n`` real matrices of rank at most
``rbar``: distances and truncations, the five tangent/normal-type cones at a
point (with exact metric projections and membership queries in block
coordinates), rank bounds for two-by-two block matrices, convergent
rank-constrained sequence construction and alignment, and finite
verification suites for the limit behaviour of the cones along such
sequences.
"""

from .blockrank import (
    BlockShape,
    corner_rank_budget,
    exact_rank,
    rank_bound,
    rotate_to_low_rank_corner,
    tight_witness,
)
from .cones import (
    BlockDecomposition,
    ConeFrame,
    ConeKind,
    ConeSpec,
    assemble,
    cone_distance,
    cone_frame,
    cone_membership,
    decompose,
    polar_pairing_check,
    project_cone,
)
from .errors import (
    BudgetExceeded,
    InvalidInput,
    InvalidParams,
    InvalidRank,
    LowRankConesError,
    NoConvergentSubsequence,
    NotInCone,
    RankExceedsVariety,
    RankMismatch,
    RankTooHigh,
)
from .limits import (
    ClauseReport,
    LimitReport,
    PolarSequenceSpec,
    Subspace,
    certify_inner,
    cluster_candidates,
    gap_distance,
    inner_residual_profile,
    outer_cluster_check,
    polar_limit_check,
    sample_cone_member,
    tangent_space_subspace,
    verify_main_theorem,
    verify_normal_cone_limits,
    verify_regular_tangent_limits,
    whitney_a_regularity_check,
)
from .matcore import RandomSource, SvdFactors, svd, svd_full
from .seqlab import (
    LiftedVectorSequence,
    SequenceBundle,
    align_frames_constant_rank,
    constant_frame_sequence,
    dense_cluster_sequence,
    lift_tangent_vector,
    load_bundle,
    planted_recurrence_sequence,
    save_bundle,
    split_and_align_decreasing_rank,
)
from .variety import distance_to_variety, is_member, numerical_rank, truncate_rank

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "LowRankConesError",
    "InvalidInput",
    "InvalidParams",
    "InvalidRank",
    "RankExceedsVariety",
    "RankMismatch",
    "RankTooHigh",
    "NotInCone",
    "NoConvergentSubsequence",
    "BudgetExceeded",
    # matcore
    "RandomSource",
    "SvdFactors",
    "svd",
    "svd_full",
    # variety
    "numerical_rank",
    "distance_to_variety",
    "truncate_rank",
    "is_member",
    # cones
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
    # blockrank
    "BlockShape",
    "rank_bound",
    "tight_witness",
    "exact_rank",
    "corner_rank_budget",
    "rotate_to_low_rank_corner",
    # seqlab
    "SequenceBundle",
    "LiftedVectorSequence",
    "align_frames_constant_rank",
    "split_and_align_decreasing_rank",
    "dense_cluster_sequence",
    "constant_frame_sequence",
    "planted_recurrence_sequence",
    "lift_tangent_vector",
    "save_bundle",
    "load_bundle",
    # limits
    "Subspace",
    "gap_distance",
    "tangent_space_subspace",
    "ClauseReport",
    "LimitReport",
    "certify_inner",
    "cluster_candidates",
    "sample_cone_member",
    "inner_residual_profile",
    "outer_cluster_check",
    "verify_main_theorem",
    "verify_regular_tangent_limits",
    "verify_normal_cone_limits",
    "whitney_a_regularity_check",
    "PolarSequenceSpec",
    "polar_limit_check",
]
