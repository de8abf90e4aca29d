"""Finite-horizon ergodicity analysis for linear operators.

Core objects: operator specs with exact matrix-free application
(`OperatorSpec`, `apply`), Cesaro-mean trajectories computed by a stable
incremental recurrence (`trajectory`, `cesaro_matrices`), one-sided family
verdicts (`check_power_bounded`, `check_cesaro_bounded`, `check_ergodic`,
`check_uniformly_ergodic`), separation-tree truncations (`build_truncation`),
and replayable non-convergence certificates (`search_nse`,
`check_certificate`).
"""

__version__ = "0.1.0"

from .operators import (
    OperatorSpec,
    ProbeSet,
    SpecValidationError,
    DimensionMismatchError,
    CapExceededError,
    apply,
    apply_columns,
    as_dense,
    vec_norm,
    matrix_norm,
    operator_norm,
    basis_probes,
    default_probes,
    gallery,
    built_in_gallery,
    DEFAULT_SEED,
)
from .cesaro import (
    CesaroTrajectory,
    CesaroMatrixSeq,
    TrajectoryCache,
    trajectory,
    start_trajectory,
    cesaro_extend,
    cesaro_diff,
    cesaro_matrices,
    OVERFLOW_LIMIT,
)
from .classify import (
    Verdict,
    HOLDS,
    FAILS,
    INCONCLUSIVE,
    check_power_bounded,
    check_cesaro_bounded,
    check_ergodic,
    check_uniformly_ergodic,
    replay_witness,
    trusted_horizon,
)
from .tree import (
    NodeMembership,
    CombinedNode,
    TreeTruncation,
    node_member,
    combined_member,
    build_truncation,
    truncated_height,
    longest_members,
    tree_to_dot,
    node_key,
    key_to_seq,
)
from .certify import (
    NSECertificate,
    CheckResult,
    RankEstimate,
    check_certificate,
    search_nse,
    rank_estimate,
)
from .serialization import canonical_dumps, canonical_loads, sha256_hex

__all__ = [
    "__version__",
    "OperatorSpec",
    "ProbeSet",
    "SpecValidationError",
    "DimensionMismatchError",
    "CapExceededError",
    "apply",
    "apply_columns",
    "as_dense",
    "vec_norm",
    "matrix_norm",
    "operator_norm",
    "basis_probes",
    "default_probes",
    "gallery",
    "built_in_gallery",
    "DEFAULT_SEED",
    "CesaroTrajectory",
    "CesaroMatrixSeq",
    "TrajectoryCache",
    "trajectory",
    "start_trajectory",
    "cesaro_extend",
    "cesaro_diff",
    "cesaro_matrices",
    "OVERFLOW_LIMIT",
    "Verdict",
    "HOLDS",
    "FAILS",
    "INCONCLUSIVE",
    "check_power_bounded",
    "check_cesaro_bounded",
    "check_ergodic",
    "check_uniformly_ergodic",
    "replay_witness",
    "trusted_horizon",
    "NodeMembership",
    "CombinedNode",
    "TreeTruncation",
    "node_member",
    "combined_member",
    "build_truncation",
    "truncated_height",
    "longest_members",
    "tree_to_dot",
    "node_key",
    "key_to_seq",
    "NSECertificate",
    "CheckResult",
    "RankEstimate",
    "check_certificate",
    "search_nse",
    "rank_estimate",
    "canonical_dumps",
    "canonical_loads",
    "sha256_hex",
]
