"""l1lab: weighted l1 recovery, its stability scaling law, and the
cross-polytope angle numerics behind it, testable at desk scale."""

__version__ = "0.1.0"

from .ampdist import (
    AmplitudeDistribution,
    half_normal,
    parse_distribution,
    point_mass,
    power,
    uniform,
)
from .recovery import (
    ReweightedResult,
    SparseSignal,
    SupportEstimate,
    k_support,
    l1_recover,
    reweighted_recover,
    support_overlap,
    w_lambda,
)
from .solver import (
    W_INF,
    RecoveryResult,
    WeightedL1Problem,
    lp_oracle_weighted_l1,
    null_space_basis,
    solve_weighted_l1,
)

__all__ = [
    "AmplitudeDistribution",
    "half_normal",
    "uniform",
    "power",
    "point_mass",
    "parse_distribution",
    "SparseSignal",
    "SupportEstimate",
    "ReweightedResult",
    "l1_recover",
    "k_support",
    "support_overlap",
    "w_lambda",
    "reweighted_recover",
    "W_INF",
    "WeightedL1Problem",
    "RecoveryResult",
    "solve_weighted_l1",
    "lp_oracle_weighted_l1",
    "null_space_basis",
    "__version__",
]
