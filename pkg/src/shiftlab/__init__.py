"""Exact experiments with weighted backward shifts and small dynamical systems."""

__version__ = "0.1.0"

from .classifiers import (
    check_hypermixing_condition,
    check_mixing,
    check_transitive,
    strong_transitivity_evidence,
)
from .construction import (
    build_construction,
    count_block_entries,
    recovery_times,
    verify_balance,
    verify_easy_estimate,
    verify_hard_estimate,
)
from .exact import ScaledFloat, ScaledRational
from .shifts import (
    SpaceNorm,
    SparseVector,
    backward_shift,
    decay_profile,
    forward_shift,
    forward_shift_power,
    norm,
    verify_right_inverse,
)
from .verdict import Status, Verdict
from .weights import (
    ExactPow2,
    GeneralWeights,
    LogSpace,
    RunLengthWeights,
    is_surjective_shift,
    partial_product_general,
    weights_from_json,
)

__all__ = [
    "ExactPow2",
    "GeneralWeights",
    "LogSpace",
    "RunLengthWeights",
    "ScaledFloat",
    "ScaledRational",
    "SpaceNorm",
    "SparseVector",
    "Status",
    "Verdict",
    "backward_shift",
    "build_construction",
    "check_hypermixing_condition",
    "check_mixing",
    "check_transitive",
    "count_block_entries",
    "decay_profile",
    "forward_shift",
    "forward_shift_power",
    "is_surjective_shift",
    "norm",
    "partial_product_general",
    "recovery_times",
    "strong_transitivity_evidence",
    "verify_balance",
    "verify_easy_estimate",
    "verify_hard_estimate",
    "verify_right_inverse",
    "weights_from_json",
]
