from .cohort import Cohort, CohortMember, CohortSpec, generate
from .oracles import (
    oracle_best_two_partition,
    oracle_knn,
    oracle_nearest,
    oracle_union_dedup,
)
from .experiment import run_experiment

__all__ = [
    "Cohort",
    "CohortMember",
    "CohortSpec",
    "generate",
    "oracle_best_two_partition",
    "oracle_knn",
    "oracle_nearest",
    "oracle_union_dedup",
    "run_experiment",
]
