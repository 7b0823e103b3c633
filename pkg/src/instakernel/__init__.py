"""instakernel: provably equivalent compression of integer-programming instances.

Compresses feasibility ILPs, knapsack-family problems and load-balancing
scheduling instances into smaller instances with machine-checkable solution
correspondence, plus brute-force oracles that verify every claimed
equivalence at desk scale.
"""

__version__ = "0.1.0"

from .budget import BudgetError, InputError, VerificationError
from .equivvec import check_equivalent, find_violation, reduce_vector, reduced_norm_bound
from .exactmath import IntMatrix
from .ilpcore import FeasIlp, InfeasibleVerdict, enumerate_feasible, solve_ilp
from .ilpreduce import (
    NFoldIlp,
    ProximityKernel,
    StaticEquivIlp,
    TwoStageIlp,
    equiv_nfold,
    equiv_two_stage,
    kernelize_feasibility,
    proximity_radius,
    static_equiv_ilp,
    u_bound,
)
from .knapfam import (
    KnapsackInstance,
    MdKnapsackInstance,
    SubsetSumInstance,
    UnboundedKnapsackInstance,
    compress_knapsack,
    compress_mdknapsack,
    compress_subsetsum,
    equiv_uks,
    feasible_subsets,
)
from .schedbal import (
    EquivBundle,
    LoadBalancingInstance,
    Objective,
    PreSolution,
    brute_force_loadbalance,
    equiv_loadbalancing,
    reconstruct_schedule,
)

__all__ = [
    "BudgetError",
    "InputError",
    "VerificationError",
    "check_equivalent",
    "find_violation",
    "reduce_vector",
    "reduced_norm_bound",
    "IntMatrix",
    "FeasIlp",
    "InfeasibleVerdict",
    "enumerate_feasible",
    "solve_ilp",
    "NFoldIlp",
    "ProximityKernel",
    "StaticEquivIlp",
    "TwoStageIlp",
    "equiv_nfold",
    "equiv_two_stage",
    "kernelize_feasibility",
    "proximity_radius",
    "static_equiv_ilp",
    "u_bound",
    "KnapsackInstance",
    "MdKnapsackInstance",
    "SubsetSumInstance",
    "UnboundedKnapsackInstance",
    "compress_knapsack",
    "compress_mdknapsack",
    "compress_subsetsum",
    "equiv_uks",
    "feasible_subsets",
    "EquivBundle",
    "LoadBalancingInstance",
    "Objective",
    "PreSolution",
    "brute_force_loadbalance",
    "equiv_loadbalancing",
    "reconstruct_schedule",
]
