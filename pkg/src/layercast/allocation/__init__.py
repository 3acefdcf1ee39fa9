"""Resource-allocation models: plan types, greedy heuristics, direct solver."""

from .direct import SolveResult, direct_solve
from .heuristics import (
    InfeasibleAllocationError,
    allocate_ew_ma,
    allocate_now_ma,
    allocate_now_sa,
    mcs_select,
)
from .plan import (
    SCHEMES,
    AllocationPlan,
    FeasibilityReport,
    McsRange,
    ServiceTargets,
    SubchannelSet,
    UserPopulation,
    check_feasible,
    effective_counts,
    effective_per,
    required_users,
    total_transmissions,
)

__all__ = [
    "SCHEMES",
    "AllocationPlan",
    "FeasibilityReport",
    "InfeasibleAllocationError",
    "McsRange",
    "ServiceTargets",
    "SolveResult",
    "SubchannelSet",
    "UserPopulation",
    "allocate_ew_ma",
    "allocate_now_ma",
    "allocate_now_sa",
    "check_feasible",
    "direct_solve",
    "effective_counts",
    "effective_per",
    "mcs_select",
    "required_users",
    "total_transmissions",
]
