"""Direct minimization of the transmission count on small instances.

The optimization problem is tiny but combinatorial: pick strictly
increasing subchannel MCS indices and a non-negative layers-by-subchannels
packet matrix, minimize total packets, subject to per-layer coverage at the
planning-time error-rate approximation and per-subchannel capacity.

``direct_solve`` runs an exhaustive depth-first search with pruning when
the raw search space fits the caller's budget, which yields the true
optimum.  Larger instances fall back to a deterministic local search seeded
by the matching heuristic: drop single packets while feasible, then try
one-packet shifts between subchannels that unlock another drop.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..message import LayeredMessage
from ..recovery import qos_indicator_ew, qos_indicator_now
from .heuristics import (
    InfeasibleAllocationError,
    allocate_ew_ma,
    allocate_now_ma,
    allocate_now_sa,
)
from .plan import (
    AllocationPlan,
    ServiceTargets,
    SubchannelSet,
    UserPopulation,
    required_users,
)

__all__ = ["SolveResult", "direct_solve"]

_HEURISTICS = {
    "NOW-SA": allocate_now_sa,
    "NOW-MA": allocate_now_ma,
    "EW-MA": allocate_ew_ma,
}


@dataclass(frozen=True)
class SolveResult:
    """Solver outcome: the best plan found and how hard it was to find."""

    plan: AllocationPlan
    proven_optimal: bool
    evaluations: int
    method: str


class _Budget(Exception):
    """Internal signal: evaluation budget exhausted mid-search."""


class _Judge:
    """Feasibility oracle over the user groups sharing a reported MCS."""

    def __init__(
        self,
        msg: LayeredMessage,
        pop: UserPopulation,
        targets: ServiceTargets,
        q: int,
        scheme: str,
        budget: int,
    ) -> None:
        self.msg = msg
        self.q = q
        self.limit = pop.report_limit
        self.threshold = targets.recovery_prob
        self.indicator = qos_indicator_ew if scheme == "EW-MA" else qos_indicator_now
        groups: dict[int, int] = {}
        for m in pop.acceptable:
            groups[m] = groups.get(m, 0) + 1
        self.group_mcs = tuple(sorted(groups))
        self.group_weight = tuple(groups[m] for m in self.group_mcs)
        self.needed = tuple(
            required_users(pop.user_count, t) for t in targets.coverage
        )
        self.budget = budget
        self.evaluations = 0
        self._memo: dict[tuple[tuple[int, ...], int], bool] = {}

    def visible_columns(self, mcs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
        """Per group, the subchannel indices that group can receive."""
        return tuple(
            tuple(c for c, m in enumerate(mcs) if m <= g) for g in self.group_mcs
        )

    def _level_ok(self, counts: tuple[int, ...], level: int) -> bool:
        key = (counts, level)
        hit = self._memo.get(key)
        if hit is None:
            hit = self.indicator(
                self.msg, counts, self.limit, self.q, level, self.threshold
            )
            self._memo[key] = hit
        return hit

    def feasible(
        self,
        rows: list[list[int]],
        visible: tuple[tuple[int, ...], ...],
    ) -> bool:
        self.evaluations += 1
        if self.evaluations > self.budget:
            raise _Budget
        layers = self.msg.layer_count
        group_counts = [
            tuple(sum(row[c] for c in cols) for row in rows) for cols in visible
        ]
        for level in range(1, layers + 1):
            reached = sum(
                w
                for counts, w in zip(group_counts, self.group_weight)
                if self._level_ok(counts, level)
            )
            if reached < self.needed[level - 1]:
                return False
        return True


def _search_space(
    msg: LayeredMessage,
    subch: SubchannelSet,
    signatures: int,
    scheme: str,
) -> int:
    rows_per_col = 1 if scheme == "NOW-SA" else msg.layer_count
    size = signatures
    for cap in subch.capacities:
        size *= (cap + 1) ** rows_per_col
    return size


def _exhaustive(
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    subch: SubchannelSet,
    q: int,
    scheme: str,
    judge: _Judge,
    seed: AllocationPlan | None,
) -> tuple[AllocationPlan | None, bool]:
    layers = msg.layer_count
    cols = subch.count
    sizes = msg.layer_sizes
    windows = msg.window_sizes
    diagonal = scheme == "NOW-SA"
    best_plan = seed
    best_tau = seed.total_transmissions if seed else None
    completed = True

    cells = [
        (l, c)
        for c in range(cols)
        for l in range(layers)
        if not diagonal or l == c
    ]

    def deficit(rows: list[list[int]]) -> int:
        """Admissible lower bound on packets still to be added."""
        totals = [sum(row) for row in rows]
        if scheme == "EW-MA":
            prefix = list(itertools.accumulate(totals))
            return max(max(windows[l] - prefix[l], 0) for l in range(layers))
        return sum(max(sizes[l] - totals[l], 0) for l in range(layers))

    seen: set[tuple[tuple[int, ...], ...]] = set()
    for mcs in itertools.combinations(pop.mcs_range.indices, cols):
        visible = judge.visible_columns(mcs)
        if visible in seen:
            continue
        seen.add(visible)

        rows = [[0] * cols for _ in range(layers)]

        def descend(cell: int, tau: int, col_left: list[int]) -> None:
            nonlocal best_plan, best_tau
            need = deficit(rows)
            if best_tau is not None and tau + need >= best_tau:
                return
            if need > sum(col_left):
                return
            if cell == len(cells):
                if need == 0 and judge.feasible(rows, visible):
                    best_tau = tau
                    best_plan = AllocationPlan(
                        scheme=scheme,
                        mcs=mcs,
                        counts=tuple(tuple(row) for row in rows),
                    )
                return
            l, c = cells[cell]
            room = col_left[c]
            if best_tau is not None:
                room = min(room, best_tau - 1 - tau)
            for v in range(room + 1):
                rows[l][c] = v
                col_left[c] -= v
                descend(cell + 1, tau + v, col_left)
                col_left[c] += v
            rows[l][c] = 0

        try:
            descend(0, 0, list(subch.capacities))
        except _Budget:
            completed = False
            break
    return best_plan, completed


def _local_descent(
    msg: LayeredMessage,
    subch: SubchannelSet,
    scheme: str,
    judge: _Judge,
    seed: AllocationPlan,
) -> AllocationPlan:
    """Hill descent over single-packet drops and drop-enabling shifts."""
    mcs = seed.mcs
    visible = judge.visible_columns(mcs)
    rows = [list(row) for row in seed.counts]
    layers, cols = msg.layer_count, subch.count
    loads = [sum(row[c] for row in rows) for c in range(cols)]
    diagonal = scheme == "NOW-SA"

    def try_drop() -> bool:
        for l in range(layers):
            for c in range(cols):
                if rows[l][c] == 0:
                    continue
                rows[l][c] -= 1
                try:
                    ok = judge.feasible(rows, visible)
                except _Budget:
                    rows[l][c] += 1
                    raise
                if ok:
                    loads[c] -= 1
                    return True
                rows[l][c] += 1
        return False

    def try_shift_then_drop() -> bool:
        for l in range(layers):
            for c in range(cols):
                if rows[l][c] == 0:
                    continue
                for c2 in range(cols):
                    if c2 == c or loads[c2] >= subch.capacities[c2]:
                        continue
                    if diagonal and c2 != l:
                        continue
                    rows[l][c] -= 1
                    rows[l][c2] += 1
                    loads[c] -= 1
                    loads[c2] += 1
                    try:
                        if try_drop():
                            return True
                    except _Budget:
                        rows[l][c] += 1
                        rows[l][c2] -= 1
                        loads[c] += 1
                        loads[c2] -= 1
                        raise
                    rows[l][c] += 1
                    rows[l][c2] -= 1
                    loads[c] += 1
                    loads[c2] -= 1
        return False

    try:
        improving = True
        while improving:
            improving = try_drop() or try_shift_then_drop()
    except _Budget:
        pass
    return AllocationPlan(scheme=scheme, mcs=mcs, counts=tuple(tuple(row) for row in rows))


def direct_solve(
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    subch: SubchannelSet,
    q: int,
    scheme: str,
    budget: int = 10_000_000,
) -> SolveResult:
    """Minimize total transmissions for one scheme on one instance.

    ``budget`` caps both the raw search space admitted to the exhaustive
    mode and the number of feasibility evaluations actually spent.  The
    result flags whether the returned plan is a proven optimum; local
    search never proves anything, it only refines the heuristic seed.
    """
    if scheme not in _HEURISTICS:
        raise ValueError(f"unknown scheme {scheme!r}")
    try:
        seed: AllocationPlan | None = _HEURISTICS[scheme](msg, pop, targets, subch, q)
    except InfeasibleAllocationError:
        seed = None

    judge = _Judge(msg, pop, targets, q, scheme, budget)
    signatures = len(
        {
            judge.visible_columns(m)
            for m in itertools.combinations(pop.mcs_range.indices, subch.count)
        }
    )
    if _search_space(msg, subch, signatures, scheme) <= budget:
        best, completed = _exhaustive(msg, pop, targets, subch, q, scheme, judge, seed)
        if best is None:
            # a completed sweep found nothing feasible anywhere in the space
            if completed:
                raise InfeasibleAllocationError(
                    f"{scheme}: exhaustive search found no feasible plan"
                )
            raise InfeasibleAllocationError(
                f"{scheme}: no feasible plan within the evaluation budget"
            )
        return SolveResult(
            plan=best,
            proven_optimal=completed,
            evaluations=judge.evaluations,
            method="exhaustive",
        )

    if seed is None:
        raise InfeasibleAllocationError(
            f"{scheme}: instance too large for exhaustive search and the "
            "heuristic found no feasible starting plan"
        )
    refined = _local_descent(msg, subch, scheme, judge, seed)
    return SolveResult(
        plan=refined,
        proven_optimal=False,
        evaluations=judge.evaluations,
        method="local-search",
    )
