"""Two-step allocation heuristics.

Step one fixes the subchannel MCS indices from the reported channel
qualities alone, matching each subchannel to the worst user that its
coverage fraction still has to reach.  Step two hands out coded packets one
at a time until the recovery-probability target holds for that reference
user, spilling into the next subchannel when one fills up.  Packet counts
are judged with the planning-time error-rate approximation: every reachable
subchannel is assumed to run at the reported limit, every unreachable one
loses everything.

The heuristics are greedy and deterministic.  They either return a plan
that satisfies every constraint by construction or raise
``InfeasibleAllocationError``; they never return a partial plan.
"""

from __future__ import annotations

from ..message import LayeredMessage
from ..recovery import qos_indicator_ew, qos_indicator_now
from .plan import (
    COVERAGE_TOLERANCE,
    AllocationPlan,
    McsRange,
    ServiceTargets,
    SubchannelSet,
    UserPopulation,
    effective_counts,
    required_users,
)

__all__ = [
    "InfeasibleAllocationError",
    "mcs_select",
    "allocate_now_sa",
    "allocate_now_ma",
    "allocate_ew_ma",
]


class InfeasibleAllocationError(RuntimeError):
    """No allocation satisfies the targets within the given resources."""


def mcs_select(
    pop: UserPopulation,
    targets: ServiceTargets,
    mcs_range: McsRange,
    subchannel_count: int,
) -> tuple[int, ...]:
    """Pick one MCS per subchannel so each coverage fraction stays reachable.

    Walks subchannels from last to first.  Each takes the greatest index,
    below the previous pick, still reported acceptable by enough users for
    its coverage fraction.  The result is strictly increasing; failure to
    find an index within the range means no assignment exists.
    """
    if subchannel_count < 1:
        raise ValueError("need at least one subchannel")
    picks = [0] * subchannel_count
    ceiling = mcs_range.highest
    for c in reversed(range(subchannel_count)):
        need = required_users(pop.user_count, targets.coverage_for(c))
        m = ceiling
        while m >= mcs_range.lowest and pop.coverage_count(m) < need:
            m -= 1
        if m < mcs_range.lowest:
            raise InfeasibleAllocationError(
                f"no MCS in [{mcs_range.lowest}, {ceiling}] reaches "
                f"{need}/{pop.user_count} users for subchannel {c + 1}"
            )
        picks[c] = m
        ceiling = m - 1
    return tuple(picks)


def _reference_mcs(pop: UserPopulation, targets: ServiceTargets) -> tuple[int, ...]:
    """Reported MCS of each layer's reference user."""
    return tuple(pop.quantile_mcs(t) for t in targets.coverage)


def _verify_coverage(
    plan: AllocationPlan,
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    q: int,
) -> None:
    """Confirm the coverage fractions under the planning-time approximation.

    The fill loops only ever consulted one reference user per layer; this
    re-counts the whole population, which matters when the coverage
    fractions are not ordered the way the subchannel MCS picks assume.
    """
    indicator = qos_indicator_ew if plan.scheme == "EW-MA" else qos_indicator_now
    limit = pop.report_limit
    for level, fraction in enumerate(targets.coverage, start=1):
        passed = sum(
            1
            for m in pop.acceptable
            if indicator(msg, effective_counts(plan, m), limit, q, level, targets.recovery_prob)
        )
        if passed / pop.user_count < fraction - COVERAGE_TOLERANCE:
            raise InfeasibleAllocationError(
                f"layer {level} coverage {passed}/{pop.user_count} misses {fraction}"
            )


def _check_dimensions(msg: LayeredMessage, targets: ServiceTargets, subch: SubchannelSet, *, match_layers: bool) -> None:
    if targets.layer_count != msg.layer_count:
        raise ValueError("targets must provide one coverage fraction per layer")
    if match_layers and subch.count != msg.layer_count:
        raise ValueError("this scheme requires one subchannel per layer")


def allocate_now_sa(
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    subch: SubchannelSet,
    q: int,
) -> AllocationPlan:
    """Per-layer coding with each layer confined to its own subchannel.

    Layer ``l`` starts at its source-packet count and grows until the joint
    recovery probability for its reference user reaches the target, or its
    subchannel fills.
    """
    _check_dimensions(msg, targets, subch, match_layers=True)
    layers = msg.layer_count
    mcs = mcs_select(pop, targets, pop.mcs_range, layers)
    reference = _reference_mcs(pop, targets)
    limit = pop.report_limit
    diag = [0] * layers
    for l in range(layers):
        n = msg.layer_sizes[l]
        cap = subch.capacities[l]

        def reached(count: int) -> bool:
            diag[l] = count
            visible = tuple(
                diag[i] if mcs[i] <= reference[l] else 0 for i in range(layers)
            )
            return qos_indicator_now(msg, visible, limit, q, l + 1, targets.recovery_prob)

        if cap < n:
            raise InfeasibleAllocationError(
                f"subchannel {l + 1} capacity {cap} below layer size {n}"
            )
        while not reached(n):
            n += 1
            if n > cap:
                raise InfeasibleAllocationError(
                    f"subchannel {l + 1} exhausted before layer {l + 1} met the target"
                )
    counts = tuple(
        tuple(diag[l] if c == l else 0 for c in range(layers)) for l in range(layers)
    )
    plan = AllocationPlan(scheme="NOW-SA", mcs=mcs, counts=counts)
    _verify_coverage(plan, msg, pop, targets, q)
    return plan


def _sequential_fill(
    scheme: str,
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    subch: SubchannelSet,
    q: int,
) -> AllocationPlan:
    """Shared fill loop for the mixed-allocation schemes.

    Rows are layers for NOW and expanding windows for EW; either way row
    ``l`` is grown packet by packet until level ``l + 1`` clears the
    recovery target for its reference user.  The running subchannel index
    only moves forward, so a row may straddle adjacent subchannels.
    """
    mcs = mcs_select(pop, targets, pop.mcs_range, subch.count)
    reference = _reference_mcs(pop, targets)
    indicator = qos_indicator_ew if scheme == "EW-MA" else qos_indicator_now
    limit = pop.report_limit
    layers = msg.layer_count
    counts = [[0] * subch.count for _ in range(layers)]
    loads = [0] * subch.count
    col = 0

    def reached(level: int) -> bool:
        visible = tuple(
            sum(row[c] for c in range(subch.count) if mcs[c] <= reference[level - 1])
            for row in counts
        )
        # the EW indicator looks at windows beyond `level` as well; during
        # the fill those rows are still zero, so it reduces to window `level`
        return indicator(msg, visible, limit, q, level, targets.recovery_prob)

    for l in range(layers):
        while not reached(l + 1):
            while col < subch.count and loads[col] >= subch.capacities[col]:
                col += 1
            if col >= subch.count:
                raise InfeasibleAllocationError(
                    f"capacity exhausted before level {l + 1} met the target"
                )
            counts[l][col] += 1
            loads[col] += 1

    plan = AllocationPlan(scheme=scheme, mcs=mcs, counts=tuple(tuple(row) for row in counts))
    _verify_coverage(plan, msg, pop, targets, q)
    return plan


def allocate_now_ma(
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    subch: SubchannelSet,
    q: int,
) -> AllocationPlan:
    """Per-layer coding with layers allowed to share subchannels."""
    _check_dimensions(msg, targets, subch, match_layers=True)
    return _sequential_fill("NOW-MA", msg, pop, targets, subch, q)


def allocate_ew_ma(
    msg: LayeredMessage,
    pop: UserPopulation,
    targets: ServiceTargets,
    subch: SubchannelSet,
    q: int,
) -> AllocationPlan:
    """Expanding-window coding across any number of subchannels.

    Row ``l`` of the plan carries packets coded over layers ``1..l+1``, so
    satisfying a window also shores up every smaller one; the service check
    credits a layer when any window from it upward decodes.
    """
    _check_dimensions(msg, targets, subch, match_layers=False)
    return _sequential_fill("EW-MA", msg, pop, targets, subch, q)
