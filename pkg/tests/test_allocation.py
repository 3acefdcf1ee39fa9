"""Allocation plan types, feasibility checking, and the two-step heuristics."""

import random

import pytest

from layercast.allocation import (
    AllocationPlan,
    InfeasibleAllocationError,
    McsRange,
    ServiceTargets,
    SubchannelSet,
    UserPopulation,
    allocate_ew_ma,
    allocate_now_ma,
    allocate_now_sa,
    check_feasible,
    effective_counts,
    effective_per,
    mcs_select,
    required_users,
    total_transmissions,
)
from layercast.message import LayeredMessage
from layercast.recovery import prob_now_joint

from .instances import tiny_instance

RANGE = McsRange(4, 15)


def flat_population(mcs_range, acceptable, limit=0.1):
    """Users with constant low PER through their reported MCS, 0.5 beyond."""
    width = mcs_range.highest - mcs_range.lowest + 1
    rows = []
    for m in acceptable:
        good = max(0, min(m, mcs_range.highest) - mcs_range.lowest + 1)
        rows.append((limit / 2,) * good + (0.5,) * (width - good))
    return UserPopulation(mcs_range, tuple(acceptable), tuple(rows), limit)


# --- domain types -----------------------------------------------------------


def test_subchannel_set_orders_capacities():
    s = SubchannelSet((3, 5, 5))
    assert s.count == 3
    with pytest.raises(ValueError):
        SubchannelSet(())
    with pytest.raises(ValueError):
        SubchannelSet((5, 3))
    with pytest.raises(ValueError):
        SubchannelSet((0, 4))


def test_mcs_range_bounds_and_sentinel():
    r = McsRange(4, 6)
    assert list(r.indices) == [4, 5, 6]
    assert r.none_sentinel == 3
    with pytest.raises(ValueError):
        McsRange(7, 6)


def test_population_validation():
    r = McsRange(4, 6)
    flat_population(r, (6, 4, 3))  # sentinel user allowed
    with pytest.raises(ValueError, match="outside range"):
        flat_population(r, (7,))
    with pytest.raises(ValueError, match="PER entries"):
        UserPopulation(r, (5,), ((0.1, 0.1),))
    with pytest.raises(ValueError, match="non-decreasing"):
        UserPopulation(r, (5,), ((0.05, 0.02, 0.5),))
    # reported MCS must actually meet the limit in the true table
    with pytest.raises(ValueError, match="exceeds the limit"):
        UserPopulation(r, (6,), ((0.05, 0.05, 0.4),))


def test_required_users_rounds_up_real_products():
    assert required_users(10, 0.99) == 10
    assert required_users(10, 1.0) == 10
    assert required_users(10, 0.8) == 8
    assert required_users(5, 0.01) == 1
    with pytest.raises(ValueError):
        required_users(10, 0.0)
    with pytest.raises(ValueError):
        required_users(10, 1.2)


def test_quantile_mcs_picks_worst_counted_user():
    pop = flat_population(RANGE, (9, 4, 7, 7, 2 + 2))
    assert pop.quantile_mcs(0.6) == 7
    assert pop.quantile_mcs(1.0) == 4
    assert pop.coverage_count(7) == 3


def test_service_targets_validation_and_tail_mapping():
    t = ServiceTargets(0.9, (0.9, 0.6))
    assert t.coverage_for(0) == 0.9
    assert t.coverage_for(1) == 0.6
    assert t.coverage_for(5) == 0.6  # extra subchannels reuse the last tier
    with pytest.raises(ValueError):
        ServiceTargets(0.0, (0.9,))
    with pytest.raises(ValueError):
        ServiceTargets(0.9, (0.9, 0.0))


def test_plan_validation_rules():
    with pytest.raises(ValueError, match="strictly increasing"):
        AllocationPlan("NOW-MA", (5, 5), ((1, 0), (0, 1)))
    with pytest.raises(ValueError, match="non-negative"):
        AllocationPlan("NOW-MA", (4, 5), ((1, -1), (0, 1)))
    with pytest.raises(ValueError, match="mixing"):
        AllocationPlan("NOW-SA", (4, 5), ((1, 1), (0, 1)))
    with pytest.raises(ValueError, match="one subchannel per layer"):
        AllocationPlan("NOW-SA", (4, 5), ((1, 0),))
    with pytest.raises(ValueError, match="unknown scheme"):
        AllocationPlan("RLNC", (4,), ((1,),))


def test_plan_totals_and_objective():
    plan = AllocationPlan(
        "NOW-SA", (4, 5, 6), ((5, 0, 0), (0, 10, 0), (0, 0, 15))
    )
    assert plan.layer_totals == (5, 10, 15)
    assert plan.column_loads == (5, 10, 15)
    assert total_transmissions(plan) == 30
    empty = AllocationPlan("NOW-MA", (4,), ((0,), (0,)))
    assert total_transmissions(empty) == 0


# --- per-user plan views ----------------------------------------------------


def test_effective_counts_follows_visibility():
    plan = AllocationPlan("EW-MA", (5, 7, 10), ((3, 0, 0), (1, 2, 0), (0, 0, 4)))
    assert effective_counts(plan, 15) == (3, 3, 4)  # sees everything
    assert effective_counts(plan, 4) == (0, 0, 0)
    assert effective_counts(plan, 6) == (3, 1, 0)  # only the first subchannel
    # widening the channel never loses packets
    for worse, better in ((4, 6), (6, 7), (7, 10)):
        low = effective_counts(plan, worse)
        high = effective_counts(plan, better)
        assert all(a <= b for a, b in zip(low, high))


def test_effective_per_takes_worst_loaded_subchannel():
    r = McsRange(4, 5)
    pop = UserPopulation(r, (5,), ((0.02, 0.08),))
    both = AllocationPlan("NOW-MA", (4, 5), ((2, 1), (0, 1)))
    assert effective_per(both, pop, 0) == 0.08
    single = AllocationPlan("NOW-MA", (4, 5), ((2, 0), (1, 0)))
    assert effective_per(single, pop, 0) == 0.02
    empty = AllocationPlan("NOW-MA", (4, 5), ((0, 0), (0, 0)))
    assert effective_per(empty, pop, 0) == 1.0
    # subchannels above the report are invisible even when loaded
    pop_low = UserPopulation(r, (4,), ((0.02, 0.08),))
    high_only = AllocationPlan("NOW-MA", (4, 5), ((0, 3), (0, 1)))
    assert effective_per(high_only, pop_low, 0) == 1.0


# --- MCS selection ----------------------------------------------------------


def test_mcs_select_uniform_population_takes_top_indices():
    pop = flat_population(RANGE, (15,) * 8)
    targets = ServiceTargets(0.9, (0.99, 0.7, 0.5))
    assert mcs_select(pop, targets, RANGE, 3) == (13, 14, 15)


def test_mcs_select_three_group_population_hand_trace():
    pop = flat_population(RANGE, (10, 10, 10, 10, 7, 7, 7, 5, 5, 5))
    targets = ServiceTargets(0.9, (0.9, 0.6, 0.4))
    # tier thresholds 9, 6 and 4 users; the slowest member of each
    # qualifying group sets the subchannel MCS
    assert mcs_select(pop, targets, RANGE, 3) == (5, 7, 10)


def test_mcs_select_requires_enough_indices_and_users():
    short = McsRange(4, 5)
    pop = flat_population(short, (5,) * 4)
    with pytest.raises(InfeasibleAllocationError):
        mcs_select(pop, ServiceTargets(0.9, (0.9, 0.6, 0.4)), short, 3)
    nobody = flat_population(RANGE, (RANGE.none_sentinel,) * 4)
    with pytest.raises(InfeasibleAllocationError):
        mcs_select(nobody, ServiceTargets(0.9, (0.5,)), RANGE, 1)


# --- heuristics -------------------------------------------------------------


def test_now_sa_matches_greedy_joint_scan_without_erasures():
    """With a near-zero planning PER the fill reduces to a rank-failure scan."""
    limit = 1e-9
    msg = LayeredMessage((2, 2, 2))
    pop = flat_population(RANGE, (15,) * 6, limit=limit)
    targets = ServiceTargets(0.99, (0.9, 0.9, 0.9))
    subch = SubchannelSet((50, 50, 50))
    plan = allocate_now_sa(msg, pop, targets, subch, 256)

    expected = []
    for layer in range(1, 4):
        n = msg.layer_sizes[layer - 1]
        while prob_now_joint(msg, tuple(expected) + (n,) + (0,) * (3 - layer), limit, 256, layer) < 0.99:
            n += 1
        expected.append(n)
    assert plan.layer_totals == tuple(expected) == (2, 2, 3)
    assert plan.mcs == (13, 14, 15)


def test_now_sa_rejects_capacity_below_layer_size():
    msg = LayeredMessage((3, 1))
    pop = flat_population(RANGE, (15,) * 4)
    with pytest.raises(InfeasibleAllocationError, match="below layer size"):
        allocate_now_sa(msg, pop, ServiceTargets(0.9, (0.9, 0.5)), SubchannelSet((1, 5)), 256)


def test_now_ma_runs_out_of_capacity():
    msg = LayeredMessage((2, 2))
    pop = flat_population(RANGE, (15,) * 4)
    targets = ServiceTargets(0.999999, (0.9, 0.5))
    with pytest.raises(InfeasibleAllocationError, match="capacity exhausted"):
        allocate_now_ma(msg, pop, targets, SubchannelSet((3, 3)), 2)


def test_now_ma_straddles_and_fills_exactly():
    msg = LayeredMessage((2, 5))
    pop = flat_population(RANGE, (15,) * 5)
    targets = ServiceTargets(0.9, (0.9, 0.8))
    roomy = allocate_now_ma(msg, pop, targets, SubchannelSet((40, 40)), 2)
    n1, n2 = roomy.layer_totals
    assert roomy.counts == ((n1, 0), (n2, 0))  # everything fit up front

    tight = allocate_now_ma(msg, pop, targets, SubchannelSet((n1 + 1, n2 - 1)), 2)
    assert tight.layer_totals == (n1, n2)
    assert tight.counts == ((n1, 0), (1, n2 - 1))
    assert tight.column_loads == (n1 + 1, n2 - 1)  # last subchannel exactly full


def test_now_sa_and_now_ma_agree_on_layer_totals():
    rng = random.Random(2024)
    compared = 0
    for _ in range(40):
        msg, pop, targets, subch = tiny_instance(rng)
        q = rng.choice((2, 16, 256))
        try:
            sa = allocate_now_sa(msg, pop, targets, subch, q)
        except InfeasibleAllocationError:
            continue
        ma = allocate_now_ma(msg, pop, targets, subch, q)
        assert sa.layer_totals == ma.layer_totals
        assert sa.mcs == ma.mcs
        compared += 1
    assert compared >= 10


def test_ew_single_window_collapses_to_now():
    msg = LayeredMessage((3,))
    pop = flat_population(RANGE, (15, 15, 9, 9))
    targets = ServiceTargets(0.95, (0.9,))
    subch = SubchannelSet((25,))
    ew = allocate_ew_ma(msg, pop, targets, subch, 2)
    now = allocate_now_ma(msg, pop, targets, subch, 2)
    assert ew.mcs == now.mcs
    assert ew.counts == now.counts


def heterogeneous_setup():
    msg = LayeredMessage((3, 3))
    pop = flat_population(RANGE, (5,) * 5 + (8,) * 4 + (11,) * 3)
    targets = ServiceTargets(0.9, (0.9, 0.5))
    return msg, pop, targets, SubchannelSet((30, 30))


def test_ew_beats_now_on_heterogeneous_users_at_small_field():
    msg, pop, targets, subch = heterogeneous_setup()
    now = allocate_now_ma(msg, pop, targets, subch, 2)
    ew = allocate_ew_ma(msg, pop, targets, subch, 2)
    assert ew.total_transmissions <= now.total_transmissions


def test_ew_gap_shrinks_at_large_field():
    msg, pop, targets, subch = heterogeneous_setup()
    now = allocate_now_ma(msg, pop, targets, subch, 256)
    ew = allocate_ew_ma(msg, pop, targets, subch, 256)
    assert abs(now.total_transmissions - ew.total_transmissions) <= 3


def test_ew_accepts_more_subchannels_than_layers():
    msg = LayeredMessage((2, 3))
    pop = flat_population(RANGE, (6, 6, 9, 9, 12, 12))
    targets = ServiceTargets(0.9, (0.8, 0.5))
    subch = SubchannelSet((12, 12, 12))
    plan = allocate_ew_ma(msg, pop, targets, subch, 16)
    assert plan.subchannel_count == 3
    report = check_feasible(plan, msg, pop, targets, subch, 16)
    assert report.ok, report.violations


# --- feasibility checking ---------------------------------------------------


def feasibility_fixture():
    msg = LayeredMessage((2, 3))
    pop = flat_population(McsRange(4, 6), (6, 6, 5, 4))
    targets = ServiceTargets(0.9, (0.75, 0.5))
    subch = SubchannelSet((20, 20))
    return msg, pop, targets, subch


def test_check_feasible_accepts_heuristic_output():
    msg, pop, targets, subch = feasibility_fixture()
    plan = allocate_now_ma(msg, pop, targets, subch, 256)
    report = check_feasible(plan, msg, pop, targets, subch, 256)
    assert report.ok
    assert len(report.coverage) == 2
    assert all(got >= want for got, want in zip(report.coverage, report.targets))


def test_check_feasible_flags_capacity_overrun():
    msg, pop, targets, _ = feasibility_fixture()
    plan = AllocationPlan("NOW-MA", (4, 5), ((4, 0), (1, 5)))
    report = check_feasible(plan, msg, pop, targets, SubchannelSet((4, 4)), 256)
    assert any("capacity" in v for v in report.violations)


def test_check_feasible_flags_mcs_problems():
    msg, pop, targets, subch = feasibility_fixture()
    outside = AllocationPlan("NOW-MA", (3, 5), ((4, 0), (0, 5)))
    report = check_feasible(outside, msg, pop, targets, subch, 256)
    assert any("outside the usable range" in v for v in report.violations)

    plan = AllocationPlan("NOW-MA", (4, 5), ((4, 0), (0, 5)))
    object.__setattr__(plan, "mcs", (5, 5))  # corrupt a frozen plan in place
    report = check_feasible(plan, msg, pop, targets, subch, 256)
    assert any("strictly increasing" in v for v in report.violations)


def test_check_feasible_flags_shape_and_coverage():
    msg, pop, targets, subch = feasibility_fixture()
    narrow = AllocationPlan("NOW-MA", (4,), ((4,), (5,)))
    report = check_feasible(narrow, msg, pop, targets, subch, 256)
    assert any("subchannels" in v for v in report.violations)

    starved = AllocationPlan("NOW-MA", (4, 5), ((0, 0), (0, 0)))
    report = check_feasible(starved, msg, pop, targets, subch, 256)
    assert any("coverage" in v for v in report.violations)
    assert report.coverage == (0.0, 0.0)


def test_heuristic_plans_pass_feasibility_on_random_instances():
    rng = random.Random(77)
    checked = 0
    for _ in range(25):
        msg, pop, targets, subch = tiny_instance(rng)
        q = rng.choice((2, 256))
        for allocate in (allocate_now_sa, allocate_now_ma, allocate_ew_ma):
            try:
                plan = allocate(msg, pop, targets, subch, q)
            except InfeasibleAllocationError:
                continue
            report = check_feasible(plan, msg, pop, targets, subch, q)
            assert report.ok, (allocate.__name__, report.violations)
            checked += 1
    assert checked >= 20
