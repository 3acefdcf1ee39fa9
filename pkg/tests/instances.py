"""Randomized tiny allocation instances shared by solver and property tests.

Instances are built from a ``random.Random`` the caller seeds, so every
test run sees the same sequence.  Populations come in a few distinct
channel-quality groups, the shape the multicast models care about.
"""

import random

from layercast.allocation import (
    McsRange,
    ServiceTargets,
    SubchannelSet,
    UserPopulation,
)
from layercast.message import LayeredMessage


def tiered_population(
    rng: random.Random,
    mcs_range: McsRange,
    user_count: int,
    tiers: int = 3,
    report_limit: float = 0.1,
) -> UserPopulation:
    """Population drawn from ``tiers`` distinct reported-MCS groups."""
    span = range(mcs_range.lowest, mcs_range.highest + 1)
    levels = sorted(rng.sample(span, k=min(tiers, len(span))))
    acceptable = []
    rows = []
    for _ in range(user_count):
        m = levels[rng.randrange(len(levels))]
        acceptable.append(m)
        row = []
        per = rng.uniform(0.005, 0.05)
        for mcs in mcs_range.indices:
            if mcs <= m:
                per = min(report_limit, per + rng.uniform(0.0, 0.02))
            else:
                per = min(1.0, max(per, 0.25) + rng.uniform(0.0, 0.25))
            row.append(per)
        rows.append(tuple(row))
    return UserPopulation(mcs_range, tuple(acceptable), tuple(rows), report_limit)


def tiny_instance(rng: random.Random):
    """Two layers, two subchannels, three-tier population of at most 12 users."""
    msg = LayeredMessage((rng.randint(1, 4), rng.randint(1, 4)))
    mcs_range = McsRange(1, 6)
    pop = tiered_population(rng, mcs_range, rng.randint(6, 12))
    targets = ServiceTargets(
        rng.choice((0.85, 0.9, 0.95)),
        tuple(sorted((rng.uniform(0.55, 0.95), rng.uniform(0.3, 0.8)), reverse=True)),
    )
    subch = SubchannelSet(tuple(sorted(rng.randint(4, 10) for _ in range(2))))
    return msg, pop, targets, subch


def suite_instance(rng: random.Random):
    """Mixed-size instance for constraint-satisfaction sweeps; returns q too."""
    layers = rng.randint(1, 3)
    msg = LayeredMessage(tuple(rng.randint(1, 6) for _ in range(layers)))
    mcs_range = McsRange(1, 8)
    pop = tiered_population(rng, mcs_range, rng.randint(4, 20), tiers=rng.randint(2, 4))
    fractions = sorted((rng.uniform(0.3, 0.95) for _ in range(layers)), reverse=True)
    targets = ServiceTargets(rng.choice((0.8, 0.9, 0.95)), tuple(fractions))
    subch = SubchannelSet(tuple(sorted(rng.randint(6, 30) for _ in range(layers))))
    q = rng.choice((2, 16, 256))
    return msg, pop, targets, subch, q
