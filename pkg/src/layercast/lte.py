"""LTE-A transport sizing and channel-quality emulation.

Everything here turns configuration numbers into the quantities the
allocator consumes: how many resource-block pairs one transport block needs
per MCS, how many source packets one group of pictures yields, how many
packets fit into the multicast share of a frame, and what MCS a user at a
given distance would report.  Capacity figures are configuration data, not
constants; they arrive with the scenario file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .allocation.plan import McsRange, UserPopulation
from .baseline import VideoStreamSpec

__all__ = [
    "McsTable",
    "FrameBudget",
    "LogisticPerCurve",
    "TransportPacking",
    "pack_tb",
    "derive_layer_packets",
    "capacity_bound",
    "emulate_cqi",
    "allocation_time_per",
    "population_from_distances",
]


@dataclass(frozen=True)
class McsTable:
    """Bit capacity of one resource-block pair for each MCS index."""

    mcs_range: McsRange
    bit_capacities: tuple[int, ...]
    max_blocks: int

    def __post_init__(self) -> None:
        caps = tuple(int(v) for v in self.bit_capacities)
        if len(caps) != len(self.mcs_range.indices):
            raise ValueError("need one capacity per MCS index in the range")
        if any(v < 1 for v in caps):
            raise ValueError("bit capacities must be positive")
        if any(a > b for a, b in zip(caps, caps[1:])):
            raise ValueError("bit capacity must be non-decreasing in MCS index")
        if self.max_blocks < 1:
            raise ValueError("max_blocks must be >= 1")
        object.__setattr__(self, "bit_capacities", caps)

    def capacity(self, mcs: int) -> int:
        return self.bit_capacities[mcs - self.mcs_range.lowest]


@dataclass(frozen=True)
class TransportPacking:
    """Chosen packet bit length and per-MCS resource-block pair counts."""

    packet_bits: int
    blocks: tuple[int, ...]
    worst_slack: int


def pack_tb(
    capacities: Sequence[int],
    max_blocks: int,
    bit_range: range | None = None,
) -> TransportPacking:
    """Size one packet so transport blocks waste as little as possible.

    Every MCS must fit the packet into at most ``max_blocks`` resource
    block pairs, and the block count is forced to the ceiling once the
    packet length is fixed; the only free choice is the length itself.
    Scans every candidate length and minimizes the worst per-MCS unused
    capacity, preferring the largest length on ties (more payload per
    block, same waste).
    """
    caps = tuple(int(v) for v in capacities)
    if not caps or any(v < 1 for v in caps):
        raise ValueError("capacities must be positive")
    if max_blocks < 1:
        raise ValueError("max_blocks must be >= 1")
    ceiling = max_blocks * min(caps)
    candidates = bit_range if bit_range is not None else range(1, ceiling + 1)

    best: TransportPacking | None = None
    for h in candidates:
        if h < 1 or h > ceiling:
            continue
        blocks = tuple(-(-h // c) for c in caps)
        slack = max(b * c - h for b, c in zip(blocks, caps))
        if best is None or slack < best.worst_slack or (
            slack == best.worst_slack and h > best.packet_bits
        ):
            best = TransportPacking(packet_bits=h, blocks=blocks, worst_slack=slack)
    if best is None:
        raise ValueError("no candidate packet length fits every MCS")
    return best


def derive_layer_packets(stream: VideoStreamSpec, packet_bits: int) -> tuple[int, ...]:
    """Source packets per layer for one group of pictures."""
    if packet_bits < 1:
        raise ValueError("packet_bits must be >= 1")
    duration = stream.gop_seconds
    return tuple(math.ceil(rate * duration / packet_bits) for rate in stream.layer_rates)


@dataclass(frozen=True)
class FrameBudget:
    """Share of the radio frame available to the multicast service."""

    gop_seconds: float
    tti_seconds: float = 0.001
    multicast_fraction: float = 0.6

    def __post_init__(self) -> None:
        if self.gop_seconds <= 0 or self.tti_seconds <= 0:
            raise ValueError("durations must be positive")
        if not 0.0 < self.multicast_fraction <= 1.0:
            raise ValueError("multicast_fraction must lie in (0, 1]")

    @property
    def usable_slots(self) -> int:
        """Transmission opportunities per group of pictures.

        One packet per slot per subchannel; only the multicast share of
        slots counts.  The tiny nudge keeps exact ratios from landing just
        below an integer in floating point.
        """
        return math.floor(
            self.multicast_fraction * self.gop_seconds / self.tti_seconds + 1e-9
        )


def capacity_bound(budget: FrameBudget, total_packets: int) -> int:
    """Per-subchannel packet budget: half again the source count, slot-capped."""
    if total_packets < 1:
        raise ValueError("total_packets must be >= 1")
    return min(total_packets + math.ceil(total_packets / 2), budget.usable_slots)


@dataclass(frozen=True)
class LogisticPerCurve:
    """Distance-driven packet error rate, one logistic ramp per MCS.

    ``midpoint(m)`` is the distance where the rate crosses one half; it
    shrinks linearly as the MCS index grows, so faster settings fail
    closer to the antenna.  ``width`` sets how gradual the ramp is.
    """

    mcs_range: McsRange
    midpoint_intercept: float
    midpoint_slope: float
    width: float

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.midpoint_slope < 0:
            raise ValueError("midpoint_slope must be >= 0 so error grows with MCS")

    def midpoint(self, mcs: int) -> float:
        return self.midpoint_intercept - self.midpoint_slope * mcs

    def per(self, distance: float, mcs: int) -> float:
        if distance < 0:
            raise ValueError("distance must be >= 0")
        if mcs not in self.mcs_range.indices:
            raise ValueError(f"MCS {mcs} outside range")
        return 1.0 / (1.0 + math.exp(-(distance - self.midpoint(mcs)) / self.width))


def emulate_cqi(
    curve: LogisticPerCurve,
    distance: float,
    report_limit: float,
    mcs_range: McsRange,
) -> int:
    """Greatest MCS whose error rate stays within the reporting limit.

    Returns the range's sentinel when even the lowest index fails, meaning
    the user cannot join the service.
    """
    for m in reversed(mcs_range.indices):
        if curve.per(distance, m) <= report_limit:
            return m
    return mcs_range.none_sentinel


def allocation_time_per(acceptable_mcs: int, subchannel_mcs: int, report_limit: float) -> float:
    """Error rate the base station assumes when planning.

    The report only says whether a subchannel is receivable, so planning
    charges the reporting limit when it is and total loss when it is not.
    """
    return report_limit if acceptable_mcs >= subchannel_mcs else 1.0


def population_from_distances(
    distances: Sequence[float],
    curve: LogisticPerCurve,
    mcs_range: McsRange,
    report_limit: float,
) -> UserPopulation:
    """Build the allocator's population view from user distances."""
    acceptable = tuple(
        emulate_cqi(curve, d, report_limit, mcs_range) for d in distances
    )
    per_table = tuple(
        tuple(curve.per(d, m) for m in mcs_range.indices) for d in distances
    )
    return UserPopulation(
        mcs_range=mcs_range,
        acceptable=acceptable,
        per_table=per_table,
        report_limit=report_limit,
    )
