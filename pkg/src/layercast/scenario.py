"""Scenario files: one YAML document describing a whole experiment.

A scenario bundles the video stream, the radio configuration, the user
placement, and the service targets, so a run is reproducible from the file
plus a seed.  The loader validates eagerly and exposes assembled domain
objects; the file's SHA-256 is kept so reports can state exactly which
configuration produced them.

Schema (all keys required unless noted)::

    name: news-cif-80
    seed: 20260825
    stream:
      layer_rates_mbps: [2.45, 2.45, 7.35]
      layer_psnr_db: [31.6, 37.4, 43.7]
      gop_frames: 16
      fps: 30
    transport:
      packet_bits: 32000          # or "auto" to derive via pack_tb
      mcs_lowest: 4
      mcs_highest: 15
      block_bit_capacities: [101, 147, ...]   # one per MCS index
      max_blocks_per_tb: 6
      multicast_fraction: 0.6     # optional, default 0.6
      slot_override: 320          # optional, cap on usable slots
    users:
      count: 80
      first_distance_m: 90.0
      spacing_m: 2.0
    channel:
      midpoint_intercept_m: 346.4
      midpoint_slope_m: 15.0
      width_m: 12.0
      report_limit: 0.1
    targets:
      recovery_prob: 0.99
      coverage: [0.99, 0.8, 0.6]
    subchannels:
      count: 3
      capacity: auto              # or an integer per-subchannel packet cap
    schemes: [NOW-SA, NOW-MA, EW-MA, MrT]
    field_sizes: [2, 16, 256]
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import yaml

from .allocation.plan import McsRange, ServiceTargets, SubchannelSet, UserPopulation
from .baseline import VideoStreamSpec
from .galois.field import SUPPORTED_FIELD_SIZES
from .lte import (
    FrameBudget,
    LogisticPerCurve,
    McsTable,
    capacity_bound,
    derive_layer_packets,
    pack_tb,
    population_from_distances,
)
from .message import LayeredMessage

#: Schemes a scenario may request; the first three come from the allocator.
KNOWN_SCHEMES = ("NOW-SA", "NOW-MA", "EW-MA", "MrT")

__all__ = ["KNOWN_SCHEMES", "Scenario", "load_scenario", "parse_scenario"]


class _Section:
    """Mapping view that reports missing keys with their section path."""

    def __init__(self, data: dict, path: str) -> None:
        if not isinstance(data, dict):
            raise ValueError(f"scenario section {path!r} must be a mapping")
        self.data = data
        self.path = path

    def get(self, key: str, default=None):
        return self.data.get(key, default)

    def __getitem__(self, key: str):
        try:
            return self.data[key]
        except KeyError:
            raise ValueError(f"scenario is missing {self.path}.{key}") from None

    def section(self, key: str) -> "_Section":
        return _Section(self[key], f"{self.path}.{key}")


@dataclass(frozen=True)
class Scenario:
    """Validated experiment description plus assembled domain objects."""

    name: str
    seed: int
    stream: VideoStreamSpec
    mcs_table: McsTable
    packet_bits: int
    curve: LogisticPerCurve
    report_limit: float
    user_distances: tuple[float, ...]
    targets: ServiceTargets
    subchannel_count: int
    explicit_capacity: int | None
    schemes: tuple[str, ...]
    field_sizes: tuple[int, ...]
    multicast_fraction: float
    slot_override: int | None
    source_sha256: str

    @property
    def mcs_range(self) -> McsRange:
        return self.mcs_table.mcs_range

    def message(self) -> LayeredMessage:
        return LayeredMessage(derive_layer_packets(self.stream, self.packet_bits))

    def frame_budget(self) -> FrameBudget:
        return FrameBudget(
            gop_seconds=self.stream.gop_seconds,
            multicast_fraction=self.multicast_fraction,
        )

    def usable_slots(self) -> int:
        slots = self.frame_budget().usable_slots
        if self.slot_override is not None:
            slots = min(slots, self.slot_override)
        return slots

    def subchannels(self) -> SubchannelSet:
        if self.explicit_capacity is not None:
            cap = self.explicit_capacity
        else:
            budget = FrameBudget(
                gop_seconds=self.stream.gop_seconds,
                multicast_fraction=self.multicast_fraction,
            )
            cap = min(
                capacity_bound(budget, self.message().total_packets),
                self.usable_slots(),
            )
        return SubchannelSet(capacities=(cap,) * self.subchannel_count)

    def population(self) -> UserPopulation:
        return population_from_distances(
            self.user_distances, self.curve, self.mcs_range, self.report_limit
        )


def parse_scenario(text: str) -> Scenario:
    """Build a scenario from YAML text, validating every section."""
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    root = _Section(yaml.safe_load(text), "scenario")

    stream_cfg = root.section("stream")
    stream = VideoStreamSpec(
        layer_rates=tuple(1e6 * float(v) for v in stream_cfg["layer_rates_mbps"]),
        layer_psnr=tuple(stream_cfg["layer_psnr_db"]),
        gop_frames=int(stream_cfg["gop_frames"]),
        fps=float(stream_cfg["fps"]),
    )

    transport = root.section("transport")
    mcs_range = McsRange(int(transport["mcs_lowest"]), int(transport["mcs_highest"]))
    table = McsTable(
        mcs_range=mcs_range,
        bit_capacities=tuple(transport["block_bit_capacities"]),
        max_blocks=int(transport["max_blocks_per_tb"]),
    )
    raw_bits = transport["packet_bits"]
    if raw_bits == "auto":
        packet_bits = pack_tb(table.bit_capacities, table.max_blocks).packet_bits
    else:
        packet_bits = int(raw_bits)
        if packet_bits < 1:
            raise ValueError("transport.packet_bits must be positive or 'auto'")
    fraction = float(transport.get("multicast_fraction", 0.6))
    slot_override = transport.get("slot_override")
    if slot_override is not None:
        slot_override = int(slot_override)
        if slot_override < 1:
            raise ValueError("transport.slot_override must be positive")

    users = root.section("users")
    count = int(users["count"])
    first = float(users["first_distance_m"])
    spacing = float(users["spacing_m"])
    if count < 1 or first < 0 or spacing < 0:
        raise ValueError("users section needs count >= 1 and non-negative distances")
    distances = tuple(first + spacing * i for i in range(count))

    channel = root.section("channel")
    curve = LogisticPerCurve(
        mcs_range=mcs_range,
        midpoint_intercept=float(channel["midpoint_intercept_m"]),
        midpoint_slope=float(channel["midpoint_slope_m"]),
        width=float(channel["width_m"]),
    )
    report_limit = float(channel["report_limit"])

    targets_cfg = root.section("targets")
    targets = ServiceTargets(
        recovery_prob=float(targets_cfg["recovery_prob"]),
        coverage=tuple(targets_cfg["coverage"]),
    )
    if targets.layer_count != stream.layer_count:
        raise ValueError("targets.coverage must list one fraction per stream layer")

    subch = root.section("subchannels")
    sub_count = int(subch["count"])
    if sub_count < 1:
        raise ValueError("subchannels.count must be >= 1")
    raw_cap = subch.get("capacity", "auto")
    explicit_capacity = None if raw_cap == "auto" else int(raw_cap)
    if explicit_capacity is not None and explicit_capacity < 1:
        raise ValueError("subchannels.capacity must be positive or 'auto'")

    schemes = tuple(root["schemes"])
    if not schemes or any(s not in KNOWN_SCHEMES for s in schemes):
        raise ValueError(f"schemes must be drawn from {KNOWN_SCHEMES}")
    field_sizes = tuple(int(q) for q in root["field_sizes"])
    if not field_sizes or any(q not in SUPPORTED_FIELD_SIZES for q in field_sizes):
        raise ValueError(f"field_sizes must be drawn from {SUPPORTED_FIELD_SIZES}")

    seed = int(root.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")

    scn = Scenario(
        name=str(root.get("name", "unnamed")),
        seed=seed,
        stream=stream,
        mcs_table=table,
        packet_bits=packet_bits,
        curve=curve,
        report_limit=report_limit,
        user_distances=distances,
        targets=targets,
        subchannel_count=sub_count,
        explicit_capacity=explicit_capacity,
        schemes=schemes,
        field_sizes=field_sizes,
        multicast_fraction=fraction,
        slot_override=slot_override,
        source_sha256=digest,
    )
    # assemble the derived objects once so malformed configs fail at load
    scn.message()
    scn.subchannels()
    scn.population()
    return scn


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return parse_scenario(text)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None
