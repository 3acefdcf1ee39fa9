"""Layered source messages.

A layered message is the unit of data protected by one generation of network
coding: a base layer followed by zero or more enhancement layers.  Layer
``i`` is useful only if layers ``0 .. i-1`` are recovered as well, which is
why most of the library works with cumulative window sizes rather than with
individual layer sizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


@dataclass(frozen=True)
class LayeredMessage:
    """Sizes, in packets, of the layers of one source message.

    ``layer_sizes[i]`` is the number of source packets of layer ``i``;
    ``window_sizes[i]`` is the cumulative number of packets in layers
    ``0 .. i`` (the size of expanding window ``i``).
    """

    layer_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.layer_sizes:
            raise ValueError("a message needs at least one layer")
        if any(int(k) != k or k < 1 for k in self.layer_sizes):
            raise ValueError("layer sizes must be positive integers")
        object.__setattr__(self, "layer_sizes", tuple(int(k) for k in self.layer_sizes))

    @property
    def layer_count(self) -> int:
        return len(self.layer_sizes)

    @property
    def window_sizes(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(self.layer_sizes))

    @property
    def total_packets(self) -> int:
        return sum(self.layer_sizes)
