"""Uncoded multi-rate transmission baseline.

Instead of coding, each video layer is broadcast once on its own MCS and a
user recovers a layer only by catching every one of its packets.  The MCS
per layer is chosen to maximize the population's aggregate expected video
quality; there is no recovery-probability or coverage constraint, so
whatever coverage emerges is simply reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .allocation.plan import McsRange, UserPopulation

__all__ = ["VideoStreamSpec", "prob_mrt_joint", "psnr_user", "optimize_mrt"]


@dataclass(frozen=True)
class VideoStreamSpec:
    """Layered stream parameters: per-layer bitrate and cumulative quality.

    ``layer_rates`` is in bits per second.  ``layer_psnr[l]`` is the
    picture quality, in dB, delivered by decoding layers ``0..l``; adding
    an enhancement layer must improve it.
    """

    layer_rates: tuple[float, ...]
    layer_psnr: tuple[float, ...]
    gop_frames: int
    fps: float

    def __post_init__(self) -> None:
        rates = tuple(float(v) for v in self.layer_rates)
        psnr = tuple(float(v) for v in self.layer_psnr)
        if not rates or len(rates) != len(psnr):
            raise ValueError("need matching, non-empty rate and PSNR vectors")
        if any(v <= 0 for v in rates):
            raise ValueError("layer bitrates must be positive")
        if any(a >= b for a, b in zip(psnr, psnr[1:])):
            raise ValueError("cumulative PSNR must be strictly increasing")
        if self.gop_frames < 1 or self.fps <= 0:
            raise ValueError("gop_frames must be >= 1 and fps positive")
        object.__setattr__(self, "layer_rates", rates)
        object.__setattr__(self, "layer_psnr", psnr)

    @property
    def layer_count(self) -> int:
        return len(self.layer_rates)

    @property
    def gop_seconds(self) -> float:
        return self.gop_frames / self.fps


def prob_mrt_joint(
    layer_counts: Sequence[int],
    erasure_rates: Sequence[float],
    level: int,
) -> float:
    """Probability an uncoded user collects every packet of layers 1..level.

    ``erasure_rates[i]`` is the user's packet error rate at the MCS
    carrying layer ``i``; each of the ``layer_counts[i]`` packets must
    arrive individually.
    """
    if len(layer_counts) != len(erasure_rates):
        raise ValueError("need one erasure rate per layer")
    if not 1 <= level <= len(layer_counts):
        raise ValueError(f"level must lie in [1, {len(layer_counts)}], got {level}")
    out = 1.0
    for k, p in zip(layer_counts[:level], erasure_rates[:level]):
        if k < 0 or not 0.0 <= p <= 1.0:
            raise ValueError("counts must be non-negative and rates within [0, 1]")
        out *= (1.0 - p) ** k
    return out


def psnr_user(stream: VideoStreamSpec, joint_probs: Sequence[float]) -> float:
    """Expected-quality score: the best layer prefix weighted by its odds.

    Works for any scheme's per-level joint recovery probabilities.  A user
    with no decodable prefix scores zero.
    """
    if len(joint_probs) != stream.layer_count:
        raise ValueError("need one joint probability per layer")
    best = 0.0
    for quality, prob in zip(stream.layer_psnr, joint_probs):
        best = max(best, quality * prob)
    return best


def optimize_mrt(
    stream: VideoStreamSpec,
    pop: UserPopulation,
    mcs_range: McsRange,
    layer_counts: Sequence[int],
) -> tuple[int, ...]:
    """Choose one MCS per layer maximizing the group's aggregate quality.

    Exhausts all strictly increasing MCS tuples; the planning-time rate
    approximation applies, so a user either receives a layer's MCS at the
    reported error limit or not at all.  Ties go to the lexicographically
    smallest tuple, which keeps runs reproducible.
    """
    layers = stream.layer_count
    counts = tuple(int(k) for k in layer_counts)
    if len(counts) != layers:
        raise ValueError("need one packet count per layer")
    if len(mcs_range.indices) < layers:
        raise ValueError("MCS range too narrow for one index per layer")
    limit = pop.report_limit

    best: tuple[int, ...] | None = None
    best_score = -1.0
    for mcs in itertools.combinations(mcs_range.indices, layers):
        score = 0.0
        for acceptable in pop.acceptable:
            rates = tuple(limit if acceptable >= m else 1.0 for m in mcs)
            probs = [prob_mrt_joint(counts, rates, level) for level in range(1, layers + 1)]
            score += psnr_user(stream, probs)
        if score > best_score + 1e-12:
            best, best_score = mcs, score
    assert best is not None
    return best
