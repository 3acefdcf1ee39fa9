"""Uncoded multi-rate baseline: joint reception, quality score, MCS choice."""

import itertools
import random

import pytest

from layercast.allocation import McsRange, UserPopulation
from layercast.baseline import VideoStreamSpec, optimize_mrt, prob_mrt_joint, psnr_user

from .instances import tiered_population

NEWS_PSNR = (31.6, 37.4, 43.7)


def make_stream(layers=3):
    return VideoStreamSpec(
        layer_rates=(2.45e6,) * layers,
        layer_psnr=NEWS_PSNR[:layers],
        gop_frames=16,
        fps=30.0,
    )


def test_stream_spec_validation():
    s = make_stream()
    assert s.layer_count == 3
    assert s.gop_seconds == pytest.approx(16 / 30)
    with pytest.raises(ValueError):
        VideoStreamSpec((1e6,), (30.0, 36.0), 16, 30.0)
    with pytest.raises(ValueError):
        VideoStreamSpec((1e6, 1e6), (36.0, 30.0), 16, 30.0)
    with pytest.raises(ValueError):
        VideoStreamSpec((1e6,), (30.0,), 0, 30.0)


def test_joint_reception_multiplies_per_packet_odds():
    assert prob_mrt_joint((2, 3), (0.1, 0.2), 2) == pytest.approx(0.9**2 * 0.8**3)
    assert prob_mrt_joint((2, 3), (0.1, 0.2), 1) == pytest.approx(0.81)
    assert prob_mrt_joint((0, 3), (0.5, 0.0), 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        prob_mrt_joint((2, 3), (0.1, 0.2), 0)
    with pytest.raises(ValueError):
        prob_mrt_joint((2, 3), (0.1,), 1)
    with pytest.raises(ValueError):
        prob_mrt_joint((2,), (1.5,), 1)


def test_quality_score_picks_best_weighted_prefix():
    stream = make_stream()
    # middle prefix wins: 37.4 * 0.99 beats both neighbours
    assert psnr_user(stream, (1.0, 0.99, 0.5)) == pytest.approx(37.026)
    assert psnr_user(stream, (0.0, 0.0, 0.0)) == 0.0
    assert psnr_user(stream, (1.0, 1.0, 1.0)) == pytest.approx(43.7)
    with pytest.raises(ValueError):
        psnr_user(stream, (1.0, 0.5))


def test_quality_score_monotone_in_probabilities():
    stream = make_stream()
    low = psnr_user(stream, (0.9, 0.5, 0.2))
    high = psnr_user(stream, (0.95, 0.7, 0.4))
    assert high >= low


def score(stream, pop, mcs, counts):
    """Reference aggregate score for one MCS tuple, planning-time rates."""
    total = 0.0
    for acceptable in pop.acceptable:
        rates = tuple(pop.report_limit if acceptable >= m else 1.0 for m in mcs)
        probs = [
            prob_mrt_joint(counts, rates, level)
            for level in range(1, stream.layer_count + 1)
        ]
        total += psnr_user(stream, probs)
    return total


def test_optimizer_matches_reference_enumeration():
    rng = random.Random(31)
    mcs_range = McsRange(4, 9)
    stream = VideoStreamSpec((1e6, 2e6), (30.0, 38.0), 16, 30.0)
    counts = (2, 3)
    for _ in range(5):
        pop = tiered_population(rng, mcs_range, rng.randint(3, 10))
        got = optimize_mrt(stream, pop, mcs_range, counts)
        best = max(
            itertools.combinations(mcs_range.indices, 2),
            key=lambda mcs: (score(stream, pop, mcs, counts), [-m for m in mcs]),
        )
        assert got == best
        assert got[0] < got[1]


def test_optimizer_breaks_ties_toward_low_indices():
    """All MCS at or below the report tie exactly, so the smallest wins."""
    mcs_range = McsRange(4, 15)
    pop = UserPopulation(mcs_range, (8,), ((0.05,) * 5 + (0.5,) * 7,))
    stream = VideoStreamSpec((1e6,), (30.0,), 16, 30.0)
    assert optimize_mrt(stream, pop, mcs_range, (3,)) == (4,)


def test_optimizer_validates_shapes():
    mcs_range = McsRange(4, 5)
    pop = UserPopulation(mcs_range, (5,), ((0.05, 0.05),))
    stream = make_stream()
    with pytest.raises(ValueError, match="packet count per layer"):
        optimize_mrt(stream, pop, mcs_range, (1, 2))
    with pytest.raises(ValueError, match="too narrow"):
        optimize_mrt(stream, pop, mcs_range, (1, 2, 3))
