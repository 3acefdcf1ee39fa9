"""Closed-form recovery models for layered random linear network coding.

Two transmission schemes share these models.  Under non-overlapping windows
(NOW) every layer is coded on its own, so a layer decodes exactly when its
own window delivers a full-rank set.  Under expanding windows (EW) window
``l`` codes over all source packets of layers ``1..l``, and shortfalls in
earlier windows can be repaired by later receipts within the same window
prefix.

The expanding-window probability uses a standard simplification: the rank
statistics of the stacked coefficient matrix are approximated by those of a
fully random matrix of the same size, which upper-bounds the dependent
structure.  Everything here is a pure function of immutable inputs and safe
to call concurrently.
"""

from __future__ import annotations

from functools import lru_cache
from math import prod
from typing import Sequence

import numpy as np
from scipy import stats

from .galois.field import SUPPORTED_FIELD_SIZES
from .message import LayeredMessage

#: Slack used when comparing computed probabilities against thresholds.
PROBABILITY_TOLERANCE = 1e-12

__all__ = [
    "PROBABILITY_TOLERANCE",
    "min_required_receipts",
    "prob_decode",
    "prob_ew_joint",
    "prob_now_joint",
    "prob_now_layer",
    "prob_receive",
    "qos_indicator_ew",
    "qos_indicator_now",
]


def _check_field(q: int) -> None:
    if q not in SUPPORTED_FIELD_SIZES:
        raise ValueError(f"unsupported field size {q!r}; choose from {SUPPORTED_FIELD_SIZES}")


def _check_prob(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _counts_tuple(msg: LayeredMessage, counts: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(c) for c in counts)
    if len(out) != msg.layer_count:
        raise ValueError(f"expected {msg.layer_count} packet counts, got {len(out)}")
    if any(c < 0 for c in out):
        raise ValueError("packet counts must be non-negative")
    return out


def _check_layer(msg: LayeredMessage, layer: int) -> None:
    if not 1 <= layer <= msg.layer_count:
        raise ValueError(f"layer must lie in [1, {msg.layer_count}], got {layer}")


def prob_decode(k: int, r: int, q: int) -> float:
    """Probability that ``r`` random coded packets over GF(q) span ``k`` sources.

    Each coded packet carries uniformly random combining coefficients, so
    this is the chance that a random ``r x k`` matrix has rank ``k``.  Zero
    whenever ``r < k``.
    """
    _check_field(q)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r < k:
        return 0.0
    return prod(1.0 - float(q) ** (i - r) for i in range(k))


def prob_receive(n: int, r: int, p: float) -> float:
    """Probability that exactly ``r`` of ``n`` sent packets survive erasure ``p``."""
    _check_prob(p, "p")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0 <= r <= n:
        raise ValueError(f"r must lie in [0, {n}], got {r}")
    return float(stats.binom.pmf(r, n, 1.0 - p))


@lru_cache(maxsize=4096)
def _receive_pmf(n: int, p: float) -> np.ndarray:
    """Reception-count pmf for ``n`` packets, indexed by packets received."""
    pmf = stats.binom.pmf(np.arange(n + 1), n, 1.0 - p)
    pmf.flags.writeable = False
    return pmf


@lru_cache(maxsize=4096)
def _decode_profile(k: int, q: int, r_hi: int) -> np.ndarray:
    """``prob_decode(k, r, q)`` for every ``r`` in ``0..r_hi``."""
    out = np.zeros(r_hi + 1)
    if r_hi >= k:
        r = np.arange(k, r_hi + 1, dtype=np.float64)
        i = np.arange(k, dtype=np.float64)
        out[k:] = np.prod(1.0 - float(q) ** (i[None, :] - r[:, None]), axis=1)
    out.flags.writeable = False
    return out


def prob_now_layer(k: int, n: int, p: float, q: int) -> float:
    """Probability of decoding one independently coded layer.

    ``k`` source packets, ``n`` coded transmissions, erasure rate ``p``:
    sums the reception pmf against the full-rank probability of however
    many packets arrive.
    """
    _check_field(q)
    _check_prob(p, "p")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n < k:
        return 0.0
    total = float(_receive_pmf(n, p) @ _decode_profile(k, q, n))
    return min(total, 1.0)


def prob_now_joint(
    msg: LayeredMessage,
    layer_packets: Sequence[int],
    p: float,
    q: int,
    layer: int,
) -> float:
    """Probability that layers ``1..layer`` all decode under per-layer coding.

    Layers use disjoint coded windows, so the joint probability is the
    product of the individual layer terms.
    """
    counts = _counts_tuple(msg, layer_packets)
    _check_layer(msg, layer)
    out = 1.0
    for k_i, n_i in zip(msg.layer_sizes[:layer], counts[:layer]):
        out *= prob_now_layer(k_i, n_i, p, q)
        if out == 0.0:
            break
    return out


def min_required_receipts(msg: LayeredMessage, received: Sequence[int]) -> tuple[int, ...]:
    """Minimum receipts each expanding window needs, given earlier shortfalls.

    Window ``l`` spans all sources of layers ``1..l``.  Packets missing
    from earlier windows must be made up by later ones, so each entry adds
    the window's fresh sources to whatever deficit the previous windows
    left behind.  ``received`` holds the packet count actually collected
    from each window.
    """
    counts = _counts_tuple(msg, received)
    sizes = msg.window_sizes
    need = sizes[0]
    out = [need]
    for i in range(1, msg.layer_count):
        deficit = max(need - counts[i - 1], 0)
        need = sizes[i] - sizes[i - 1] + deficit
        out.append(need)
    return tuple(out)


def prob_ew_joint(
    msg: LayeredMessage,
    window_packets: Sequence[int],
    p: float,
    q: int,
    window: int,
) -> float:
    """Probability of decoding expanding window ``window``.

    Sums over every reception outcome of windows ``1..window`` in which the
    final window covers the accumulated deficit, weighting each outcome by
    the full-rank probability of a random matrix with one row per received
    packet and one column per source in the window.  Evaluated by dynamic
    programming over (total received, receipts counting toward coverage);
    coverage saturates at each intermediate window's size, which matches
    the deficit recursion of :func:`min_required_receipts`.

    A window granted zero packets cannot clear its own fresh sources, so
    its probability is 0 even when later windows are well provisioned;
    service-level checks fold larger windows in separately.
    """
    counts = _counts_tuple(msg, window_packets)
    _check_layer(msg, window)
    _check_field(q)
    _check_prob(p, "p")
    sizes = msg.window_sizes
    n_last = counts[window - 1]
    k_last = sizes[window - 1]
    if window == 1:
        return prob_now_layer(k_last, n_last, p, q)

    weight = np.ones((1, 1))
    s_hi = 0
    for i in range(window - 1):
        n_i, cap = counts[i], sizes[i]
        pmf = _receive_pmf(n_i, p)
        new = np.zeros((s_hi + n_i + 1, min(cap, sizes[window - 2]) + 1))
        rows = np.arange(weight.shape[0])[:, None]
        cols = np.arange(weight.shape[1])
        for r in range(n_i + 1):
            if pmf[r] == 0.0:
                continue
            np.add.at(new, (rows + r, np.minimum(cols + r, cap)[None, :]), weight * pmf[r])
        weight = new
        s_hi += n_i

    pmf_last = _receive_pmf(n_last, p)
    dec = _decode_profile(k_last, q, s_hi + n_last)
    total = 0.0
    for e in range(weight.shape[1]):
        col = weight[:, e]
        lo = k_last - e
        if lo > n_last or not col.any():
            continue
        # tail[s + lo] = sum over r >= lo of pmf_last[r] * dec[s + r]
        tail = np.correlate(dec, pmf_last[lo:], "valid")
        total += float(col @ tail[lo : lo + col.size])
    return min(total, 1.0)


def qos_indicator_now(
    msg: LayeredMessage,
    layer_packets: Sequence[int],
    p: float,
    q: int,
    layer: int,
    threshold: float,
) -> bool:
    """Whether per-layer coding delivers layers ``1..layer`` with the target probability."""
    _check_prob(threshold, "threshold")
    return prob_now_joint(msg, layer_packets, p, q, layer) >= threshold - PROBABILITY_TOLERANCE


def qos_indicator_ew(
    msg: LayeredMessage,
    window_packets: Sequence[int],
    p: float,
    q: int,
    layer: int,
    threshold: float,
) -> bool:
    """Whether expanding-window coding delivers layers ``1..layer`` reliably enough.

    Decoding any window of size ``layer`` or larger yields those layers, so
    this is a disjunction over the remaining windows rather than a single
    probability comparison.
    """
    _check_prob(threshold, "threshold")
    return any(
        prob_ew_joint(msg, window_packets, p, q, t) >= threshold - PROBABILITY_TOLERANCE
        for t in range(layer, msg.layer_count + 1)
    )
