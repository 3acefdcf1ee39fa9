"""Monte-Carlo oracles for the closed-form recovery models.

These simulators draw actual coding matrices over GF(q), run Gaussian
elimination and count decode events, so they are independent of the
analytic expressions they are used to validate.

Backends: a compiled Cython kernel (built with the package) and a
vectorised NumPy fallback.  Both follow the stream contract in ``_rng`` and
return identical counts; selection happens at import, or set
``LAYERCAST_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..message import LayeredMessage
from . import _mc_fallback
from ._rng import derive_seed  # re-exported for experiment seeding
from .field import field_ops

__all__ = [
    "MonteCarloResult",
    "active_backend",
    "derive_seed",
    "simulate_now_recovery",
    "simulate_ew_recovery",
    "simulate_full_rank",
    "split_trials",
]

if os.environ.get("LAYERCAST_PURE_PYTHON"):
    _backend = _mc_fallback
    _BACKEND_NAME = "python"
else:
    try:
        from . import _mc_kernels as _backend

        _BACKEND_NAME = "compiled"
    except ImportError:  # extension not built; correctness is unaffected
        _backend = _mc_fallback
        _BACKEND_NAME = "python"


def active_backend() -> str:
    """Name of the backend selected at import: 'compiled' or 'python'."""
    return _BACKEND_NAME


@dataclass(frozen=True)
class MonteCarloResult:
    """Event counts for one simulated quantity per layer/window."""

    counts: np.ndarray
    trials: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        self.counts.setflags(write=False)

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.trials

    @property
    def std_errors(self) -> np.ndarray:
        """Binomial standard error of each empirical probability."""
        p = self.probabilities
        return np.sqrt(p * (1.0 - p) / self.trials)


def merge(a: MonteCarloResult, b: MonteCarloResult) -> MonteCarloResult:
    """Combine results from disjoint trial ranges of the same experiment."""
    return MonteCarloResult(a.counts + b.counts, a.trials + b.trials)


def split_trials(trials: int, parts: int) -> tuple[tuple[int, int], ...]:
    """(offset, length) pairs that partition ``range(trials)`` evenly."""
    parts = max(1, min(parts, trials))
    step, extra = divmod(trials, parts)
    spans = []
    start = 0
    for i in range(parts):
        length = step + (1 if i < extra else 0)
        spans.append((start, length))
        start += length
    return tuple(spans)


def _validate(p: float, q: int, trials: int) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {p}")
    if trials < 1:
        raise ValueError("trials must be positive")
    field_ops(q)


def _counts_vector(msg: LayeredMessage, counts) -> np.ndarray:
    arr = np.asarray(counts, dtype=np.int64)
    if arr.shape != (msg.layer_count,):
        raise ValueError("one packet count per layer is required")
    if (arr < 0).any():
        raise ValueError("packet counts must be non-negative")
    return arr


def _dispatch(fn, static_args, trials, seed, base_trial, workers):
    if workers <= 1:
        return fn(*static_args[:-2], trials, seed, base_trial, *static_args[-2:])
    spans = split_trials(trials, workers)
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        futures = [
            pool.submit(
                fn, *static_args[:-2], length, seed, base_trial + off, *static_args[-2:]
            )
            for off, length in spans
        ]
        results = [f.result() for f in futures]
    total = results[0]
    for r in results[1:]:
        total = total + r
    return total


def simulate_now_recovery(
    msg: LayeredMessage,
    layer_packets,
    p: float,
    q: int,
    trials: int,
    seed: int,
    *,
    base_trial: int = 0,
    workers: int = 1,
) -> MonteCarloResult:
    """Empirical probability that layers ``0..l`` all decode, per ``l``.

    Each layer is coded independently over its own packets; layer ``l``
    decodes iff the received coefficient rows reach rank ``layer_sizes[l]``.
    """
    _validate(p, q, trials)
    n_arr = _counts_vector(msg, layer_packets)
    k_arr = np.asarray(msg.layer_sizes, dtype=np.int64)
    gf = field_ops(q)
    counts = _dispatch(
        _backend.now_joint_counts,
        (k_arr, n_arr, p, q, gf.mul_table, gf.inv_table),
        trials,
        seed,
        base_trial,
        workers,
    )
    return MonteCarloResult(counts, trials)


def simulate_ew_recovery(
    msg: LayeredMessage,
    window_packets,
    p: float,
    q: int,
    trials: int,
    seed: int,
    *,
    base_trial: int = 0,
    workers: int = 1,
) -> MonteCarloResult:
    """Empirical probability of decoding each expanding window.

    Window ``l`` counts as decoded iff the packets received for windows
    ``1..l`` reach full column rank over the first ``window_sizes[l]``
    source symbols.  Packets of later windows are not consulted: the data
    of a small window rides along with any larger decoded window, and the
    service-level indicators account for that separately.
    """
    _validate(p, q, trials)
    nn_arr = _counts_vector(msg, window_packets)
    kk_arr = np.asarray(msg.window_sizes, dtype=np.int64)
    gf = field_ops(q)
    counts = _dispatch(
        _backend.ew_window_counts,
        (kk_arr, nn_arr, p, q, gf.mul_table, gf.inv_table),
        trials,
        seed,
        base_trial,
        workers,
    )
    return MonteCarloResult(counts, trials)


def simulate_full_rank(
    k: int,
    r: int,
    q: int,
    trials: int,
    seed: int,
    *,
    base_trial: int = 0,
    workers: int = 1,
) -> MonteCarloResult:
    """Empirical probability that a uniform r x k matrix over GF(q) has rank k."""
    _validate(0.0, q, trials)
    if k < 1 or r < k:
        raise ValueError("expected 1 <= k <= r")
    gf = field_ops(q)
    count = _dispatch(
        _backend.full_rank_count,
        (k, r, q, gf.mul_table, gf.inv_table),
        trials,
        seed,
        base_trial,
        workers,
    )
    return MonteCarloResult(np.array([count], dtype=np.int64), trials)
