"""Counter-based pseudo-random stream shared by both simulation backends.

Every Monte-Carlo trial owns an independent stream derived from the master
seed and the trial's global index, and every variate inside a trial has a
fixed position in that stream.  Because a variate is a pure function of
``(seed, trial, position)``, trial ranges can be split across workers and the
per-range counts merged by addition without changing any outcome, and the
compiled and pure-NumPy backends reproduce each other bit for bit.

The generator is the splitmix64 finalizer over an affine counter:

    u0      = fin(trial * GOLDEN + GOLDEN)
    origin  = fin(seed + u0)
    draw(i) = fin(origin + (i + 1) * GOLDEN)

The Cython kernel implements the same three lines in C; keep them in sync.

Variate conventions:
  * erasures: packet received iff (draw >> 11) * 2**-53 >= p
  * coefficients: draw & (q - 1), uniform because q divides 2**64
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64
_DOUBLE_SCALE = 1.0 / 9007199254740992.0  # 2**-53


def mix64(v):
    """splitmix64 finalizer, vectorised over uint64 arrays."""
    v = np.asarray(v, dtype=np.uint64)
    with np.errstate(over="ignore"):
        v = v ^ (v >> _U64(30))
        v = v * _MIX1
        v = v ^ (v >> _U64(27))
        v = v * _MIX2
        v = v ^ (v >> _U64(31))
    return v


def stream_origins(seed: int, base_trial: int, trials: int) -> np.ndarray:
    """Per-trial stream origins for trials [base_trial, base_trial + trials)."""
    idx = np.arange(base_trial, base_trial + trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        u0 = mix64(idx * GOLDEN + GOLDEN)
        return mix64(_U64(seed & 0xFFFFFFFFFFFFFFFF) + u0)


def draws(origins: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Variates at the given stream positions; broadcasts origins x positions."""
    pos = np.asarray(positions, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(origins[..., None] + (pos + _U64(1)) * GOLDEN)


def received_mask(raw: np.ndarray, p: float) -> np.ndarray:
    """Decode erasure variates: True where the packet survives."""
    u = (raw >> _U64(11)).astype(np.float64) * _DOUBLE_SCALE
    return u >= p


def derive_seed(seed: int, index: int) -> int:
    """A decorrelated child seed, for independent experiment configurations."""
    return int(mix64(_U64(seed & 0xFFFFFFFFFFFFFFFF) ^ mix64(_U64(index) + GOLDEN)))
