"""Finite-field arithmetic, rank computation and Monte-Carlo decode oracles."""

from .field import SUPPORTED_FIELD_SIZES, GaloisField, field_ops
from .linalg import is_full_rank, rank
from .montecarlo import (
    MonteCarloResult,
    active_backend,
    derive_seed,
    merge,
    simulate_ew_recovery,
    simulate_full_rank,
    simulate_now_recovery,
    split_trials,
)

__all__ = [
    "SUPPORTED_FIELD_SIZES",
    "GaloisField",
    "field_ops",
    "is_full_rank",
    "rank",
    "MonteCarloResult",
    "active_backend",
    "derive_seed",
    "merge",
    "simulate_ew_recovery",
    "simulate_full_rank",
    "simulate_now_recovery",
    "split_trials",
]
