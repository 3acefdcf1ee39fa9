"""Pure-NumPy Monte-Carlo backend.

Implements the same three counting kernels as the compiled extension and the
same stream contract (see ``_rng``), so its counts are bit-identical to the
compiled backend's for any seed and trial range.  Trials are processed in
chunks and the Gaussian eliminations are vectorised across the chunk: the
matrices of every trial advance through the same pivot-column schedule
simultaneously, with per-trial active-row masks.
"""

from __future__ import annotations

import numpy as np

from ._rng import draws, received_mask, stream_origins

_CHUNK = 4096
_U64 = np.uint64


def _gf2_pack(bits: np.ndarray) -> np.ndarray:
    """Pack (T, R, k) 0/1 uint64 coefficients into (T, R, words) bitsets."""
    t, r, k = bits.shape
    words = (k + 63) // 64
    m = np.zeros((t, r, words), dtype=np.uint64)
    for c in range(k):
        m[:, :, c >> 6] |= bits[:, :, c] << _U64(c & 63)
    return m


def _gf2_ranks(m, col_hi):
    """Rank of every trial's matrix in one vectorised elimination."""
    t, r, _ = m.shape
    pivots = np.zeros(t, dtype=np.int64)
    if r == 0:
        return pivots
    active = np.ones((t, r), dtype=bool)
    rows = np.arange(t)
    one = _U64(1)
    for c in range(col_hi):
        cand = (((m[:, :, c >> 6] >> _U64(c & 63)) & one) != 0) & active
        has = cand.any(axis=1)
        pidx = cand.argmax(axis=1)
        prow = m[rows, pidx]
        cand[rows, pidx] = False
        m ^= cand[:, :, None].astype(np.uint64) * prow[:, None, :]
        active[rows, pidx] &= ~has
        pivots += has
    return pivots


def _gfq_ranks(m, col_hi, mul, inv):
    t, r, _ = m.shape
    pivots = np.zeros(t, dtype=np.int64)
    if r == 0:
        return pivots
    active = np.ones((t, r), dtype=bool)
    rows = np.arange(t)
    for c in range(col_hi):
        col = m[:, :, c]
        cand = (col != 0) & active
        has = cand.any(axis=1)
        pidx = cand.argmax(axis=1)
        prow = m[rows, pidx]
        cand[rows, pidx] = False
        factors = mul[col, inv[prow[:, c]][:, None]]
        contrib = mul[factors[:, :, None], prow[:, None, :]]
        m ^= np.where(cand[:, :, None], contrib, 0)
        active[rows, pidx] &= ~has
        pivots += has
    return pivots


def _coeff_matrix(origins, first, n_rows, width, q, mul):
    """Coefficient matrix block for one layer/window across a trial chunk."""
    if n_rows == 0:
        t = origins.shape[0]
        if q == 2:
            return np.zeros((t, 0, 1), dtype=np.uint64)
        return np.zeros((t, 0, width), dtype=np.uint8)
    pos = np.arange(first, first + n_rows * width, dtype=np.uint64)
    raw = draws(origins, pos)
    if q == 2:
        return _gf2_pack((raw & _U64(1)).reshape(-1, n_rows, width))
    return (raw & _U64(q - 1)).astype(np.uint8).reshape(-1, n_rows, width)


def full_rank_count(k, r, q, trials, seed, base, mul, inv):
    count = 0
    done = 0
    while done < trials:
        t = min(_CHUNK, trials - done)
        origins = stream_origins(seed, base + done, t)
        m = _coeff_matrix(origins, 0, r, k, q, mul)
        if q == 2:
            total = _gf2_ranks(m, k)
        else:
            total = _gfq_ranks(m, k, mul, inv)
        count += int((total == k).sum())
        done += t
    return count


def now_joint_counts(k_arr, n_arr, p, q, trials, seed, base, mul, inv):
    layers = len(k_arr)
    counts = np.zeros(layers, dtype=np.int64)
    n_tot = int(np.sum(n_arr))
    row_off = np.concatenate(([0], np.cumsum(n_arr)))
    coeff_off = n_tot + np.concatenate(([0], np.cumsum(n_arr * k_arr)))
    done = 0
    while done < trials:
        t = min(_CHUNK, trials - done)
        origins = stream_origins(seed, base + done, t)
        recv = (
            received_mask(draws(origins, np.arange(n_tot, dtype=np.uint64)), p)
            if n_tot
            else np.zeros((t, 0), dtype=bool)
        )
        joint = np.ones(t, dtype=bool)
        for i in range(layers):
            k_i, n_i = int(k_arr[i]), int(n_arr[i])
            if n_i < k_i:
                break
            m = _coeff_matrix(origins, int(coeff_off[i]), n_i, k_i, q, mul)
            mask = recv[:, row_off[i] : row_off[i] + n_i]
            if q == 2:
                m *= mask[:, :, None].astype(np.uint64)
                total = _gf2_ranks(m, k_i)
            else:
                m *= mask[:, :, None].astype(np.uint8)
                total = _gfq_ranks(m, k_i, mul, inv)
            joint &= total == k_i
            counts[i] += int(joint.sum())
            if not joint.any():
                break
        done += t
    return counts


def ew_window_counts(kk_arr, nn_arr, p, q, trials, seed, base, mul, inv):
    """Per-window decode counts under expanding-window coding.

    Window ``i`` is decoded when the received rows of windows ``1..i``
    reach full column rank over its ``kk_arr[i]`` symbols.  Later windows
    are not consulted; they enter service-level metrics separately, since
    decoding a larger window always yields the smaller windows' data.
    """
    windows = len(kk_arr)
    counts = np.zeros(windows, dtype=np.int64)
    col_hi = int(kk_arr[-1])
    n_tot = int(np.sum(nn_arr))
    row_off = np.concatenate(([0], np.cumsum(nn_arr)))
    coeff_off = n_tot + np.concatenate(([0], np.cumsum(nn_arr * kk_arr)))
    words = (col_hi + 63) // 64
    done = 0
    while done < trials:
        t = min(_CHUNK, trials - done)
        origins = stream_origins(seed, base + done, t)
        recv = (
            received_mask(draws(origins, np.arange(n_tot, dtype=np.uint64)), p)
            if n_tot
            else np.zeros((t, 0), dtype=bool)
        )
        if q == 2:
            m = np.zeros((t, n_tot, words), dtype=np.uint64)
        else:
            m = np.zeros((t, n_tot, col_hi), dtype=np.uint8)
        for i in range(windows):
            n_i, width = int(nn_arr[i]), int(kk_arr[i])
            if n_i == 0:
                continue
            block = _coeff_matrix(origins, int(coeff_off[i]), n_i, width, q, mul)
            lo, hi = int(row_off[i]), int(row_off[i]) + n_i
            if q == 2:
                m[:, lo:hi, : block.shape[2]] = block
            else:
                m[:, lo:hi, :width] = block
        m *= recv[:, :, None].astype(m.dtype)
        for i in range(windows):
            hi, width = int(row_off[i + 1]), int(kk_arr[i])
            sub = m[:, :hi].copy()
            if q == 2:
                ranks = _gf2_ranks(sub, width)
            else:
                ranks = _gfq_ranks(sub, width, mul, inv)
            counts[i] += int((ranks == width).sum())
        done += t
    return counts
