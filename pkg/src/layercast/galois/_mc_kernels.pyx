# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Monte-Carlo counting kernels.

Same contract as ``_mc_fallback``: counter-based splitmix64 streams (one per
trial, see ``_rng`` for the reference definition) and identical counting
semantics, so both backends return bit-identical counts.  The hot loops run
without the GIL, which lets callers partition a trial range across threads.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t


cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double _DOUBLE_SCALE = 1.0 / 9007199254740992.0


cdef inline uint64_t _fin(uint64_t v) noexcept nogil:
    v ^= v >> 30
    v *= 0xBF58476D1CE4E5B9ULL
    v ^= v >> 27
    v *= 0x94D049BB133111EBULL
    v ^= v >> 31
    return v


cdef inline uint64_t _origin(uint64_t seed, uint64_t trial) noexcept nogil:
    return _fin(seed + _fin(trial * _GOLDEN + _GOLDEN))


cdef inline uint64_t _draw(uint64_t origin, uint64_t pos) noexcept nogil:
    return _fin(origin + (pos + 1) * _GOLDEN)


cdef inline bint _received(uint64_t origin, uint64_t pos, double p) noexcept nogil:
    return ((_draw(origin, pos) >> 11) * _DOUBLE_SCALE) >= p


# --- incremental rank, used by the per-layer and full-rank kernels ---------

cdef inline int _gf2_insert(uint64_t* basis, int* piv, int k, int words,
                            uint64_t* row, int rank) noexcept nogil:
    """Reduce ``row`` against the basis; append it as a pivot if nonzero."""
    cdef int c, w, j
    cdef uint64_t* b
    for c in range(k):
        if (row[c >> 6] >> (c & 63)) & 1ULL:
            if piv[c] >= 0:
                b = basis + piv[c] * words
                for j in range(c >> 6, words):
                    row[j] ^= b[j]
            else:
                piv[c] = rank
                b = basis + rank * words
                for j in range(words):
                    b[j] = row[j]
                return rank + 1
    return rank


cdef inline int _gfq_insert(uint8_t* basis, int* piv, int k, int stride,
                            uint8_t* row, int rank,
                            const uint8_t* mul, const uint8_t* inv,
                            int q) noexcept nogil:
    cdef int c, j
    cdef uint8_t v, f
    cdef uint8_t* b
    for c in range(k):
        v = row[c]
        if v:
            if piv[c] >= 0:
                b = basis + piv[c] * stride
                f = mul[v * q + inv[b[c]]]
                for j in range(c, k):
                    row[j] ^= mul[f * q + b[j]]
            else:
                piv[c] = rank
                b = basis + rank * stride
                for j in range(stride):
                    b[j] = row[j]
                return rank + 1
    return rank


def full_rank_count(long long k, long long r, int q, long long trials,
                    unsigned long long seed, unsigned long long base,
                    const uint8_t[:, ::1] mul, const uint8_t[::1] inv):
    cdef int ki = <int> k, ri = <int> r, qi = q
    cdef int words = (ki + 63) >> 6
    cdef int64_t count = 0, t
    cdef int rank, j, c, remaining
    cdef uint64_t orig, cbase
    cdef uint64_t[::1] b2 = np.zeros(max(ki, 1) * words, dtype=np.uint64)
    cdef uint64_t[::1] row2 = np.zeros(words, dtype=np.uint64)
    cdef uint8_t[::1] bq = np.zeros(max(ki, 1) * ki if qi != 2 else 1, dtype=np.uint8)
    cdef uint8_t[::1] rowq = np.zeros(max(ki, 1), dtype=np.uint8)
    cdef int[::1] piv = np.empty(max(ki, 1), dtype=np.intc)
    if ri < ki or ki == 0:
        return 0
    with nogil:
        for t in range(trials):
            orig = _origin(seed, base + t)
            rank = 0
            for c in range(ki):
                piv[c] = -1
            for j in range(ri):
                if rank == ki or rank + (ri - j) < ki:
                    break
                cbase = <uint64_t> (j * ki)
                if qi == 2:
                    for c in range(words):
                        row2[c] = 0
                    for c in range(ki):
                        row2[c >> 6] |= (_draw(orig, cbase + c) & 1ULL) << (c & 63)
                    rank = _gf2_insert(&b2[0], &piv[0], ki, words, &row2[0], rank)
                else:
                    for c in range(ki):
                        rowq[c] = <uint8_t> (_draw(orig, cbase + c) & (qi - 1))
                    rank = _gfq_insert(&bq[0], &piv[0], ki, ki, &rowq[0], rank,
                                       &mul[0, 0], &inv[0], qi)
            if rank == ki:
                count += 1
    return int(count)


def now_joint_counts(const int64_t[::1] k_arr, const int64_t[::1] n_arr,
                     double p, int q, long long trials,
                     unsigned long long seed, unsigned long long base,
                     const uint8_t[:, ::1] mul, const uint8_t[::1] inv):
    cdef int layers = k_arr.shape[0]
    cdef int qi = q
    counts_np = np.zeros(layers, dtype=np.int64)
    cdef int64_t[::1] counts = counts_np
    row_off_np = np.concatenate(([0], np.cumsum(np.asarray(n_arr)))).astype(np.int64)
    coeff_np = (row_off_np[-1] +
                np.concatenate(([0], np.cumsum(np.asarray(n_arr) * np.asarray(k_arr))))
                ).astype(np.int64)
    cdef int64_t[::1] row_off = row_off_np
    cdef int64_t[::1] coeff_off = coeff_np
    cdef int k_max = int(max(k_arr)) if layers else 0
    cdef int words_max = (k_max + 63) >> 6
    cdef uint64_t[::1] b2 = np.zeros(max(k_max, 1) * words_max, dtype=np.uint64)
    cdef uint64_t[::1] row2 = np.zeros(max(words_max, 1), dtype=np.uint64)
    cdef uint8_t[::1] bq = np.zeros(max(k_max, 1) * max(k_max, 1) if qi != 2 else 1,
                                    dtype=np.uint8)
    cdef uint8_t[::1] rowq = np.zeros(max(k_max, 1), dtype=np.uint8)
    cdef int[::1] piv = np.empty(max(k_max, 1), dtype=np.intc)
    cdef int64_t t
    cdef int li, j, c, ki, ni, words, rank
    cdef bint ok
    cdef uint64_t orig, cbase
    with nogil:
        for t in range(trials):
            orig = _origin(seed, base + t)
            for li in range(layers):
                ki = <int> k_arr[li]
                ni = <int> n_arr[li]
                if ni < ki:
                    break
                words = (ki + 63) >> 6
                rank = 0
                for c in range(ki):
                    piv[c] = -1
                for j in range(ni):
                    if rank == ki or rank + (ni - j) < ki:
                        break
                    if not _received(orig, <uint64_t> (row_off[li] + j), p):
                        continue
                    cbase = <uint64_t> (coeff_off[li] + j * ki)
                    if qi == 2:
                        for c in range(words):
                            row2[c] = 0
                        for c in range(ki):
                            row2[c >> 6] |= (_draw(orig, cbase + c) & 1ULL) << (c & 63)
                        rank = _gf2_insert(&b2[0], &piv[0], ki, words, &row2[0], rank)
                    else:
                        for c in range(ki):
                            rowq[c] = <uint8_t> (_draw(orig, cbase + c) & (qi - 1))
                        rank = _gfq_insert(&bq[0], &piv[0], ki, ki, &rowq[0], rank,
                                           &mul[0, 0], &inv[0], qi)
                if rank != ki:
                    break
                counts[li] += 1
    return counts_np


def ew_window_counts(const int64_t[::1] kk_arr, const int64_t[::1] nn_arr,
                     double p, int q, long long trials,
                     unsigned long long seed, unsigned long long base,
                     const uint8_t[:, ::1] mul, const uint8_t[::1] inv):
    """Window ``l`` decodes when the received rows of windows ``1..l`` reach
    full column rank over its ``kk_arr[l]`` symbols.  One growing elimination
    per trial, with the rank checked at each window boundary."""
    cdef int windows = kk_arr.shape[0]
    cdef int qi = q
    counts_np = np.zeros(windows, dtype=np.int64)
    cdef int64_t[::1] counts = counts_np
    cdef int col_hi = int(kk_arr[windows - 1])
    row_off_np = np.concatenate(([0], np.cumsum(np.asarray(nn_arr)))).astype(np.int64)
    coeff_np = (row_off_np[-1] +
                np.concatenate(([0], np.cumsum(np.asarray(nn_arr) * np.asarray(kk_arr))))
                ).astype(np.int64)
    cdef int64_t[::1] row_off = row_off_np
    cdef int64_t[::1] coeff_off = coeff_np
    cdef int words = (col_hi + 63) >> 6
    cdef uint64_t[::1] b2 = np.zeros(col_hi * words, dtype=np.uint64)
    cdef uint64_t[::1] row2 = np.zeros(words, dtype=np.uint64)
    cdef uint8_t[::1] bq = np.zeros(col_hi * col_hi if qi != 2 else 1, dtype=np.uint8)
    cdef uint8_t[::1] rowq = np.zeros(col_hi, dtype=np.uint8)
    cdef int[::1] piv = np.empty(col_hi, dtype=np.intc)
    cdef int64_t t
    cdef int li, j, c, width, rank
    cdef uint64_t orig, cbase
    with nogil:
        for t in range(trials):
            orig = _origin(seed, base + t)
            rank = 0
            for c in range(col_hi):
                piv[c] = -1
            for li in range(windows):
                width = <int> kk_arr[li]
                for j in range(<int> nn_arr[li]):
                    # surplus rows of a full-rank window reduce to zero
                    if rank == width:
                        break
                    if not _received(orig, <uint64_t> (row_off[li] + j), p):
                        continue
                    cbase = <uint64_t> (coeff_off[li] + j * width)
                    if qi == 2:
                        for c in range(words):
                            row2[c] = 0
                        for c in range(width):
                            row2[c >> 6] |= (_draw(orig, cbase + c) & 1ULL) << (c & 63)
                        rank = _gf2_insert(&b2[0], &piv[0], width, words,
                                           &row2[0], rank)
                    else:
                        for c in range(width):
                            rowq[c] = <uint8_t> (_draw(orig, cbase + c) & (qi - 1))
                        for c in range(width, col_hi):
                            rowq[c] = 0
                        rank = _gfq_insert(&bq[0], &piv[0], width, col_hi,
                                           &rowq[0], rank, &mul[0, 0], &inv[0], qi)
                if rank == width:
                    counts[li] += 1
    return counts_np
