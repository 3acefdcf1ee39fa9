"""Row reduction over the supported binary extension fields."""

from __future__ import annotations

import numpy as np

from .field import field_ops


def _as_matrix(matrix, q: int) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.int64)
    if m.ndim != 2:
        raise ValueError("coding matrix must be two-dimensional")
    if m.size and (m.min() < 0 or m.max() >= q):
        raise ValueError(f"matrix entries must lie in [0, {q})")
    return m.astype(np.uint8)


def rank(matrix, q: int) -> int:
    """Rank of ``matrix`` over GF(q) by Gaussian elimination.

    Entries must already be field elements (integers in ``[0, q)``).
    """
    gf = field_ops(q)
    m = _as_matrix(matrix, q)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return 0
    mul, inv = gf.mul_table, gf.inv_table
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i, c]:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        piv_inv = inv[m[r, c]]
        below = m[r + 1 :, c] != 0
        if below.any():
            factors = mul[m[r + 1 :, c][below], piv_inv]
            m[r + 1 :][below] ^= mul[factors[:, None], m[r][None, :]]
        r += 1
        if r == rows:
            break
    return r


def is_full_rank(matrix, q: int) -> bool:
    m = np.asarray(matrix)
    return rank(m, q) == min(m.shape)
