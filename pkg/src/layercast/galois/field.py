"""Arithmetic tables for the binary extension fields used by the codec.

Only the four field sizes that appear in practice for random linear coding
over one byte or less are supported: GF(2), GF(4), GF(16) and GF(256).
Multiplication uses log/antilog tables built from a fixed generator
polynomial per extension degree.  Recovery statistics depend on the field
size alone, not on the choice of irreducible polynomial, so the conventional
polynomials are used.
"""

from __future__ import annotations

import numpy as np

SUPPORTED_FIELD_SIZES = (2, 4, 16, 256)

# Irreducible polynomial per extension degree, in integer bit notation.
# Degree 8 uses x^8 + x^4 + x^3 + x^2 + 1, the usual Reed-Solomon choice.
_IRREDUCIBLE = {
    1: 0b11,         # x + 1
    2: 0b111,        # x^2 + x + 1
    4: 0b10011,      # x^4 + x + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class GaloisField:
    """GF(2^w) arithmetic for w in {1, 2, 4, 8}.

    Addition is XOR.  ``mul_table`` and ``inv_table`` are dense uint8 lookup
    tables; the Monte-Carlo kernels consume them directly so that field
    arithmetic is defined in exactly one place.
    """

    def __init__(self, size: int):
        if size not in SUPPORTED_FIELD_SIZES:
            raise ValueError(
                f"unsupported field size {size!r}; expected one of {SUPPORTED_FIELD_SIZES}"
            )
        self.size = size
        self.degree = size.bit_length() - 1
        poly = _IRREDUCIBLE[self.degree]

        exp = np.zeros(2 * size, dtype=np.uint8)
        log = np.zeros(size, dtype=np.int32)
        x = 1
        for i in range(size - 1):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & size:
                x ^= poly
        # mirror so mul can index exp[log a + log b] without a modulo
        exp[size - 1 : 2 * (size - 1)] = exp[: size - 1]

        mul = np.zeros((size, size), dtype=np.uint8)
        nz = np.arange(1, size)
        mul[1:, 1:] = exp[log[nz][:, None] + log[nz][None, :]]
        inv = np.zeros(size, dtype=np.uint8)
        inv[exp[: size - 1]] = exp[(size - 1 - log[exp[: size - 1]]) % (size - 1)]

        self._exp = exp
        self._log = log
        self.mul_table = mul
        self.inv_table = inv
        for table in (self._exp, self._log, self.mul_table, self.inv_table):
            table.setflags(write=False)

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return int(self.inv_table[a])

    def __repr__(self) -> str:
        return f"GaloisField({self.size})"


_FIELDS: dict[int, GaloisField] = {}


def field_ops(size: int) -> GaloisField:
    """Return the shared arithmetic-table object for GF(size)."""
    if size not in _FIELDS:
        _FIELDS[size] = GaloisField(size)
    return _FIELDS[size]
