"""Arithmetic in the binary extension fields GF(2^m) for 1 <= m <= 8.

Field elements are plain Python integers in ``[0, q)``, read as polynomials
over GF(2): bit ``i`` of the integer is the coefficient of ``x^i``.  Addition
is XOR.  Multiplication is carry-less polynomial multiplication reduced by a
fixed irreducible polynomial, precomputed into a full ``q x q`` table, so a
field costs O(q^2) to build once and every later operation is a lookup.

The table layout also gives vectorised row operations for free: indexing the
multiplication table with a scalar and a uint8 array scales a whole coding
vector in one numpy call, which is what the elimination code relies on.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import ConfigError

#: Default reduction polynomial per extension degree, bit i = coefficient of
#: x^i.  Degree 4 is x^4+x+1 and degree 8 is x^8+x^4+x^3+x+1; the others are
#: the usual low-weight choices.  Every entry is verified irreducible when the
#: field is built (an inverse must exist for each nonzero element).
DEFAULT_POLYNOMIALS = {
    1: 0b11,         # x + 1
    2: 0b111,        # x^2 + x + 1
    3: 0b1011,       # x^3 + x + 1
    4: 0b10011,      # x^4 + x + 1
    5: 0b100101,     # x^5 + x^2 + 1
    6: 0b1000011,    # x^6 + x + 1
    7: 0b10001001,   # x^7 + x^3 + 1
    8: 0b100011011,  # x^8 + x^4 + x^3 + x + 1
}


class GF:
    """One binary extension field with table-driven multiplication.

    Parameters
    ----------
    q : int
        Field order, a power of two between 2 and 256.
    poly : int, optional
        Reduction polynomial override, encoded with bit i as the coefficient
        of x^i.  Must have degree exactly log2(q) and be irreducible over
        GF(2); the default is taken from ``DEFAULT_POLYNOMIALS``.

    Attributes
    ----------
    q, m : int
        Field order and extension degree.
    poly : int
        Reduction polynomial in use.
    mul_table : numpy.ndarray
        ``(q, q)`` uint8 table, ``mul_table[a, b] = a * b``.
    inv_table : numpy.ndarray
        ``(q,)`` uint8 table of multiplicative inverses; entry 0 is unused.
    """

    def __init__(self, q: int, poly: int | None = None):
        if not isinstance(q, int) or q < 2 or q & (q - 1):
            raise ConfigError(f"field order must be a power of two, got {q!r}")
        m = q.bit_length() - 1
        if m > 8:
            raise ConfigError(f"field order {q} above 256 is not supported")
        if poly is None:
            poly = DEFAULT_POLYNOMIALS[m]
        if poly.bit_length() - 1 != m:
            raise ConfigError(
                f"reduction polynomial {poly:#x} must have degree {m} for q={q}"
            )
        self.q = q
        self.m = m
        self.poly = poly
        self.mul_table, self.inv_table = self._build_tables()

    def _build_tables(self):
        q, m, poly = self.q, self.m, self.poly
        a = np.arange(q, dtype=np.uint32)[:, None]
        b = np.arange(q, dtype=np.uint32)[None, :]
        # Carry-less product, then reduction from the top bit down.
        prod = np.zeros((q, q), dtype=np.uint32)
        for bit in range(m):
            prod ^= np.where((b >> bit) & 1, a << bit, 0)
        for deg in range(2 * m - 2, m - 1, -1):
            prod ^= np.where((prod >> deg) & 1, np.uint32(poly << (deg - m)), 0)
        mul = prod.astype(np.uint8)

        inv = np.zeros(q, dtype=np.uint8)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols
        if not np.all(inv[1:] > 0):
            raise ConfigError(
                f"polynomial {poly:#x} is not irreducible over GF(2): "
                "some nonzero element has no inverse"
            )
        return mul, inv

    # -- scalar operations -------------------------------------------------

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    # Characteristic 2: subtraction is addition.
    sub = add

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return int(self.mul_table[a, self.inv(b)])

    # -- vector operations --------------------------------------------------

    def scale_row(self, c: int, row: np.ndarray) -> np.ndarray:
        """Return ``c * row`` elementwise for a uint8 vector of elements."""
        return self.mul_table[c, row]

    def check_elements(self, arr: np.ndarray) -> None:
        if arr.size and int(arr.max(initial=0)) >= self.q:
            raise ConfigError(
                f"vector contains values >= q={self.q}; not field elements"
            )

    def __repr__(self):
        return f"GF({self.q}, poly={self.poly:#x})"


@functools.lru_cache(maxsize=None)
def get_field(q: int) -> GF:
    """Shared field instance for the given order (default polynomial)."""
    return GF(q)
