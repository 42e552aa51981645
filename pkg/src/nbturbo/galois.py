"""GF(2^m) arithmetic for 1 <= m <= 8.

Field elements are integers in [0, 2^m) whose binary digits are polynomial
coefficients over GF(2).  Addition is bitwise XOR; multiplication runs
through discrete log / antilog tables built from a primitive polynomial.

Default primitive polynomials (bit-mask encoding, degree m):
    m=1: 0x3    m=2: 0x7    m=3: 0xB    m=4: 0x13
    m=5: 0x25   m=6: 0x43   m=7: 0x89   m=8: 0x11D
"""

from __future__ import annotations

import numpy as np

DEFAULT_PRIMITIVE_POLYS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
}


class NotPrimitiveError(ValueError):
    """Raised when the supplied polynomial does not generate GF(2^m)*."""


class Field:
    """Arithmetic context for GF(2^m), q = 2^m.

    Parameters
    ----------
    m : extension degree, 1..8
    prim_poly : primitive polynomial bit-mask of degree m; defaults to the
        table above when omitted.
    """

    def __init__(self, m: int, prim_poly: int | None = None):
        if not 1 <= m <= 8:
            raise ValueError(f"extension degree m={m} outside supported range 1..8")
        if prim_poly is None:
            prim_poly = DEFAULT_PRIMITIVE_POLYS[m]
        if prim_poly.bit_length() != m + 1:
            raise NotPrimitiveError(
                f"prim_poly=0x{prim_poly:X} does not have degree {m}"
            )
        self.m = m
        self.q = 1 << m
        self.prim_poly = prim_poly

        # exp table over a double period so mul can skip one modular reduction
        exp = np.zeros(2 * (self.q - 1), dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        val = 1
        alpha = 2 if m > 1 else 1
        for i in range(self.q - 1):
            if val == 1 and i > 0:
                raise NotPrimitiveError(
                    f"prim_poly=0x{prim_poly:X} is not primitive: x has order {i}"
                )
            exp[i] = val
            log[val] = i
            val = self._mul_slow(val, alpha)
        if val != 1:
            # x never returned to 1 => polynomial is reducible
            raise NotPrimitiveError(f"prim_poly=0x{prim_poly:X} is reducible")
        exp[self.q - 1 :] = exp[: self.q - 1]
        self._exp = exp
        self._log = log

        # Dense q x q product table; 64 KiB at q=256, shared read-only.
        idx = np.arange(self.q)
        la, lb = np.meshgrid(log, log, indexing="ij")
        table = exp[(la + lb) % (self.q - 1)]
        table[0, :] = 0
        table[:, 0] = 0
        self.mul_table = table
        self.inv_table = np.zeros(self.q, dtype=np.int64)
        self.inv_table[1:] = exp[(self.q - 1) - log[1:]]
        # mul_table rows double as scalar-multiplication permutations of
        # element indices: mul_table[a] maps w -> a*w.
        self._idx = idx

    def _mul_slow(self, a: int, b: int) -> int:
        """Carry-less multiply mod prim_poly; used only to build tables."""
        p = 0
        for _ in range(self.m):
            if b & 1:
                p ^= a
            a <<= 1
            if a & self.q:
                a ^= self.prim_poly
            b >>= 1
        return p

    # scalar ops ---------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return int(self._exp[(self._log[a] * e) % (self.q - 1)])

    # vectorized ops -----------------------------------------------------

    def mul_arr(self, a, b):
        """Element-wise product of two integer arrays of field elements."""
        return self.mul_table[np.asarray(a), np.asarray(b)]

    def prod(self, arr) -> int:
        out = 1
        for a in np.asarray(arr).ravel():
            out = self.mul(out, int(a))
        return out

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and other.m == self.m
            and other.prim_poly == self.prim_poly
        )

    def __hash__(self):
        return hash((self.m, self.prim_poly))

    def __repr__(self):
        return f"Field(m={self.m}, prim_poly=0x{self.prim_poly:X})"
