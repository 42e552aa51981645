"""Probability-mass vectors over the additive group of GF(2^m).

A pmf is a plain numpy array whose last axis has length q = 2^m and is
indexed by field element.  All operations broadcast over leading axes, so
the same kernels serve single messages, whole frames, and batches of
frames.  Convolution is over the XOR group and is diagonalized by the
Walsh-Hadamard transform, giving the O(q log q) fast path; the direct
O(q^2) sum is kept as an independent reference backend.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .galois import Field


class PmfUnderflowError(FloatingPointError):
    """A pmf vanished entirely; signals numerical underflow upstream."""


# Optional instrumentation: counts scalar add/sub operations performed by
# the WHT butterflies so complexity claims can be asserted in tests.
class ButterflyCounter:
    def __init__(self):
        self.adds = 0
        self.active = False

    def __enter__(self):
        self.adds = 0
        self.active = True
        return self

    def __exit__(self, *exc):
        self.active = False
        return False


butterfly_counter = ButterflyCounter()


def uniform(q: int) -> np.ndarray:
    return np.full(q, 1.0 / q)


def delta(q: int, w: int) -> np.ndarray:
    out = np.zeros(q)
    out[w] = 1.0
    return out


def normalize(p: np.ndarray) -> np.ndarray:
    """Scale so the last axis sums to 1; all-zero vectors are an error."""
    s = p.sum(axis=-1, keepdims=True)
    if np.any(s <= 0.0):
        raise PmfUnderflowError("cannot normalize an all-zero pmf")
    return p / s


def permute_scalar(field: Field, p: np.ndarray, a: int) -> np.ndarray:
    """Pmf of a*X when X ~ p: out[a*w] = p[w].  Requires a != 0."""
    if a == 0:
        raise ValueError("scalar 0 does not induce a permutation")
    # out[v] = p[inv(a) * v]
    return np.take(p, field.mul_table[field.inv_table[a]], axis=-1)


def permute_scalar_inv(field: Field, p: np.ndarray, a: int) -> np.ndarray:
    """Inverse of permute_scalar: out[w] = p[a*w]."""
    if a == 0:
        raise ValueError("scalar 0 does not induce a permutation")
    return np.take(p, field.mul_table[a], axis=-1)


@lru_cache(maxsize=None)
def _hadamard(n: int, dtype_name: str = "float64") -> np.ndarray:
    i = np.arange(n)
    anded = i[:, None] & i[None, :]
    bits = np.zeros((n, n), dtype=np.int64)
    while anded.any():
        bits += anded & 1
        anded >>= 1
    return np.where(bits % 2 == 0, 1.0, -1.0).astype(dtype_name)


def _wht_butterfly(x: np.ndarray) -> np.ndarray:
    q = x.shape[-1]
    y = np.array(x, copy=True)
    if not np.issubdtype(y.dtype, np.floating):
        y = y.astype(np.float64)
    h = 1
    while h < q:
        z = y.reshape(-1, q // (2 * h), 2, h)
        z0 = z[:, :, 0, :]
        z1 = z[:, :, 1, :]
        z0 += z1
        z1 *= -2.0
        z1 += z0
        if butterfly_counter.active:
            butterfly_counter.adds += y.size
        h *= 2
    return y


def _wht_kron(x: np.ndarray) -> np.ndarray:
    """Transform as H_A (x) H_B acting on an (A, B) reshape: two batched
    matrix products, which the BLAS runs much faster than strided
    butterflies on large batches."""
    q = x.shape[-1]
    a = 1 << (q.bit_length() - 1) // 2
    b = q // a
    dt = x.dtype.name
    rows = x.reshape(-1, a, b)
    t = rows @ _hadamard(b, dt)
    t = np.matmul(_hadamard(a, dt), t)
    return t.reshape(x.shape)


def wht(x: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis (length q = 2^m).

    X[v] = sum_w x[w] * (-1)^<w,v> with <w,v> the GF(2) inner product of
    the bit representations.  Not normalized.  Large batches go through a
    BLAS-backed Kronecker factorization; single vectors, small fields, and
    instrumented runs use the butterfly network, whose additions the
    counter tallies (exactly q*log2(q) per length-q transform).
    """
    q = x.shape[-1]
    if q & (q - 1):
        raise ValueError(f"WHT length {q} is not a power of two")
    x = np.asarray(x)
    if butterfly_counter.active or q < 16 or x.size <= 4 * q:
        return _wht_butterfly(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(np.float64)
    return _wht_kron(x)


def iwht(s: np.ndarray) -> np.ndarray:
    """Inverse WHT: forward transform scaled by 1/q."""
    return wht(s) / s.shape[-1]


def convolve_direct(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """XOR-group convolution by the direct O(q^2) sum (reference backend)."""
    q = p.shape[-1]
    if r.shape[-1] != q:
        raise ValueError("pmf length mismatch")
    idx = np.arange(q)
    xor = idx[:, None] ^ idx[None, :]
    # out[..., w] = sum_v p[..., v] * r[..., w ^ v]
    return np.einsum("...v,...vw->...w", p, r[..., xor])


def convolve(p: np.ndarray, r: np.ndarray, method: str = "wht") -> np.ndarray:
    """XOR-group convolution: out[w] = sum_v p[v] * r[w xor v]."""
    if p.shape[-1] != r.shape[-1]:
        raise ValueError("pmf length mismatch")
    if method == "direct":
        return convolve_direct(p, r)
    if method != "wht":
        raise ValueError(f"unknown convolution method {method!r}")
    return iwht(wht(p) * wht(r))
