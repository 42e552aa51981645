"""Systematic encoders for both constructions, with circular-state
(tail-biting) initialization of the memory-1 accumulators."""

from __future__ import annotations

import numpy as np

from .construction import CodeSpec
from .galois import Field


def accumulate(f: Field, u, g, fb, state: int = 0) -> np.ndarray:
    """Run p[i] = g[i]*u[i] + fb[i]*p[i-1] from the given initial state."""
    K = len(u)
    p = np.empty(K, dtype=np.int64)
    s = state
    for i in range(K):
        s = f.mul_table[g[i], u[i]] ^ f.mul_table[fb[i], s]
        p[i] = s
    return p


def accumulate_tailbiting(f: Field, u, g, fb) -> np.ndarray:
    """Accumulator output whose final state equals its initial state.

    Two passes: a zero-state pass yields the zero-state response z; by
    linearity the circular state solves s*(1 + prod(fb)) = z[K-1], which is
    singular exactly when prod(fb) = 1.
    """
    F = f.prod(fb)
    if F == 1:
        raise ValueError("product of feedback coefficients is 1: no circular state")
    z = accumulate(f, u, g, fb, state=0)
    s0 = f.div(int(z[-1]), 1 ^ F)
    return accumulate(f, u, g, fb, state=s0)


def accumulate_terminated(f: Field, u, g, fb):
    """Zero-start accumulator plus one forced step driving the state to 0.

    g and fb must have length len(u)+1; returns (u_ext, p) of length K+1
    where u_ext[K] is the termination symbol.  Internal helper for the
    terminated-trellis decoder oracle.
    """
    K = len(u)
    if len(g) != K + 1 or len(fb) != K + 1:
        raise ValueError("terminated encoding needs K+1 coefficient pairs")
    p_body = accumulate(f, u, g[:K], fb[:K], state=0)
    s = int(p_body[-1]) if K else 0
    u_term = f.mul(f.inv(int(g[K])), f.mul(int(fb[K]), s))
    p_term = f.mul_table[g[K], u_term] ^ f.mul_table[fb[K], s]
    assert p_term == 0
    u_ext = np.concatenate([np.asarray(u, dtype=np.int64), [u_term]])
    p = np.concatenate([p_body, [0]])
    return u_ext, p


def differentiate(f: Field, u, fb) -> np.ndarray:
    """Cyclic memory-1 non-recursive map: v[i] = u[i] + fb[i]*u[i-1]."""
    u = np.asarray(u, dtype=np.int64)
    return u ^ f.mul_table[np.asarray(fb), np.roll(u, 1)]


def encode_pccc(spec: CodeSpec, u) -> np.ndarray:
    """Codeword [u | p1 | p2]: two tail-biting accumulators, the second fed
    the interleaved message."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (spec.K,):
        raise ValueError(f"message must have {spec.K} symbols")
    f = spec.field
    p1 = accumulate_tailbiting(f, u, spec.g1, spec.f1)
    p2 = accumulate_tailbiting(f, u[spec.perm], spec.g2, spec.f2)
    return np.concatenate([u, p1, p2])


def encode_da(spec: CodeSpec, u) -> np.ndarray:
    """Codeword [u | p] (da12) or [u | p | v] (da13).

    Pipeline: v = cyclic differentiator of u; the accumulator input w is v
    rescaled and re-indexed so that w[perm[i]] = inv(g2[i]) * v[i]; then
    p = tail-biting accumulator of w with (g1, f1).  With this convention
    the da12 code coincides symbol-for-symbol with the V0-punctured
    parallel code built from the same coefficients and permutation.
    """
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (spec.K,):
        raise ValueError(f"message must have {spec.K} symbols")
    f = spec.field
    v = differentiate(f, u, spec.f2)
    w = np.empty(spec.K, dtype=np.int64)
    w[spec.perm] = f.mul_table[f.inv_table[spec.g2], v]
    p = accumulate_tailbiting(f, w, spec.g1, spec.f1)
    if spec.mode == "da12":
        return np.concatenate([u, p])
    return np.concatenate([u, p, v])


def encode(spec: CodeSpec, u) -> np.ndarray:
    if spec.mode == "pccc":
        return encode_pccc(spec, u)
    return encode_da(spec, u)


def transmitted_symbols(spec: CodeSpec, codeword: np.ndarray) -> np.ndarray:
    """Apply the puncturing plan and multiplicative repetition."""
    from .construction import apply_mr

    base = codeword[spec.transmitted_indices]
    if spec.mr_factor > 1:
        return apply_mr(spec.field, base, spec.mr_multipliers)
    return base
