"""Binary-antipodal AWGN channel: modulation, noise, and symbol pmfs.

Each field symbol is sent as m antipodal bits of unit energy (bit 0 -> +1,
LSB first).  With one-sided noise density N0 and information rate r bits
per channel bit, the per-dimension noise variance is
sigma^2 = N0/2 = 1 / (2 r Eb/N0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import pmf as pm
from .construction import CodeSpec, combine_mr
from .galois import Field


@dataclass(frozen=True)
class ChannelModel:
    ebno_db: float
    rate_bits: float

    @property
    def ebno_linear(self) -> float:
        return 10.0 ** (self.ebno_db / 10.0)

    @property
    def sigma2(self) -> float:
        s2 = 1.0 / (2.0 * self.rate_bits * self.ebno_linear)
        if not s2 > 0.0:
            raise ValueError("noise variance must be positive")
        return s2


@lru_cache(maxsize=None)
def _bipolar_table(m: int) -> np.ndarray:
    """(q, m) matrix of the antipodal bit values of each symbol, LSB first."""
    q = 1 << m
    bits = (np.arange(q)[:, None] >> np.arange(m)[None, :]) & 1
    return (1.0 - 2.0 * bits).astype(np.float64)


def modulate(f: Field, symbols: np.ndarray) -> np.ndarray:
    """Map symbols to an (n, m) array of +/-1 channel inputs."""
    return _bipolar_table(f.m)[np.asarray(symbols)]


def demodulate(f: Field, y: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-symbol pmfs from noisy antipodal observations.

    y: (..., m) observations; result (..., q) with
    P[w] proportional to exp(sum_b y_b * x_b(w) / sigma2), computed in the
    log domain so near-noiseless observations stay finite.
    """
    table = _bipolar_table(f.m)
    scores = np.asarray(y) @ table.T / sigma2
    scores -= scores.max(axis=-1, keepdims=True)
    p = np.exp(scores)
    return pm.normalize(p)


def transmit_frame(spec: CodeSpec, codeword: np.ndarray, sigma2: float,
                   rng) -> np.ndarray:
    """Send one codeword; return decoder-facing pmfs per codeword position.

    Punctured positions consume no channel use and come back uniform;
    multiplicative-repetition replicas are fused into their base symbol's
    pmf before placement.
    """
    from .encoding import transmitted_symbols

    f = spec.field
    tx = transmitted_symbols(spec, codeword)
    x = modulate(f, tx)
    y = x + rng.normal(0.0, np.sqrt(sigma2), size=x.shape)
    pmfs = demodulate(f, y, sigma2)
    n_base = spec.n_transmitted_base
    if spec.mr_factor > 1:
        pmfs = combine_mr(f, pmfs, n_base, spec.mr_multipliers)
    out = np.full((spec.n_symbols, f.q), 1.0 / f.q)
    out[spec.transmitted_indices] = pmfs
    return out
