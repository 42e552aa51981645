"""FFT-based belief propagation over the non-binary Tanner graph.

Messages are pmfs over the field; check-node updates run in the
Walsh-Hadamard domain after each edge's message is pushed through the
scalar-multiplication permutation of its coefficient, enforcing
sum_j h_j c_j = 0.  The decoder is vectorized over a leading frame axis so
Monte Carlo batches share every transform; converged frames drop out of
the working set after each iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pmf as pm
from .construction import SparseFieldMatrix
from .galois import Field


@dataclass
class TannerGraph:
    """Edge-oriented view of a parity-check matrix, grouped by check node.

    Edges are ordered check-major (check c owns slots [c*dc, (c+1)*dc)),
    which requires a uniform check degree; all constructions here are
    (dv=2, dc=3) or (dv=2, dc=4).  Variable degrees of 1 or 2 are allowed
    (degree 1 occurs in cycle-free toy subgraphs); a degree-1 variable's
    sibling slot points at a virtual always-uniform message row at index E.
    """

    field: Field
    n_vn: int
    n_cn: int
    dc: int
    vn: np.ndarray  # (E,) variable-node index of each edge
    cn: np.ndarray  # (E,) check-node index of each edge
    coef: np.ndarray  # (E,) field coefficient of each edge
    sib: np.ndarray  # (E,) other edge of the same VN, or E if none
    vn_edges: np.ndarray  # (n_vn, 2) edge slots of each VN (E pads deg-1)
    scatter: np.ndarray  # (E, q) gather map applying h (c-pmf -> t-pmf)
    gather: np.ndarray  # (E, q) gather map undoing h (t-pmf -> c-pmf)

    @classmethod
    def from_matrix(cls, h: SparseFieldMatrix, f: Field) -> "TannerGraph":
        n_cn, n_vn = h.shape
        deg = np.bincount(h.row, minlength=n_cn)
        if len(set(deg.tolist())) != 1:
            raise ValueError("check degrees are not uniform")
        dc = int(deg[0])
        vdeg = np.bincount(h.col, minlength=n_vn)
        if np.any((vdeg < 1) | (vdeg > 2)):
            raise ValueError("variable degrees must be 1 or 2")
        order = np.lexsort((h.col, h.row))
        cn = h.row[order]
        vn = h.col[order]
        coef = h.val[order]
        n_edges = len(vn)
        e_of_vn = [[] for _ in range(n_vn)]
        for e, v in enumerate(vn):
            e_of_vn[v].append(e)
        vn_edges = np.full((n_vn, 2), n_edges, dtype=np.int64)
        sib = np.full(n_edges, n_edges, dtype=np.int64)
        for v, edges in enumerate(e_of_vn):
            vn_edges[v, : len(edges)] = edges
            if len(edges) == 2:
                sib[edges[0]] = edges[1]
                sib[edges[1]] = edges[0]
        # t = h*c: pmf_t[w] = pmf_c[inv(h) w]; undoing it reads pmf_t[h w]
        scatter = f.mul_table[f.inv_table[coef]]
        gather = f.mul_table[coef]
        return cls(f, n_vn, n_cn, dc, vn, cn, coef, sib, vn_edges,
                   scatter, gather)


@dataclass
class BpResult:
    hard: np.ndarray  # (B, n_vn) symbol decisions
    iterations: np.ndarray  # (B,) iterations used (max_iter if not converged)
    converged: np.ndarray  # (B,) bool
    underflow_events: int = 0

    def squeeze(self):
        """Single-frame convenience view."""
        return BpResult(self.hard[0], int(self.iterations[0]),
                        bool(self.converged[0]), self.underflow_events)


def syndrome_check(graph: TannerGraph, hard: np.ndarray):
    """Field syndrome of hard decisions; returns (all_zero, failing_checks).

    hard may be (n_vn,) or (B, n_vn); failing checks come back as a bool
    array over checks with the same leading shape.
    """
    f = graph.field
    hard = np.asarray(hard)
    single = hard.ndim == 1
    h2 = hard[None, :] if single else hard
    prods = f.mul_table[graph.coef[None, :], h2[:, graph.vn]]
    grouped = prods.reshape(h2.shape[0], graph.n_cn, graph.dc)
    synd = np.bitwise_xor.reduce(grouped, axis=2)
    failing = synd != 0
    if single:
        return not failing[0].any(), failing[0]
    return ~failing.any(axis=1), failing


def _cn_update(graph: TannerGraph, m_vc: np.ndarray, method: str) -> np.ndarray:
    """All check-to-variable messages for one flooding iteration."""
    B, E, q = m_vc.shape
    scaled = np.take_along_axis(m_vc, graph.scatter[None, :, :], axis=2)
    if method == "wht":
        spec = pm.wht(scaled).reshape(B, graph.n_cn, graph.dc, q)
        loo = np.empty_like(spec)
        if graph.dc == 3:
            np.multiply(spec[:, :, 1, :], spec[:, :, 2, :], out=loo[:, :, 0, :])
            np.multiply(spec[:, :, 0, :], spec[:, :, 2, :], out=loo[:, :, 1, :])
            np.multiply(spec[:, :, 0, :], spec[:, :, 1, :], out=loo[:, :, 2, :])
        else:
            # prefix/suffix products leave one edge out without division
            pre = np.ones((B, graph.n_cn, q), dtype=m_vc.dtype)
            for j in range(graph.dc):
                loo[:, :, j, :] = pre
                if j < graph.dc - 1:
                    pre = pre * spec[:, :, j, :]
            suf = np.ones((B, graph.n_cn, q), dtype=m_vc.dtype)
            for j in range(graph.dc - 1, -1, -1):
                loo[:, :, j, :] = loo[:, :, j, :] * suf
                if j > 0:
                    suf = suf * spec[:, :, j, :]
        out = pm.iwht(loo.reshape(B, E, q))
        np.maximum(out, 0.0, out=out)  # clip transform round-off
    elif method == "direct":
        grouped = scaled.reshape(B, graph.n_cn, graph.dc, q)
        loo = np.empty_like(grouped)
        for j in range(graph.dc):
            acc = None
            for k in range(graph.dc):
                if k == j:
                    continue
                acc = grouped[:, :, k, :] if acc is None else \
                    pm.convolve_direct(acc, grouped[:, :, k, :])
            loo[:, :, j, :] = acc
        out = loo.reshape(B, E, q)
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.take_along_axis(out, graph.gather[None, :, :], axis=2)


def _safe_rows(x: np.ndarray, normalize: bool = True) -> int:
    """Normalize rows in place; all-zero rows become uniform.  Returns the
    number of rows that underflowed.  With normalize=False only the
    zero-row repair runs (message-passing is scale-invariant per row, so
    freshly recomputed products may skip the division)."""
    s = x.sum(axis=-1, keepdims=True)
    bad = s[..., 0] <= 0.0
    n_bad = int(bad.sum())
    if n_bad:
        x[bad] = 1.0
        if normalize:
            s = x.sum(axis=-1, keepdims=True)
    if normalize:
        x /= s
    return n_bad


def bp_decode(graph: TannerGraph, channel_pmfs: np.ndarray,
              max_iter: int = 200, method: str = "wht",
              dtype=np.float64) -> BpResult:
    """Flooding belief propagation with per-frame syndrome early exit.

    channel_pmfs: (n_vn, q) for one frame or (B, n_vn, q) for a batch;
    punctured variables carry uniform rows.  An edge whose update
    underflows to zero is replaced by a uniform message and counted in
    underflow_events.
    """
    single = channel_pmfs.ndim == 2
    chan = np.asarray(channel_pmfs, dtype=dtype)
    if single:
        chan = chan[None]
    B, n_vn, q = chan.shape
    if n_vn != graph.n_vn:
        raise ValueError("channel pmf count does not match graph")

    hard = np.empty((B, n_vn), dtype=np.int64)
    iters = np.full(B, max_iter, dtype=np.int64)
    conv = np.zeros(B, dtype=bool)
    active = np.arange(B)
    n_edges = len(graph.vn)
    m_cv = np.full((B, n_edges + 1, q), 1.0 / q, dtype=dtype)
    chan_act = chan
    chan_edges = chan_act[:, graph.vn, :]
    underflows = 0

    for it in range(1, max_iter + 1):
        m_vc = chan_edges * m_cv[:, graph.sib, :]
        underflows += _safe_rows(m_vc, normalize=False)
        m_cv_body = _cn_update(graph, m_vc, method)
        underflows += _safe_rows(m_cv_body)
        m_cv[:, :n_edges, :] = m_cv_body

        app = chan_act * np.multiply(
            m_cv[:, graph.vn_edges[:, 0], :], m_cv[:, graph.vn_edges[:, 1], :]
        )
        dec = np.argmax(app, axis=2)
        ok, _ = syndrome_check(graph, dec)

        if ok.any():
            done = active[ok]
            hard[done] = dec[ok]
            iters[done] = it
            conv[done] = True
            keep = ~ok
            if not keep.any():
                active = active[:0]
                break
            active = active[keep]
            chan_act = chan_act[keep]
            chan_edges = chan_edges[keep]
            m_cv = m_cv[keep]
        if it == max_iter:
            # best-effort decisions for frames that never converged
            hard[active] = dec[~ok] if ok.any() else dec
    return BpResult(hard, iters, conv, underflows)
