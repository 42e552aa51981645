"""Interleaver generators and the cycle-graph view of weight-2-column codes.

A code whose parity-check matrix has all column weights equal to 2 can be
drawn as a multigraph: one vertex per check equation, one edge per codeword
symbol, the edge joining the two checks its column touches.  Girth of that
graph (times two, for the Tanner graph) is the quantity the interleaver
generators try to maximize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Interleaver:
    """Length-K bijection i -> mapping[i] plus provenance metadata."""

    K: int
    mapping: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        if sorted(m.tolist()) != list(range(self.K)):
            raise ValueError("mapping is not a permutation of [0, K)")
        self.mapping = m

    def inverse(self) -> np.ndarray:
        inv = np.empty(self.K, dtype=np.int64)
        inv[self.mapping] = np.arange(self.K)
        return inv


@dataclass
class CycleGraph:
    """Multigraph with one vertex per check and one edge per symbol."""

    n_vertices: int
    edges: np.ndarray  # (E, 2) vertex pairs
    edge_labels: np.ndarray  # column index of each edge

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-vertex list of (edge_id, other_endpoint)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((e, v))
            adj[v].append((e, u))
        return adj


def relative_prime_interleaver(K: int, a: int, p: int) -> Interleaver:
    """mapping[j] = (a + p*j) mod K; requires gcd(p, K) = 1."""
    if math.gcd(p, K) != 1:
        raise ValueError(f"p={p} shares a factor with K={K}: not a bijection")
    mapping = (a + p * np.arange(K)) % K
    return Interleaver(K, mapping, "relative_prime", {"a": a, "p": p})


def _circ_dist(i, j, K):
    d = abs(int(i) - int(j))
    return min(d, K - d)


def measure_spread(mapping: np.ndarray) -> int:
    """min over index pairs of circular |i-j| + circular |pi(i)-pi(j)|."""
    K = len(mapping)
    best = K
    for i in range(K):
        for j in range(i + 1, K):
            s = _circ_dist(i, j, K) + _circ_dist(mapping[i], mapping[j], K)
            if s < best:
                best = s
    return best


def spread_interleaver(
    K: int, seed: int, s_target: int, restarts: int = 300
) -> Interleaver:
    """Random permutation with spread constraint, S-random style.

    Guarantees: for all i != j with circular |i-j| < s, also
    circ|i-j| + circ|mapping[i]-mapping[j]| >= s, where s is the achieved
    spread.  Requests around sqrt(K/2) are always constructible; larger
    targets are attempted and decremented on repeated construction failure,
    so the call always returns, recording the achieved value in
    params["achieved"].
    """
    rng = np.random.default_rng(seed)
    s = max(1, min(s_target, K))
    while True:
        for _ in range(restarts):
            mapping = _try_spread(K, s, rng)
            if mapping is not None:
                return Interleaver(
                    K,
                    mapping,
                    "spread",
                    {"seed": seed, "s_target": s_target, "achieved": s},
                )
        s -= 1
        if s <= 1:
            mapping = rng.permutation(K)
            return Interleaver(
                K, mapping, "spread", {"seed": seed, "s_target": s_target, "achieved": 1}
            )


def _try_spread(K, s, rng):
    mapping = np.full(K, -1, dtype=np.int64)
    free = list(rng.permutation(K))
    for i in range(K):
        placed = False
        for ci, cand in enumerate(free):
            ok = True
            # only earlier indices within the circular window can conflict
            for j in range(K):
                if mapping[j] < 0 or j == i:
                    continue
                din = _circ_dist(i, j, K)
                if din >= s:
                    continue
                if din + _circ_dist(cand, mapping[j], K) < s:
                    ok = False
                    break
            if ok:
                mapping[i] = cand
                free.pop(ci)
                placed = True
                break
        if not placed:
            return None
    return mapping


def build_cycle_graph(h) -> CycleGraph:
    """Graph of a parity-check matrix whose columns all have weight 2."""
    rows = np.asarray(h.row)
    cols = np.asarray(h.col)
    n_cols = h.shape[1]
    counts = np.bincount(cols, minlength=n_cols)
    if np.any(counts != 2):
        bad = int(np.argmax(counts != 2))
        raise ValueError(
            f"column {bad} has weight {int(counts[bad])}, expected exactly 2"
        )
    order = np.argsort(cols, kind="stable")
    r = rows[order].reshape(n_cols, 2)
    return CycleGraph(h.shape[0], r, np.arange(n_cols))


def girth(g: CycleGraph) -> int | None:
    """Length of the shortest cycle; None for an acyclic graph.

    BFS from every vertex; parallel edges register as 2-cycles.  Exact for
    unweighted multigraphs.
    """
    adj = g.adjacency()
    best = None
    for s in range(g.n_vertices):
        dist = [-1] * g.n_vertices
        par_edge = [-1] * g.n_vertices
        dist[s] = 0
        queue = [s]
        while queue:
            nxt = []
            for u in queue:
                for e, v in adj[u]:
                    if e == par_edge[u]:
                        continue
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        par_edge[v] = e
                        nxt.append(v)
                    else:
                        c = dist[u] + dist[v] + 1
                        if best is None or c < best:
                            best = c
            queue = nxt
    return best


def tanner_girth(g: CycleGraph) -> int | None:
    """Girth of the equivalent bipartite (Tanner) graph: twice the graph girth."""
    gg = girth(g)
    return None if gg is None else 2 * gg


def count_shortest_cycles(g: CycleGraph, cycle_len: int | None = None) -> int:
    """Number of distinct cycles of the girth length.

    For each edge e=(u,v): count shortest u-v paths of length girth-1 with e
    removed; every girth-cycle is seen once per each of its edges.
    """
    if cycle_len is None:
        cycle_len = girth(g)
    if cycle_len is None:
        return 0
    if cycle_len == 2:
        # parallel edge pairs
        pairs = {}
        n2 = 0
        for u, v in np.sort(g.edges, axis=1):
            key = (int(u), int(v))
            n2 += pairs.get(key, 0)
            pairs[key] = pairs.get(key, 0) + 1
        return n2
    adj = g.adjacency()
    total = 0
    for e0, (su, sv) in enumerate(g.edges):
        su, sv = int(su), int(sv)
        dist = {su: 0}
        cnt = {su: 1}
        queue = [su]
        d = 0
        while queue and d < cycle_len - 1:
            nxt = []
            for u in queue:
                for e, v in adj[u]:
                    if e == e0:
                        continue
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        cnt[v] = cnt[u]
                        nxt.append(v)
                    elif dist[v] == dist[u] + 1:
                        cnt[v] += cnt[u]
            queue = nxt
            d += 1
        if dist.get(sv) == cycle_len - 1:
            total += cnt[sv]
    return total // cycle_len


def pccc_cycle_edges(perm: np.ndarray) -> CycleGraph:
    """Cycle graph of the rate-1/3 parallel construction, from pi alone.

    Structure only: check i of the first branch is vertex i, of the second
    branch vertex K+i; systematic symbol j joins (j, K + inv_pi(j)); parity
    symbols chain each branch into a length-K ring.
    """
    K = len(perm)
    inv = np.empty(K, dtype=np.int64)
    inv[perm] = np.arange(K)
    edges = np.empty((3 * K, 2), dtype=np.int64)
    edges[:K, 0] = np.arange(K)
    edges[:K, 1] = K + inv
    edges[K : 2 * K, 0] = np.arange(K)
    edges[K : 2 * K, 1] = (np.arange(K) + 1) % K
    edges[2 * K :, 0] = K + np.arange(K)
    edges[2 * K :, 1] = K + (np.arange(K) + 1) % K
    return CycleGraph(2 * K, edges, np.arange(3 * K))


def girth_aware_interleaver(K: int, seed: int, trials: int) -> Interleaver:
    """Best-of-`trials` candidate permutation by cycle-graph girth.

    Candidates are uniform random permutations, with every fourth slot
    drawn from the spread generator instead (a spread of s forces all
    two-symbol cycles to length >= s + 2, which uniform sampling almost
    never achieves at moderate K).  Ranking: larger girth first, then
    fewer shortest cycles, then first drawn.  Candidates whose graph has
    parallel edges lose automatically (girth 2).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    s_cap = max(2, math.isqrt(2 * K))
    best_key = None
    best_mapping = None
    for t in range(trials):
        if t % 4 == 3:
            mapping = spread_interleaver(K, seed + 7919 * t, s_cap,
                                         restarts=40).mapping
        else:
            mapping = rng.permutation(K)
        g = pccc_cycle_edges(mapping)
        gg = girth(g)
        n_short = count_shortest_cycles(g, gg)
        key = (gg if gg is not None else 10**9, -n_short)
        if best_key is None or key > best_key:
            best_key = key
            best_mapping = mapping
    return Interleaver(
        K,
        best_mapping,
        "girth_aware",
        {"seed": seed, "trials": trials, "girth": int(best_key[0])},
    )


def make_interleaver(K: int, kind: str, params: dict) -> Interleaver:
    """Factory used by config loading."""
    if kind == "relative_prime":
        return relative_prime_interleaver(K, int(params["a"]), int(params["p"]))
    if kind == "spread":
        return spread_interleaver(
            K, int(params.get("seed", 0)), int(params["s_target"])
        )
    if kind == "girth_aware":
        return girth_aware_interleaver(
            K, int(params.get("seed", 0)), int(params.get("trials", 200))
        )
    if kind == "explicit":
        return Interleaver(K, np.asarray(params["mapping"]), "explicit", {})
    raise ValueError(f"unknown interleaver kind {kind!r}")
