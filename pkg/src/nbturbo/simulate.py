"""Monte Carlo AWGN harness: per-point frame loops, deterministic seeding,
worker-pool parallelism, incremental persistence, CSV/manifest output.

Reproducibility contract: every frame draws its randomness from
SeedSequence(seed, point_index, frame_index), frames are grouped into
fixed-size batches, and batch results are folded in batch order, so the
numbers do not depend on the worker count and a resumed run reproduces an
uninterrupted one bit for bit.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from . import bp as bplib
from . import channel as chanlib
from . import trellis as trellislib
from .construction import (
    CodeSpec,
    build_parity_check,
    spec_from_config,
    spec_to_config,
)
from .encoding import encode

DECODERS = ("bp", "turbo", "turbo-serial")

CSV_COLUMNS = ("ebno_db", "frames", "cw_errors", "cer", "ber", "avg_iters",
               "decoder", "seed")

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


@dataclass
class SimRecord:
    ebno_db: float
    frames: int
    codeword_errors: int
    symbol_errors: int
    bit_errors: int
    iter_sum: int
    decoder: str
    seed: int
    wall_time: float = 0.0

    @property
    def cer(self) -> float:
        return self.codeword_errors / self.frames if self.frames else 0.0

    @property
    def avg_iters(self) -> float:
        return self.iter_sum / self.frames if self.frames else 0.0

    def ber(self, k_bits: int) -> float:
        return self.bit_errors / (self.frames * k_bits) if self.frames else 0.0


def _is_v0_punctured(spec: CodeSpec) -> bool:
    return spec.mode == "pccc" and spec.puncture.as_set() == frozenset(range(spec.K))


def da12_equivalent(spec: CodeSpec) -> CodeSpec:
    """The rate-1/2 serial code whose codewords are the V0-punctured
    parallel codewords [p2 | p1] of this spec."""
    return CodeSpec(field=spec.field, K=spec.K, mode="da12", g1=spec.g1,
                    f1=spec.f1, g2=spec.g2, f2=spec.f2,
                    interleaver=spec.interleaver, seed=spec.seed)


class _FrameRunner:
    """Per-process decoding context (graphs prebuilt, mappings resolved)."""

    def __init__(self, spec: CodeSpec, decoder: str, max_iter: int, dtype):
        self.spec = spec
        self.decoder = decoder
        self.max_iter = max_iter
        self.dtype = dtype
        self.v0_to_da = decoder == "bp" and _is_v0_punctured(spec)
        if decoder == "bp":
            target = da12_equivalent(spec) if self.v0_to_da else spec
            self.graph = bplib.TannerGraph.from_matrix(
                build_parity_check(target), spec.field)
        elif decoder == "turbo" and spec.mode != "pccc":
            raise ValueError("parallel turbo decoding needs the pccc layout")
        elif decoder == "turbo-serial" and spec.mode not in ("da12", "da13"):
            raise ValueError("serial turbo decoding needs a da-mode spec")

    def truth(self, u: np.ndarray, codeword: np.ndarray) -> np.ndarray:
        if self.v0_to_da:
            # decoding the embedded rate-1/2 code: its information block is
            # the second parity segment
            return codeword[2 * self.spec.K :]
        return u

    def decode(self, pmfs_batch: np.ndarray):
        """(B, n_symbols, q) pmfs -> (decisions (B, K), iterations (B,))."""
        spec = self.spec
        K = spec.K
        if self.decoder == "bp":
            if self.v0_to_da:
                pmfs_batch = np.concatenate(
                    [pmfs_batch[:, 2 * K :], pmfs_batch[:, K : 2 * K]], axis=1)
            res = bplib.bp_decode(self.graph, pmfs_batch, self.max_iter,
                                  dtype=self.dtype)
            return res.hard[:, :K], res.iterations
        decisions = np.empty((len(pmfs_batch), K), dtype=np.int64)
        iters = np.empty(len(pmfs_batch), dtype=np.int64)
        fn = (trellislib.turbo_decode_parallel if self.decoder == "turbo"
              else trellislib.turbo_decode_serial)
        for i, pmfs in enumerate(pmfs_batch):
            r = fn(spec, pmfs, max_iter=self.max_iter)
            decisions[i] = r.message
            iters[i] = r.iterations
        return decisions, iters


_PROC_CACHE: dict = {}


def _get_runner(cfg_key: str, cfg: dict, decoder: str, max_iter: int,
                dtype_name: str) -> _FrameRunner:
    key = (cfg_key, decoder, max_iter, dtype_name)
    if key not in _PROC_CACHE:
        _PROC_CACHE[key] = _FrameRunner(spec_from_config(cfg), decoder,
                                        max_iter, np.dtype(dtype_name).type)
    return _PROC_CACHE[key]


def simulate_batch(cfg: dict, decoder: str, ebno_db: float, seed: int,
                   point_index: int, start_frame: int, n_frames: int,
                   max_iter: int, dtype_name: str = "float64"):
    """Encode/transmit/decode frames [start_frame, start_frame+n_frames).

    Returns (frames, codeword_errors, symbol_errors, bit_errors, iter_sum).
    BLAS pools are pinned to one thread so results cannot depend on the
    worker count.
    """
    with threadpool_limits(limits=1):
        return _simulate_batch_inner(cfg, decoder, ebno_db, seed, point_index,
                                     start_frame, n_frames, max_iter,
                                     dtype_name)


def _simulate_batch_inner(cfg, decoder, ebno_db, seed, point_index,
                          start_frame, n_frames, max_iter, dtype_name):
    cfg_key = json.dumps(cfg, sort_keys=True)
    runner = _get_runner(cfg_key, cfg, decoder, max_iter, dtype_name)
    spec = runner.spec
    f = spec.field
    sigma2 = chanlib.ChannelModel(ebno_db, spec.rate_bits).sigma2

    pmfs = np.empty((n_frames, spec.n_symbols, f.q))
    truths = np.empty((n_frames, spec.K), dtype=np.int64)
    for j in range(n_frames):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed,
                                   spawn_key=(point_index, start_frame + j)))
        u = rng.integers(0, f.q, size=spec.K)
        c = encode(spec, u)
        truths[j] = runner.truth(u, c)
        pmfs[j] = chanlib.transmit_frame(spec, c, sigma2, rng)

    dec, iters = runner.decode(pmfs)
    sym_err_mat = dec != truths
    cw_err = int(sym_err_mat.any(axis=1).sum())
    sym_err = int(sym_err_mat.sum())
    xor = (dec ^ truths).astype(np.int64)
    bit_err = 0
    for shift in range(0, f.m, 8):
        bit_err += int(_POPCOUNT[(xor >> shift) & 0xFF].sum())
    return n_frames, cw_err, sym_err, bit_err, int(iters.sum())


@dataclass
class StopRule:
    target_errors: int = 100
    max_frames: int = 10_000_000


def run_point(spec: CodeSpec, decoder: str, ebno_db: float, stop: StopRule,
              seed: int, point_index: int = 0, max_iter: int = 200,
              workers: int = 1, batch_size: int = 256,
              dtype_name: str = "float64", journal: "Journal | None" = None,
              executor=None) -> SimRecord:
    """Monte Carlo at one Eb/N0 point with deterministic batch folding."""
    cfg = spec_to_config(spec)
    t0 = time.time()
    frames = cw = sym = bit = it_sum = 0
    batch_idx = 0

    def fold(result):
        nonlocal frames, cw, sym, bit, it_sum
        n, c, s, b, i = result
        frames += n
        cw += c
        sym += s
        bit += b
        it_sum += i

    if journal is not None:
        for result in journal.replay(point_index):
            fold(result)
            batch_idx += 1

    def batches():
        nonlocal batch_idx
        while frames < stop.max_frames and cw < stop.target_errors:
            start = batch_idx * batch_size
            n = min(batch_size, stop.max_frames - start)
            if n <= 0:
                break
            yield (cfg, decoder, ebno_db, seed, point_index, start, n,
                   max_iter, dtype_name)
            batch_idx += 1

    if workers <= 1 or executor is None:
        for args in batches():
            result = simulate_batch(*args)
            fold(result)
            if journal is not None:
                journal.append(point_index, result)
    else:
        # keep a small pipeline in flight; fold strictly in batch order
        pending = []
        gen = batches()
        done = False
        while True:
            while not done and len(pending) < 2 * workers:
                try:
                    args = next(gen)
                except StopIteration:
                    done = True
                    break
                pending.append(executor.submit(simulate_batch, *args))
            if not pending:
                break
            result = pending.pop(0).result()
            fold(result)
            if journal is not None:
                journal.append(point_index, result)
            if frames >= stop.max_frames or cw >= stop.target_errors:
                for p in pending:
                    p.cancel()
                break
    return SimRecord(ebno_db, frames, cw, sym, bit, it_sum, decoder, seed,
                     time.time() - t0)


class Journal:
    """Append-only batch log enabling interruption-safe resume."""

    def __init__(self, path: str, run_key: dict):
        self.path = path
        self.run_key = json.dumps(run_key, sort_keys=True)
        self._entries: dict[int, list] = {}
        matched = False
        if os.path.exists(path):
            with open(path) as fh:
                first = fh.readline().strip()
                if first == self.run_key:
                    matched = True
                    for line in fh:
                        rec = json.loads(line)
                        self._entries.setdefault(rec["point"], []).append(
                            tuple(rec["result"]))
        if matched:
            self._fh = open(path, "a")
        else:
            self._fh = open(path, "w")
            self._fh.write(self.run_key + "\n")
            self._fh.flush()

    def replay(self, point_index: int):
        return list(self._entries.get(point_index, []))

    def append(self, point_index: int, result) -> None:
        self._fh.write(json.dumps({"point": point_index,
                                   "result": list(result)}) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def run_curve(spec: CodeSpec, decoder: str, ebno_list, stop: StopRule,
              seed: int, max_iter: int = 200, workers: int = 1,
              batch_size: int = 256, dtype_name: str = "float64",
              journal_path: str | None = None, progress=None) -> list[SimRecord]:
    """Sweep Eb/N0 points; persists batch results incrementally when a
    journal path is given so an interrupted curve resumes exactly."""
    journal = None
    if journal_path:
        run_key = {"config": spec_to_config(spec), "decoder": decoder,
                   "seed": seed, "batch_size": batch_size,
                   "max_iter": max_iter, "dtype": dtype_name,
                   "ebno": list(map(float, ebno_list)), "stop": asdict(stop)}
        journal = Journal(journal_path, run_key)
    executor = None
    if workers > 1:
        executor = ProcessPoolExecutor(max_workers=workers)
    try:
        records = []
        for pi, ebno in enumerate(ebno_list):
            rec = run_point(spec, decoder, float(ebno), stop, seed, pi,
                            max_iter, workers, batch_size, dtype_name,
                            journal, executor)
            records.append(rec)
            if progress is not None:
                progress(rec)
        return records
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)
        if journal is not None:
            journal.close()


def records_to_csv(records: list[SimRecord], k_bits: int) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(",".join([
            repr(float(r.ebno_db)),
            str(r.frames),
            str(r.codeword_errors),
            repr(r.cer),
            repr(r.ber(k_bits)),
            repr(r.avg_iters),
            r.decoder,
            str(r.seed),
        ]))
    return "\n".join(lines) + "\n"


def write_manifest(path: str, spec: CodeSpec, decoder: str, seed: int,
                   stop: StopRule, ebno_list, max_iter: int,
                   batch_size: int, dtype_name: str) -> None:
    manifest = {
        "format": "nbturbo-run-manifest-v1",
        "spec": spec_to_config(spec),
        "decoder": decoder,
        "seed": seed,
        "ebno_db": list(map(float, ebno_list)),
        "stop": asdict(stop),
        "max_iter": max_iter,
        "batch_size": batch_size,
        "dtype": dtype_name,
        "rate_bits": spec.rate_bits,
        "k_bits": spec.k_bits,
        "n_bits": spec.n_bits,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
