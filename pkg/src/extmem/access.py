"""Replay of access traces through alignment and cache models.

Every read of a byte range [off, off+len) is served in whole aligned blocks:
the covered interval is [floor(off/a)*a, ceil((off+len)/a)*a). Fetched bytes D
accumulate per model rules below; useful bytes E always equal the trace's
total, so the read amplification factor D/E is >= 1.

Three modes:

* cached_block     -- every aligned block is one request (d = a) and a
                      fully-associative LRU cache of whole blocks may absorb
                      refetches; this is how a block-cache storage stack reads.
* gpu_cacheline    -- 32 B-aligned coverage coalesced into per-128 B-line
                      requests of 32/64/96/128 B, the way a GPU issues
                      zero-copy loads against host-style memory.
* variable_transfer -- one request per sublist, padded to the alignment and
                      split at a maximum transfer size; no cache.

A trace step is a batch issued concurrently by one traversal iteration.
Replay serializes it either in the recorded ascending-vertex order
(issue_order="sorted") or in a seeded random interleave ("shuffled") that
stands in for many parallel consumers draining the batch. The choice only
matters when a cache is configured.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .traversal import AccessTrace

MODE_CACHED_BLOCK = "cached_block"
MODE_GPU_CACHELINE = "gpu_cacheline"
MODE_VARIABLE = "variable_transfer"

_MODES = (MODE_CACHED_BLOCK, MODE_GPU_CACHELINE, MODE_VARIABLE)

GPU_ALIGNMENT = 32
GPU_CACHELINE = 128
VARIABLE_ALIGNMENT = 16
VARIABLE_MAX_TRANSFER = 2048

ISSUE_SORTED = "sorted"
ISSUE_SHUFFLED = "shuffled"


@dataclass(frozen=True)
class AlignmentConfig:
    alignment_bytes: int
    mode: str = MODE_CACHED_BLOCK
    max_transfer_bytes: int | None = None
    cache_capacity_bytes: int = 0
    issue_order: str = ISSUE_SORTED
    shuffle_seed: int = 0

    def __post_init__(self):
        a = self.alignment_bytes
        if a < 8 or a & (a - 1):
            raise DataError(f"alignment must be a power of two >= 8, got {a}")
        if self.mode not in _MODES:
            raise DataError(f"unknown mode {self.mode!r}")
        if self.max_transfer_bytes is not None:
            if self.max_transfer_bytes <= 0 or self.max_transfer_bytes % a:
                raise DataError("max_transfer_bytes must be a positive multiple of the alignment")
        if self.cache_capacity_bytes < 0:
            raise DataError("cache capacity must be >= 0")
        if self.issue_order not in (ISSUE_SORTED, ISSUE_SHUFFLED):
            raise DataError(f"unknown issue order {self.issue_order!r}")


@dataclass
class ReadLedger:
    """Byte accounting of one replay."""

    useful_bytes: int
    fetched_bytes: int
    request_size_histogram: dict = field(default_factory=dict)

    @property
    def raf(self) -> float:
        return self.fetched_bytes / self.useful_bytes

    @property
    def num_requests(self) -> int:
        return sum(self.request_size_histogram.values())

    @property
    def avg_transfer_bytes(self) -> float:
        n = self.num_requests
        return self.fetched_bytes / n if n else 0.0


def _require_nonempty(trace: AccessTrace) -> int:
    if not trace.steps or trace.useful_bytes_total <= 0:
        raise DataError("empty trace: read amplification is undefined")
    return trace.useful_bytes_total


def _step_reads(trace: AccessTrace, cfg: AlignmentConfig):
    """Per-step (offsets, lengths) with zero-length reads dropped and issue order applied."""
    rng = None
    if cfg.issue_order == ISSUE_SHUFFLED:
        rng = np.random.default_rng(cfg.shuffle_seed)
    for step in trace.steps:
        off = step[:, 0]
        length = step[:, 1]
        nz = length > 0
        if not nz.all():
            off, length = off[nz], length[nz]
        if rng is not None and len(off) > 1:
            perm = rng.permutation(len(off))
            off, length = off[perm], length[perm]
        if len(off):
            yield off, length


def _block_touch_sequence(off: np.ndarray, length: np.ndarray, a: int, deduped: bool) -> np.ndarray:
    """Concatenated per-read block indices, in issue order.

    When the step's reads are byte-disjoint and ascending, the block sequence
    is non-decreasing and repeats are always of the most-recent block, so
    dropping them (deduped=True) leaves LRU hit/miss accounting unchanged.
    Other layouts fall back to the full sequence.
    """
    first = off // a
    last = (off + length - 1) // a
    if deduped and len(off) > 1 and not np.all(off[1:] >= off[:-1] + length[:-1]):
        deduped = False
    if deduped:
        prev_last = np.empty_like(last)
        prev_last[0] = first[0] - 1
        prev_last[1:] = last[:-1]
        first = np.maximum(first, prev_last + 1)
    counts = np.maximum(last - first + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    bounds = np.concatenate(([0], np.cumsum(counts)))
    return np.repeat(first - bounds[:-1], counts) + np.arange(total, dtype=np.int64)


def replay_cached(trace: AccessTrace, cfg: AlignmentConfig) -> ReadLedger:
    """Replay with whole-block requests and an optional LRU block cache.

    Every read expands to the aligned blocks overlapping it; a block found in
    the cache is not fetched again. Each fetched block is one request of
    exactly alignment_bytes, and the cache persists across trace steps.
    """
    if cfg.mode != MODE_CACHED_BLOCK:
        raise DataError(f"replay_cached requires mode={MODE_CACHED_BLOCK!r}")
    useful = _require_nonempty(trace)
    a = cfg.alignment_bytes
    capacity = cfg.cache_capacity_bytes // a
    fetched_blocks = 0

    if capacity == 0:
        for off, length in _step_reads(trace, cfg):
            fetched_blocks += int(((off + length - 1) // a - off // a + 1).sum())
    else:
        cache: OrderedDict = OrderedDict()
        for off, length in _step_reads(trace, cfg):
            blocks = _block_touch_sequence(off, length, a, deduped=cfg.issue_order == ISSUE_SORTED)
            for b in blocks.tolist():
                if b in cache:
                    cache.move_to_end(b)
                else:
                    fetched_blocks += 1
                    cache[b] = None
                    if len(cache) > capacity:
                        cache.popitem(last=False)

    hist = {a: fetched_blocks} if fetched_blocks else {}
    return ReadLedger(useful_bytes=useful, fetched_bytes=fetched_blocks * a, request_size_histogram=hist)


def replay_gpu_cacheline(trace: AccessTrace, cfg: AlignmentConfig | None = None) -> ReadLedger:
    """Replay with 32 B-aligned coverage coalesced into cache-line requests.

    Coverage units of alignment_bytes are grouped per max_transfer_bytes line;
    contiguous needed runs within one line become one request each, so request
    sizes at the defaults are 32, 64, 96, or 128 B.
    """
    if cfg is None:
        cfg = AlignmentConfig(GPU_ALIGNMENT, mode=MODE_GPU_CACHELINE, max_transfer_bytes=GPU_CACHELINE)
    if cfg.mode != MODE_GPU_CACHELINE:
        raise DataError(f"replay_gpu_cacheline requires mode={MODE_GPU_CACHELINE!r}")
    if cfg.max_transfer_bytes is None:
        raise DataError("gpu_cacheline mode needs a finite max_transfer_bytes")
    useful = _require_nonempty(trace)
    a = cfg.alignment_bytes
    upl = cfg.max_transfer_bytes // a  # units per line
    hist: dict[int, int] = {}

    if cfg.cache_capacity_bytes // a == 0:
        sizes_accum = np.zeros(upl + 1, dtype=np.int64)  # index = units in request
        full_lines = 0
        for off, length in _step_reads(trace, cfg):
            uf = off // a
            ul = (off + length - 1) // a
            lf = uf // upl
            ll = ul // upl
            single = lf == ll
            if single.any():
                sizes = ul[single] - uf[single] + 1
                sizes_accum += np.bincount(sizes, minlength=upl + 1)
            multi = ~single
            if multi.any():
                head = upl - uf[multi] % upl
                tail = ul[multi] % upl + 1
                sizes_accum += np.bincount(head, minlength=upl + 1)
                sizes_accum += np.bincount(tail, minlength=upl + 1)
                full_lines += int((ll[multi] - lf[multi] - 1).sum())
        sizes_accum[upl] += full_lines
        for units in range(1, upl + 1):
            if sizes_accum[units]:
                hist[units * a] = int(sizes_accum[units])
    else:
        capacity = cfg.cache_capacity_bytes // a
        cache: OrderedDict = OrderedDict()
        for off, length in _step_reads(trace, cfg):
            for o, ln in zip(off.tolist(), length.tolist()):
                uf = o // a
                ul = (o + ln - 1) // a
                run = 0
                prev_line = uf // upl
                for u in range(uf, ul + 1):
                    line = u // upl
                    if u in cache:
                        cache.move_to_end(u)
                        missing = False
                    else:
                        cache[u] = None
                        if len(cache) > capacity:
                            cache.popitem(last=False)
                        missing = True
                    if missing and line == prev_line:
                        run += 1
                    else:
                        if run:
                            hist[run * a] = hist.get(run * a, 0) + 1
                        run = 1 if missing else 0
                    prev_line = line
                if run:
                    hist[run * a] = hist.get(run * a, 0) + 1

    fetched = sum(size * count for size, count in hist.items())
    return ReadLedger(useful_bytes=useful, fetched_bytes=fetched, request_size_histogram=hist)


def replay_variable(trace: AccessTrace, cfg: AlignmentConfig | None = None) -> ReadLedger:
    """Replay with one padded request per sublist, split at max_transfer_bytes.

    The aligned cover of each read is fetched as ceil(span / max_transfer)
    requests, each a multiple of the alignment. No cache in this mode.
    """
    if cfg is None:
        cfg = AlignmentConfig(
            VARIABLE_ALIGNMENT, mode=MODE_VARIABLE, max_transfer_bytes=VARIABLE_MAX_TRANSFER
        )
    if cfg.mode != MODE_VARIABLE:
        raise DataError(f"replay_variable requires mode={MODE_VARIABLE!r}")
    if cfg.max_transfer_bytes is None:
        raise DataError("variable_transfer mode needs a finite max_transfer_bytes")
    if cfg.cache_capacity_bytes:
        raise DataError("variable_transfer mode does not support a cache")
    useful = _require_nonempty(trace)
    a = cfg.alignment_bytes
    max_t = cfg.max_transfer_bytes
    full_requests = 0
    tail_accum: dict[int, int] = {}
    fetched = 0
    for off, length in _step_reads(trace, cfg):
        lo = (off // a) * a
        hi = ((off + length + a - 1) // a) * a
        span = hi - lo
        fetched += int(span.sum())
        full = (span - 1) // max_t  # number of max-size requests before the tail
        full_requests += int(full.sum())
        tails = span - full * max_t
        for size, count in zip(*np.unique(tails, return_counts=True)):
            tail_accum[int(size)] = tail_accum.get(int(size), 0) + int(count)
    hist = dict(tail_accum)
    if full_requests:
        hist[max_t] = hist.get(max_t, 0) + full_requests
    return ReadLedger(useful_bytes=useful, fetched_bytes=fetched, request_size_histogram=hist)


def replay(trace: AccessTrace, cfg: AlignmentConfig) -> ReadLedger:
    """Dispatch a replay on cfg.mode."""
    if cfg.mode == MODE_CACHED_BLOCK:
        return replay_cached(trace, cfg)
    if cfg.mode == MODE_GPU_CACHELINE:
        return replay_gpu_cacheline(trace, cfg)
    return replay_variable(trace, cfg)


def raf_sweep(
    trace: AccessTrace,
    alignments,
    cache_capacity: int = 0,
    issue_order: str = ISSUE_SORTED,
    shuffle_seed: int = 0,
) -> list[tuple[int, ReadLedger]]:
    """One cached_block replay per alignment; returns [(alignment, ledger)]."""
    alignments = list(alignments)
    if not alignments:
        raise DataError("alignment list must be nonempty")
    out = []
    for a in alignments:
        cfg = AlignmentConfig(
            int(a),
            mode=MODE_CACHED_BLOCK,
            cache_capacity_bytes=cache_capacity,
            issue_order=issue_order,
            shuffle_seed=shuffle_seed,
        )
        out.append((int(a), replay_cached(trace, cfg)))
    return out
