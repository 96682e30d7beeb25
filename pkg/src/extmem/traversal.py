"""Frontier-based BFS and SSSP that emit byte-level external-memory access traces.

Only edge-array reads appear in traces: the traversed structure keeps its
offset array in fast memory and fetches one neighbor run per visited vertex
from external memory. A trace step is the batch of reads one iteration issues
concurrently; within a step reads are recorded in ascending vertex order so
traces are reproducible run to run.
"""

from __future__ import annotations

import csv as _csv
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graph import ID_BYTES, CsrGraph

UNREACHED = -1

TRACE_MAGIC = b"TRCE"
TRACE_VERSION = 1
_TRACE_HEADER = struct.Struct("<4sHHQ")  # magic, version, pad, num_records
_TRACE_RECORD = struct.Struct("<IQI")  # step_index, byte_offset, byte_length

# Bound on neighbor entries gathered per chunk; keeps transient arrays small
# even when a frontier covers most of a large graph.
_GATHER_CHUNK_EDGES = 1 << 23

_INF = np.iinfo(np.int64).max


@dataclass
class AccessTrace:
    """Ordered per-step batches of (byte_offset, byte_length) reads.

    Each step is an (k, 2) int64 array; rows are the reads the traversal
    issues concurrently during that iteration. useful_bytes_total sums every
    byte_length and is the E term of the read-amplification ratio.
    """

    steps: list = field(default_factory=list)
    useful_bytes_total: int = 0

    def append_step(self, byte_offsets: np.ndarray, byte_lengths: np.ndarray) -> None:
        step = np.column_stack([byte_offsets, byte_lengths]).astype(np.int64, copy=False)
        self.steps.append(step)
        self.useful_bytes_total += int(byte_lengths.sum())

    @property
    def num_steps(self) -> int:
        return len(self.steps)

    @property
    def num_reads(self) -> int:
        return sum(len(s) for s in self.steps)


@dataclass
class BfsResult:
    depth_of: np.ndarray  # per-vertex depth, UNREACHED if not visited
    frontier_sizes: list


@dataclass
class SsspResult:
    dist_of: np.ndarray  # per-vertex distance, UNREACHED if not visited
    iterations: int


def _gather_neighbors(graph: CsrGraph, frontier: np.ndarray):
    """Yield neighbor-ID arrays (and edge positions) for a frontier, chunked."""
    starts = graph.offsets[frontier]
    counts = graph.offsets[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return
    bounds = np.concatenate(([0], np.cumsum(counts)))
    lo = 0
    while lo < len(frontier):
        hi = int(np.searchsorted(bounds, bounds[lo] + _GATHER_CHUNK_EDGES, side="left"))
        hi = min(max(hi, lo + 1), len(frontier))
        c_starts = starts[lo:hi]
        c_counts = counts[lo:hi]
        c_total = int(c_counts.sum())
        if c_total:
            base = np.repeat(c_starts - (bounds[lo:hi] - bounds[lo]), c_counts)
            positions = base + np.arange(c_total, dtype=np.int64)
            yield lo, hi, positions
        lo = hi


def bfs(graph: CsrGraph, source: int) -> tuple[BfsResult, AccessTrace]:
    """Level-synchronous BFS from source.

    Step k of the trace holds exactly one neighbor-run read per frontier
    vertex at depth k, in ascending vertex order; the frontier is
    deduplicated, so each reached vertex is read exactly once.
    """
    graph._check_vertex(source)
    depth = np.full(graph.num_vertices, UNREACHED, dtype=np.int64)
    depth[source] = 0
    frontier = np.array([source], dtype=np.int64)
    trace = AccessTrace()
    sizes = []
    level = 0
    while frontier.size:
        starts = graph.offsets[frontier]
        lengths = graph.offsets[frontier + 1] - starts
        trace.append_step(starts * ID_BYTES, lengths * ID_BYTES)
        sizes.append(int(frontier.size))
        discovered = []
        for _lo, _hi, positions in _gather_neighbors(graph, frontier):
            nbr = graph.edges[positions]
            fresh = nbr[depth[nbr] == UNREACHED]
            if fresh.size:
                fresh = np.unique(fresh)
                depth[fresh] = level + 1
                discovered.append(fresh)
        level += 1
        if discovered:
            frontier = np.concatenate(discovered) if len(discovered) > 1 else discovered[0]
            frontier.sort()
        else:
            frontier = np.empty(0, dtype=np.int64)
    return BfsResult(depth_of=depth, frontier_sizes=sizes), trace


def synth_weights(graph: CsrGraph, weight_seed: int) -> np.ndarray:
    """Deterministic per-edge integer weights in [1, 255].

    Seed 0 is reserved and yields all-ones weights, which reduces SSSP to BFS.
    """
    if weight_seed == 0:
        return np.ones(graph.num_edges, dtype=np.uint8)
    rng = np.random.default_rng(weight_seed)
    return rng.integers(1, 256, size=graph.num_edges, dtype=np.uint8)


def sssp(
    graph: CsrGraph,
    source: int,
    weight_seed: int = 0,
    weights: np.ndarray | None = None,
) -> tuple[SsspResult, AccessTrace]:
    """Frontier-driven Bellman-Ford shortest paths.

    Each round reads the neighbor runs of the vertices whose distance improved
    in the previous round (the source alone in round one) and relaxes their
    outgoing edges. Weights come from synth_weights(graph, weight_seed) unless
    an explicit per-edge array is given. Converges to exact distances since
    weights are positive.
    """
    graph._check_vertex(source)
    if weights is None:
        weights = synth_weights(graph, weight_seed)
    elif len(weights) != graph.num_edges:
        raise DataError("weights length must equal the edge count")
    dist = np.full(graph.num_vertices, _INF, dtype=np.int64)
    dist[source] = 0
    active = np.array([source], dtype=np.int64)
    trace = AccessTrace()
    iterations = 0
    while active.size:
        iterations += 1
        starts = graph.offsets[active]
        lengths = graph.offsets[active + 1] - starts
        trace.append_step(starts * ID_BYTES, lengths * ID_BYTES)
        prev = dist.copy()
        for lo, hi, positions in _gather_neighbors(graph, active):
            nbr = graph.edges[positions]
            src_dist = np.repeat(
                prev[active[lo:hi]], (graph.offsets[active[lo:hi] + 1] - graph.offsets[active[lo:hi]])
            )
            np.minimum.at(dist, nbr, src_dist + weights[positions])
        active = np.flatnonzero(dist < prev)
    result = dist.copy()
    result[result == _INF] = UNREACHED
    return SsspResult(dist_of=result, iterations=iterations), trace


def frontier_histogram(result: BfsResult) -> list[tuple[int, int]]:
    """(depth, vertex count) rows; unreached vertices are excluded."""
    return [(d, c) for d, c in enumerate(result.frontier_sizes)]


_TRACE_DTYPE = np.dtype([("step", "<u4"), ("off", "<u8"), ("len", "<u4")])


def save_trace(trace: AccessTrace, path, fmt: str = "binary") -> None:
    """Export a trace; binary records are (u32 step, u64 offset, u32 length)."""
    if fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(_TRACE_HEADER.pack(TRACE_MAGIC, TRACE_VERSION, 0, trace.num_reads))
            for idx, step in enumerate(trace.steps):
                records = np.empty(len(step), dtype=_TRACE_DTYPE)
                records["step"] = idx
                records["off"] = step[:, 0]
                records["len"] = step[:, 1]
                fh.write(records.tobytes())
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["step_index", "byte_offset", "byte_length"])
            for idx, step in enumerate(trace.steps):
                writer.writerows((idx, int(off), int(length)) for off, length in step)
    else:
        raise DataError(f"unknown trace format {fmt!r}")


def load_trace(path) -> AccessTrace:
    """Read a binary trace written by save_trace."""
    with open(path, "rb") as fh:
        header = fh.read(_TRACE_HEADER.size)
        if len(header) != _TRACE_HEADER.size:
            raise DataError(f"{path}: truncated trace header")
        magic, version, _pad, num_records = _TRACE_HEADER.unpack(header)
        if magic != TRACE_MAGIC:
            raise DataError(f"{path}: bad magic {magic!r}")
        if version != TRACE_VERSION:
            raise DataError(f"{path}: unsupported trace version {version}")
        body = fh.read()
    if len(body) != num_records * _TRACE_RECORD.size:
        raise DataError(f"{path}: truncated trace body")
    trace = AccessTrace()
    if num_records == 0:
        return trace
    raw = np.frombuffer(body, dtype=_TRACE_DTYPE)
    steps = raw["step"].astype(np.int64)
    if np.any(np.diff(steps) < 0):
        raise DataError(f"{path}: step indices must be non-decreasing")
    boundaries = np.flatnonzero(np.diff(steps)) + 1
    for chunk in np.split(np.arange(num_records), boundaries):
        trace.append_step(raw["off"][chunk].astype(np.int64), raw["len"][chunk].astype(np.int64))
    return trace
