"""CSR graphs: construction, synthetic generators, text ingestion, binary persistence.

A graph is a vertex offset array indexing into one concatenated edge array.
Vertex IDs are 8-byte entries on disk and in all byte arithmetic, so a vertex's
neighbor run ("edge sublist") occupies degree(v) * 8 bytes of the edge array.
Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DataError

ID_BYTES = 8

CSR_MAGIC = b"CSRG"
CSR_VERSION = 1
_CSR_HEADER = struct.Struct("<4sHHQQ")  # magic, version, pad, num_vertices, num_edges

# Ceiling on bytes a generator may allocate (output plus scratch). Scale-22
# degree-32 fits; scale-27 does not and must raise CapacityError.
DEFAULT_MEM_BUDGET = 4 << 30

# Recursive-quadrant probabilities for the skewed generator. The fourth
# quadrant gets the remainder (0.05).
KRON_A, KRON_B, KRON_C = 0.57, 0.19, 0.19
KRON_EDGE_FACTOR = 16.0


@dataclass(frozen=True)
class EdgeSublist:
    """Byte range of one vertex's neighbor run inside the edge array."""

    byte_offset: int
    byte_length: int


@dataclass(frozen=True)
class DegreeStats:
    num_vertices: int
    num_edges: int
    avg_degree_nonzero: float
    avg_sublist_bytes: float
    all_zero: bool


class CsrGraph:
    """Immutable CSR graph.

    offsets has length num_vertices + 1 with offsets[0] == 0 and
    offsets[-1] == num_edges; edges holds neighbor IDs grouped by source.
    """

    __slots__ = ("num_vertices", "offsets", "edges")

    def __init__(self, num_vertices: int, offsets, edges, validate: bool = True):
        self.num_vertices = int(num_vertices)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.edges = np.ascontiguousarray(edges, dtype=np.int64)
        self.offsets.flags.writeable = False
        self.edges.flags.writeable = False
        if validate:
            self.validate()

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def validate(self) -> None:
        """Check structural invariants; raises DataError on violation."""
        if self.num_vertices < 0:
            raise DataError("negative vertex count")
        if self.offsets.shape[0] != self.num_vertices + 1:
            raise DataError("offsets length must be num_vertices + 1")
        if self.num_vertices == 0:
            if self.offsets[0] != 0 or self.num_edges != 0:
                raise DataError("empty graph must have zero offsets and edges")
            return
        if self.offsets[0] != 0:
            raise DataError("offsets[0] must be 0")
        if int(self.offsets[-1]) != self.num_edges:
            raise DataError("offsets[-1] must equal the edge count")
        if np.any(np.diff(self.offsets) < 0):
            raise DataError("offsets must be non-decreasing")
        if self.num_edges:
            lo = int(self.edges.min())
            hi = int(self.edges.max())
            if lo < 0 or hi >= self.num_vertices:
                raise DataError(f"edge target out of range: {lo if lo < 0 else hi}")

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        return self.edges[self.offsets[v] : self.offsets[v + 1]]

    def sublist(self, v: int) -> EdgeSublist:
        """Byte range of vertex v's neighbor run (offset and length in bytes)."""
        self._check_vertex(v)
        start = int(self.offsets[v])
        end = int(self.offsets[v + 1])
        return EdgeSublist(start * ID_BYTES, (end - start) * ID_BYTES)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.num_vertices:
            raise DataError(f"vertex {v} out of range [0, {self.num_vertices})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CsrGraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.edges, other.edges)
        )

    def __repr__(self) -> str:
        return f"CsrGraph(num_vertices={self.num_vertices}, num_edges={self.num_edges})"


def sublist(graph: CsrGraph, v: int) -> EdgeSublist:
    """Module-level alias of CsrGraph.sublist."""
    return graph.sublist(v)


def _check_budget(num_vertices: int, num_edges: int, scratch_factor: float, mem_budget: int) -> None:
    needed = (num_vertices + 1) * ID_BYTES + int(num_edges * ID_BYTES * scratch_factor)
    if needed > mem_budget:
        raise CapacityError(
            f"graph of {num_vertices} vertices / {num_edges} edges needs about "
            f"{needed / 1e9:.1f} GB, over the {mem_budget / 1e9:.1f} GB budget"
        )


def _offsets_from_sorted_keys(keys: np.ndarray, num_vertices: int) -> np.ndarray:
    """Offsets for keys = src * num_vertices + dst, sorted ascending."""
    probes = np.arange(num_vertices + 1, dtype=np.int64) * num_vertices
    return np.searchsorted(keys, probes).astype(np.int64)


def gen_uniform_random(
    num_vertices: int,
    avg_degree: float,
    seed: int,
    mem_budget: int = DEFAULT_MEM_BUDGET,
) -> CsrGraph:
    """Generate a directed graph with both endpoints of every edge uniform.

    Edge count is round(num_vertices * avg_degree). Deterministic for a fixed
    (num_vertices, avg_degree, seed). Targets come out sorted per source.
    """
    if num_vertices < 1:
        raise DataError("num_vertices must be >= 1")
    if avg_degree < 0:
        raise DataError("avg_degree must be >= 0")
    n = int(num_vertices)
    m = int(round(n * avg_degree))
    _check_budget(n, m, scratch_factor=1.0, mem_budget=mem_budget)
    rng = np.random.default_rng(seed)
    # A uniform (src, dst) pair is a uniform draw over [0, n*n); sorting the
    # combined keys groups by source and orders targets in one pass.
    keys = rng.integers(0, n * n, size=m, dtype=np.int64)
    keys.sort()
    offsets = _offsets_from_sorted_keys(keys, n)
    keys %= n
    return CsrGraph(n, offsets, keys, validate=False)


def gen_kronecker(
    scale: int,
    edge_factor: float = KRON_EDGE_FACTOR,
    seed: int = 1,
    mem_budget: int = DEFAULT_MEM_BUDGET,
) -> CsrGraph:
    """Generate a skewed recursive-quadrant graph with 2**scale vertices.

    edge_factor * 2**scale vertex pairs are drawn; each is inserted in both
    directions, so the edge array holds 2 * edge_factor * 2**scale entries.
    Duplicate edges are kept. Exact published degree figures for this family
    are not reproduced bit-exactly; the distribution shape (heavy skew, many
    isolated vertices) is.
    """
    if scale < 1:
        raise DataError("scale must be >= 1")
    if edge_factor <= 0:
        raise DataError("edge_factor must be > 0")
    n = 1 << scale
    pairs = int(round(edge_factor * n))
    _check_budget(n, 2 * pairs, scratch_factor=2.0, mem_budget=mem_budget)
    rng = np.random.default_rng(seed)
    cum = np.array([KRON_A, KRON_A + KRON_B, KRON_A + KRON_B + KRON_C])
    src = np.zeros(pairs, dtype=np.int64)
    dst = np.zeros(pairs, dtype=np.int64)
    for _ in range(scale):
        quad = np.searchsorted(cum, rng.random(pairs), side="right")
        src = (src << 1) | (quad >> 1)
        dst = (dst << 1) | (quad & 1)
    keys = np.concatenate([src * n + dst, dst * n + src])
    del src, dst
    keys.sort()
    offsets = _offsets_from_sorted_keys(keys, n)
    keys %= n
    return CsrGraph(n, offsets, keys, validate=False)


def load_edge_list(path, undirected: bool = False, num_vertices: int | None = None) -> CsrGraph:
    """Build a CSR graph from whitespace-separated "src dst" text lines.

    Lines starting with '#' are ignored. Vertex count defaults to max ID + 1.
    With undirected=True every pair is inserted both ways.
    """
    srcs: list[int] = []
    dsts: list[int] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'src dst', got {stripped!r}")
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer vertex ID in {stripped!r}") from None
            if s < 0 or d < 0:
                raise DataError(f"{path}:{lineno}: negative vertex ID")
            srcs.append(s)
            dsts.append(d)

    if not srcs:
        n = int(num_vertices) if num_vertices else 0
        return CsrGraph(n, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64))

    src = np.array(srcs, dtype=np.int64)
    dst = np.array(dsts, dtype=np.int64)
    max_id = int(max(src.max(), dst.max()))
    if num_vertices is None:
        n = max_id + 1
    else:
        n = int(num_vertices)
        if max_id >= n:
            raise DataError(f"{path}: vertex ID {max_id} out of range [0, {n})")
    if undirected:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    keys = src * n + dst
    keys.sort()
    offsets = _offsets_from_sorted_keys(keys, n)
    return CsrGraph(n, offsets, keys % n, validate=False)


def degree_stats(graph: CsrGraph) -> DegreeStats:
    """Degree summary; zero-degree vertices are excluded from the average."""
    degrees = graph.degrees()
    nonzero = degrees[degrees > 0]
    all_zero = nonzero.size == 0
    avg = 0.0 if all_zero else float(nonzero.mean())
    return DegreeStats(
        num_vertices=graph.num_vertices,
        num_edges=graph.num_edges,
        avg_degree_nonzero=avg,
        avg_sublist_bytes=avg * ID_BYTES,
        all_zero=all_zero,
    )


def dedup_edge_count(graph: CsrGraph) -> int:
    """Number of distinct (src, dst) pairs; generators may emit duplicates."""
    if graph.num_edges == 0:
        return 0
    src = np.repeat(np.arange(graph.num_vertices, dtype=np.int64), graph.degrees())
    keys = src * graph.num_vertices + graph.edges
    # keys are already sorted (grouped by source, targets ascending)
    return int(1 + np.count_nonzero(np.diff(keys)))


def save_csr(graph: CsrGraph, path) -> None:
    """Write the binary CSR file format (see load_csr)."""
    with open(path, "wb") as fh:
        fh.write(_CSR_HEADER.pack(CSR_MAGIC, CSR_VERSION, 0, graph.num_vertices, graph.num_edges))
        fh.write(graph.offsets.astype("<u8").tobytes())
        fh.write(graph.edges.astype("<u8").tobytes())


def load_csr(path) -> CsrGraph:
    """Read the binary CSR format: 24-byte header, offsets array, edge array.

    Header: magic "CSRG", u16 version, u16 pad, u64 num_vertices, u64 num_edges,
    all little-endian; then (num_vertices + 1) u64 offsets and num_edges u64
    edge targets.
    """
    with open(path, "rb") as fh:
        header = fh.read(_CSR_HEADER.size)
        if len(header) != _CSR_HEADER.size:
            raise DataError(f"{path}: truncated header")
        magic, version, _pad, n, m = _CSR_HEADER.unpack(header)
        if magic != CSR_MAGIC:
            raise DataError(f"{path}: bad magic {magic!r}")
        if version != CSR_VERSION:
            raise DataError(f"{path}: unsupported version {version}")
        body = fh.read()
    expected = (n + 1 + m) * ID_BYTES
    if len(body) != expected:
        raise DataError(f"{path}: expected {expected} bytes after header, found {len(body)}")
    offsets = np.frombuffer(body, dtype="<u8", count=n + 1).astype(np.int64)
    edges = np.frombuffer(body, dtype="<u8", offset=(n + 1) * ID_BYTES, count=m).astype(np.int64)
    return CsrGraph(int(n), offsets, edges)
