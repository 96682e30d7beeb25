"""Desk-scale simulator and analytical model for graph traversal over external memory.

The package decomposes the question "how fast can a massively parallel
consumer traverse a graph stored behind a bandwidth- and concurrency-limited
link" into:

* graph      -- CSR graphs, synthetic generators, persistence
* traversal  -- BFS / SSSP runs that emit byte-level access traces
* access     -- alignment/cache replay of traces: fetched bytes and
                read amplification
* perf       -- closed-form throughput, runtime, and requirement solver
* dessim     -- discrete-event closed-loop simulator used as the model's
                independent check
* cli        -- experiment runner emitting CSV tables and figures
"""

from .access import (
    ISSUE_SHUFFLED,
    ISSUE_SORTED,
    MODE_CACHED_BLOCK,
    MODE_GPU_CACHELINE,
    MODE_VARIABLE,
    AlignmentConfig,
    ReadLedger,
    raf_sweep,
    replay,
    replay_cached,
    replay_gpu_cacheline,
    replay_variable,
)
from .dessim import (
    DeviceConfig,
    SimConfig,
    SimStats,
    pointer_chase,
    simulate_bridge,
    simulate_closed_loop,
    throughput_vs_latency_sweep,
)
from .errors import CapacityError, DataError, ExtmemError
from .graph import (
    CsrGraph,
    DegreeStats,
    EdgeSublist,
    dedup_edge_count,
    degree_stats,
    gen_kronecker,
    gen_uniform_random,
    load_csr,
    load_edge_list,
    save_csr,
    sublist,
)
from .perf import (
    DEVICE_PRESETS,
    LINK_PRESETS,
    CurvePoint,
    DeviceProfile,
    LinkProfile,
    best_transfer,
    concurrency,
    optimal_transfer,
    predict_runtime_curve,
    requirements,
    runtime,
    slope,
    throughput,
)
from .traversal import (
    UNREACHED,
    AccessTrace,
    BfsResult,
    SsspResult,
    bfs,
    frontier_histogram,
    load_trace,
    save_trace,
    sssp,
    synth_weights,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
