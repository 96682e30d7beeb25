"""Command-line experiment runner.

Subcommands wrap the library: gen/bfs/sssp produce graphs and traces, raf
replays traces across alignments, predict evaluates the throughput model,
simulate/chase drive the event simulator, and report composes the standard
figure-analogue tables (read amplification, runtime curve, latency sweep,
latency knee) as CSV plus rendered PNGs.

Values accept human-readable suffixes (KiB, us, MIOPS, MB/s); outputs use
canonical units: bytes, nanoseconds, requests/second, bytes/second. A flat
"key = value" config file with [section] headers can predefine any flag;
command-line flags win. Exit codes: 0 ok, 1 usage, 2 data error, 3 capacity.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import plots
from .access import ISSUE_SORTED, AlignmentConfig, MODE_CACHED_BLOCK, raf_sweep, replay_cached
from .dessim import DeviceConfig, SimConfig, pointer_chase, simulate_closed_loop, throughput_vs_latency_sweep
from .errors import CapacityError, DataError, ExtmemError
from .graph import (
    dedup_edge_count,
    degree_stats,
    gen_kronecker,
    gen_uniform_random,
    load_csr,
    load_edge_list,
    save_csr,
)
from .perf import (
    DEVICE_PRESETS,
    LINK_PRESETS,
    DeviceProfile,
    LinkProfile,
    optimal_transfer,
    predict_runtime_curve,
    requirements,
    slope,
    throughput,
)
from .traversal import bfs, frontier_histogram, save_trace, sssp
from .units import parse_bandwidth, parse_bytes, parse_duration_ns, parse_rate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CAPACITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _UsageError(Exception):
    """Missing or inconsistent options after merging config-file values."""


# ---------------------------------------------------------------------------
# config file and output helpers

def load_config_file(path) -> dict:
    """Flat "key = value" sections under [name] headers."""
    sections: dict[str, dict[str, str]] = {}
    current = "common"
    sections[current] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith(("#", ";")):
                continue
            if stripped.startswith("[") and stripped.endswith("]"):
                current = stripped[1:-1].strip().lower()
                sections.setdefault(current, {})
                continue
            if "=" not in stripped:
                raise DataError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            sections[current][key.strip().lower().replace("-", "_")] = value.strip()
    return sections


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise DataError(f"expected a boolean, got {text!r}")


class _Ctx:
    """Flag/config/default resolution for one command invocation."""

    def __init__(self, args):
        self.args = args
        self.section = args.command
        self.config = load_config_file(args.config) if args.config else {}

    def get(self, key, parser=str, default=None):
        if parser is bool:
            parser = _parse_bool
        flag = getattr(self.args, key, None)
        if flag is not None:
            return parser(flag) if isinstance(flag, str) else flag
        for section in (self.section, "common"):
            raw = self.config.get(section, {}).get(key)
            if raw is not None:
                return parser(raw)
        return default


def _timestamp_line(enabled: bool) -> list[str]:
    if not enabled:
        return []
    return [f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}"]


def write_csv(path, header, rows, timestamp=True):
    """Write one CSV atomically (temp file + rename); path None means stdout."""
    lines = _timestamp_line(timestamp) + [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _info(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# shared argument handling

def build_graph(spec: str, seed: int, budget=None):
    """Graph from "urand:SCALE:DEG", "kron:SCALE[:EF]", "file:PATH", or a path."""
    kwargs = {} if budget is None else {"mem_budget": budget}
    if spec.startswith("urand:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise DataError(f"expected urand:SCALE:AVG_DEGREE, got {spec!r}")
        return gen_uniform_random(1 << int(parts[1]), float(parts[2]), seed=seed, **kwargs)
    if spec.startswith("kron:"):
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise DataError(f"expected kron:SCALE[:EDGE_FACTOR], got {spec!r}")
        edge_factor = float(parts[2]) if len(parts) == 3 else 16.0
        return gen_kronecker(int(parts[1]), edge_factor, seed=seed, **kwargs)
    path = spec[5:] if spec.startswith("file:") else spec
    try:
        if path.endswith(".csr"):
            return load_csr(path)
        return load_edge_list(path)
    except OSError as exc:
        raise DataError(f"cannot read graph file {path}: {exc}") from None


def pick_source(graph, source_spec) -> int:
    if isinstance(source_spec, str) and source_spec == "max-degree":
        if graph.num_vertices == 0:
            raise DataError("empty graph has no source vertex")
        return int(np.argmax(graph.degrees()))
    return int(source_spec)


def run_traversal(graph, algorithm, source, weight_seed):
    if algorithm == "bfs":
        return bfs(graph, source)
    if algorithm == "sssp":
        return sssp(graph, source, weight_seed=weight_seed)
    raise DataError(f"unknown algorithm {algorithm!r}")


def _split_csv_list(text):
    return [w.strip() for w in str(text).split(",") if w.strip()]


def _link_from_ctx(ctx) -> LinkProfile:
    profile = ctx.get("profile")
    if profile:
        if profile not in LINK_PRESETS:
            raise DataError(f"unknown link profile {profile!r} (known: {sorted(LINK_PRESETS)})")
        return LINK_PRESETS[profile]
    bandwidth = ctx.get("link_bandwidth", parse_bandwidth)
    nmax = ctx.get("link_nmax", int)
    if bandwidth is None or nmax is None:
        raise DataError("need --profile or both --link-bandwidth and --link-nmax")
    return LinkProfile(bandwidth, nmax)


def _device_from_ctx(ctx) -> DeviceProfile:
    preset = ctx.get("device")
    if preset:
        if preset not in DEVICE_PRESETS:
            raise DataError(f"unknown device preset {preset!r} (known: {sorted(DEVICE_PRESETS)})")
        return DEVICE_PRESETS[preset]
    iops = ctx.get("device_iops", parse_rate)
    latency = ctx.get("device_latency", parse_duration_ns)
    if iops is None or latency is None:
        raise DataError("need --device or both --device-iops and --device-latency")
    return DeviceProfile(iops, latency * 1e-9)


def _sim_config_from_ctx(ctx, delta_ns=0) -> SimConfig:
    ndev = ctx.get("num_devices", int, 1)
    dev = DeviceConfig(
        base_latency_ns=ctx.get("base_latency", parse_duration_ns, 1700),
        extra_latency_ns=int(delta_ns),
        outstanding_cap=ctx.get("cap", int, 128),
        channel_bandwidth_Bps=ctx.get("channel_bandwidth", parse_bandwidth, 5_700e6),
    )
    return SimConfig(
        link_nmax=ctx.get("link_nmax", int, 768),
        devices=(dev,) * ndev,
        request_size=ctx.get("d", parse_bytes, 64),
        split_size=ctx.get("split", parse_bytes, 64),
        interleave_granularity=ctx.get("interleave", parse_bytes, 4096),
        link_bandwidth_Bps=ctx.get("link_bandwidth", parse_bandwidth, math.inf),
        address_span_bytes=ctx.get("span", parse_bytes, 1 << 30),
        seed=ctx.get("seed", int, 1),
    )


# ---------------------------------------------------------------------------
# commands

def _require_graph(ctx) -> str:
    spec = ctx.get("graph")
    if spec is None:
        raise _UsageError("a graph spec is required (--graph or config key)")
    return spec


def cmd_gen(ctx):
    graph = build_graph(
        _require_graph(ctx), ctx.get("seed", int, 1), budget=ctx.get("budget", parse_bytes)
    )
    stats = degree_stats(graph)
    dedup = dedup_edge_count(graph)
    rows = [[
        graph.num_vertices,
        graph.num_edges,
        dedup,
        stats.avg_degree_nonzero,
        stats.avg_sublist_bytes,
    ]]
    write_csv(
        ctx.get("out"),
        ["num_vertices", "num_edges_raw", "num_edges_dedup", "avg_degree_nonzero", "avg_sublist_bytes"],
        rows,
        timestamp=not ctx.get("no_timestamp", bool, False),
    )
    save_path = ctx.get("save")
    if save_path:
        save_csr(graph, save_path)
        _info(f"saved CSR graph to {save_path}")
    return EXIT_OK


def _cmd_traversal(ctx, algorithm):
    graph = build_graph(_require_graph(ctx), ctx.get("seed", int, 1))
    source = pick_source(graph, ctx.get("source", str, "0"))
    result, trace = run_traversal(graph, algorithm, source, ctx.get("weight_seed", int, 1))
    trace_path = ctx.get("trace")
    if trace_path:
        fmt = "csv" if str(trace_path).endswith(".csv") else "binary"
        save_trace(trace, trace_path, fmt=fmt)
        _info(f"saved {trace.num_reads}-read trace to {trace_path}")
    if algorithm == "bfs":
        rows = frontier_histogram(result)
        header = ["depth", "num_vertices"]
    else:
        reached = int((result.dist_of >= 0).sum())
        rows = [[result.iterations, reached]]
        header = ["iterations", "reached_vertices"]
    write_csv(ctx.get("out"), header, rows, timestamp=not ctx.get("no_timestamp", bool, False))
    return EXIT_OK


def cmd_bfs(ctx):
    return _cmd_traversal(ctx, "bfs")


def cmd_sssp(ctx):
    return _cmd_traversal(ctx, "sssp")


_RAF_CTX: dict = {}


def _raf_worker(alignment):
    trace = _RAF_CTX["trace"]
    cfg = AlignmentConfig(
        alignment,
        mode=MODE_CACHED_BLOCK,
        cache_capacity_bytes=_RAF_CTX["cache"],
        issue_order=_RAF_CTX["issue_order"],
        shuffle_seed=_RAF_CTX["shuffle_seed"],
    )
    ledger = replay_cached(trace, cfg)
    return [alignment, ledger.useful_bytes, ledger.fetched_bytes, ledger.raf, ledger.avg_transfer_bytes]


def cmd_raf(ctx):
    graph = build_graph(_require_graph(ctx), ctx.get("seed", int, 1))
    source = pick_source(graph, ctx.get("source", str, "0"))
    _, trace = run_traversal(graph, ctx.get("algorithm", str, "bfs"), source, ctx.get("weight_seed", int, 1))
    alignments = [parse_bytes(a) for a in _split_csv_list(ctx.get("alignments", str, "32,64,128,256,512,1024,2048,4096"))]
    if not alignments:
        raise DataError("alignment list is empty")
    _RAF_CTX.update(
        trace=trace,
        cache=ctx.get("cache", parse_bytes, 0),
        issue_order=ctx.get("issue_order", str, ISSUE_SORTED),
        shuffle_seed=ctx.get("shuffle_seed", int, 0),
    )
    jobs = ctx.get("jobs", int, 1)
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_raf_worker, alignments))
    else:
        rows = [_raf_worker(a) for a in alignments]
    write_csv(
        ctx.get("out"),
        ["alignment_bytes", "useful_bytes", "fetched_bytes", "raf", "avg_transfer_bytes"],
        rows,
        timestamp=not ctx.get("no_timestamp", bool, False),
    )
    return EXIT_OK


def cmd_predict(ctx):
    link = _link_from_ctx(ctx)
    no_ts = not ctx.get("no_timestamp", bool, False)
    if ctx.get("curve", bool, False):
        graph = build_graph(_require_graph(ctx), ctx.get("seed", int, 1))
        source = pick_source(graph, ctx.get("source", str, "0"))
        _, trace = run_traversal(graph, "bfs", source, 0)
        transfers = [parse_bytes(t) for t in _split_csv_list(ctx.get("transfers", str, "512,1024,2048,4096,8192"))]
        dev = _device_from_ctx(ctx)
        points = predict_runtime_curve(trace, transfers, dev, link, cache_capacity=ctx.get("cache", parse_bytes, 0))
        rows = [[p.d_bytes, p.total_bytes, p.throughput_Bps, p.runtime_s] for p in points]
        write_csv(ctx.get("out"), ["d_bytes", "total_bytes_D", "throughput_Bps", "runtime_s"], rows, timestamp=no_ts)
        best = min(points, key=lambda p: p.runtime_s)
        _info(f"best transfer size: {best.d_bytes} bytes ({best.runtime_s:.6f} s)")
        return EXIT_OK
    if ctx.get("optimal", bool, False):
        dev = _device_from_ctx(ctx)
        d_opt = optimal_transfer(dev, link)
        rows = [[d_opt, slope(dev, link), link.bandwidth_Bps]]
        write_csv(ctx.get("out"), ["d_opt_bytes", "slope_per_s", "link_bandwidth_Bps"], rows, timestamp=no_ts)
        return EXIT_OK
    d = ctx.get("d", float)
    if d is None:
        raise DataError("predict needs --d (or --curve / --optimal)")
    min_iops, max_latency_s = requirements(link, float(d))
    rows = [[d, min_iops, max_latency_s * 1e9]]
    write_csv(ctx.get("out"), ["d_bytes", "min_iops", "max_latency_ns"], rows, timestamp=no_ts)
    return EXIT_OK


_SIM_CTX: dict = {}


def _sim_worker(delta_ns):
    cfg = _SIM_CTX["base"]
    rows = throughput_vs_latency_sweep(cfg, [delta_ns], duration_ns=_SIM_CTX["duration"])
    return rows[0]


def cmd_simulate(ctx):
    deltas = [parse_duration_ns(x) for x in _split_csv_list(ctx.get("delta", str, "0"))]
    if not deltas:
        raise DataError("added-latency sweep list is empty")
    base_cfg = _sim_config_from_ctx(ctx)
    duration = ctx.get("duration", parse_duration_ns)
    _SIM_CTX.update(base=base_cfg, duration=duration)
    jobs = ctx.get("jobs", int, 1)
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sim_worker, deltas))
    else:
        rows = [_sim_worker(d) for d in deltas]
    write_csv(
        ctx.get("out"),
        ["delta_latency_ns", "throughput_Bps", "mean_outstanding", "mean_latency_ns", "eq3_outstanding"],
        [[r["delta_latency_ns"], r["throughput_Bps"], r["mean_outstanding"], r["mean_latency_ns"], r["eq3_outstanding"]] for r in rows],
        timestamp=not ctx.get("no_timestamp", bool, False),
    )
    return EXIT_OK


def cmd_chase(ctx):
    delta = parse_duration_ns(ctx.get("delta", str, "0"))
    cfg = _sim_config_from_ctx(ctx, delta_ns=delta)
    hops = ctx.get("hops", int, 2000)
    read_size = ctx.get("read_size", parse_bytes, 128)
    per_hop = pointer_chase(cfg, hops, read_size=read_size)
    write_csv(
        ctx.get("out"),
        ["base_latency_ns", "delta_latency_ns", "read_bytes", "hops", "per_hop_ns"],
        [[cfg.devices[0].base_latency_ns, delta, read_size, hops, per_hop]],
        timestamp=not ctx.get("no_timestamp", bool, False),
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# report: the four standard figure analogues

def _report_raf(out_dir, scale, seed, no_ts, render):
    curves = {}
    rows_out = []
    for label, graph in (
        (f"urand{scale}", gen_uniform_random(1 << scale, 32, seed=seed)),
        (f"kron{scale}", gen_kronecker(scale, 16, seed=seed)),
    ):
        source = int(np.argmax(graph.degrees()))
        _, trace = bfs(graph, source)
        cache = graph.num_edges * 8 // 4
        sweep = raf_sweep(trace, [32, 64, 128, 256, 512, 1024, 2048, 4096], cache_capacity=cache)
        rows = [
            {
                "graph": label,
                "alignment_bytes": a,
                "useful_bytes": led.useful_bytes,
                "fetched_bytes": led.fetched_bytes,
                "raf": led.raf,
                "avg_transfer_bytes": led.avg_transfer_bytes,
            }
            for a, led in sweep
        ]
        curves[label] = rows
        rows_out += rows
    path = os.path.join(out_dir, "raf_vs_alignment.csv")
    write_csv(
        path,
        ["graph", "alignment_bytes", "useful_bytes", "fetched_bytes", "raf", "avg_transfer_bytes"],
        [[r["graph"], r["alignment_bytes"], r["useful_bytes"], r["fetched_bytes"], r["raf"], r["avg_transfer_bytes"]] for r in rows_out],
        timestamp=no_ts,
    )
    if render:
        plots.save_raf_figure(curves, os.path.join(out_dir, "raf_vs_alignment.png"))
    return curves


def _report_runtime_curve(out_dir, scale, seed, no_ts, render):
    graph = gen_uniform_random(1 << scale, 32, seed=seed)
    source = int(np.argmax(graph.degrees()))
    _, trace = bfs(graph, source)
    dev = DEVICE_PRESETS["ssd-array"]
    link = LINK_PRESETS["gen4"]
    points = predict_runtime_curve(trace, [512, 1024, 2048, 4096, 8192], dev, link)
    rows = [
        {
            "d_bytes": p.d_bytes,
            "total_bytes_D": p.total_bytes,
            "throughput_Bps": p.throughput_Bps,
            "runtime_s": p.runtime_s,
        }
        for p in points
    ]
    path = os.path.join(out_dir, "runtime_vs_transfer.csv")
    write_csv(
        path,
        ["d_bytes", "total_bytes_D", "throughput_Bps", "runtime_s"],
        [[r["d_bytes"], r["total_bytes_D"], r["throughput_Bps"], r["runtime_s"]] for r in rows],
        timestamp=no_ts,
    )
    if render:
        plots.save_runtime_curve_figure(rows, os.path.join(out_dir, "runtime_vs_transfer.png"))
    return rows


def _report_latency_sweep(out_dir, seed, no_ts, render):
    dev = DeviceConfig(base_latency_ns=1440, outstanding_cap=128, channel_bandwidth_Bps=5_700e6)
    cfg = SimConfig(link_nmax=768, devices=(dev,), request_size=64, seed=seed)
    rows = throughput_vs_latency_sweep(cfg, [0, 500, 1000, 1500, 2000, 2500, 3000])
    path = os.path.join(out_dir, "throughput_vs_latency.csv")
    write_csv(
        path,
        ["delta_latency_ns", "throughput_Bps", "mean_outstanding", "mean_latency_ns", "eq3_outstanding"],
        [[r["delta_latency_ns"], r["throughput_Bps"], r["mean_outstanding"], r["mean_latency_ns"], r["eq3_outstanding"]] for r in rows],
        timestamp=no_ts,
    )
    if render:
        plots.save_latency_sweep_figure(rows, os.path.join(out_dir, "throughput_vs_latency.png"))
    return rows


def _report_latency_knee(out_dir, seed, no_ts, render):
    link = LINK_PRESETS["gen3"]
    d_model = 89.6
    rows = []
    # model: host-memory baseline is link-bandwidth-bound
    base_t = throughput(DeviceProfile(1e12, 1.2e-6), link, d_model)
    for lat_us in (1.2, 1.7, 1.9, 2.2, 2.7, 3.2, 4.7):
        t = throughput(DeviceProfile(1e12, lat_us * 1e-6), link, d_model)
        rows.append(
            {
                "source": "predicted",
                "gpu_latency_ns": int(lat_us * 1000),
                "throughput_Bps": t,
                "normalized_runtime": base_t / t,
            }
        )
    # simulation: five memory-expander devices behind the same link
    def run(base_ns, delta_ns):
        devices = tuple(
            DeviceConfig(base_latency_ns=base_ns, extra_latency_ns=delta_ns, outstanding_cap=128, channel_bandwidth_Bps=5_700e6)
            for _ in range(5)
        )
        cfg = SimConfig(
            link_nmax=256, devices=devices, request_size=96, link_bandwidth_Bps=12_000e6, seed=seed
        )
        return simulate_closed_loop(cfg, 150 * cfg.max_latency_ns())

    dram = run(1200, 0)
    for delta_us in (0.0, 0.2, 0.5, 1.0, 2.0, 3.0):
        stats = run(1700, int(delta_us * 1000))
        rows.append(
            {
                "source": "simulated",
                "gpu_latency_ns": 1700 + int(delta_us * 1000),
                "throughput_Bps": stats.measured_throughput_Bps,
                "normalized_runtime": dram.measured_throughput_Bps / stats.measured_throughput_Bps,
            }
        )
    path = os.path.join(out_dir, "latency_knee.csv")
    write_csv(
        path,
        ["source", "gpu_latency_ns", "throughput_Bps", "normalized_runtime"],
        [[r["source"], r["gpu_latency_ns"], r["throughput_Bps"], r["normalized_runtime"]] for r in rows],
        timestamp=no_ts,
    )
    if render:
        plots.save_latency_knee_figure(rows, os.path.join(out_dir, "latency_knee.png"))
    return rows


def cmd_report(ctx):
    out_dir = ctx.get("out", str, "report")
    os.makedirs(out_dir, exist_ok=True)
    scale = ctx.get("scale", int, 18)
    seed = ctx.get("seed", int, 1)
    no_ts = not ctx.get("no_timestamp", bool, False)
    render = not ctx.get("no_plots", bool, False)
    _report_raf(out_dir, scale, seed, no_ts, render)
    _info("wrote raf_vs_alignment")
    _report_runtime_curve(out_dir, scale, seed, no_ts, render)
    _info("wrote runtime_vs_transfer")
    _report_latency_sweep(out_dir, seed, no_ts, render)
    _info("wrote throughput_vs_latency")
    _report_latency_knee(out_dir, seed, no_ts, render)
    _info("wrote latency_knee")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_common(sub):
    sub.add_argument("--config", help="flat key=value config file with [section] headers")
    sub.add_argument("--out", help="output CSV path (default stdout)")
    sub.add_argument("--seed", type=int, help="seed for generators and simulations")
    sub.add_argument("--jobs", type=int, help="parallel jobs for sweep commands")
    sub.add_argument("--no-timestamp", action="store_const", const=True, dest="no_timestamp",
                     help="omit the generated-at comment line for byte-identical reruns")


def _make_parser():
    parser = _Parser(prog="extmem", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="generate or ingest a graph and print its stats")
    p.add_argument("--graph", help="urand:SCALE:DEG | kron:SCALE[:EF] | file:PATH | PATH")
    p.add_argument("--save", help="write the graph in binary CSR form")
    p.add_argument("--budget", help="memory budget for generation (bytes, suffixes ok)")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    for name, fn in (("bfs", cmd_bfs), ("sssp", cmd_sssp)):
        p = subs.add_parser(name, help=f"run {name} and export its access trace")
        p.add_argument("--graph")
        p.add_argument("--source", help="source vertex id or 'max-degree'")
        p.add_argument("--trace", help="trace output path (.csv suffix selects text mode)")
        if name == "sssp":
            p.add_argument("--weight-seed", type=int, dest="weight_seed",
                           help="edge-weight seed; 0 means unit weights")
        _add_common(p)
        p.set_defaults(func=fn)

    p = subs.add_parser("raf", help="replay a traversal trace across alignment sizes")
    p.add_argument("--graph")
    p.add_argument("--source", help="source vertex id or 'max-degree'")
    p.add_argument("--algorithm", choices=["bfs", "sssp"])
    p.add_argument("--weight-seed", type=int, dest="weight_seed")
    p.add_argument("--alignments", help="comma list of block sizes, e.g. 32,128,512,4KiB")
    p.add_argument("--cache", help="LRU capacity in bytes (0 = no cache)")
    p.add_argument("--issue-order", choices=["sorted", "shuffled"], dest="issue_order")
    p.add_argument("--shuffle-seed", type=int, dest="shuffle_seed")
    _add_common(p)
    p.set_defaults(func=cmd_raf)

    p = subs.add_parser("predict", help="throughput-model queries: requirements, optimal size, runtime curve")
    p.add_argument("--profile", help="link preset: gen3 | gen4 | gen5")
    p.add_argument("--link-bandwidth", dest="link_bandwidth", help="effective link bandwidth")
    p.add_argument("--link-nmax", type=int, dest="link_nmax", help="outstanding-request ceiling")
    p.add_argument("--d", help="average transfer size in bytes")
    p.add_argument("--optimal", action="store_const", const=True, help="solve for the optimal transfer size")
    p.add_argument("--curve", action="store_const", const=True, help="predict runtime over a transfer-size sweep")
    p.add_argument("--device", help=f"device preset: {' | '.join(sorted(DEVICE_PRESETS))}")
    p.add_argument("--device-iops", dest="device_iops", help="device random-read rate (e.g. 93.75MIOPS)")
    p.add_argument("--device-latency", dest="device_latency", help="device latency (e.g. 16us)")
    p.add_argument("--graph", help="graph spec for --curve")
    p.add_argument("--source")
    p.add_argument("--transfers", help="comma list of transfer sizes for --curve")
    p.add_argument("--cache", help="replay cache capacity for --curve")
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = subs.add_parser("simulate", help="closed-loop simulation over an added-latency sweep")
    p.add_argument("--delta", help="comma list of added latencies, e.g. 0,500ns,1us,3us")
    p.add_argument("--num-devices", type=int, dest="num_devices")
    p.add_argument("--base-latency", dest="base_latency", help="device base latency (default 1.7us)")
    p.add_argument("--cap", type=int, help="per-device outstanding cap in split units")
    p.add_argument("--channel-bandwidth", dest="channel_bandwidth", help="per-device channel bandwidth")
    p.add_argument("--link-nmax", type=int, dest="link_nmax")
    p.add_argument("--link-bandwidth", dest="link_bandwidth", help="shared return-link bandwidth (default unlimited)")
    p.add_argument("--d", help="request size in bytes")
    p.add_argument("--split", help="wire split quantum (default 64)")
    p.add_argument("--interleave", help="address interleave granularity")
    p.add_argument("--span", help="address span for random requests")
    p.add_argument("--duration", help="simulated time (default 150x max latency)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("chase", help="dependent-read latency probe")
    p.add_argument("--delta", help="added latency (single value)")
    p.add_argument("--hops", type=int)
    p.add_argument("--read-size", dest="read_size", help="bytes per hop (default 128)")
    p.add_argument("--num-devices", type=int, dest="num_devices")
    p.add_argument("--base-latency", dest="base_latency")
    p.add_argument("--cap", type=int)
    p.add_argument("--channel-bandwidth", dest="channel_bandwidth")
    p.add_argument("--link-nmax", type=int, dest="link_nmax")
    p.add_argument("--link-bandwidth", dest="link_bandwidth")
    p.add_argument("--split", help="wire split quantum")
    p.add_argument("--interleave")
    p.add_argument("--span")
    _add_common(p)
    p.set_defaults(func=cmd_chase)

    p = subs.add_parser("report", help="write the four figure-analogue CSVs and PNGs")
    p.add_argument("--scale", type=int, help="graph scale for the trace-driven tables (default 18)")
    p.add_argument("--no-plots", action="store_const", const=True, dest="no_plots",
                   help="skip PNG rendering")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(_Ctx(args))
    except _UsageError as exc:
        print(f"extmem: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"extmem: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ExtmemError as exc:
        print(f"extmem: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"extmem: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
