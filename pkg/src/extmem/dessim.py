"""Discrete-event closed-loop simulation of reads over a bounded-concurrency link.

The load generator keeps a fixed number of requests in flight (the link's
outstanding ceiling), reissuing as completions arrive. Each request is routed
to a device by address interleave and split into wire-quantum units (64 B by
default). A unit's life:

    admission (device slot, FIFO)  ->  device channel (serialized, one
    quantum per unit)  ->  delay stage (base + extra latency, strictly
    in arrival order)  ->  shared return link (serialized at the link
    bandwidth, payload bytes)  ->  completion.

The request completes when its last unit returns; the device slot is held
from admission until the unit leaves the link. Device slots are counted in
split units, the link ceiling in whole requests.

All times are integer nanoseconds; serialization durations carry their
sub-nanosecond remainders forward so long-run rates match the configured
bandwidths exactly. With a fixed seed the event sequence is identical run to
run. Steady-state statistics exclude a warm-up window of 10x the largest
configured device latency.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DataError

SPLIT_SIZE_DEFAULT = 64

_WARMUP_FACTOR = 10
_MIN_DURATION_FACTOR = 100


@dataclass(frozen=True)
class DeviceConfig:
    """One memory device behind the link.

    base_latency_ns is the device's fixed service latency; extra_latency_ns
    is the adjustable bridge delay added on top. outstanding_cap counts split
    units concurrently admitted. channel_bandwidth_Bps serializes one split
    quantum per unit regardless of payload, so requests that pad up to the
    quantum cost full slots.
    """

    base_latency_ns: int
    extra_latency_ns: int = 0
    outstanding_cap: int = 1 << 30
    channel_bandwidth_Bps: float = math.inf

    def __post_init__(self):
        if self.base_latency_ns < 0 or self.extra_latency_ns < 0:
            raise DataError("latencies must be >= 0")
        if self.outstanding_cap < 1:
            raise DataError("outstanding cap must be >= 1")
        if self.channel_bandwidth_Bps <= 0:
            raise DataError("channel bandwidth must be > 0")

    @property
    def latency_ns(self) -> int:
        return self.base_latency_ns + self.extra_latency_ns


@dataclass(frozen=True)
class SimConfig:
    link_nmax: int
    devices: tuple
    request_size: int
    split_size: int = SPLIT_SIZE_DEFAULT
    interleave_granularity: int = 4096
    link_bandwidth_Bps: float = math.inf
    address_span_bytes: int = 1 << 30
    seed: int = 1

    def __post_init__(self):
        if not self.devices:
            raise DataError("configuration needs at least one device")
        if self.link_nmax < 1:
            raise DataError("link_nmax must be >= 1")
        if self.request_size < 1:
            raise DataError("request size must be >= 1")
        if self.split_size < 1:
            raise DataError("split size must be >= 1")
        if self.interleave_granularity < 1:
            raise DataError("interleave granularity must be >= 1")
        if self.link_bandwidth_Bps <= 0:
            raise DataError("link bandwidth must be > 0")
        object.__setattr__(self, "devices", tuple(self.devices))

    def unit_payloads(self) -> list[int]:
        """Payload bytes per split unit of one request."""
        full, rem = divmod(self.request_size, self.split_size)
        return [self.split_size] * full + ([rem] if rem else [])

    def max_latency_ns(self) -> int:
        return max(dev.latency_ns for dev in self.devices)


@dataclass
class SimStats:
    measured_throughput_Bps: float
    mean_outstanding: float
    mean_latency_ns: float
    completions: int
    duration_ns: int
    warmup_ns: int
    max_link_outstanding: int
    max_device_outstanding: int


class _Serializer:
    """Busy-pointer resource serving byte transfers at a fixed bandwidth.

    Durations are integer nanoseconds with the fractional remainder carried
    into the next transfer, so the long-run service rate equals the
    configured bandwidth instead of drifting with per-unit rounding.
    """

    __slots__ = ("free", "_per_byte_ns", "_carry")

    def __init__(self, bandwidth_Bps: float):
        self.free = 0
        self._per_byte_ns = 0.0 if math.isinf(bandwidth_Bps) else 1e9 / bandwidth_Bps
        self._carry = 0.0

    def serve(self, now: int, byte_count: int) -> int:
        """Serve byte_count starting no earlier than now; returns done time."""
        start = now if now > self.free else self.free
        ideal = byte_count * self._per_byte_ns + self._carry
        dur = int(ideal)
        self._carry = ideal - dur
        self.free = start + dur
        return self.free


class _DeviceState:
    __slots__ = ("cfg", "queue", "in_use", "channel", "last_ready", "max_in_use")

    def __init__(self, cfg: DeviceConfig):
        self.cfg = cfg
        self.queue: deque = deque()
        self.in_use = 0
        self.channel = _Serializer(cfg.channel_bandwidth_Bps)
        self.last_ready = 0
        self.max_in_use = 0


_EV_READY = 0
_EV_LINK_DONE = 1


def simulate_closed_loop(cfg: SimConfig, duration_ns: int) -> SimStats:
    """Run the closed loop for duration_ns and report steady-state statistics.

    duration_ns must cover at least 100x the largest configured device
    latency so the post-warm-up window dominates.
    """
    max_lat = cfg.max_latency_ns()
    if max_lat > 0 and duration_ns < _MIN_DURATION_FACTOR * max_lat:
        raise DataError(
            f"duration {duration_ns} ns under {_MIN_DURATION_FACTOR}x the max latency {max_lat} ns"
        )
    warmup = _WARMUP_FACTOR * max_lat
    rng = np.random.default_rng(cfg.seed)
    devices = [_DeviceState(d) for d in cfg.devices]
    payloads = cfg.unit_payloads()
    units_per_req = len(payloads)
    split_quantum = cfg.split_size

    heap: list = []
    seq = 0
    issued = 0
    completed = 0
    outstanding = 0
    max_outstanding = 0
    issue_time: dict[int, int] = {}
    remaining: dict[int, int] = {}
    link = _Serializer(cfg.link_bandwidth_Bps)

    # outstanding-count integral over the measurement window
    area = 0
    last_change = 0

    win_completions = 0
    win_latency_sum = 0

    def account(now: int) -> None:
        nonlocal area, last_change
        lo = max(last_change, warmup)
        hi = min(now, duration_ns)
        if hi > lo:
            area += outstanding * (hi - lo)
        last_change = now

    def admit(dev: _DeviceState, now: int) -> None:
        nonlocal seq
        while dev.queue and dev.in_use < dev.cfg.outstanding_cap:
            req_id, payload = dev.queue.popleft()
            dev.in_use += 1
            if dev.in_use > dev.max_in_use:
                dev.max_in_use = dev.in_use
            chan_done = dev.channel.serve(now, split_quantum)
            ready = max(chan_done + dev.cfg.latency_ns, dev.last_ready)
            dev.last_ready = ready
            heapq.heappush(heap, (ready, seq, _EV_READY, req_id, payload, dev))
            seq += 1

    def issue(now: int) -> None:
        nonlocal issued, outstanding, max_outstanding
        account(now)
        req_id = issued
        issued += 1
        outstanding += 1
        if outstanding > max_outstanding:
            max_outstanding = outstanding
        issue_time[req_id] = now
        remaining[req_id] = units_per_req
        addr = int(rng.integers(0, cfg.address_span_bytes))
        dev = devices[(addr // cfg.interleave_granularity) % len(devices)]
        for payload in payloads:
            dev.queue.append((req_id, payload))
        admit(dev, now)

    for _ in range(cfg.link_nmax):
        issue(0)

    while heap:
        now, _s, kind, req_id, payload, dev = heapq.heappop(heap)
        if kind == _EV_READY:
            done = link.serve(now, payload)
            heapq.heappush(heap, (done, seq, _EV_LINK_DONE, req_id, payload, dev))
            seq += 1
            continue
        # unit left the link: free the device slot, maybe finish the request
        dev.in_use -= 1
        admit(dev, now)
        remaining[req_id] -= 1
        if remaining[req_id] == 0:
            del remaining[req_id]
            account(now)
            outstanding -= 1
            completed += 1
            t0 = issue_time.pop(req_id)
            if warmup < now <= duration_ns:
                win_completions += 1
                win_latency_sum += now - t0
            if now < duration_ns:
                issue(now)
        assert issued == completed + outstanding

    account(duration_ns)
    window = duration_ns - warmup
    if window <= 0:
        raise DataError("measurement window is empty; increase duration")
    throughput = win_completions * cfg.request_size / (window * 1e-9)
    mean_out = area / window
    mean_lat = win_latency_sum / win_completions if win_completions else 0.0
    return SimStats(
        measured_throughput_Bps=throughput,
        mean_outstanding=mean_out,
        mean_latency_ns=mean_lat,
        completions=win_completions,
        duration_ns=duration_ns,
        warmup_ns=warmup,
        max_link_outstanding=max_outstanding,
        max_device_outstanding=max(d.max_in_use for d in devices),
    )


def simulate_bridge(base_latency_ns: int, extra_latency_ns: int, arrivals_ns) -> np.ndarray:
    """Delay stage alone: completion = arrival + base + extra, in arrival order."""
    if base_latency_ns < 0 or extra_latency_ns < 0:
        raise DataError("latencies must be >= 0")
    arrivals = np.asarray(arrivals_ns, dtype=np.int64)
    if arrivals.size > 1 and np.any(np.diff(arrivals) < 0):
        raise DataError("arrival times must be non-decreasing")
    return arrivals + base_latency_ns + extra_latency_ns


def pointer_chase(cfg: SimConfig, hops: int, read_size: int = 128) -> float:
    """Dependent-read chain; returns the measured latency per hop in ns.

    Each hop reads read_size bytes (split into wire units issued together, so
    concurrency never exceeds one request's unit count) and the next hop
    starts only when the previous one fully returns. Device caps are assumed
    to cover one request's units.
    """
    if hops < 1:
        raise DataError("hops must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    devices = [_DeviceState(d) for d in cfg.devices]
    full, rem = divmod(read_size, cfg.split_size)
    payloads = [cfg.split_size] * full + ([rem] if rem else [])
    link = _Serializer(cfg.link_bandwidth_Bps)
    now = 0
    for _ in range(hops):
        addr = int(rng.integers(0, cfg.address_span_bytes))
        dev = devices[(addr // cfg.interleave_granularity) % len(devices)]
        done = now
        for payload in payloads:
            chan_done = dev.channel.serve(now, cfg.split_size)
            ready = max(chan_done + dev.cfg.latency_ns, dev.last_ready)
            dev.last_ready = ready
            finish = link.serve(ready, payload)
            if finish > done:
                done = finish
        now = done
    return now / hops


def throughput_vs_latency_sweep(
    cfg: SimConfig, deltas_ns, duration_ns: int | None = None
) -> list[dict]:
    """One closed-loop run per extra-latency value.

    Rows carry the measured throughput/outstanding/latency plus the
    steady-state concurrency the throughput model implies for the configured
    device latency (eq3_outstanding = T * L / d).
    """
    rows = []
    for delta in deltas_ns:
        delta = int(delta)
        devices = tuple(
            DeviceConfig(
                base_latency_ns=d.base_latency_ns,
                extra_latency_ns=delta,
                outstanding_cap=d.outstanding_cap,
                channel_bandwidth_Bps=d.channel_bandwidth_Bps,
            )
            for d in cfg.devices
        )
        run_cfg = SimConfig(
            link_nmax=cfg.link_nmax,
            devices=devices,
            request_size=cfg.request_size,
            split_size=cfg.split_size,
            interleave_granularity=cfg.interleave_granularity,
            link_bandwidth_Bps=cfg.link_bandwidth_Bps,
            address_span_bytes=cfg.address_span_bytes,
            seed=cfg.seed,
        )
        dur = duration_ns
        if dur is None:
            dur = max(150 * run_cfg.max_latency_ns(), 1)
        stats = simulate_closed_loop(run_cfg, dur)
        l_cfg = run_cfg.max_latency_ns()
        rows.append(
            {
                "delta_latency_ns": delta,
                "throughput_Bps": stats.measured_throughput_Bps,
                "mean_outstanding": stats.mean_outstanding,
                "mean_latency_ns": stats.mean_latency_ns,
                "eq3_outstanding": stats.measured_throughput_Bps * l_cfg * 1e-9 / cfg.request_size,
            }
        )
    return rows
