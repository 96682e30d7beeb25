"""Closed-form link/device throughput model and derived quantities.

Throughput of random reads of average size d through a link is

    T(d) = min( S * d,  Nmax / L * d,  W )

with S the device random-read rate (requests/s), L the average request
latency, Nmax the link's outstanding-request limit, and W the effective link
bandwidth. The first two terms form a line of slope s = min(S, Nmax / L);
the smallest d with s * d = W is the transfer size that reaches full link
utilization without oversized reads.

Units: bytes, seconds, requests/second, bytes/second. Bandwidth figures like
"24,000 MB/s" use decimal megabytes (1 MB/s = 1e6 B/s).
"""

from __future__ import annotations

from dataclasses import dataclass

from .access import ISSUE_SORTED, AlignmentConfig, MODE_CACHED_BLOCK, replay_cached
from .errors import DataError


@dataclass(frozen=True)
class DeviceProfile:
    """External-memory side: random-read rate and average latency seen from the consumer."""

    iops: float
    latency_s: float
    label: str = ""

    def __post_init__(self):
        if self.iops <= 0 or self.latency_s <= 0:
            raise DataError("device profile needs iops > 0 and latency > 0")


@dataclass(frozen=True)
class LinkProfile:
    """Link side: effective bandwidth and the outstanding-request ceiling."""

    bandwidth_Bps: float
    nmax: int
    label: str = ""

    def __post_init__(self):
        if self.bandwidth_Bps <= 0 or self.nmax < 1:
            raise DataError("link profile needs bandwidth > 0 and nmax >= 1")


# Effective (not theoretical) link bandwidths; outstanding-request ceilings
# per link generation.
LINK_PRESETS = {
    "gen3": LinkProfile(12_000e6, 256, label="pcie-gen3-x16"),
    "gen4": LinkProfile(24_000e6, 768, label="pcie-gen4-x16"),
    "gen5": LinkProfile(48_000e6, 768, label="pcie-gen5-x16"),
}

# Device presets used by the worked examples and the report command.
DEVICE_PRESETS = {
    # Host memory over the link: effectively unlimited IOPS, ~1.2 us round trip.
    "dram": DeviceProfile(1e12, 1.2e-6, label="host-dram"),
    # Memory-expander path: host-memory latency plus the interface hop.
    "cxl": DeviceProfile(1e12, 1.7e-6, label="cxl-dram"),
    # Block-cache SSD array: 6 MIOPS aggregate, tens of microseconds.
    "ssd-array": DeviceProfile(6e6, 20e-6, label="nvme-array"),
    # Low-latency flash array: ~11 MIOPS per drive, 16 drives, under 5 us.
    "flash-array": DeviceProfile(176e6, 5e-6, label="low-latency-flash"),
    # The running example profile (100 MIOPS at 16 us).
    "example": DeviceProfile(100e6, 16e-6, label="example"),
}


def throughput(dev: DeviceProfile, link: LinkProfile, d: float) -> float:
    """T(d) = min(S*d, Nmax/L*d, W) in bytes/second."""
    if d <= 0:
        raise DataError("transfer size must be > 0")
    return min(dev.iops * d, link.nmax / dev.latency_s * d, link.bandwidth_Bps)


def slope(dev: DeviceProfile, link: LinkProfile) -> float:
    """Requests/second actually sustainable: min(S, Nmax/L)."""
    return min(dev.iops, link.nmax / dev.latency_s)


def runtime(total_bytes: float, throughput_Bps: float) -> float:
    """Seconds to move total_bytes at the given throughput."""
    if throughput_Bps <= 0:
        raise DataError("throughput must be > 0")
    return total_bytes / throughput_Bps


def concurrency(throughput_Bps: float, latency_s: float, d: float) -> float:
    """Outstanding requests implied by steady state: N = T*L/d."""
    if d <= 0:
        raise DataError("transfer size must be > 0")
    return throughput_Bps * latency_s / d


def optimal_transfer(dev: DeviceProfile, link: LinkProfile) -> float:
    """Smallest d with slope * d = W: full bandwidth at minimum request size."""
    s = slope(dev, link)
    if s <= 0:
        raise DataError("slope must be > 0")
    return link.bandwidth_Bps / s


def requirements(link: LinkProfile, d: float) -> tuple[float, float]:
    """(min_iops, max_latency_s) for a device to saturate the link at size d.

    The boundary where min(S, Nmax/L) * d >= W holds with equality:
    S >= W/d and L <= Nmax*d/W.
    """
    if d <= 0:
        raise DataError("transfer size must be > 0")
    return link.bandwidth_Bps / d, link.nmax * d / link.bandwidth_Bps


@dataclass(frozen=True)
class CurvePoint:
    d_bytes: int
    total_bytes: int
    throughput_Bps: float
    runtime_s: float


def predict_runtime_curve(
    trace,
    transfer_sizes,
    dev: DeviceProfile,
    link: LinkProfile,
    cache_capacity: int = 0,
    issue_order: str = ISSUE_SORTED,
    shuffle_seed: int = 0,
) -> list[CurvePoint]:
    """Runtime versus transfer size for a block-cache replay where d = a.

    For each d: D comes from replaying the trace at alignment d, T from the
    throughput model, and the runtime is D/T. The returned list preserves the
    sweep order; min(points, key=runtime_s) is the predicted best size.
    """
    sizes = [int(d) for d in transfer_sizes]
    if not sizes:
        raise DataError("transfer size list must be nonempty")
    points = []
    for d in sizes:
        cfg = AlignmentConfig(
            d,
            mode=MODE_CACHED_BLOCK,
            cache_capacity_bytes=cache_capacity,
            issue_order=issue_order,
            shuffle_seed=shuffle_seed,
        )
        ledger = replay_cached(trace, cfg)
        t_bps = throughput(dev, link, float(d))
        points.append(
            CurvePoint(
                d_bytes=d,
                total_bytes=ledger.fetched_bytes,
                throughput_Bps=t_bps,
                runtime_s=runtime(ledger.fetched_bytes, t_bps),
            )
        )
    return points


def best_transfer(points: list[CurvePoint]) -> CurvePoint:
    """Curve point with the shortest runtime."""
    if not points:
        raise DataError("empty curve")
    return min(points, key=lambda p: p.runtime_s)
