import math
from fractions import Fraction

import pytest

from extmem import (
    AlignmentConfig,
    DataError,
    DeviceProfile,
    LINK_PRESETS,
    LinkProfile,
    best_transfer,
    bfs,
    concurrency,
    optimal_transfer,
    predict_runtime_curve,
    replay_cached,
    requirements,
    runtime,
    slope,
    throughput,
)

GEN4 = LINK_PRESETS["gen4"]
GEN3 = LINK_PRESETS["gen3"]
EXAMPLE_DEV = DeviceProfile(iops=100e6, latency_s=16e-6)


def throughput_fraction(iops, latency, nmax, bandwidth, d):
    """Exact-rational evaluation of the throughput minimum."""
    terms = (
        Fraction(iops) * Fraction(d),
        Fraction(nmax) / Fraction(latency) * Fraction(d),
        Fraction(bandwidth),
    )
    return min(terms)


class TestThroughput:
    @pytest.mark.parametrize("d", [64, 500, 4096])
    def test_worked_example(self, d):
        t = throughput(EXAMPLE_DEV, GEN4, d)
        expected = min(100e6 * d, GEN4.nmax / 16e-6 * d, 24_000e6)
        assert t == expected
        exact = throughput_fraction(Fraction(100_000_000), Fraction(16, 10**6), 768, 24 * 10**9, d)
        assert t == pytest.approx(float(exact), rel=1e-12)

    def test_large_transfer_hits_bandwidth(self):
        assert throughput(EXAMPLE_DEV, GEN4, 1 << 20) == 24_000e6

    def test_iops_limited_device_boundary(self):
        dev = DeviceProfile(iops=6e6, latency_s=1e-6)  # slack latency
        assert throughput(dev, GEN4, 4096) == 24_000e6
        assert throughput(dev, GEN4, 2048) == 12_288e6

    def test_monotone_in_profile_parameters(self):
        base = throughput(EXAMPLE_DEV, GEN4, 100)
        assert throughput(DeviceProfile(200e6, 16e-6), GEN4, 100) >= base
        assert throughput(DeviceProfile(100e6, 32e-6), GEN4, 100) <= base
        assert throughput(EXAMPLE_DEV, LinkProfile(24_000e6, 1024), 100) >= base
        assert throughput(EXAMPLE_DEV, LinkProfile(12_000e6, 768), 100) <= base
        assert base <= GEN4.bandwidth_Bps

    def test_invalid_transfer_size(self):
        with pytest.raises(DataError):
            throughput(EXAMPLE_DEV, GEN4, 0)


class TestSlope:
    def test_worked_example(self):
        assert slope(EXAMPLE_DEV, GEN4) == 48e6

    def test_iops_limited_regime(self):
        dev = DeviceProfile(iops=5e6, latency_s=1e-9)
        assert slope(dev, GEN4) == 5e6

    def test_host_memory_profile(self):
        dev = DeviceProfile(iops=1e12, latency_s=1.2e-6)
        s = slope(dev, GEN4)
        assert s == 768 / 1.2e-6
        assert s * 89.6 == pytest.approx(57_344e6, rel=1e-12)

    def test_piecewise_linear_structure(self):
        for d in (32, 64, 89.6, 128, 256):
            t = throughput(EXAMPLE_DEV, GEN4, d)
            if t < GEN4.bandwidth_Bps:
                assert t == pytest.approx(slope(EXAMPLE_DEV, GEN4) * d, rel=1e-12)


class TestRuntime:
    def test_one_second(self):
        assert runtime(24e9, 24e9) == 1.0

    def test_linearity(self):
        assert runtime(2 * 7e9, 3e9) == pytest.approx(2 * runtime(7e9, 3e9), rel=1e-12)

    def test_runtime_ratio_equals_raf_ratio(self, urand16_trace):
        big = replay_cached(urand16_trace, AlignmentConfig(4096))
        small = replay_cached(urand16_trace, AlignmentConfig(32))
        w = GEN4.bandwidth_Bps
        ratio = runtime(big.fetched_bytes, w) / runtime(small.fetched_bytes, w)
        assert ratio == pytest.approx(big.raf / small.raf, rel=1e-12)

    def test_zero_throughput_rejected(self):
        with pytest.raises(DataError):
            runtime(1.0, 0.0)


class TestConcurrency:
    def test_prototype_cap(self):
        n = concurrency(5_700e6, 1.44e-6, 64)
        assert n == pytest.approx(128, rel=0.01)

    def test_zero_throughput(self):
        assert concurrency(0.0, 1e-6, 64) == 0.0

    def test_never_exceeds_link_ceiling(self):
        for d in (32, 64, 100, 512, 4096):
            t = throughput(EXAMPLE_DEV, GEN4, d)
            assert concurrency(t, EXAMPLE_DEV.latency_s, d) <= GEN4.nmax * (1 + 1e-12)


class TestOptimalTransfer:
    def test_iops_limited_array(self):
        dev = DeviceProfile(iops=6e6, latency_s=1e-6)
        assert optimal_transfer(dev, GEN4) == 4000.0

    def test_proportional_to_bandwidth(self):
        dev = DeviceProfile(iops=6e6, latency_s=1e-6)
        double = LinkProfile(2 * GEN4.bandwidth_Bps, GEN4.nmax)
        assert optimal_transfer(dev, double) == 2 * optimal_transfer(dev, GEN4)

    def test_latency_limited_profile(self):
        assert optimal_transfer(EXAMPLE_DEV, GEN4) == pytest.approx(500.0, rel=1e-12)


class TestRequirements:
    def test_gen4_at_coalesced_transfer(self):
        min_iops, max_latency = requirements(GEN4, 89.6)
        assert min_iops == pytest.approx(268e6, rel=0.01)
        assert max_latency == pytest.approx(2.87e-6, rel=0.01)

    def test_gen3_at_coalesced_transfer(self):
        min_iops, max_latency = requirements(GEN3, 89.6)
        assert min_iops == pytest.approx(134e6, rel=0.01)
        assert max_latency == pytest.approx(1.91e-6, rel=0.01)

    def test_sublist_sized_transfer(self):
        min_iops, _ = requirements(GEN4, 256)
        assert min_iops == 93.75e6

    def test_boundary_device_saturates_link(self):
        for link in (GEN3, GEN4):
            for d in (64, 89.6, 256, 1024):
                min_iops, max_latency = requirements(link, d)
                dev = DeviceProfile(iops=min_iops, latency_s=max_latency)
                assert throughput(dev, link, d) == pytest.approx(link.bandwidth_Bps, rel=1e-12)


class TestPredictRuntimeCurve:
    def test_spot_composition(self, urand16_trace):
        sizes = [512, 2048, 8192]
        points = predict_runtime_curve(urand16_trace, sizes, EXAMPLE_DEV, GEN4)
        for p in points:
            ledger = replay_cached(urand16_trace, AlignmentConfig(p.d_bytes))
            assert p.total_bytes == ledger.fetched_bytes
            assert p.throughput_Bps == throughput(EXAMPLE_DEV, GEN4, p.d_bytes)
            assert p.runtime_s == pytest.approx(p.total_bytes / p.throughput_Bps, rel=1e-12)

    def test_minimum_at_bandwidth_knee(self, urand16_trace):
        dev = DeviceProfile(iops=6e6, latency_s=20e-6)
        points = predict_runtime_curve(urand16_trace, [512, 1024, 2048, 4096, 8192], dev, GEN4)
        best = best_transfer(points)
        knee = GEN4.bandwidth_Bps / slope(dev, GEN4)
        assert knee == 4000.0
        assert best.d_bytes == 4096

    def test_unbounded_bandwidth_prefers_large_transfers(self, urand16_trace):
        # with no bandwidth cap, T grows linearly in d while fetched bytes grow
        # sublinearly, so runtime D/(s*d) falls as d rises
        link = LinkProfile(math.inf, 768)
        dev = DeviceProfile(iops=50e6, latency_s=1e-6)
        points = predict_runtime_curve(urand16_trace, [32, 64, 128, 256, 512], dev, link)
        runtimes = [p.runtime_s for p in points]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(runtimes, runtimes[1:]))

    def test_empty_sweep_rejected(self, urand16_trace):
        with pytest.raises(DataError):
            predict_runtime_curve(urand16_trace, [], EXAMPLE_DEV, GEN4)


class TestProfileValidation:
    def test_device_profile(self):
        with pytest.raises(DataError):
            DeviceProfile(iops=0, latency_s=1e-6)
        with pytest.raises(DataError):
            DeviceProfile(iops=1e6, latency_s=0)

    def test_link_profile(self):
        with pytest.raises(DataError):
            LinkProfile(bandwidth_Bps=0, nmax=8)
        with pytest.raises(DataError):
            LinkProfile(bandwidth_Bps=1e9, nmax=0)
