import numpy as np
import pytest

from extmem import (
    DataError,
    UNREACHED,
    bfs,
    frontier_histogram,
    gen_kronecker,
    gen_uniform_random,
    load_trace,
    save_trace,
    sssp,
    synth_weights,
)
from conftest import random_graph
from oracles import bfs_reference, dijkstra_reference


class TestBfs:
    def test_three_vertex_chain(self, chain3):
        result, trace = bfs(chain3, 0)
        assert result.depth_of.tolist() == [0, 1, 2]
        assert result.frontier_sizes == [1, 1, 1]
        # one read per step, matching each frontier vertex's sublist
        assert [s.tolist() for s in trace.steps] == [[[0, 8]], [[8, 8]], [[16, 0]]]
        assert trace.useful_bytes_total == 16

    def test_singleton(self, singleton):
        result, trace = bfs(singleton, 0)
        assert result.frontier_sizes == [1]
        assert result.depth_of.tolist() == [0]
        assert trace.num_steps == 1
        assert trace.steps[0].tolist() == [[0, 0]]

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_reference_bfs(self, seed):
        g = random_graph(9, 3, seed)
        source = seed % g.num_vertices
        result, _ = bfs(g, source)
        assert np.array_equal(result.depth_of, bfs_reference(g, source))

    def test_trace_reads_are_frontier_sublists(self, seed=5):
        g = random_graph(8, 4, seed)
        result, trace = bfs(g, 0)
        assert trace.num_steps == len(result.frontier_sizes)
        depth = result.depth_of
        for k, step in enumerate(trace.steps):
            verts = np.flatnonzero(depth == k)
            assert len(step) == result.frontier_sizes[k] == len(verts)
            expected = [[g.sublist(int(v)).byte_offset, g.sublist(int(v)).byte_length] for v in verts]
            assert step.tolist() == expected  # ascending vertex order

    def test_useful_bytes_counts_each_reached_vertex_once(self):
        g = random_graph(10, 6, 3)
        result, trace = bfs(g, 1)
        reached = result.depth_of >= 0
        assert trace.useful_bytes_total == 8 * int(g.degrees()[reached].sum())

    def test_source_out_of_range(self, chain3):
        with pytest.raises(DataError):
            bfs(chain3, 99)


class TestSynthWeights:
    def test_seed_zero_is_all_ones(self, urand16):
        w = synth_weights(urand16, 0)
        assert w.min() == w.max() == 1

    def test_deterministic(self, urand16):
        assert np.array_equal(synth_weights(urand16, 5), synth_weights(urand16, 5))

    def test_mean_of_uniform_weights(self):
        g = gen_uniform_random(1 << 17, 8, seed=2)  # ~1e6 edges
        w = synth_weights(g, 42)
        assert g.num_edges > 10**6
        assert 126 <= w.mean() <= 130
        assert w.min() >= 1 and w.max() <= 255


class TestSssp:
    def test_unit_weights_reduce_to_bfs(self):
        for seed in range(4):
            g = random_graph(9, 4, seed)
            bres, _ = bfs(g, 2)
            sres, _ = sssp(g, 2, weight_seed=0)
            assert np.array_equal(bres.depth_of, sres.dist_of)

    def test_chain_with_explicit_weights(self, chain3):
        result, trace = sssp(chain3, 0, weights=np.array([5, 2], dtype=np.uint8))
        assert result.dist_of.tolist() == [0, 5, 7]
        assert result.iterations == 3
        assert trace.num_steps == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dijkstra(self, seed):
        g = random_graph(8, 5, seed)
        w = synth_weights(g, seed + 100)
        result, _ = sssp(g, 0, weights=w)
        assert np.array_equal(result.dist_of, dijkstra_reference(g, 0, w))

    def test_matches_dijkstra_on_skewed_graph(self):
        g = gen_kronecker(10, 8, seed=3)
        w = synth_weights(g, 9)
        result, _ = sssp(g, 0, weights=w)
        assert np.array_equal(result.dist_of, dijkstra_reference(g, 0, w))

    def test_triangle_inequality_exhaustive(self):
        g = random_graph(10, 8, 17)
        assert g.num_edges <= 10**6
        w = synth_weights(g, 4)
        result, _ = sssp(g, 0, weights=w)
        dist = result.dist_of
        src = np.repeat(np.arange(g.num_vertices), g.degrees())
        both = (dist[src] >= 0) & (dist[g.edges] >= 0)
        assert np.all(dist[g.edges][both] <= dist[src][both] + w[both])

    def test_trace_batches_active_vertices(self):
        g = random_graph(7, 4, 8)
        result, trace = sssp(g, 0, weight_seed=3)
        assert trace.num_steps == result.iterations
        # round one reads exactly the source sublist
        assert trace.steps[0].tolist() == [[g.sublist(0).byte_offset, g.sublist(0).byte_length]]

    def test_weights_length_checked(self, chain3):
        with pytest.raises(DataError):
            sssp(chain3, 0, weights=np.array([1], dtype=np.uint8))


class TestFrontierHistogram:
    def test_singleton(self, singleton):
        result, _ = bfs(singleton, 0)
        assert frontier_histogram(result) == [(0, 1)]

    def test_sum_equals_reached(self):
        g = random_graph(11, 4, 2)
        result, _ = bfs(g, 0)
        hist = frontier_histogram(result)
        assert sum(c for _, c in hist) == int((result.depth_of >= 0).sum())

    def test_matches_depth_bincount(self):
        g = random_graph(10, 3, 6)
        result, _ = bfs(g, 0)
        depths = result.depth_of[result.depth_of >= 0]
        counts = np.bincount(depths)
        assert frontier_histogram(result) == [(d, int(c)) for d, c in enumerate(counts)]


class TestTraceExport:
    def test_binary_round_trip(self, tmp_path):
        g = random_graph(8, 4, 1)
        _, trace = bfs(g, 0)
        path = tmp_path / "t.trace"
        save_trace(trace, path)
        loaded = load_trace(path)
        assert loaded.useful_bytes_total == trace.useful_bytes_total
        assert loaded.num_steps == trace.num_steps
        for a, b in zip(loaded.steps, trace.steps):
            assert np.array_equal(a, b)

    def test_csv_mode(self, tmp_path, chain3):
        _, trace = bfs(chain3, 0)
        path = tmp_path / "t.csv"
        save_trace(trace, path, fmt="csv")
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "step_index,byte_offset,byte_length"
        assert lines[1:] == ["0,0,8", "1,8,8", "2,16,0"]

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "t.trace"
        path.write_bytes(b"XXXX" + bytes(12))
        with pytest.raises(DataError, match="magic"):
            load_trace(path)

    def test_truncated_body(self, tmp_path, chain3):
        _, trace = bfs(chain3, 0)
        path = tmp_path / "t.trace"
        save_trace(trace, path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(DataError, match="truncated"):
            load_trace(path)

    def test_unknown_format(self, tmp_path, chain3):
        _, trace = bfs(chain3, 0)
        with pytest.raises(DataError):
            save_trace(trace, tmp_path / "t.x", fmt="json")
