import numpy as np
import pytest

from extmem import CsrGraph, bfs, gen_uniform_random, load_edge_list


@pytest.fixture
def chain3(tmp_path):
    """0 -> 1 -> 2 with a degree-0 tail vertex."""
    path = tmp_path / "chain3.txt"
    path.write_text("0 1\n1 2\n")
    return load_edge_list(path)


@pytest.fixture
def singleton():
    return CsrGraph(1, np.array([0, 0]), np.empty(0, dtype=np.int64))


@pytest.fixture(scope="session")
def urand16():
    return gen_uniform_random(1 << 16, 32, seed=1)


@pytest.fixture(scope="session")
def urand16_trace(urand16):
    _, trace = bfs(urand16, 0)
    return trace


def random_graph(scale, avg_degree, seed):
    return gen_uniform_random(1 << scale, avg_degree, seed=seed)
