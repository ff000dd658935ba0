import math

import numpy as np
import pytest

from hebbian_kuramoto import Graph, complete_graph, graph_from_edges

# Frequency vectors used across the dynamics and acceptance tests: the first
# sits outside every locked region at alpha = 0.3, the second well inside.
UNLOCKED_OMEGA = np.array([3.0, 3.0, -6.0]) / math.sqrt(6.0)
LOCKED_OMEGA = np.array([-1.0, -0.5, 1.5])


@pytest.fixture(scope="session")
def k3() -> Graph:
    return complete_graph(3)


def random_connected_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Random spanning tree plus independent extra edges with probability p."""
    pairs = []
    order = rng.permutation(n)
    for k in range(1, n):
        attach = order[rng.integers(0, k)]
        pairs.append((int(attach), int(order[k])))
    present = {tuple(sorted(e)) for e in pairs}
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in present and rng.random() < p:
                pairs.append((i, j))
    return graph_from_edges(n, pairs)
