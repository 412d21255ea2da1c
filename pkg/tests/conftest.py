import random
from pathlib import Path

import pytest

from arcfleet.core import Graph, Instance, parse_instance

DATA = Path(__file__).parent / "data"


def load_fixture(name: str) -> Instance:
    return parse_instance((DATA / name).read_text())


@pytest.fixture
def relay_instance() -> Instance:
    """8 nodes, 13 edges, two depots, one required edge out of single-trip reach."""
    return load_fixture("two_depot_relay.txt")


def random_connected_graph(rng: random.Random, n: int, extra_edges: int,
                           max_weight: int = 5000, step: int = 100) -> Graph:
    """Random spanning tree plus extra edges; weights are multiples of `step`."""
    nodes = list(range(1, n + 1))
    rng.shuffle(nodes)
    edges = {}
    for i in range(1, n):
        u, v = nodes[rng.randrange(i)], nodes[i]
        edges[(min(u, v), max(u, v))] = rng.randrange(step, max_weight + 1, step)
    attempts = 0
    while len(edges) < n - 1 + extra_edges and attempts < 50 * extra_edges:
        attempts += 1
        u, v = rng.sample(range(1, n + 1), 2)
        key = (min(u, v), max(u, v))
        if key not in edges:
            edges[key] = rng.randrange(step, max_weight + 1, step)
    return Graph(n, tuple((u, v, w) for (u, v), w in sorted(edges.items())))


def random_instance(rng: random.Random, n_nodes=6, extra_edges=3, n_depots=2,
                    n_required=2, vehicles=2, capacity_factor=3) -> Instance:
    """Small solvable instance: capacity a few times the heaviest edge."""
    g = random_connected_graph(rng, n_nodes, extra_edges)
    depots = sorted(rng.sample(list(g.nodes()), min(n_depots, g.node_count)))
    required = sorted(rng.sample(sorted(g.edge_set()), min(n_required, len(g.edges))))
    capacity = capacity_factor * max(w for _, _, w in g.edges)
    return Instance(
        name=f"rand{rng.randrange(10**6)}",
        graph=g,
        depots=tuple(depots),
        required=tuple(required),
        vehicle_count=vehicles,
        capacity=capacity,
        recharge=capacity // 2,
    )
