import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arcfleet.core import (
    Graph,
    ParseError,
    ValidationError,
    format_time,
    graph_diameter,
    parse_instance,
    parse_time,
    serialize_instance,
    shortest_path,
)

from conftest import load_fixture, random_connected_graph


class TestTimeUnits:
    def test_parse_basic(self):
        assert parse_time("1.1") == 1100
        assert parse_time("6.2") == 6200
        assert parse_time("7") == 7000
        assert parse_time("0.045") == 45
        assert parse_time("11.8") == 11800

    def test_format_inverse(self):
        for mt in (0, 45, 1100, 7000, 11800, 123456):
            assert parse_time(format_time(mt)) == mt

    def test_too_many_digits(self):
        with pytest.raises(ParseError):
            parse_time("1.2345")

    @given(st.integers(min_value=0, max_value=10**9))
    def test_roundtrip_property(self, mt):
        assert parse_time(format_time(mt)) == mt


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError, match="self-loop"):
            Graph(3, ((1, 1, 5), (1, 2, 1), (2, 3, 1)))

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValidationError, match="duplicate"):
            Graph(2, ((1, 2, 1), (2, 1, 2)))

    def test_rejects_disconnected(self):
        with pytest.raises(ValidationError, match="disconnected"):
            Graph(4, ((1, 2, 1), (3, 4, 1)))

    def test_rejects_bad_weight(self):
        with pytest.raises(ValidationError):
            Graph(2, ((1, 2, 0),))


class TestShortestPath:
    def test_zero_self_distance(self):
        g = Graph(3, ((1, 2, 1000), (2, 3, 1000)))
        assert shortest_path(g, 3, 3) == (0, [3])

    def test_triangle_prefers_two_hops(self):
        # weights 1,1,3 on (a,b),(b,c),(a,c): the direct edge loses
        g = Graph(3, ((1, 2, 1000), (2, 3, 1000), (1, 3, 3000)))
        expected = _enumerate_best_path(g, 1, 3)
        assert shortest_path(g, 1, 3) == expected == (2000, [1, 2, 3])

    def test_forced_unique_path(self):
        g = Graph(3, ((1, 2, 1000), (2, 3, 1000)))
        assert shortest_path(g, 1, 3) == (2000, [1, 2, 3])

    def test_path_weight_sums_to_time(self):
        rng = random.Random(4)
        for _ in range(20):
            g = random_connected_graph(rng, 7, 4)
            a, b = rng.sample(list(g.nodes()), 2)
            time, path = shortest_path(g, a, b)
            assert sum(g.weight(u, v) for u, v in zip(path, path[1:])) == time

    def test_symmetry_and_triangle_inequality(self):
        rng = random.Random(11)
        for _ in range(10):
            g = random_connected_graph(rng, 6, 4)
            nodes = list(g.nodes())
            sp = {(a, b): shortest_path(g, a, b)[0] for a in nodes for b in nodes}
            for a in nodes:
                for b in nodes:
                    assert sp[(a, b)] == sp[(b, a)]
                    for c in nodes:
                        assert sp[(a, c)] <= sp[(a, b)] + sp[(b, c)]

    def test_matches_enumeration_oracle(self):
        rng = random.Random(99)
        for _ in range(10):
            g = random_connected_graph(rng, 6, 3)
            a, b = rng.sample(list(g.nodes()), 2)
            assert shortest_path(g, a, b)[0] == _enumerate_best_path(g, a, b)[0]


def _enumerate_best_path(g: Graph, src: int, dst: int):
    """Oracle: exhaust all simple paths."""
    best = None

    def walk(node, time, path):
        nonlocal best
        if node == dst:
            if best is None or (time, path) < best:
                best = (time, list(path))
            return
        for nbr, w in g.adjacency[node]:
            if nbr not in path:
                path.append(nbr)
                walk(nbr, time + w, path)
                path.pop()

    walk(src, 0, [src])
    return best


def _floyd_warshall(g: Graph):
    """Oracle: classic all-pairs table."""
    inf = float("inf")
    n = g.node_count
    dist = [[0 if i == j else inf for j in range(n + 1)] for i in range(n + 1)]
    for u, v, w in g.edges:
        dist[u][v] = dist[v][u] = min(dist[u][v], w)
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    return dist


class TestDiameter:
    def test_single_edge(self):
        assert graph_diameter(Graph(2, ((1, 2, 5000),))) == 5000

    def test_unit_path(self):
        assert graph_diameter(Graph(3, ((1, 2, 1000), (2, 3, 1000)))) == 2000

    def test_matches_floyd_warshall(self):
        rng = random.Random(7)
        for _ in range(5):
            g = random_connected_graph(rng, 6, 4)
            table = _floyd_warshall(g)
            expected = max(
                table[i][j] for i in g.nodes() for j in g.nodes()
            )
            assert graph_diameter(g) == expected


class TestInstanceParsing:
    def test_worked_example_fixture(self):
        inst = load_fixture("two_depot_relay.txt")
        assert inst.graph.node_count == 8
        assert len(inst.graph.edges) == 13
        assert inst.depots == (1, 5)
        assert inst.required == ((7, 8),)
        assert inst.vehicle_count == 1
        assert inst.capacity == 7000
        assert inst.recharge == 1100
        assert inst.start_depots == (1,)

    def test_everything_required_boundary(self):
        text = (
            "NAME full\nNODES 3\nDEPOTS 1 2 3\nVEHICLES 2\nCAPACITY 9\nRECHARGE 1\n"
            "EDGES 3\n1 2 1\n2 3 1\n1 3 1\nREQUIRED 3\n1 2\n2 3\n1 3\n"
        )
        inst = parse_instance(text)
        assert set(inst.depots) == {1, 2, 3}
        assert len(inst.required) == 3

    def test_self_loop_required_rejected(self):
        text = (
            "NAME bad\nNODES 9\nDEPOTS 1\nVEHICLES 1\nCAPACITY 9\nRECHARGE 1\n"
            "EDGES 8\n" + "\n".join(f"{i} {i+1} 1" for i in range(1, 9)) +
            "\nREQUIRED 1\n9 9\n"
        )
        with pytest.raises(ParseError, match="self-loop"):
            parse_instance(text)

    def test_required_edge_missing_from_graph(self):
        text = (
            "NAME bad\nNODES 3\nDEPOTS 1\nVEHICLES 1\nCAPACITY 9\nRECHARGE 1\n"
            "EDGES 2\n1 2 1\n2 3 1\nREQUIRED 1\n1 3\n"
        )
        with pytest.raises(ValidationError, match="not in edge set"):
            parse_instance(text)

    def test_syntax_error_carries_line_number(self):
        text = "NAME x\nNODES 2\nDEPOTS 1\nVEHICLES 1\nCAPACITY 1\nRECHARGE 0\nEDGES 1\n1 2\n"
        with pytest.raises(ParseError, match="line 8"):
            parse_instance(text)

    def test_start_defaults_cycle_through_depots(self):
        text = (
            "NAME cyc\nNODES 4\nDEPOTS 2 4\nVEHICLES 3\nCAPACITY 9\nRECHARGE 1\n"
            "EDGES 3\n1 2 1\n2 3 1\n3 4 1\nREQUIRED 1\n2 3\n"
        )
        inst = parse_instance(text)
        assert inst.start_depots == (2, 4, 2)

    def test_speed_divides_weights(self):
        text = (
            "NAME spd\nNODES 2\nDEPOTS 1 2\nVEHICLES 1\nCAPACITY 9\nRECHARGE 1\n"
            "SPEED 2\nEDGES 1\n1 2 3\nREQUIRED 1\n1 2\n"
        )
        inst = parse_instance(text)
        assert inst.graph.weight(1, 2) == 1500
        assert inst.speed == Fraction(2)

    def test_roundtrip_identity(self):
        inst = load_fixture("two_depot_relay.txt")
        again = parse_instance(serialize_instance(inst))
        assert again == inst
        assert serialize_instance(again) == serialize_instance(inst)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31))
    def test_roundtrip_random_instances(self, seed):
        from conftest import random_instance

        inst = random_instance(random.Random(seed))
        assert parse_instance(serialize_instance(inst)) == inst
