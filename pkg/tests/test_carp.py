import random
from pathlib import Path

import pytest

from arcfleet.carp import CarpFile, convert_to_instance, parse_carp
from arcfleet.core import ParseError

DATA = Path(__file__).parent / "data"


def _ring_file(n_nodes: int, extra: int, rng: random.Random) -> CarpFile:
    edges = [(i, i + 1, rng.randrange(1000, 20000, 1000)) for i in range(1, n_nodes)]
    edges.append((1, n_nodes, rng.randrange(1000, 20000, 1000)))
    present = {(u, v) for u, v, _ in edges}
    while len(edges) < n_nodes + extra:
        u, v = sorted(rng.sample(range(1, n_nodes + 1), 2))
        if (u, v) not in present:
            present.add((u, v))
            edges.append((u, v, rng.randrange(1000, 20000, 1000)))
    return CarpFile(name="ring", node_count=n_nodes, edges=edges)


class TestParseCarp:
    def test_gdb_style_file(self):
        carp = parse_carp((DATA / "gdb_mini.dat").read_text())
        assert carp.name == "gdb-mini"
        assert carp.node_count == 12
        assert len(carp.edges) == 22
        assert (1, 2, 13000) in carp.edges

    def test_single_edge_file(self):
        carp = parse_carp("NAME : tiny\nNODES : 2\nLIST_REQ_EDGES :\n(1,2) cost 5 demand 1\n")
        assert carp.node_count == 2
        assert carp.edges == [(1, 2, 5000)]

    def test_zero_vertex_rejected(self):
        with pytest.raises(ParseError, match="1-based"):
            parse_carp("NODES : 2\nLIST_REQ_EDGES :\n(0,2) cost 5\n")

    def test_missing_edge_section(self):
        with pytest.raises(ParseError, match="edge section"):
            parse_carp("NOMBRE : empty\nVERTICES : 4\n")

    def test_unknown_header_warns(self):
        with pytest.warns(UserWarning, match="unknown header"):
            parse_carp("FROBNICATE : 7\nLIST_REQ_EDGES :\n(1,2) cost 5\n")


class TestConvert:
    def test_fleet_sizing_small(self):
        # 15 edges -> 5 required -> 2 vehicles
        rng = random.Random(0)
        carp = _ring_file(10, 5, rng)
        inst = convert_to_instance(carp, seed=1)
        assert len(inst.required) == 5
        assert inst.vehicle_count == 2

    def test_fleet_sizing_large(self):
        # 189 edges -> 63 required -> 31 vehicles
        rng = random.Random(1)
        carp = _ring_file(140, 49, rng)
        inst = convert_to_instance(carp, seed=2)
        assert len(inst.required) == 63
        assert inst.vehicle_count == 31

    def test_capacity_and_recharge_scaling(self):
        carp = parse_carp((DATA / "gdb_mini.dat").read_text())
        inst = convert_to_instance(carp, seed=3)
        max_w = max(w for _, _, w in inst.graph.edges)
        assert max_w == 20000
        assert inst.capacity == 2 * max_w
        assert inst.recharge == 2 * inst.capacity

    def test_depot_count_floor_two(self):
        carp = parse_carp((DATA / "gdb_mini.dat").read_text())
        inst = convert_to_instance(carp, seed=4)
        assert len(inst.depots) == max(2, round(12 / 5))

    def test_reproducible_for_seed(self):
        carp = parse_carp((DATA / "gdb_mini.dat").read_text())
        a = convert_to_instance(carp, seed=42)
        b = convert_to_instance(carp, seed=42)
        assert a == b
        assert a != convert_to_instance(carp, seed=43)

    def test_invariants_across_seeds(self):
        carp = parse_carp((DATA / "gdb_mini.dat").read_text())
        for seed in range(10):
            inst = convert_to_instance(carp, seed=seed)
            max_w = max(w for _, _, w in inst.graph.edges)
            assert inst.capacity == 2 * max_w
            assert inst.recharge == 2 * inst.capacity
            assert inst.vehicle_count == max(1, len(inst.required) // 2)
            assert all(inst.graph.weight(u, v) <= inst.capacity for u, v in inst.required)
