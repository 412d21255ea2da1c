import random

import pytest
from hypothesis import given, settings, strategies as st

from arcfleet.core import Graph, ValidationError
from arcfleet.routing import (
    FleetPlan,
    Route,
    Trip,
    mission_time,
    parse_plan,
    required_edges_of_trip,
    route_time,
    serialize_plan,
    trip_index,
    trip_time,
    validate_plan,
)

from conftest import load_fixture, random_connected_graph


@pytest.fixture
def relay():
    inst = load_fixture("two_depot_relay.txt")
    reposition = Trip.from_nodes(inst.graph, [1, 3, 5])
    service = Trip.from_nodes(inst.graph, [5, 7, 8, 5])
    return inst, reposition, service


class TestTripTime:
    def test_reposition_takes_6_2(self, relay):
        inst, reposition, _ = relay
        assert trip_time(inst.graph, reposition) == 6200

    def test_service_takes_4_5(self, relay):
        inst, _, service = relay
        assert trip_time(inst.graph, service) == 4500

    def test_single_depot_trip_is_zero(self, relay):
        inst, _, _ = relay
        assert trip_time(inst.graph, Trip.from_nodes(inst.graph, [5])) == 0

    def test_non_adjacent_nodes_rejected(self, relay):
        inst, _, _ = relay
        with pytest.raises(ValidationError):
            Trip.from_nodes(inst.graph, [1, 8])


class TestRouteTime:
    def test_worked_route_takes_11_8(self, relay):
        inst, reposition, service = relay
        route = Route([reposition, service])
        assert route_time(inst.graph, route, inst.recharge) == 11800

    def test_single_trip_no_recharge(self):
        g = Graph(2, ((1, 2, 3500),))
        route = Route([Trip.from_nodes(g, [1, 2, 1])])
        assert route_time(g, route, 9000) == 7000

    def test_three_unit_trips(self):
        # 3 + 2 * 10 by direct summation
        g = Graph(2, ((1, 2, 500),))
        t = Trip.from_nodes(g, [1, 2, 1])
        assert route_time(g, Route([t, t, t]), 10000) == 23000

    def test_empty_route_is_zero(self):
        assert route_time(None, Route([]), 5000) == 0


class TestMissionTime:
    def test_single_vehicle(self, relay):
        inst, reposition, service = relay
        plan = FleetPlan([Route([reposition, service])], recharge=inst.recharge)
        assert mission_time(plan) == 11800

    def test_all_empty(self):
        plan = FleetPlan([Route([]), Route([])], recharge=1000)
        assert mission_time(plan) == 0

    def test_max_of_route_times(self):
        g = Graph(2, ((1, 2, 74000),))
        long = Route([Trip.from_nodes(g, [1, 2, 1])])
        short = Route([Trip.from_nodes(g, [1, 2])])
        plan = FleetPlan([long, short], recharge=0)
        assert mission_time(plan) == 148000
        assert plan.completion_times() == [148000, 74000]


class TestTripIndex:
    def test_mid_first_trip(self, relay):
        inst, reposition, service = relay
        route = Route([reposition, service])
        assert trip_index(inst.graph, route, inst.recharge, 3000) == 0

    def test_inside_recharge_window(self, relay):
        inst, reposition, service = relay
        route = Route([reposition, service])
        # accumulated 6.2 + 1.1 = 7.3 >= 6.5 keeps the loop on trip 0
        assert trip_index(inst.graph, route, inst.recharge, 6500) == 0

    def test_second_trip(self, relay):
        inst, reposition, service = relay
        route = Route([reposition, service])
        assert trip_index(inst.graph, route, inst.recharge, 8000) == 1

    def test_time_zero(self, relay):
        inst, reposition, service = relay
        assert trip_index(inst.graph, Route([reposition, service]), inst.recharge, 0) == 0

    def test_past_completion_rejected(self, relay):
        inst, reposition, service = relay
        route = Route([reposition, service])
        with pytest.raises(ValidationError, match="idle"):
            trip_index(inst.graph, route, inst.recharge, 11801)

    def test_monotone_in_time(self, relay):
        inst, reposition, service = relay
        route = Route([reposition, service])
        total = route_time(inst.graph, route, inst.recharge)
        last = 0
        for t in range(0, total + 1, 100):
            idx = trip_index(inst.graph, route, inst.recharge, t)
            assert idx >= last
            last = idx


class TestRequiredEdges:
    def test_service_trip_covers(self, relay):
        inst, _, service = relay
        assert required_edges_of_trip(inst.required, service) == {(7, 8)}

    def test_reposition_covers_nothing(self, relay):
        inst, reposition, _ = relay
        assert required_edges_of_trip(inst.required, reposition) == frozenset()

    def test_orientation_free(self):
        g = Graph(2, ((1, 2, 1000),))
        trip = Trip.from_nodes(g, [1, 2, 1])
        assert required_edges_of_trip([(2, 1)], trip) == {(1, 2)}

    def test_invariant_under_reversal(self):
        rng = random.Random(21)
        for _ in range(25):
            g = random_connected_graph(rng, 6, 4)
            nodes = [rng.randrange(1, 7)]
            for _ in range(5):
                nodes.append(rng.choice(g.adjacency[nodes[-1]])[0])
            trip = Trip.from_nodes(g, nodes)
            required = rng.sample(sorted(g.edge_set()), 2)
            assert required_edges_of_trip(required, trip) == required_edges_of_trip(
                required, trip.reversed()
            )


class TestRouteTimeFormula:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31))
    def test_random_routes(self, seed):
        rng = random.Random(seed)
        g = random_connected_graph(rng, 6, 4)
        recharge = rng.randrange(0, 3000, 100)
        trips = []
        start = rng.randrange(1, 7)
        for _ in range(rng.randrange(1, 4)):
            nodes = [start]
            for _ in range(rng.randrange(1, 4)):
                nodes.append(rng.choice(g.adjacency[nodes[-1]])[0])
            trips.append(Trip.from_nodes(g, nodes))
            start = nodes[-1]
        route = Route(trips)
        expected = sum(trip_time(g, t) for t in trips) + (len(trips) - 1) * recharge
        assert route_time(g, route, recharge) == expected


class TestPlanSerialization:
    def test_roundtrip(self, relay):
        inst, reposition, service = relay
        plan = FleetPlan([Route([reposition, service])], recharge=inst.recharge)
        text = serialize_plan(plan)
        assert text == "V1: (1 3 5)(5 7 8 5)\n"
        again = parse_plan(inst.graph, text)
        again.recharge = inst.recharge
        assert serialize_plan(again) == text

    def test_empty_route_line(self):
        plan = FleetPlan([Route([])], recharge=0)
        assert serialize_plan(plan) == "V1:\n"

    def test_validate_accepts_worked_plan(self, relay):
        inst, reposition, service = relay
        plan = FleetPlan([Route([reposition, service])], recharge=inst.recharge)
        validate_plan(inst, plan)

    def test_validate_rejects_uncovered(self, relay):
        inst, reposition, _ = relay
        plan = FleetPlan([Route([reposition])], recharge=inst.recharge)
        with pytest.raises(ValidationError, match="not covered"):
            validate_plan(inst, plan)

    def test_validate_rejects_overlong_trip(self, relay):
        inst, _, _ = relay
        walk = Trip.from_nodes(inst.graph, [1, 3, 5, 7, 8, 5])
        plan = FleetPlan([Route([walk])], recharge=inst.recharge)
        with pytest.raises(ValidationError, match="capacity"):
            validate_plan(inst, plan)

    def test_validate_rejects_broken_chain(self, relay):
        inst, reposition, _ = relay
        # 1-3-5 ends at 5 but the next trip starts back at 1
        plan_bad = FleetPlan([Route([reposition, reposition])], recharge=inst.recharge)
        with pytest.raises(ValidationError, match="chaining"):
            validate_plan(inst, plan_bad, check_coverage=False)
