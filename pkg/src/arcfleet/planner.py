"""Initial failure-free planning with simulated annealing on the mission time.

The search state assigns every required edge to one vehicle as an ordered
*service item*: a depot-to-depot walk that traverses the edge (and possibly
further required edges on the way).  Routes are rebuilt from the items via
the depot route table, so every candidate plan is feasible by construction;
annealing only decides who serves what, in which order, along which walk.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from arcfleet.core import Edge, Graph, Instance, InfeasibleError, shortest_path
from arcfleet.depots import DepotRouteTable, build_depot_routes
from arcfleet.routing import FleetPlan, Route, Trip, mission_time, required_edges_of_trip, route_time, validate_plan


@dataclass(frozen=True)
class SaConfig:
    """Annealing schedule; None temperatures auto-scale from the greedy cost."""

    seed: int
    initial_temperature: float | None = None
    cooling_rate: float = 0.95
    iterations_per_temperature: int = 200
    min_temperature: float | None = None
    restarts: int = 10

    def __post_init__(self):
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0,1)")
        if self.iterations_per_temperature <= 0 or self.restarts <= 0:
            raise ValueError("iteration counts must be positive")
        if self.initial_temperature is not None and self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")
        if self.min_temperature is not None and self.min_temperature <= 0:
            raise ValueError("min_temperature must be positive")


@dataclass(frozen=True)
class ServiceWalk:
    """Candidate depot-to-depot walk serving one required edge first."""

    edge: Edge
    oriented: tuple[int, int]
    nodes: tuple[int, ...]
    duration: int
    covered: frozenset[Edge] = frozenset()

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def end(self) -> int:
        return self.nodes[-1]

    def trip(self) -> Trip:
        return Trip(self.nodes, self.duration)


def _service_walks(inst: Instance) -> dict[Edge, list[ServiceWalk]]:
    """Enumerate feasible service walks per required edge.

    Walks chain up to three required edges when the instance is small enough,
    which lets annealing reach multi-edge trips the exact oracle would use.
    Every walk starts and ends at depots and respects capacity.
    """
    g = inst.graph
    sp: dict[tuple[int, int], tuple[int, list[int]]] = {}

    def path(a: int, b: int) -> tuple[int, list[int]]:
        if (a, b) not in sp:
            sp[(a, b)] = shortest_path(g, a, b)
        return sp[(a, b)]

    if len(inst.required) <= 4 and len(inst.depots) <= 6:
        max_chain = 3
    elif len(inst.required) <= 8:
        max_chain = 2
    else:
        max_chain = 1

    walks: dict[Edge, list[ServiceWalk]] = {e: [] for e in inst.required}
    for first in inst.required:
        seen: set[tuple[int, ...]] = set()

        def extend(nodes: list[int], dur: int, orient: tuple[int, int],
                   used: frozenset[Edge], depth: int):
            tail = nodes[-1]
            for d_out in inst.depots:
                leg, leg_path = path(tail, d_out)
                total = dur + leg
                if total <= inst.capacity:
                    full = tuple(nodes + leg_path[1:])
                    if full not in seen:
                        seen.add(full)
                        covered = required_edges_of_trip(inst.required, Trip(full, total))
                        walks[first].append(ServiceWalk(first, orient, full, total, covered))
            if depth >= max_chain:
                return
            for nxt in inst.required:
                if nxt in used:
                    continue
                for a, b in (nxt, nxt[::-1]):
                    leg, leg_path = path(tail, a)
                    ndur = dur + leg + g.weight(a, b)
                    if ndur <= inst.capacity:
                        extend(nodes + leg_path[1:] + [b], ndur, orient,
                               used | {nxt}, depth + 1)

        for orient in (first, first[::-1]):
            a, b = orient
            for d_in in inst.depots:
                head, head_path = path(d_in, a)
                dur = head + g.weight(a, b)
                if dur <= inst.capacity:
                    extend(head_path + [b], dur, orient, frozenset({first}), 1)

        walks[first].sort(key=lambda w: (w.duration, w.nodes))
        del walks[first][200:]
        if not walks[first]:
            raise InfeasibleError(
                f"required edge {first} not coverable within capacity from any depot"
            )
    return walks


@dataclass
class _State:
    """Per-vehicle ordered service items plus cached rebuilt routes."""

    inst: Instance
    table: DepotRouteTable
    items: list[list[ServiceWalk]]
    trips: list[list[Trip]]
    times: list[int]

    def __post_init__(self):
        self._conn_cover: dict[tuple[int, int], frozenset[Edge]] = {}

    def _connection_cover(self, d1: int, d2: int, conn_trips) -> frozenset[Edge]:
        key = (d1, d2)
        cached = self._conn_cover.get(key)
        if cached is None:
            cached = frozenset().union(
                *(required_edges_of_trip(self.inst.required, t) for t in conn_trips)
            ) if conn_trips else frozenset()
            self._conn_cover[key] = cached
        return cached

    def rebuild(self, k: int, items: list[ServiceWalk]) -> tuple[list[Trip], int] | None:
        """Route for vehicle k from its items, or None when a connection is missing.

        An item whose edge is already traversed by the route built so far is
        skipped: its walk would add time without adding coverage.
        """
        cur = self.inst.start_depots[k]
        trips: list[Trip] = []
        track = len(items) > 1
        covered: set[Edge] = set()
        for item in items:
            if track and item.edge in covered:
                continue
            conn = self.table.lookup(cur, item.start)
            if conn is None:
                return None
            trips.extend(conn[1])
            trips.append(item.trip())
            if track:
                covered |= self._connection_cover(cur, item.start, conn[1])
                covered |= item.covered
            cur = item.end
        time = sum(t.duration for t in trips) + max(len(trips) - 1, 0) * self.inst.recharge
        return trips, time

    def apply(self, changes: dict[int, list[ServiceWalk]]) -> dict[int, tuple] | None:
        rebuilt = {}
        for k, items in changes.items():
            result = self.rebuild(k, items)
            if result is None:
                return None
            rebuilt[k] = result
        return rebuilt

    def commit(self, changes: dict[int, list[ServiceWalk]], rebuilt: dict[int, tuple]):
        for k, items in changes.items():
            self.items[k] = items
            self.trips[k], self.times[k] = rebuilt[k]

    def makespan_with(self, rebuilt: dict[int, tuple]) -> int:
        return max(
            (rebuilt[k][1] if k in rebuilt else self.times[k])
            for k in range(len(self.items))
        )

    def makespan(self) -> int:
        return max(self.times)

    def to_plan(self) -> FleetPlan:
        return FleetPlan(
            [Route(list(trips)) for trips in self.trips], recharge=self.inst.recharge
        )


def _greedy_construct(
    inst: Instance, table: DepotRouteTable, walks: dict[Edge, list[ServiceWalk]], rng: random.Random
) -> _State:
    state = _State(
        inst,
        table,
        items=[[] for _ in range(inst.vehicle_count)],
        trips=[[] for _ in range(inst.vehicle_count)],
        times=[0] * inst.vehicle_count,
    )
    order = list(inst.required)
    rng.shuffle(order)
    for edge in order:
        best = None
        for k in range(inst.vehicle_count):
            others = max((t for kk, t in enumerate(state.times) if kk != k), default=0)
            for idx, walk in enumerate(walks[edge]):
                result = state.rebuild(k, state.items[k] + [walk])
                if result is None:
                    continue
                key = (max(result[1], others), result[1], k, idx)
                if best is None or key < best[0]:
                    best = (key, k, walk, result)
        if best is None:
            raise InfeasibleError(f"required edge {edge} unreachable from every vehicle")
        _, k, walk, result = best
        state.items[k].append(walk)
        state.trips[k], state.times[k] = result
    return state


def _neighbor(state: _State, walks, rng: random.Random) -> dict[int, list[ServiceWalk]] | None:
    """Propose changed item lists for one or two vehicles."""
    occupied = [k for k, items in enumerate(state.items) if items]
    if not occupied:
        return None
    kind = rng.randrange(4)
    K = len(state.items)
    if kind == 0:  # move one item to another vehicle/position
        k1 = rng.choice(occupied)
        i1 = rng.randrange(len(state.items[k1]))
        k2 = rng.randrange(K)
        src = list(state.items[k1])
        item = src.pop(i1)
        dst = src if k2 == k1 else list(state.items[k2])
        dst.insert(rng.randrange(len(dst) + 1), item)
        return {k1: src} if k2 == k1 else {k1: src, k2: dst}
    if kind == 1:  # swap two items between vehicles
        k1 = rng.choice(occupied)
        k2 = rng.choice(occupied)
        i1 = rng.randrange(len(state.items[k1]))
        i2 = rng.randrange(len(state.items[k2]))
        if k1 == k2 and i1 == i2:
            return None
        a, b = (list(state.items[k1]), list(state.items[k2]))
        if k1 == k2:
            a[i1], a[i2] = a[i2], a[i1]
            return {k1: a}
        a[i1], b[i2] = state.items[k2][i2], state.items[k1][i1]
        return {k1: a, k2: b}
    k = rng.choice(occupied)
    i = rng.randrange(len(state.items[k]))
    current = state.items[k][i]
    if kind == 2:  # flip the served edge's traversal orientation
        flipped = [w for w in walks[current.edge] if w.oriented == current.oriented[::-1]]
        if not flipped:
            return None
        replacement = flipped[0]
    else:  # re-splice through an alternative walk
        pool = walks[current.edge]
        if len(pool) < 2:
            return None
        replacement = pool[rng.randrange(len(pool))]
        if replacement is current:
            return None
    changed = list(state.items[k])
    changed[i] = replacement
    return {k: changed}


def generate_initial_plan(
    inst: Instance,
    cfg: SaConfig,
    table: DepotRouteTable | None = None,
    cost_trace: list[int] | None = None,
) -> FleetPlan:
    """Failure-free plan minimizing mission time; deterministic given cfg.seed.

    Restarts run independent annealing passes from fresh greedy constructions;
    the best plan wins, ties by restart index.  The returned plan always
    passes `validate_plan`.
    """
    if table is None:
        table = build_depot_routes(inst)
    walks = _service_walks(inst)
    best_plan: FleetPlan | None = None
    best_cost = None
    for restart in range(cfg.restarts):
        rng = random.Random(cfg.seed * 7919 + restart)
        state = _greedy_construct(inst, table, walks, rng)
        cost = state.makespan()
        best_local = state.to_plan()
        best_local_cost = cost
        t0 = cfg.initial_temperature if cfg.initial_temperature is not None else max(0.3 * cost, 1.0)
        t_min = cfg.min_temperature if cfg.min_temperature is not None else 1e-3 * t0
        temp = t0
        while temp > t_min:
            for _ in range(cfg.iterations_per_temperature):
                changes = _neighbor(state, walks, rng)
                if changes is not None:
                    rebuilt = state.apply(changes)
                    if rebuilt is not None:
                        new_cost = state.makespan_with(rebuilt)
                        delta = new_cost - cost
                        if delta <= 0 or rng.random() < math.exp(-delta / temp):
                            state.commit(changes, rebuilt)
                            cost = new_cost
                            if cost < best_local_cost:
                                best_local_cost = cost
                                best_local = state.to_plan()
                if cost_trace is not None:
                    cost_trace.append(best_local_cost)
            temp *= cfg.cooling_rate
        if best_cost is None or best_local_cost < best_cost:
            best_cost = best_local_cost
            best_plan = best_local
    validate_plan(inst, best_plan)
    return best_plan


def plan_cost(plan: FleetPlan) -> int:
    """Objective value of a plan: its mission time."""
    return mission_time(plan)
