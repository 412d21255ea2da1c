"""Trip/route/plan model and all exact time accounting."""

from __future__ import annotations

from dataclasses import dataclass, field

from arcfleet.core import Edge, Graph, Instance, ValidationError, canonical_edge


@dataclass(frozen=True)
class Trip:
    """A depot-to-depot node walk with its cached duration in millitime."""

    nodes: tuple[int, ...]
    duration: int

    @classmethod
    def from_nodes(cls, g: Graph, nodes) -> "Trip":
        nodes = tuple(nodes)
        if not nodes:
            raise ValidationError("trip must contain at least one node")
        total = 0
        for a, b in zip(nodes, nodes[1:]):
            total += g.weight(a, b)  # raises on non-adjacent consecutive nodes
        return cls(nodes, total)

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def end(self) -> int:
        return self.nodes[-1]

    def reversed(self) -> "Trip":
        return Trip(self.nodes[::-1], self.duration)


@dataclass
class Route:
    """Ordered trip list of one vehicle; consecutive trips chain at depots."""

    trips: list[Trip] = field(default_factory=list)
    owner: int = 0

    def copy(self) -> "Route":
        return Route(list(self.trips), self.owner)

    @property
    def end_depot(self) -> int | None:
        return self.trips[-1].end if self.trips else None


@dataclass
class FleetPlan:
    """One route per vehicle plus per-vehicle active/failed status.

    ``recharge`` is carried here so completion times and the mission time can
    be recomputed without threading instance parameters through every call.
    """

    routes: list[Route]
    recharge: int
    statuses: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.statuses:
            self.statuses = [True] * len(self.routes)
        for k, route in enumerate(self.routes):
            route.owner = k

    @property
    def vehicle_count(self) -> int:
        return len(self.routes)

    def completion_times(self) -> list[int]:
        return [route_time(None, r, self.recharge) for r in self.routes]

    def copy(self) -> "FleetPlan":
        return FleetPlan([r.copy() for r in self.routes], self.recharge, list(self.statuses))


def trip_time(g: Graph, t: Trip) -> int:
    """Exact walk duration; revalidates adjacency against the graph."""
    return Trip.from_nodes(g, t.nodes).duration


def route_time(g: Graph | None, r: Route, recharge: int) -> int:
    """Sum of trip durations plus one recharge between consecutive trips."""
    if not r.trips:
        return 0
    return sum(t.duration for t in r.trips) + (len(r.trips) - 1) * recharge


def mission_time(plan: FleetPlan) -> int:
    """Maximum route time over the fleet; the objective everywhere."""
    if not plan.routes:
        return 0
    return max(route_time(None, r, plan.recharge) for r in plan.routes)


def trip_index(g: Graph | None, r: Route, recharge: int, t: int) -> int:
    """Index of the trip whose trip-plus-following-recharge window contains t.

    During a recharge window the just-completed trip's index is returned;
    callers needing the next executable trip add one.  ``t`` past the route's
    completion raises, because the vehicle is already idle at its final depot.
    """
    if t < 0:
        raise ValidationError("negative time")
    if t > route_time(g, r, recharge):
        raise ValidationError("vehicle already idle")
    i = -1
    p = 0
    while p < t:
        i += 1
        p += r.trips[i].duration
        if i < len(r.trips) - 1:
            p += recharge
    return max(i, 0)


def required_edges_of_trip(required, t: Trip) -> frozenset[Edge]:
    """Required edges traversed by the trip's walk, in either orientation."""
    required = frozenset(canonical_edge(u, v) for u, v in required)
    hit = set()
    for a, b in zip(t.nodes, t.nodes[1:]):
        e = canonical_edge(a, b)
        if e in required:
            hit.add(e)
    return frozenset(hit)


def serialize_plan(plan: FleetPlan) -> str:
    """One vehicle per line: ``V1: (1 3 5)(5 7 8 5)``."""
    out = []
    for k, route in enumerate(plan.routes):
        trips = "".join("(" + " ".join(str(n) for n in t.nodes) + ")" for t in route.trips)
        out.append(f"V{k + 1}: {trips}".rstrip())
    return "\n".join(out) + "\n"


def parse_plan(g: Graph, text: str) -> FleetPlan:
    """Inverse of `serialize_plan`; recomputes and validates every duration.

    The returned plan has recharge 0; callers attach the instance's value.
    """
    routes = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        label, _, body = line.partition(":")
        if not label.startswith("V"):
            raise ValidationError(f"bad plan line {raw!r}")
        trips = []
        body = body.strip()
        while body:
            if not body.startswith("("):
                raise ValidationError(f"bad trip syntax in {raw!r}")
            inner, close, body = body[1:].partition(")")
            if not close:
                raise ValidationError(f"unclosed trip in {raw!r}")
            body = body.strip()
            trips.append(Trip.from_nodes(g, [int(n) for n in inner.split()]))
        routes.append(Route(trips))
    return FleetPlan(routes, recharge=0)


def validate_plan(inst: Instance, plan: FleetPlan, check_start: bool = True,
                  check_coverage: bool = True) -> None:
    """Raise `ValidationError` unless the plan satisfies every routing invariant."""
    if plan.vehicle_count != inst.vehicle_count:
        raise ValidationError("plan has wrong vehicle count")
    if plan.recharge != inst.recharge:
        raise ValidationError("plan recharge differs from instance")
    depot_set = set(inst.depots)
    for k, route in enumerate(plan.routes):
        for j, trip in enumerate(route.trips):
            if trip.start not in depot_set or trip.end not in depot_set:
                raise ValidationError(f"vehicle {k + 1} trip {j} not depot-to-depot")
            if trip_time(inst.graph, trip) != trip.duration:
                raise ValidationError(f"vehicle {k + 1} trip {j} has stale duration")
            if trip.duration > inst.capacity:
                raise ValidationError(f"vehicle {k + 1} trip {j} exceeds capacity")
            if j > 0 and route.trips[j - 1].end != trip.start:
                raise ValidationError(f"vehicle {k + 1} route breaks chaining at trip {j}")
        if check_start and route.trips and route.trips[0].start != inst.start_depots[k]:
            raise ValidationError(f"vehicle {k + 1} does not start at its depot")
    if check_coverage:
        covered = set()
        for route in plan.routes:
            for trip in route.trips:
                covered |= required_edges_of_trip(inst.required, trip)
        missing = inst.required_set - covered
        if missing:
            raise ValidationError(f"required edges not covered: {sorted(missing)}")
