"""Centralized auction: search nearby vehicles, compute insertion bids, splice trips.

Failed required trips are reassigned one per auction iteration: every pooled
trip collects bids from vehicles found within an expanding search radius, and
the single globally cheapest (trip, vehicle) assignment is committed before
the next iteration re-evaluates the rest against the updated mission time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from arcfleet.core import Graph, Instance, InfeasibleError, graph_diameter, shortest_distances
from arcfleet.depots import DepotRouteTable
from arcfleet.routing import FleetPlan, Route, Trip, mission_time, route_time, trip_index


@dataclass(frozen=True)
class AuctionConfig:
    """Search radius schedule; both values in millitime."""

    initial_radius: int
    radius_step: int

    def __post_init__(self):
        if self.initial_radius <= 0 or self.radius_step <= 0:
            raise ValueError("radii must be positive")

    @classmethod
    def default(cls, inst: Instance) -> "AuctionConfig":
        # capacity-sized radii keep the expansion loop to a handful of rounds
        return cls(initial_radius=inst.capacity, radius_step=inst.capacity)


@dataclass(frozen=True)
class Bid:
    """Insertion offer: route time increase relative to the fleet mission time."""

    vehicle: int
    trip: Trip
    value: int
    candidate_route: Route
    anchor_index: int
    anchor_depot: int


@dataclass
class AuctionLogEntry:
    iteration: int
    trip: Trip
    winner: int
    anchor_depot: int
    value: int
    radius: int


@dataclass
class AuctionLog:
    entries: list[AuctionLogEntry] = field(default_factory=list)


def _pending_anchors(plan: FleetPlan, inst: Instance, k: int, t: int) -> list[tuple[int, int]]:
    """(trip index, end depot) anchors at or after the trip in progress at t.

    A vehicle that already finished (or never had) its route idles at its
    final depot, which stays available as an end-of-route anchor.
    """
    route = plan.routes[k]
    if not route.trips:
        return [(-1, inst.start_depots[k])]
    if t > route_time(None, route, plan.recharge):
        return [(len(route.trips) - 1, route.trips[-1].end)]
    i = trip_index(None, route, plan.recharge, t)
    return [(j, route.trips[j].end) for j in range(i, len(route.trips))]


def search_nearby(
    inst: Instance,
    table: DepotRouteTable,
    plan: FleetPlan,
    failed_trip: Trip,
    radius: int,
    t: int,
) -> set[int]:
    """Active vehicles with a remaining trip whose start or end depot lies
    within shortest-path time ``radius`` of either endpoint of the failed trip."""
    g = inst.graph
    dist_start = shortest_distances(g, failed_trip.start)
    dist_end = shortest_distances(g, failed_trip.end)

    def near(depot: int) -> bool:
        return min(dist_start[depot], dist_end[depot]) <= radius

    found = set()
    for k, route in enumerate(plan.routes):
        if not plan.statuses[k]:
            continue
        if not route.trips or t > route_time(None, route, plan.recharge):
            position = route.trips[-1].end if route.trips else inst.start_depots[k]
            if near(position):
                found.add(k)
            continue
        i = trip_index(None, route, plan.recharge, t)
        for j in range(i, len(route.trips)):
            if near(route.trips[j].start) or near(route.trips[j].end):
                found.add(k)
                break
    return found


def insert_trip(
    table: DepotRouteTable,
    route: Route,
    j: int,
    d_r: int,
    failed_trip: Trip,
    recharge: int,
) -> Route:
    """Splice the failed trip into a copy of the route after trip ``j``.

    Mid-route the splice is a cycle anchored at ``d_r``: connection out, the
    failed trip, connection back, leaving the rest of the route chained.  At
    the route's end (j = last index) the cheaper of connecting to the trip's
    start or to its end is appended, reversing the trip in the latter case,
    with no return leg.  Recharges are implicit between consecutive trips.
    """
    at_end = j >= len(route.trips) - 1
    out = table.lookup(d_r, failed_trip.start)
    back = table.lookup(failed_trip.end, d_r)
    if at_end:
        rev = table.lookup(d_r, failed_trip.end)
        if out is None and rev is None:
            raise InfeasibleError(f"no depot route from {d_r} to failed trip")
        forward_time = out[0] if out is not None else None
        reverse_time = rev[0] if rev is not None else None
        if reverse_time is None or (forward_time is not None and forward_time <= reverse_time):
            splice = out[1] + [failed_trip]
        else:
            splice = rev[1] + [failed_trip.reversed()]
    else:
        if out is None or back is None:
            raise InfeasibleError(f"no depot cycle through {d_r} for failed trip")
        splice = out[1] + [failed_trip] + back[1]
    new = route.copy()
    new.trips[j + 1 : j + 1] = splice
    return new


def calc_bid(
    inst: Instance,
    table: DepotRouteTable,
    failed_trip: Trip,
    t: int,
    k: int,
    plan: FleetPlan,
    t_m: int,
) -> Bid | None:
    """Best insertion of the failed trip into vehicle k's route.

    Evaluates every remaining end-of-trip depot as an anchor and returns the
    minimum-route-time candidate; equal times favor the earlier trip index.
    Returns None when every anchor is infeasible.
    """
    best: tuple[int, int] | None = None
    best_route: Route | None = None
    best_depot = -1
    for j, d_r in _pending_anchors(plan, inst, k, t):
        try:
            candidate = insert_trip(table, plan.routes[k], j, d_r, failed_trip, plan.recharge)
        except InfeasibleError:
            continue
        key = (route_time(None, candidate, plan.recharge), j)
        if best is None or key < best:
            best = key
            best_route = candidate
            best_depot = d_r
    if best is None:
        return None
    return Bid(
        vehicle=k,
        trip=failed_trip,
        value=best[0] - t_m,
        candidate_route=best_route,
        anchor_index=best[1],
        anchor_depot=best_depot,
    )


def auction(
    inst: Instance,
    table: DepotRouteTable,
    pool: dict[Trip, frozenset],
    t: int,
    plan: FleetPlan,
    cfg: AuctionConfig,
    log: AuctionLog | None = None,
    auditor=None,
) -> tuple[FleetPlan, AuctionLog]:
    """Assign every pooled failed trip, cheapest single assignment per iteration.

    The plan is mutated in place and also returned.  ``auditor``, when given,
    is called per iteration with (plan, pool, t, t_m, winner, candidates)
    before the commit; tests use it to re-check greedy optimality.
    """
    if log is None:
        log = AuctionLog()
    if not any(plan.statuses):
        raise InfeasibleError("no active vehicle left to bid")
    diameter = graph_diameter(inst.graph)
    iteration = len(log.entries)
    while pool:
        iteration += 1
        t_m = mission_time(plan)
        best_key = None
        best_bid: Bid | None = None
        best_radius = 0
        candidates: list[Bid] = []
        for failed_trip in pool:
            radius = cfg.initial_radius
            nearby = search_nearby(inst, table, plan, failed_trip, radius, t)
            while not nearby and radius <= diameter:
                radius += cfg.radius_step
                nearby = search_nearby(inst, table, plan, failed_trip, radius, t)
            if not nearby:
                raise InfeasibleError("unassignable failed trip: no vehicle in range")
            for k in sorted(nearby):
                bid = calc_bid(inst, table, failed_trip, t, k, plan, t_m)
                if bid is None:
                    continue
                candidates.append(bid)
                key = (bid.value, bid.vehicle, bid.anchor_index, bid.trip.nodes)
                if best_key is None or key < best_key:
                    best_key = key
                    best_bid = bid
                    best_radius = radius
        if best_bid is None:
            raise InfeasibleError("unassignable failed trip: every insertion infeasible")
        if auditor is not None:
            auditor(plan, dict(pool), t, t_m, best_bid, list(candidates))
        plan.routes[best_bid.vehicle] = best_bid.candidate_route
        plan.routes[best_bid.vehicle].owner = best_bid.vehicle
        del pool[best_bid.trip]
        log.entries.append(
            AuctionLogEntry(
                iteration=iteration,
                trip=best_bid.trip,
                winner=best_bid.vehicle,
                anchor_depot=best_bid.anchor_depot,
                value=best_bid.value,
                radius=best_radius,
            )
        )
    return plan, log


def log_to_csv(log: AuctionLog) -> str:
    from arcfleet.core import format_time

    lines = ["iteration,trip,winner,anchor_depot,bid_value,radius"]
    for e in log.entries:
        trip = "-".join(str(n) for n in e.trip.nodes)
        lines.append(
            f"{e.iteration},{trip},V{e.winner + 1},{e.anchor_depot},"
            f"{format_time(e.value)},{format_time(e.radius)}"
        )
    return "\n".join(lines) + "\n"
