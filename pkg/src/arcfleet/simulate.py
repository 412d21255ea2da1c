"""Mission simulation: detect failures, truncate routes, pool required trips, auction.

Failures are processed as discrete events in time order, which is equivalent
to stepping simulated time one unit at a time (a property the test suite
checks) but avoids fractional-step bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from arcfleet.auction import AuctionConfig, AuctionLog, auction
from arcfleet.core import Edge, Instance, ValidationError, format_time
from arcfleet.depots import DepotRouteTable
from arcfleet.failures import FailureScenario
from arcfleet.routing import (
    FleetPlan,
    Trip,
    mission_time,
    required_edges_of_trip,
)

END = "end"


@dataclass(frozen=True)
class SimConfig:
    """Wait window after a failure before auctioning, and auction parameters.

    ``wait_time`` is millitime, or the END marker to hold one auction after
    the last failure.
    """

    auction_cfg: AuctionConfig
    wait_time: int | str = 0

    def __post_init__(self):
        if self.wait_time != END and (not isinstance(self.wait_time, int) or self.wait_time < 0):
            raise ValidationError("wait_time must be non-negative millitime or 'end'")


@dataclass
class SimulationReport:
    final_plan: FleetPlan
    beta_ca: int
    auction_logs: list[AuctionLog] = field(default_factory=list)
    covered: bool = False
    event_trace: list[tuple[int, str]] = field(default_factory=list)

    @property
    def auction_count(self) -> int:
        return len(self.auction_logs)


def _truncate_failed_route(plan: FleetPlan, k: int, f: int) -> list[Trip]:
    """Cut vehicle k's route to trips completed at or before f; return the rest.

    A trip ending exactly at f completes; the failure interrupts only a trip
    with start < f < end, which is returned with everything after it.
    """
    route = plan.routes[k]
    p = 0
    kept = 0
    for trip in route.trips:
        if p + trip.duration <= f:
            p += trip.duration + plan.recharge
            kept += 1
        else:
            break
    dropped = route.trips[kept:]
    del route.trips[kept:]
    return dropped


def simulate(
    inst: Instance,
    table: DepotRouteTable,
    plan: FleetPlan,
    scenario: FailureScenario,
    cfg: SimConfig,
) -> SimulationReport:
    """Run the mission under the scenario and reschedule failed required trips.

    Each failure marks its vehicle inactive, truncates the route to completed
    trips, and pools the remaining trips that traverse required edges
    (including an interrupted one: its edges only count when the trip ends at
    a depot).  Auctions run per the wait policy; the fleet plan is never
    mutated in place, the report carries a rescheduled copy.
    """
    work = plan.copy()
    scenario.validate(work)

    events = sorted((f, k) for k, f in scenario.failures.items())
    pool: dict[Trip, frozenset[Edge]] = {}
    logs: list[AuctionLog] = []
    trace: list[tuple[int, str]] = []
    idx = 0

    while idx < len(events):
        window_open = events[idx][0]
        if cfg.wait_time == END:
            window_close = events[-1][0]
        else:
            window_close = window_open + cfg.wait_time
        while idx < len(events) and events[idx][0] <= window_close:
            f, k = events[idx]
            idx += 1
            work.statuses[k] = False
            dropped = _truncate_failed_route(work, k, f)
            pooled = 0
            for trip in dropped:
                edges = required_edges_of_trip(inst.required, trip)
                if edges:
                    pool[trip] = edges
                    pooled += 1
            trace.append(
                (f, f"vehicle {k + 1} failed; {len(dropped)} trips dropped, {pooled} pooled")
            )
        if pool:
            auction_at = window_close
            _, log = auction(inst, table, pool, auction_at, work, cfg.auction_cfg)
            logs.append(log)
            for entry in log.entries:
                trace.append(
                    (
                        auction_at,
                        f"auction: trip {'-'.join(map(str, entry.trip.nodes))} -> "
                        f"vehicle {entry.winner + 1} (bid {format_time(entry.value)})",
                    )
                )

    report = SimulationReport(
        final_plan=work,
        beta_ca=mission_time(work),
        auction_logs=logs,
        event_trace=trace,
    )
    report.covered = coverage_check(inst, report)
    return report


def coverage_check(inst: Instance, report: SimulationReport) -> bool:
    """True iff every required edge is traversed by a completed trip.

    Failed vehicles' routes were truncated to trips finishing at or before
    their failure times, so the union over the final plan is exactly the set
    of edges covered by completed trips.
    """
    covered: set[Edge] = set()
    for route in report.final_plan.routes:
        for trip in route.trips:
            covered |= required_edges_of_trip(inst.required, trip)
    return inst.required_set <= covered
