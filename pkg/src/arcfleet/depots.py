"""Precomputed depot-to-depot routes, possibly multi-trip, with exact times.

Only one entry per unordered depot pair is materialized; the symmetric lookup
reverses the stored route, and self lookups answer (0, []) without storage.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from arcfleet.core import Graph, Instance, ValidationError, format_time, shortest_path
from arcfleet.routing import Trip


@dataclass
class DepotRouteTable:
    """Map from unordered depot pair to the best capacity-feasible route.

    Entry values are ``(total_time, trips)`` where total_time includes one
    recharge between consecutive trips.  Pairs unreachable within capacity via
    any depot chain carry no entry; `lookup` reports them as None.
    """

    depots: tuple[int, ...]
    recharge: int
    entries: dict[tuple[int, int], tuple[int, tuple[Trip, ...]]] = field(default_factory=dict)

    def lookup(self, d1: int, d2: int) -> tuple[int, list[Trip]] | None:
        if d1 not in self.depots or d2 not in self.depots:
            raise ValidationError(f"{d1} or {d2} is not a depot")
        if d1 == d2:
            return 0, []
        key = (d1, d2) if d1 < d2 else (d2, d1)
        entry = self.entries.get(key)
        if entry is None:
            return None
        time, trips = entry
        if d1 < d2:
            return time, list(trips)
        return time, [t.reversed() for t in reversed(trips)]

    def single_trip_complete(self) -> bool:
        """True when every depot pair is joined by a single trip."""
        for i, a in enumerate(self.depots):
            for b in self.depots[i + 1:]:
                entry = self.entries.get((a, b))
                if entry is None or len(entry[1]) != 1:
                    return False
        return True


def build_depot_routes(inst: Instance) -> DepotRouteTable:
    """Floyd-Warshall-style relaxation over the depot meta-graph.

    Direct hops are graph shortest paths with time <= capacity; longer pairs
    chain hops with a recharge at each intermediate depot.  Ties break toward
    fewer trips, then the lexicographically smaller depot sequence.
    """
    g = inst.graph
    depots = inst.depots
    hop_time: dict[tuple[int, int], int] = {}
    hop_trip: dict[tuple[int, int], Trip] = {}
    for i, a in enumerate(depots):
        for b in depots[i + 1:]:
            time, path = shortest_path(g, a, b)
            if time <= inst.capacity:
                hop_time[(a, b)] = hop_time[(b, a)] = time
                trip = Trip(tuple(path), time)
                hop_trip[(a, b)] = trip
                hop_trip[(b, a)] = trip.reversed()

    table = DepotRouteTable(depots, inst.recharge)
    for i, a in enumerate(depots):
        best = _meta_dijkstra(a, depots, hop_time, inst.recharge)
        for b in depots[i + 1:]:
            found = best.get(b)
            if found is None:
                continue
            time, seq = found
            trips = tuple(hop_trip[(x, y)] for x, y in zip(seq, seq[1:]))
            table.entries[(a, b)] = (time, trips)
    return table


def _meta_dijkstra(src, depots, hop_time, recharge):
    """Min (time, hops, sequence) chains from one depot over feasible hops."""
    best: dict[int, tuple[int, tuple[int, ...]]] = {}
    heap = [(0, 0, (src,))]
    settled: set[int] = set()
    while heap:
        time, hops, seq = heapq.heappop(heap)
        node = seq[-1]
        if node in settled:
            continue
        settled.add(node)
        best[node] = (time, seq)
        for nxt in depots:
            if nxt in settled or (node, nxt) not in hop_time:
                continue
            step = hop_time[(node, nxt)] + (recharge if hops > 0 else 0)
            heapq.heappush(heap, (time + step, hops + 1, seq + (nxt,)))
    return best


def serialize_table(table: DepotRouteTable) -> str:
    """Cache format: one line ``d1 d2 time (trip)(trip)...`` per stored entry."""
    out = []
    for (a, b), (time, trips) in sorted(table.entries.items()):
        body = "".join("(" + " ".join(str(n) for n in t.nodes) + ")" for t in trips)
        out.append(f"{a} {b} {format_time(time)} {body}")
    return "\n".join(out) + "\n"


def parse_table(g: Graph, inst: Instance, text: str) -> DepotRouteTable:
    from arcfleet.core import parse_time

    table = DepotRouteTable(inst.depots, inst.recharge)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        head, _, body = line.partition("(")
        parts = head.split()
        if len(parts) != 3:
            raise ValidationError(f"bad table line {lineno}")
        a, b, time = int(parts[0]), int(parts[1]), parse_time(parts[2])
        trips = []
        body = "(" + body
        while body:
            inner, _, body = body[1:].partition(")")
            trips.append(Trip.from_nodes(g, [int(n) for n in inner.split()]))
            body = body.strip()
        table.entries[(a, b)] = (time, tuple(trips))
    return table
