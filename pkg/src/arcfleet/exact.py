"""Desk-scale ground truth: exhaustive optimum and a solver-agnostic LP emitter.

The oracle enumerates candidate depot-to-depot trips (each edge traversed at
most twice per trip, a classical completeness proviso for arc routing) and
searches all ways of appending them to vehicles until every required edge is
covered, minimizing the makespan.  It is exact over that space; enumeration
budgets guard against blow-up on anything beyond desk-scale instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from arcfleet.core import (
    Edge,
    Instance,
    InfeasibleError,
    ValidationError,
    canonical_edge,
    format_time,
)
from arcfleet.depots import DepotRouteTable, build_depot_routes
from arcfleet.failures import FailureScenario
from arcfleet.routing import FleetPlan, Route, Trip, validate_plan


class OracleBudgetError(RuntimeError):
    """Enumeration limits exceeded; the oracle refuses to guess."""


@dataclass(frozen=True)
class EnumerationLimits:
    max_candidates: int = 100_000
    max_expansions: int = 5_000_000


@dataclass(frozen=True)
class OracleResult:
    beta_opt: int
    plan: FleetPlan
    trips_generated: int
    assignments_searched: int


@dataclass(frozen=True)
class _Candidate:
    nodes: tuple[int, ...]
    duration: int
    covered: frozenset[Edge]

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def end(self) -> int:
        return self.nodes[-1]


def _candidate_trips(inst: Instance, limits: EnumerationLimits) -> list[_Candidate]:
    """All depot-to-depot walks with per-edge use <= 2, duration <= capacity,
    covering at least one required edge; dominated walks are dropped."""
    g = inst.graph
    required = inst.required_set
    depot_set = set(inst.depots)
    found: dict[tuple[int, int], list[_Candidate]] = {}
    expansions = 0

    def beats(a: _Candidate, b: _Candidate) -> bool:
        # same endpoints assumed: a makes b redundant when it is no slower and
        # covers no less; full ties keep the lexicographically smaller walk
        return (
            a.duration <= b.duration
            and a.covered >= b.covered
            and (a.duration < b.duration or a.covered > b.covered or a.nodes < b.nodes)
        )

    def record(cand: _Candidate):
        bucket = found.setdefault((cand.start, cand.end), [])
        for other in bucket:
            if beats(other, cand):
                return
        bucket[:] = [o for o in bucket if not beats(cand, o)]
        bucket.append(cand)

    def dfs(nodes: list[int], dur: int, used: dict[Edge, int], covered: set[Edge]):
        nonlocal expansions
        expansions += 1
        if expansions > limits.max_expansions:
            raise OracleBudgetError("oracle out of budget: too many walk expansions")
        tail = nodes[-1]
        if tail in depot_set and covered:
            record(_Candidate(tuple(nodes), dur, frozenset(covered)))
        for nbr, w in g.adjacency[tail]:
            e = canonical_edge(tail, nbr)
            if used.get(e, 0) >= 2 or dur + w > inst.capacity:
                continue
            used[e] = used.get(e, 0) + 1
            added = e in required and e not in covered
            if added:
                covered.add(e)
            nodes.append(nbr)
            dfs(nodes, dur + w, used, covered)
            nodes.pop()
            if added:
                covered.discard(e)
            used[e] -= 1

    for d in inst.depots:
        dfs([d], 0, {}, set())

    candidates = sorted(
        (c for bucket in found.values() for c in bucket),
        key=lambda c: (c.duration, c.nodes),
    )
    if len(candidates) > limits.max_candidates:
        raise OracleBudgetError("oracle out of budget: too many candidate trips")
    return candidates


def exact_optimum(
    inst: Instance,
    scenario: FailureScenario | None = None,
    limits: EnumerationLimits = EnumerationLimits(),
    table: DepotRouteTable | None = None,
) -> OracleResult:
    """Certified minimum mission time over the enumerated trip space.

    With a scenario, each failed vehicle's whole route (recharges included)
    must finish at or before its failure time.  The search appends candidate
    trips covering uncovered required edges, connecting through the depot
    route table; branch-and-bound with Pareto memoization keeps it exact.
    """
    if table is None:
        table = build_depot_routes(inst)
    candidates = _candidate_trips(inst, limits)
    by_edge: dict[Edge, list[_Candidate]] = {e: [] for e in inst.required}
    for cand in candidates:
        for e in cand.covered:
            by_edge[e].append(cand)
    for e, cands in by_edge.items():
        if not cands:
            raise InfeasibleError(f"required edge {e} not coverable within capacity")
    min_dur = {e: min(c.duration for c in cands) for e, cands in by_edge.items()}

    deadlines = {}
    if scenario is not None:
        deadlines = dict(scenario.failures)

    K = inst.vehicle_count
    recharge = inst.recharge
    best_cost: int | None = None
    best_plan_key: str | None = None
    best_routes: list[list[Trip]] | None = None
    searched = 0
    seen: dict[tuple, list[tuple[int, ...]]] = {}

    def dominated(key, times) -> bool:
        vecs = seen.setdefault(key, [])
        for v in vecs:
            if all(a <= b for a, b in zip(v, times)):
                return True
        vecs[:] = [v for v in vecs if not all(a <= b for a, b in zip(times, v))]
        vecs.append(tuple(times))
        return False

    def search(routes, depots, times, uncovered):
        nonlocal best_cost, best_plan_key, best_routes, searched
        searched += 1
        if searched > limits.max_expansions:
            raise OracleBudgetError("oracle out of budget: too many assignments")
        cost = max(times)
        if not uncovered:
            plan_key = "|".join(
                ",".join("-".join(map(str, t.nodes)) for t in r) for r in routes
            )
            if best_cost is None or (cost, plan_key) < (best_cost, best_plan_key):
                best_cost = cost
                best_plan_key = plan_key
                best_routes = [list(r) for r in routes]
            return
        bound = max(cost, max(min_dur[e] for e in uncovered))
        if best_cost is not None and bound >= best_cost:
            return
        if dominated((tuple(depots), uncovered), times):
            return
        pick = sorted(
            {c.nodes: c for e in uncovered for c in by_edge[e]}.values(),
            key=lambda c: (c.duration, c.nodes),
        )
        moves = []
        for k in range(K):
            for cand in pick:
                if not (cand.covered & uncovered):
                    continue
                conn = table.lookup(depots[k], cand.start)
                if conn is None:
                    continue
                added_durs = sum(t.duration for t in conn[1]) + cand.duration
                gaps = len(conn[1]) + (1 if routes[k] else 0)
                new_time = times[k] + added_durs + gaps * recharge
                if best_cost is not None and new_time >= best_cost:
                    continue
                if k in deadlines and new_time > deadlines[k]:
                    continue
                moves.append((new_time, k, cand, conn))
        moves.sort(key=lambda m: (m[0], m[1], m[2].nodes))
        for new_time, k, cand, conn in moves:
            if best_cost is not None and new_time >= best_cost:
                continue
            added = conn[1] + [Trip(cand.nodes, cand.duration)]
            routes[k].extend(added)
            old_depot, old_time = depots[k], times[k]
            depots[k], times[k] = cand.end, new_time
            search(routes, depots, times, uncovered - cand.covered)
            del routes[k][len(routes[k]) - len(added):]
            depots[k], times[k] = old_depot, old_time

    routes = [[] for _ in range(K)]
    depots = list(inst.start_depots)
    times = [0] * K
    search(routes, depots, times, inst.required_set)

    if best_routes is None:
        raise InfeasibleError("no feasible assignment covers every required edge")
    plan = FleetPlan([Route(r) for r in best_routes], recharge=recharge)
    validate_plan(inst, plan)
    if scenario is not None:
        times = plan.completion_times()
        for k, f in deadlines.items():
            assert times[k] <= f
    return OracleResult(
        beta_opt=best_cost,
        plan=plan,
        trips_generated=len(candidates),
        assignments_searched=searched,
    )


@dataclass
class MilpModel:
    """LP-text model pieces: objective, named constraint rows, variable pools."""

    name: str
    rows: list[tuple[str, str]] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)
    big_m: int = 0

    def emit(self) -> str:
        out = [f"\\ offline fleet-routing model: {self.name}", "Minimize", " obj: beta", "Subject To"]
        for label, row in self.rows:
            out.append(f" {label}: {row}")
        out.append("Bounds")
        out.append(" beta >= 0")
        out.append("Binary")
        for name in self.binaries:
            out.append(f" {name}")
        out.append("End")
        return "\n".join(out) + "\n"


def emit_milp(inst: Instance, scenario: FailureScenario | None = None) -> str:
    """Human-readable LP text for the offline model, failures optional.

    Binary x variables pick directed edge traversals per vehicle and trip,
    y variables mark trip-end depots, z variables mark used trips; beta is the
    makespan.  Subtour rows enumerate every non-depot subset, so instances are
    gated at 12 non-depot nodes.  Failure rows cap each failed vehicle's total
    route time at its failure time.
    """
    g = inst.graph
    non_depot = [n for n in g.nodes() if n not in set(inst.depots)]
    if len(non_depot) > 12:
        raise ValidationError(
            f"subtour enumeration bound exceeded: {len(non_depot)} non-depot nodes (max 12)"
        )
    F = inst.max_trips
    K = inst.vehicle_count
    arcs = [(u, v) for u, v, _ in g.edges] + [(v, u) for u, v, _ in g.edges]
    arcs.sort()
    model = MilpModel(name=inst.name or "instance", big_m=2 * len(g.edges) + 1)

    def x(k, f, i, j):
        return f"x_{k}_{f}_{i}_{j}"

    def y(k, f, d):
        return f"y_{k}_{f}_{d}"

    def z(k, f):
        return f"z_{k}_{f}"

    def t(i, j):
        return format_time(g.weight(i, j))

    rows = model.rows
    for k in range(1, K + 1):
        start = inst.start_depots[k - 1]
        terms = " + ".join(x(k, 1, start, j) for j, _ in g.adjacency[start])
        rows.append((f"trip_start_k{k}", f"{terms} - {z(k, 1)} = 0"))
    for k in range(1, K + 1):
        for f in range(1, F):
            rows.append((f"trip_order_k{k}_f{f}", f"{z(k, f)} - {z(k, f + 1)} >= 0"))
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            for d in inst.depots:
                terms = " + ".join(x(k, f, i, d) for i, _ in g.adjacency[d])
                rows.append((f"trip_end_k{k}_f{f}_d{d}", f"{terms} - {y(k, f, d)} = 0"))
    for k in range(1, K + 1):
        for f in range(2, F + 1):
            for d in inst.depots:
                terms = " - ".join(x(k, f, d, j) for j, _ in g.adjacency[d])
                rows.append(
                    (f"depot_continuity_k{k}_f{f}_d{d}", f"{y(k, f - 1, d)} - {terms} >= 0")
                )
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            terms = " - ".join(y(k, f, d) for d in inst.depots)
            rows.append((f"trip_end_count_k{k}_f{f}", f"{z(k, f)} - {terms} = 0"))
    for k in range(1, K + 1):
        time_terms = " + ".join(
            f"{t(i, j)} {x(k, f, i, j)}" for f in range(1, F + 1) for i, j in arcs
        )
        z_terms = " + ".join(f"{format_time(inst.recharge)} {z(k, f)}" for f in range(1, F + 1))
        rows.append(
            (
                f"total_time_k{k}",
                f"{time_terms} + {z_terms} - beta <= {format_time(inst.recharge)}",
            )
        )
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            terms = " + ".join(f"{t(i, j)} {x(k, f, i, j)}" for i, j in arcs)
            rows.append((f"trip_capacity_k{k}_f{f}", f"{terms} <= {format_time(inst.capacity)}"))
    depot_set = set(inst.depots)
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            leaving = [x(k, f, i, j) for i, j in arcs if i in depot_set]
            entering = [x(k, f, i, j) for i, j in arcs if j in depot_set]
            row = " + ".join(leaving) + " - " + " - ".join(entering)
            rows.append((f"depot_flow_k{k}_f{f}", f"{row} = 0"))
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            for i in non_depot:
                outs = [x(k, f, i, j) for j, _ in g.adjacency[i]]
                ins = [x(k, f, j, i) for j, _ in g.adjacency[i]]
                row = " + ".join(outs) + " - " + " - ".join(ins)
                rows.append((f"node_flow_k{k}_f{f}_n{i}", f"{row} = 0"))
    for u, v in inst.required:
        terms = " + ".join(
            f"{x(k, f, u, v)} + {x(k, f, v, u)}"
            for k in range(1, K + 1)
            for f in range(1, F + 1)
        )
        rows.append((f"required_{u}_{v}", f"{terms} >= 1"))
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            terms = " + ".join(x(k, f, i, j) for i, j in arcs)
            rows.append(
                (f"unused_trip_k{k}_f{f}", f"{terms} - {model.big_m} {z(k, f)} <= 0")
            )
    subsets = []
    for mask in range(1, 1 << len(non_depot)):
        subsets.append([non_depot[b] for b in range(len(non_depot)) if mask >> b & 1])
    for k in range(1, K + 1):
        for f in range(1, F + 1):
            for s_idx, S in enumerate(subsets, start=1):
                s_set = set(S)
                cut = [x(k, f, i, j) for i, j in arcs if (i in s_set) != (j in s_set)]
                inside = [(i, j) for i, j in arcs if i in s_set and j in s_set]
                if not cut or not inside:
                    continue
                cut_terms = " + ".join(cut)
                for p, q in inside:
                    rows.append(
                        (
                            f"subtour_k{k}_f{f}_s{s_idx}_{p}_{q}",
                            f"{cut_terms} - 2 {x(k, f, p, q)} >= 0",
                        )
                    )
    if scenario is not None:
        for k in sorted(scenario.failures):
            time_terms = " + ".join(
                f"{t(i, j)} {x(k + 1, f, i, j)}" for f in range(1, F + 1) for i, j in arcs
            )
            z_terms = " + ".join(
                f"{format_time(inst.recharge)} {z(k + 1, f)}" for f in range(1, F + 1)
            )
            rhs = scenario.failures[k] + inst.recharge
            rows.append(
                (
                    f"failure_deadline_k{k + 1}",
                    f"{time_terms} + {z_terms} <= {format_time(rhs)}",
                )
            )

    for k in range(1, K + 1):
        for f in range(1, F + 1):
            for i, j in arcs:
                model.binaries.append(x(k, f, i, j))
            for d in inst.depots:
                model.binaries.append(y(k, f, d))
            model.binaries.append(z(k, f))
    return model.emit()
