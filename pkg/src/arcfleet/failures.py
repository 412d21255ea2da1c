"""Failure scenarios: data model, seeded generation, recharge-window normalization."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from arcfleet.core import Instance, ValidationError, format_time, parse_time
from arcfleet.routing import FleetPlan, route_time


@dataclass(frozen=True)
class FailureScenario:
    """Vehicles that will fail (0-based ids) mapped to failure times in millitime."""

    name: str
    failures: dict[int, int] = field(default_factory=dict)

    def validate(self, plan: FleetPlan) -> None:
        if len(self.failures) > plan.vehicle_count - 1:
            raise ValidationError("not all vehicles may fail")
        times = plan.completion_times()
        for k, f in self.failures.items():
            if not 0 <= k < plan.vehicle_count:
                raise ValidationError(f"unknown vehicle {k + 1}")
            if f <= 0:
                raise ValidationError(f"failure time for vehicle {k + 1} must be positive")
            if f > times[k]:
                raise ValidationError(
                    f"vehicle {k + 1} fails at {format_time(f)} after finishing at "
                    f"{format_time(times[k])}"
                )


def normalize_failure_time(plan: FleetPlan, k: int, f: int) -> int:
    """Push a failure time out of a recharge window to the window's end.

    Failures cannot happen while recharging; a draw strictly inside the pause
    after trip i becomes the instant trip i+1 begins.  Trip boundaries are
    untouched: a trip ending exactly at f completes.
    """
    route = plan.routes[k]
    p = 0
    for j, trip in enumerate(route.trips):
        p += trip.duration
        if j == len(route.trips) - 1:
            break
        if p < f < p + plan.recharge:
            return p + plan.recharge
        p += plan.recharge
    return f


def create_failure_scenarios(
    inst: Instance,
    plan: FleetPlan,
    seed: int,
    replan=None,
) -> list[FailureScenario]:
    """Seeded scenario batch: N_F ~ U{1..K-1}; scenario j draws j vehicles.

    Duplicate draws collapse into the failed set, so scenario j has at most j
    failures.  Each failure time is uniform over [1, y_k] millitime, then
    normalized out of recharge windows.  ``replan(j)`` may supply a fresh
    reference plan per scenario; by default the given plan is reused.
    """
    if inst.vehicle_count < 2:
        raise ValidationError("cannot create failure scenario for a single vehicle")
    rng = random.Random(seed)
    n_scenarios = rng.randint(1, inst.vehicle_count - 1)
    scenarios = []
    for j in range(1, n_scenarios + 1):
        ref = plan if replan is None else replan(j)
        times = ref.completion_times()
        if not any(t > 0 for t in times):
            raise ValidationError("no vehicle has a non-empty route to fail")
        failed: set[int] = set()
        for _ in range(j):
            k = rng.randrange(inst.vehicle_count)
            while times[k] == 0:  # empty route: nothing to interrupt, re-draw
                k = rng.randrange(inst.vehicle_count)
            failed.add(k)
        failures = {}
        for k in sorted(failed):
            f = rng.randint(1, times[k])
            failures[k] = normalize_failure_time(ref, k, f)
        scenarios.append(FailureScenario(name=f"{inst.name}.f{j}", failures=failures))
    return scenarios


def serialize_scenario(s: FailureScenario) -> str:
    out = [f"SCENARIO {s.name}", f"FAILURES {len(s.failures)}"]
    for k in sorted(s.failures):
        out.append(f"{k + 1} {format_time(s.failures[k])}")
    return "\n".join(out) + "\n"


def parse_scenario(text: str) -> FailureScenario:
    name = ""
    count = None
    failures: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "SCENARIO":
            name = " ".join(toks[1:])
        elif toks[0] == "FAILURES":
            count = int(toks[1])
        elif len(toks) == 2:
            failures[int(toks[0]) - 1] = parse_time(toks[1], lineno)
        else:
            raise ValidationError(f"bad scenario line {lineno}: {raw!r}")
    if count is not None and count != len(failures):
        raise ValidationError("FAILURES count does not match entries")
    return FailureScenario(name=name, failures=failures)
