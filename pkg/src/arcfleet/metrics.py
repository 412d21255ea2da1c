"""Scenario metrics: percent increases, competitive ratio, theoretical bound, CSV report."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from arcfleet.core import format_time
from arcfleet.depots import DepotRouteTable
from arcfleet.routing import FleetPlan


def round2(value: Fraction) -> Decimal:
    """Half-up 2-decimal display value; internal arithmetic stays exact."""
    return (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP
    )


def percent_increase(base: int, new: int) -> Fraction:
    """(new - base) / base * 100, exact."""
    if base <= 0:
        raise ValueError("percent increase needs a positive base")
    return Fraction(new - base, base) * 100


def competitive_ratio(beta_ca: int, beta_opt_f: int) -> Fraction:
    """Online mission time over the failure-aware offline optimum."""
    if beta_opt_f <= 0:
        raise ValueError("competitive ratio needs a positive denominator")
    return Fraction(beta_ca, beta_opt_f)


@dataclass(frozen=True)
class BoundInputs:
    """Worst-case bound parameters, taken from the failure-free reference plan."""

    n_trips_mu: int
    vehicle_count: int
    capacity: int
    recharge: int
    beta_opt_f: int

    def __post_init__(self):
        if self.n_trips_mu < 1:
            raise ValueError("most utilized vehicle must have at least one trip")
        if self.beta_opt_f <= 0:
            raise ValueError("beta_opt_f must be positive")

    @property
    def extra_per_trip(self) -> int:
        """Worst-case added time per reassigned trip: reach it, run it, return."""
        return 3 * (self.capacity + self.recharge)

    @property
    def reassignable_trips(self) -> int:
        return self.n_trips_mu * (self.vehicle_count - 1)


def bound_inputs_from_plan(plan: FleetPlan, capacity: int, beta_opt_f: int) -> BoundInputs:
    """Identify the most utilized vehicle (argmax completion, ties to lower id)."""
    times = plan.completion_times()
    k_mu = max(range(len(times)), key=lambda k: (times[k], -k))
    return BoundInputs(
        n_trips_mu=max(len(plan.routes[k_mu].trips), 1),
        vehicle_count=plan.vehicle_count,
        capacity=capacity,
        recharge=plan.recharge,
        beta_opt_f=beta_opt_f,
    )


def bound_applicable(table: DepotRouteTable) -> bool:
    """The bound assumes every depot pair is one trip apart within capacity."""
    return table.single_trip_complete()


def theoretical_bound(b: BoundInputs) -> Fraction:
    """Upper bound on the competitive ratio under full depot connectivity."""
    if b.vehicle_count <= 1:
        return Fraction(1)
    return 1 + Fraction(b.reassignable_trips * b.extra_per_trip, b.beta_opt_f)


@dataclass
class ScenarioMetrics:
    """One report row; None marks values that were not computed."""

    scenario: str
    nodes: int | None = None
    edges: int | None = None
    required: int | None = None
    capacity: int | None = None
    recharge: int | None = None
    vehicles: int | None = None
    depots: int | None = None
    failures: int | None = None
    beta_opt: int | None = None
    et_opt: float | None = None
    beta_opt_f: int | None = None
    et_opt_f: float | None = None
    beta_sa: int | None = None
    et_sa: float | None = None
    beta_ca: int | None = None
    et_ca: float | None = None
    rho_bound: Fraction | None = None

    def pct_opt_f(self) -> Fraction | None:
        if self.beta_opt is None or self.beta_opt_f is None or self.beta_opt <= 0:
            return None
        return percent_increase(self.beta_opt, self.beta_opt_f)

    def pct_ca(self) -> Fraction | None:
        if self.beta_sa is None or self.beta_ca is None or self.beta_sa <= 0:
            return None
        return percent_increase(self.beta_sa, self.beta_ca)

    def rho(self) -> Fraction | None:
        if self.beta_ca is None or self.beta_opt_f is None or self.beta_opt_f <= 0:
            return None
        return competitive_ratio(self.beta_ca, self.beta_opt_f)


REPORT_COLUMNS = (
    "scenario,|N|,|E|,|E_u|,C,R_T,K,|N_d|,|F|,beta_opt,et_opt,beta_opt_f,"
    "pct_opt_f,et_opt_f,beta_sa,et_sa,beta_ca,pct_ca,rho,rho_bound,et_ca"
)


def report(rows: list[ScenarioMetrics]) -> str:
    """CSV table, one line per scenario; absent values render as '-'."""

    def cell(value, kind=""):
        if value is None:
            return "-"
        if kind == "time":
            return format_time(value)
        if kind == "ratio":
            return str(round2(value))
        if kind == "secs":
            return f"{value:.2f}"
        return str(value)

    lines = [REPORT_COLUMNS]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.scenario,
                    cell(r.nodes),
                    cell(r.edges),
                    cell(r.required),
                    cell(r.capacity, "time"),
                    cell(r.recharge, "time"),
                    cell(r.vehicles),
                    cell(r.depots),
                    cell(r.failures),
                    cell(r.beta_opt, "time"),
                    cell(r.et_opt, "secs"),
                    cell(r.beta_opt_f, "time"),
                    cell(r.pct_opt_f(), "ratio"),
                    cell(r.et_opt_f, "secs"),
                    cell(r.beta_sa, "time"),
                    cell(r.et_sa, "secs"),
                    cell(r.beta_ca, "time"),
                    cell(r.pct_ca(), "ratio"),
                    cell(r.rho(), "ratio"),
                    cell(r.rho_bound, "ratio"),
                    cell(r.et_ca, "secs"),
                ]
            )
        )
    return "\n".join(lines) + "\n"
