"""Command-line pipeline: convert, plan, gen-scenarios, simulate, oracle, emit-milp, metrics, bench.

Every stochastic stage requires an explicit --seed; identical command lines
with identical seeds produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from arcfleet.auction import AuctionConfig, log_to_csv
from arcfleet.carp import convert_to_instance, parse_carp
from arcfleet.core import (
    InfeasibleError,
    ParseError,
    ValidationError,
    format_time,
    parse_instance,
    parse_time,
    serialize_instance,
)
from arcfleet.depots import build_depot_routes
from arcfleet.exact import EnumerationLimits, OracleBudgetError, emit_milp, exact_optimum
from arcfleet.failures import create_failure_scenarios, parse_scenario, serialize_scenario
from arcfleet.metrics import ScenarioMetrics, bound_applicable, bound_inputs_from_plan, report, round2, theoretical_bound
from arcfleet.planner import SaConfig, generate_initial_plan
from arcfleet.routing import mission_time, parse_plan, serialize_plan
from arcfleet.simulate import END, SimConfig, simulate


def _read(path: str) -> str:
    return Path(path).read_text()


def _write(path: str, text: str):
    Path(path).write_text(text)


def _load_plan(inst, path: str):
    plan = parse_plan(inst.graph, _read(path))
    plan.recharge = inst.recharge
    return plan


def _sa_config(args) -> SaConfig:
    return SaConfig(
        seed=args.seed,
        initial_temperature=args.t0,
        cooling_rate=args.cool,
        iterations_per_temperature=args.iters,
        min_temperature=args.tmin,
        restarts=args.restarts,
    )


def _add_sa_flags(p, require_seed=True):
    p.add_argument("--seed", type=int, required=require_seed)
    p.add_argument("--t0", type=float, default=None, help="initial temperature")
    p.add_argument("--cool", type=float, default=0.95, help="cooling rate")
    p.add_argument("--iters", type=int, default=200, help="iterations per temperature")
    p.add_argument("--tmin", type=float, default=None, help="final temperature")
    p.add_argument("--restarts", type=int, default=10)


def _parse_wait(text: str):
    if text.lower() == END:
        return END
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"--wait takes millitime or 'end', got {text!r}") from None


def _auction_config(inst, args) -> AuctionConfig:
    r0 = parse_time(args.r0) if args.r0 else inst.capacity
    dr = parse_time(args.dr) if args.dr else inst.capacity
    return AuctionConfig(initial_radius=r0, radius_step=dr)


def cmd_convert(args) -> int:
    carp = parse_carp(_read(args.input))
    inst = convert_to_instance(
        carp,
        seed=args.seed,
        depot_ratio=Fraction(args.depot_ratio),
        required_ratio=Fraction(args.required_ratio),
    )
    _write(args.output, serialize_instance(inst))
    print(f"wrote {args.output}: |N|={inst.graph.node_count} |E|={len(inst.graph.edges)} "
          f"|E_u|={len(inst.required)} K={inst.vehicle_count} C={format_time(inst.capacity)}")
    return 0


def cmd_plan(args) -> int:
    inst = parse_instance(_read(args.instance))
    plan = generate_initial_plan(inst, _sa_config(args))
    _write(args.output, serialize_plan(plan))
    print(f"wrote {args.output}: beta_sa={format_time(mission_time(plan))}")
    return 0


def cmd_gen_scenarios(args) -> int:
    inst = parse_instance(_read(args.instance))
    plan = _load_plan(inst, args.plan)
    replan = None
    if args.replan:
        def replan(j, _inst=inst, _args=args):
            cfg = SaConfig(
                seed=_args.seed * 7919 + j,
                initial_temperature=_args.t0,
                cooling_rate=_args.cool,
                iterations_per_temperature=_args.iters,
                min_temperature=_args.tmin,
                restarts=_args.restarts,
            )
            return generate_initial_plan(_inst, cfg)
    scenarios = create_failure_scenarios(inst, plan, args.seed, replan=replan)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for s in scenarios:
        path = outdir / f"{s.name}.scen"
        _write(str(path), serialize_scenario(s))
        print(f"wrote {path}: failures={len(s.failures)}")
    return 0


def cmd_simulate(args) -> int:
    inst = parse_instance(_read(args.instance))
    plan = _load_plan(inst, args.plan)
    scenario = parse_scenario(_read(args.scenario))
    table = build_depot_routes(inst)
    cfg = SimConfig(auction_cfg=_auction_config(inst, args), wait_time=_parse_wait(args.wait))
    rep = simulate(inst, table, plan, scenario, cfg)
    block = {
        "instance": inst.name,
        "scenario": scenario.name,
        "beta_before": format_time(mission_time(plan)),
        "beta_ca": format_time(rep.beta_ca),
        "covered": rep.covered,
        "auctions": rep.auction_count,
        "events": [[format_time(t), what] for t, what in rep.event_trace],
    }
    print(json.dumps(block, indent=2))
    for log in rep.auction_logs:
        print(log_to_csv(log), end="")
    if args.out_plan:
        _write(args.out_plan, serialize_plan(rep.final_plan))
    if args.log:
        merged = [log_to_csv(log).splitlines() for log in rep.auction_logs]
        lines = merged[0] if merged else ["iteration,trip,winner,anchor_depot,bid_value,radius"]
        for extra in merged[1:]:
            lines.extend(extra[1:])
        _write(args.log, "\n".join(lines) + "\n")
    return 0


def cmd_oracle(args) -> int:
    inst = parse_instance(_read(args.instance))
    scenario = parse_scenario(_read(args.scenario)) if args.scenario else None
    limits = EnumerationLimits(args.max_candidates, args.max_expansions)
    result = exact_optimum(inst, scenario, limits)
    lines = [
        f"instance {inst.name}",
        f"scenario {scenario.name if scenario else '-'}",
        f"beta_opt {format_time(result.beta_opt)}",
        f"trips_generated {result.trips_generated}",
        f"assignments_searched {result.assignments_searched}",
        "plan:",
        serialize_plan(result.plan),
    ]
    text = "\n".join(lines)
    if args.output:
        _write(args.output, text)
    else:
        print(text, end="")
    return 0


def cmd_emit_milp(args) -> int:
    inst = parse_instance(_read(args.instance))
    scenario = parse_scenario(_read(args.scenario)) if args.scenario else None
    text = emit_milp(inst, scenario)
    if args.output:
        _write(args.output, text)
    else:
        print(text, end="")
    return 0


def cmd_metrics(args) -> int:
    rows = []
    lines = _read(args.input).splitlines()
    header = [h.strip() for h in lines[0].split(",")]
    for raw in lines[1:]:
        if not raw.strip():
            continue
        cells = dict(zip(header, [c.strip() for c in raw.split(",")]))

        def time_of(key):
            value = cells.get(key, "-")
            return None if value in ("", "-") else parse_time(value)

        rows.append(
            ScenarioMetrics(
                scenario=cells.get("scenario", "?"),
                beta_opt=time_of("beta_opt"),
                beta_opt_f=time_of("beta_opt_f"),
                beta_sa=time_of("beta_sa"),
                beta_ca=time_of("beta_ca"),
            )
        )
    text = report(rows)
    if args.output:
        _write(args.output, text)
    else:
        print(text, end="")
    return 0


def cmd_bench(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    carp = parse_carp(_read(args.input))
    inst = convert_to_instance(carp, seed=args.seed)
    name = inst.name or Path(args.input).stem
    _write(str(outdir / f"{name}.inst"), serialize_instance(inst))

    plan = generate_initial_plan(inst, _sa_config(args))
    _write(str(outdir / f"{name}.plan"), serialize_plan(plan))
    beta_sa = mission_time(plan)

    table = build_depot_routes(inst)
    desk_scale = len(inst.required) <= 4 and inst.vehicle_count <= 3
    beta_opt = None
    if desk_scale:
        try:
            beta_opt = exact_optimum(inst, None, table=table).beta_opt
        except OracleBudgetError:
            beta_opt = None

    rows = []
    if inst.vehicle_count >= 2:
        scenarios = create_failure_scenarios(inst, plan, args.seed)
    else:
        scenarios = []
    sim_cfg = SimConfig(
        auction_cfg=_auction_config(inst, args), wait_time=_parse_wait(args.wait)
    )
    for s in scenarios:
        _write(str(outdir / f"{s.name}.scen"), serialize_scenario(s))
        rep = simulate(inst, table, plan, s, sim_cfg)
        logs = [log_to_csv(log).splitlines() for log in rep.auction_logs]
        lines = logs[0] if logs else ["iteration,trip,winner,anchor_depot,bid_value,radius"]
        for extra in logs[1:]:
            lines.extend(extra[1:])
        _write(str(outdir / f"{s.name}.auction.csv"), "\n".join(lines) + "\n")
        beta_opt_f = None
        if desk_scale:
            try:
                beta_opt_f = exact_optimum(inst, s, table=table).beta_opt
            except OracleBudgetError:
                beta_opt_f = None
        rho_bound = None
        if beta_opt_f is not None and bound_applicable(table):
            rho_bound = theoretical_bound(
                bound_inputs_from_plan(plan, inst.capacity, beta_opt_f)
            )
        rows.append(
            ScenarioMetrics(
                scenario=s.name,
                nodes=inst.graph.node_count,
                edges=len(inst.graph.edges),
                required=len(inst.required),
                capacity=inst.capacity,
                recharge=inst.recharge,
                vehicles=inst.vehicle_count,
                depots=len(inst.depots),
                failures=len(s.failures),
                beta_opt=beta_opt,
                beta_opt_f=beta_opt_f,
                beta_sa=beta_sa,
                beta_ca=rep.beta_ca,
                rho_bound=rho_bound,
            )
        )
    csv_path = outdir / f"{name}.metrics.csv"
    _write(str(csv_path), report(rows))
    print(f"wrote {csv_path} ({len(rows)} scenarios)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcfleet",
        description="Plan, fail, and reschedule multi-trip routes for rechargeable fleets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="CARP benchmark file to instance")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--depot-ratio", default="1/5")
    p.add_argument("--required-ratio", default="1/3")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("plan", help="initial failure-free plan via annealing")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True)
    _add_sa_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("gen-scenarios", help="seeded failure scenarios for a plan")
    p.add_argument("instance")
    p.add_argument("plan")
    p.add_argument("--outdir", required=True)
    p.add_argument("--replan", action="store_true",
                   help="re-run annealing per scenario instead of reusing the plan")
    _add_sa_flags(p)
    p.set_defaults(func=cmd_gen_scenarios)

    p = sub.add_parser("simulate", help="run a mission under a failure scenario")
    p.add_argument("instance")
    p.add_argument("plan")
    p.add_argument("scenario")
    p.add_argument("--wait", default="0", help="millitime window, or 'end'")
    p.add_argument("--r0", default=None, help="initial search radius (time units)")
    p.add_argument("--dr", default=None, help="radius increment (time units)")
    p.add_argument("--log", default=None, help="write merged auction log CSV here")
    p.add_argument("--out-plan", default=None, help="write the rescheduled plan here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="exact desk-scale optimum")
    p.add_argument("instance")
    p.add_argument("--scenario", default=None)
    p.add_argument("--max-candidates", type=int, default=100_000)
    p.add_argument("--max-expansions", type=int, default=5_000_000)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("emit-milp", help="write the offline model as LP text")
    p.add_argument("instance")
    p.add_argument("--scenario", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_emit_milp)

    p = sub.add_parser("metrics", help="derive report columns from beta values")
    p.add_argument("input", help="CSV with scenario,beta_opt,beta_opt_f,beta_sa,beta_ca")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="convert, plan, generate, simulate, compare")
    p.add_argument("input", help="CARP benchmark file")
    p.add_argument("--outdir", required=True)
    p.add_argument("--wait", default="0")
    p.add_argument("--r0", default=None)
    p.add_argument("--dr", default=None)
    _add_sa_flags(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, InfeasibleError, OracleBudgetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
