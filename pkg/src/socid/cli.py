"""Command-line entry point: reproducible runs over one JSON instance format.

Every command writes its results plus a manifest sufficient to reproduce
them.  Exit codes: 0 success, 1 invalid input, 2 internal model-invariant
breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .actions import solve_actions, solve_actions_iterative, value_table
from .errors import ConvergenceError, ValidationError
from .graph import IdentityAssignment, IdentitySet, IdentitySpec, Population
from .identity import (
    cascade,
    enumerate_equilibria,
    find_blocking_set,
    full_diffusion_conditions,
)
from .scenarios import ScenarioConfig, generate, policy_solution_check
from .serialize import (
    PROFILE_CSV_FIELDS,
    TRACE_CSV_FIELDS,
    Instance,
    dot_graph,
    instance_summary,
    instance_to_dict,
    load_instance,
    policy_report_fields,
    profile_csv_rows,
    profile_to_dict,
    subgroup_to_dict,
    trace_csv_rows,
    trace_summary_dict,
    trace_to_dict,
    validate_instance_dict,
    value_table_csv_rows,
    value_table_to_dict,
    welfare_comparison_to_dict,
    write_csv,
    write_json,
)
from .welfare import compare_welfare

OUTPUT_DIR_ENV = "SOCID_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise ValidationError(message)


@dataclass
class _Run:
    command: str
    args: argparse.Namespace
    outdir: str
    formats: set[str]
    outputs: list[str]
    started: float

    def path(self, name: str) -> str:
        self.outputs.append(name)
        return os.path.join(self.outdir, name)

    def want(self, fmt: str) -> bool:
        return fmt in self.formats

    def finish(self) -> None:
        config = {k: v for k, v in sorted(vars(self.args).items())
                  if k not in ("func",)}
        manifest = {
            "command": self.command,
            "config": config,
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "outputs": sorted(self.outputs),
            "duration_s": round(time.monotonic() - self.started, 6),
        }
        write_json(manifest, os.path.join(self.outdir, f"{self.command}_manifest.json"))


def _start(args, command: str) -> _Run:
    outdir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(outdir, exist_ok=True)
    formats = set(args.format.split(",")) if getattr(args, "format", None) else {
        "json", "csv", "dot"}
    unknown = formats - {"json", "csv", "dot"}
    if unknown:
        raise ValidationError(f"unknown formats: {sorted(unknown)}")
    return _Run(command, args, outdir, formats, [], time.monotonic())


def cmd_validate(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        print(f"parse failure at line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return 1
    problems = validate_instance_dict(data)
    if problems:
        for p in problems:
            print(f"error: {p}")
        return 1
    print(instance_summary(load_instance(args.input)))
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.input)
    run = _start(args, "solve")
    if args.method == "iterative":
        profile = solve_actions_iterative(inst.net, inst.assign, inst.identities,
                                          inst.pop, tol=args.tol,
                                          max_iters=args.max_iters)
    else:
        profile = solve_actions(inst.net, inst.assign, inst.identities, inst.pop)
    table = value_table(inst.net, inst.assign, inst.identities, inst.pop)
    if run.want("json"):
        write_json(profile_to_dict(profile), run.path("actions.json"))
        write_json(value_table_to_dict(table), run.path("values.json"))
    if run.want("csv"):
        write_csv(profile_csv_rows(inst, profile), PROFILE_CSV_FIELDS,
                  run.path("actions.csv"))
        rows = value_table_csv_rows(table)
        write_csv(rows, list(rows[0].keys()), run.path("values.csv"))
    if run.want("dot"):
        with open(run.path("solution.dot"), "w", encoding="utf-8") as fh:
            fh.write(dot_graph(inst.net, inst.assign.labels, x=profile.x))
    run.finish()
    return 0


def cmd_cascade(args) -> int:
    inst = load_instance(args.input)
    run = _start(args, "cascade")
    schedule = args.c_schedule
    a, b = _role_labels(inst.identities)
    trace = cascade(inst.net, inst.assign, schedule, mode=args.mode,
                    a=a, b=b, update=args.update)
    report = None
    if schedule[-1] <= 0:
        report = full_diffusion_conditions(inst.net, schedule[-1], a=a, b=b)
    if run.want("json"):
        write_json(trace_to_dict(trace), run.path("trace.json"))
        write_json(trace_summary_dict(trace, report), run.path("cascade_summary.json"))
    if run.want("csv"):
        write_csv(trace_csv_rows(trace), TRACE_CSV_FIELDS, run.path("trace.csv"))
    if run.want("dot"):
        with open(run.path("round_000.dot"), "w", encoding="utf-8") as fh:
            fh.write(dot_graph(inst.net, trace.initial.labels))
        for k, rnd in enumerate(trace.rounds, start=1):
            with open(run.path(f"round_{k:03d}.dot"), "w", encoding="utf-8") as fh:
                fh.write(dot_graph(inst.net, rnd.assignment))
    run.finish()
    return 0


def _role_labels(identities: IdentitySet) -> tuple[str, str]:
    if len(identities) != 2:
        raise ValidationError("this command needs exactly 2 identities")
    a, b = identities.pair()
    return a.label, b.label


def cmd_equilibria(args) -> int:
    inst = load_instance(args.input)
    run = _start(args, "equilibria")
    a, b = _role_labels(inst.identities)
    found = enumerate_equilibria(inst.net, args.c, n_limit=args.enumerate_limit,
                                 a=a, b=b)
    payload = {
        "c": args.c,
        "count": len(found),
        "equilibria": [{"assignment": list(e.labels),
                        "n_a": e.counts().get(a, 0)} for e in found],
    }
    if run.want("json"):
        write_json(payload, run.path("equilibria.json"))
    run.finish()
    return 0


def cmd_blocking(args) -> int:
    inst = load_instance(args.input)
    run = _start(args, "blocking")
    seed_set = None
    if args.subset:
        seed_set = [int(tok) for tok in args.subset.split(",") if tok.strip() != ""]
    view = find_blocking_set(inst.net, args.c, seed=seed_set)
    payload = {"c": args.c,
               "seed_set": sorted(seed_set) if seed_set is not None else None}
    payload.update(subgroup_to_dict(view))
    if run.want("json"):
        write_json(payload, run.path("blocking.json"))
    run.finish()
    return 0


def cmd_welfare(args) -> int:
    inst = load_instance(args.input)
    run = _start(args, "welfare")
    assignments = {"instance": inst.assign}
    for label in inst.identities.labels:
        assignments[f"all-{label}"] = IdentityAssignment((label,) * inst.net.n)
    comp = compare_welfare(inst.net, inst.identities, inst.pop, assignments)
    if run.want("json"):
        write_json(welfare_comparison_to_dict(comp), run.path("welfare.json"))
    if run.want("csv"):
        rows = [{
            "assignment": name,
            "total_utility": repr(r.total_utility),
            "total_action": repr(r.total_action),
            "delta_utility": repr(comp.delta_utility[name]),
            "delta_action": repr(comp.delta_action[name]),
        } for name, r in comp.reports.items()]
        write_csv(rows, ["assignment", "total_utility", "total_action",
                         "delta_utility", "delta_action"], run.path("welfare.csv"))
    run.finish()
    return 0


def cmd_scenario(args) -> int:
    run = _start(args, "scenario")
    config = ScenarioConfig(
        kind=args.kind, n=args.n, d=args.d, clique_size=args.clique_size,
        seed=args.seed, initial=args.initial, connect=args.connect,
        homophily=args.homophily)
    net, assign = generate(config)
    a, b = config.resolved_labels()
    identities = IdentitySet((IdentitySpec(a, args.mu_a, args.v_a),
                              IdentitySpec(b, args.mu_b, args.v_b)))
    pop = Population((args.w,) * net.n, args.alpha, args.beta, args.gamma)
    inst = Instance(net, identities, pop, assign)
    if run.want("json"):
        write_json(instance_to_dict(inst), run.path("instance.json"))
    if run.want("dot"):
        with open(run.path("instance.dot"), "w", encoding="utf-8") as fh:
            fh.write(dot_graph(net, assign.labels))

    report: dict = {"kind": args.kind, "n": net.n, "d": args.d, "seed": args.seed,
                    "degrees": list(net.degrees), "connected": net.connected}
    if args.kind in ("cafeteria-1", "cafeteria-2"):
        if args.c_schedule:
            grid = args.c_schedule
        else:
            grid = [round(-args.d - 1 + 0.5 * k, 6)
                    for k in range(int((2 * args.d + 2) / 0.5) + 1)]
        checks = [policy_solution_check(net, assign, c, args.kind, args.d,
                                        labels=(a, b), band=args.band)
                  for c in grid]
        report["policy_checks"] = [policy_report_fields(r) for r in checks]
        if args.kind == "cafeteria-1":
            eq_region = [r.c for r in checks if r.is_equilibrium]
            report["equilibrium_region"] = eq_region
            report["expected_region"] = f"(-{args.d}, {args.d}]"
    if run.want("json"):
        write_json(report, run.path("scenario_report.json"))
    run.finish()
    return 0


def _add_common(p, with_input=True):
    if with_input:
        p.add_argument("--input", required=True, help="instance JSON file")
    p.add_argument("--output-dir", default=None,
                   help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")
    p.add_argument("--format", default=None,
                   help="comma list of json,csv,dot (default: all)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="socid",
                     description="identity and action choice games on networks")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="stage-2 equilibrium actions and values")
    _add_common(p)
    p.add_argument("--method", choices=("direct", "iterative"), default="direct")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=10**6)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cascade", help="identity diffusion through a c schedule")
    _add_common(p)
    p.add_argument("--c-schedule", required=True, nargs="+", type=float,
                   metavar="C", help="one or more c values, e.g. -1.5 -2.5")
    p.add_argument("--mode", choices=("monotone", "general"), default="monotone")
    p.add_argument("--update", choices=("synchronous", "sequential"),
                   default="synchronous")
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("equilibria", help="exhaustive two-identity equilibria")
    _add_common(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--enumerate-limit", type=int, default=20)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("blocking", help="maximal cohesive subgroup at c")
    _add_common(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--subset", default=None,
                   help="comma-separated seed members (default: everyone)")
    p.set_defaults(func=cmd_blocking)

    p = sub.add_parser("welfare", help="welfare report and all-X comparisons")
    _add_common(p)
    p.set_defaults(func=cmd_welfare)

    p = sub.add_parser("scenario", help="generate a scenario instance")
    _add_common(p, with_input=False)
    p.add_argument("--kind", required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--clique-size", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", default=None,
                   choices=("inherit", "all_a", "all_b"))
    p.add_argument("--connect", choices=("strict-disjoint", "single-bridge"),
                   default="strict-disjoint")
    p.add_argument("--homophily", type=float, default=0.0)
    p.add_argument("--band", type=float, default=0.5)
    p.add_argument("--c-schedule", default=None, nargs="+", type=float, metavar="C",
                   help="c grid for the policy report (default: -d-1..d+1 by 0.5)")
    p.add_argument("--mu-a", type=float, default=1.0)
    p.add_argument("--mu-b", type=float, default=0.5)
    p.add_argument("--v-a", type=float, default=1.5)
    p.add_argument("--v-b", type=float, default=0.5)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ValidationError, ConvergenceError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, np.linalg.LinAlgError) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
