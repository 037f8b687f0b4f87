"""One self-describing JSON instance format plus CSV and DOT emission.

All emitters are deterministic: dict keys are sorted, members are listed in
ascending index order, and floats go through Python's shortest round-trip
repr, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass

from .actions import ActionProfile, ValueTable
from .errors import ValidationError
from .graph import (
    IdentityAssignment,
    IdentitySet,
    IdentitySpec,
    Network,
    Population,
    SubgroupView,
    typed_degree,
)
from .identity import CascadeTrace, DiffusionReport, ThresholdReport
from .scenarios import PolicyReport
from .welfare import MobilityExampleReport, WelfareComparison, WelfareReport

_PALETTE = ("#9ecae1", "#fc9272", "#a1d99b", "#bcbddc", "#fdd0a2", "#d9d9d9")


@dataclass(frozen=True)
class Instance:
    """A complete problem: network, identities, population, and assignment."""

    net: Network
    identities: IdentitySet
    pop: Population
    assign: IdentityAssignment

    def __post_init__(self):
        self.assign.validate(self.net, self.identities)
        if self.pop.n != self.net.n:
            raise ValidationError(
                f"population size {self.pop.n} != network size {self.net.n}")


def instance_to_dict(inst: Instance) -> dict:
    data = {
        "n": inst.net.n,
        "edges": [list(e) for e in inst.net.edges],
        "identities": [{"label": s.label, "mu": s.mu, "v": s.v}
                       for s in inst.identities],
        "alpha": inst.pop.alpha,
        "beta": inst.pop.beta,
        "gamma": inst.pop.gamma,
        "abilities": list(inst.pop.w),
        "assignment": list(inst.assign.labels),
    }
    if not inst.net.connected:
        data["allow_disconnected"] = True
    return data


def instance_from_dict(data: dict) -> Instance:
    missing = [k for k in ("n", "edges", "identities", "alpha", "beta", "gamma",
                           "abilities", "assignment") if k not in data]
    if missing:
        raise ValidationError(f"instance is missing keys: {', '.join(missing)}")
    net = Network(int(data["n"]), [tuple(e) for e in data["edges"]],
                  require_connected=not data.get("allow_disconnected", False))
    identities = IdentitySet(tuple(
        IdentitySpec(str(s["label"]), float(s["mu"]), float(s["v"]))
        for s in data["identities"]))
    pop = Population(tuple(float(x) for x in data["abilities"]),
                     float(data["alpha"]), float(data["beta"]), float(data["gamma"]))
    assign = IdentityAssignment(tuple(str(x) for x in data["assignment"]))
    return Instance(net, identities, pop, assign)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(obj))


def write_csv(rows: list[dict], fieldnames: list[str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def validate_instance_dict(data: dict) -> list[str]:
    """All invariant violations in a raw instance dict, with locations."""
    problems: list[str] = []
    n = data.get("n")
    if not isinstance(n, int) or n < 2:
        problems.append("n must be an integer >= 2")
        n = None

    edges = data.get("edges")
    nbrs: dict[int, set[int]] = {}
    if not isinstance(edges, list):
        problems.append("edges must be a list of [i, j] pairs")
    else:
        for k, e in enumerate(edges):
            if not (isinstance(e, (list, tuple)) and len(e) == 2
                    and all(isinstance(v, int) for v in e)):
                problems.append(f"edge index {k}: expected a pair of integers")
                continue
            i, j = e
            if i == j:
                problems.append(f"self-loop at edge index {k}")
                continue
            if n is not None and not (0 <= i < n and 0 <= j < n):
                problems.append(f"edge index {k}: ({i},{j}) out of range for n={n}")
                continue
            nbrs.setdefault(i, set()).add(j)
            nbrs.setdefault(j, set()).add(i)

    identities = data.get("identities")
    labels: list[str] = []
    if not isinstance(identities, list) or len(identities) < 2:
        problems.append("need at least 2 identities")
    else:
        for k, s in enumerate(identities):
            if not isinstance(s, dict) or not {"label", "mu", "v"} <= set(s):
                problems.append(f"identity index {k}: needs label, mu, v")
                continue
            labels.append(str(s["label"]))
            if not isinstance(s["v"], (int, float)) or s["v"] < 0:
                problems.append(f"identity {s['label']!r}: prescribed action must be >= 0")
        dupes = {lab for lab in labels if labels.count(lab) > 1}
        if dupes:
            problems.append(f"duplicate identity labels: {sorted(dupes)}")

    for name in ("alpha", "beta", "gamma"):
        val = data.get(name)
        if not isinstance(val, (int, float)) or val < 0:
            problems.append(f"{name} must be a number >= 0")

    abilities = data.get("abilities")
    if not isinstance(abilities, list) or (n is not None and len(abilities) != n):
        problems.append("abilities must be a list with one entry per individual")
    else:
        for i, wv in enumerate(abilities):
            if not isinstance(wv, (int, float)) or wv <= 0:
                problems.append(f"ability must be positive (individual {i})")

    assignment = data.get("assignment")
    if not isinstance(assignment, list) or (n is not None and len(assignment) != n):
        problems.append("assignment must be a list with one entry per individual")
    elif labels:
        for i, lab in enumerate(assignment):
            if str(lab) not in labels:
                problems.append(f"assignment[{i}]: unknown identity {lab!r}")

    if n is not None and not problems and not data.get("allow_disconnected", False):
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in nbrs.get(i, ()):
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        if len(seen) != n:
            problems.append("network is not connected")
    return problems


def instance_summary(inst: Instance) -> str:
    return (f"ok: n={inst.net.n}, m_edges={len(inst.net.edges)}, "
            f"{'connected' if inst.net.connected else 'disconnected (allowed)'}")


def profile_to_dict(profile: ActionProfile) -> dict:
    return {
        "x": [float(v) for v in profile.x],
        "xbar": [float(v) for v in profile.xbar],
        "utility": [float(v) for v in profile.utilities],
    }


def profile_csv_rows(inst: Instance, profile: ActionProfile) -> list[dict]:
    rows = []
    for i in range(inst.net.n):
        label = inst.assign.labels[i]
        rows.append({
            "id": i,
            "identity": label,
            "d_i": inst.net.degrees[i],
            "d_iI": typed_degree(inst.net, inst.assign, i, label),
            "x": repr(float(profile.x[i])),
            "utility": repr(float(profile.utilities[i])),
        })
    return rows


PROFILE_CSV_FIELDS = ["id", "identity", "d_i", "d_iI", "x", "utility"]


def value_table_to_dict(table: ValueTable) -> dict:
    return {"labels": list(table.labels),
            "V": [[float(v) for v in row] for row in table.V]}


def value_table_csv_rows(table: ValueTable) -> list[dict]:
    rows = []
    for i, row in enumerate(table.V):
        entry: dict = {"id": i}
        for lab, v in zip(table.labels, row):
            entry[f"V_{lab}"] = repr(float(v))
        rows.append(entry)
    return rows


def trace_to_dict(trace: CascadeTrace) -> list[dict]:
    return [{
        "c": r.c,
        "round": r.index,
        "scheme": r.scheme,
        "assignment": list(r.assignment),
        "switchers": list(r.switchers),
    } for r in trace.rounds]


def trace_csv_rows(trace: CascadeTrace) -> list[dict]:
    rows = []
    prev = trace.initial.labels
    for k, r in enumerate(trace.rounds, start=1):
        for i in r.switchers:
            rows.append({"round": k, "node": i,
                         "old_identity": prev[i], "new_identity": r.assignment[i]})
        prev = r.assignment
    return rows


TRACE_CSV_FIELDS = ["round", "node", "old_identity", "new_identity"]


def trace_summary_dict(trace: CascadeTrace, report: DiffusionReport | None = None) -> dict:
    out = {
        "mode": trace.mode,
        "c_schedule": list(trace.c_schedule),
        "rounds": len(trace.rounds),
        "rounds_per_c": {repr(c): trace.rounds_at(c) for c in trace.c_schedule},
        "converged": trace.converged,
        "cycle_detected": trace.cycle_detected,
        "final_a_fraction": trace.a_fraction(),
        "stall_set": list(trace.stall_set()),
        "final_assignment": list(trace.final.labels),
    }
    if report is not None:
        out["diffusion_conditions"] = diffusion_report_to_dict(report)
    return out


def diffusion_report_to_dict(report: DiffusionReport) -> dict:
    return {
        "c": report.c,
        "min_degree": report.min_degree,
        "max_degree": report.max_degree,
        "necessary_min_degree": report.necessary_min_degree,
        "necessary_no_blocking_set": report.necessary_no_blocking_set,
        "sufficient_max_degree": report.sufficient_max_degree,
        "blocking_set": list(report.blocking_set),
        "full_diffusion": report.full_diffusion,
        "stall_set": list(report.stall_set),
        "consistent": report.consistent,
    }


def subgroup_to_dict(view: SubgroupView) -> dict:
    return {"members": list(view.members), "k": list(view.k)}


def thresholds_to_dict(report: ThresholdReport) -> dict:
    return {
        "c": report.c,
        "t": [float(v) for v in report.t],
        "q": [None if q != q else float(q) for q in report.q],
        "unconditional": [bool(v) for v in report.unconditional],
        "isolated": [bool(v) for v in report.isolated],
    }


def welfare_report_to_dict(report: WelfareReport) -> dict:
    return {
        "total_utility": report.total_utility,
        "total_action": report.total_action,
        "by_identity": {
            lab: {"count": t.count, "utility": t.utility, "action": t.action}
            for lab, t in report.by_identity.items()
        },
    }


def welfare_comparison_to_dict(comp: WelfareComparison) -> dict:
    return {
        "baseline": comp.baseline,
        "reports": {k: welfare_report_to_dict(r) for k, r in comp.reports.items()},
        "delta_utility": dict(comp.delta_utility),
        "delta_action": dict(comp.delta_action),
    }


def mobility_example_to_dict(report: MobilityExampleReport) -> dict:
    return {
        "v_a": report.v_a, "v_b": report.v_b,
        "mu_a": report.mu_a, "mu_b": report.mu_b,
        "intrinsic_a": report.intrinsic_a, "intrinsic_b": report.intrinsic_b,
        "formula_matches": report.formula_matches,
        "c": report.c,
        "condition_value": report.condition_value,
        "condition_holds": report.condition_holds,
        "lock_in_possible": report.lock_in_possible,
        "summary": report.summary,
    }


def policy_report_fields(report: PolicyReport) -> dict:
    out = {"scenario": report.scenario, "c": report.c, "d": report.d,
           "matches": report.matches, "asserted": report.asserted}
    if report.scenario == 1:
        out.update({
            "predicted_equilibrium": report.predicted_equilibrium,
            "is_equilibrium": report.is_equilibrium,
            "violators": list(report.violators),
        })
    else:
        out.update({
            "unanimous": report.unanimous,
            "outcome_label": report.outcome_label,
            "predicted_label": report.predicted_label,
            "in_boundary_band": report.in_boundary_band,
        })
    return out


def dot_graph(net: Network, labels, x=None, name: str = "socid") -> str:
    """DOT rendering with identity-colored nodes, optionally labeled with actions."""
    palette = {}
    for k, lab in enumerate(sorted(set(labels))):
        palette[lab] = _PALETTE[k % len(_PALETTE)]
    buf = io.StringIO()
    buf.write(f"graph {name} {{\n  node [style=filled];\n")
    for i in range(net.n):
        text = f"{i} ({labels[i]})"
        if x is not None:
            text += f"\\nx={float(x[i]):.6g}"
        buf.write(f'  {i} [label="{text}", fillcolor="{palette[labels[i]]}"];\n')
    for i, j in net.edges:
        buf.write(f"  {i} -- {j};\n")
    buf.write("}\n")
    return buf.getvalue()
