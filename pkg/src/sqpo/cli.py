"""Batch command-line front end.

Three subcommands: validate a hierarchy file, enumerate matches of a rule
at a node, and apply a rewrite with forward or backward propagation.
All output is canonical JSON / fixed-format text, so identical inputs
produce byte-identical outputs. Exit codes: 0 success, 1 domain violation,
2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import SqpoError
from .graphs import Homomorphism, dumps_canonical, graph_from_json
from .hierarchy import Hierarchy, hierarchy_from_json, hierarchy_to_json
from .propagation import (
    BACKWARD,
    FORWARD,
    BackwardFactorization,
    ForwardFactorization,
    PropagationPlan,
    RewriteReport,
    restriction_pullback,
)
from .relations import apply_plan, build_canonical_plan, build_relation_plan
from .rules import EXPANSIVE, RESTRICTIVE, Rule, find_matches, rule_from_json


class _InputError(Exception):
    """File-level problem: missing, unparsable, schema-invalid."""


@dataclass
class Workspace:
    """A directory of named hierarchy, rule, plan and relation files.

    Loading eagerly parses and validates everything, so batch scripts fail
    fast on broken inputs. File roles are keyed by suffix:
    *.hierarchy.json, *.rule.json, *.plan.json, *.relation.json.
    """

    root: Path
    hierarchies: dict[str, Hierarchy] = field(default_factory=dict)
    rules: dict[str, "Rule"] = field(default_factory=dict)
    plans: dict[str, dict] = field(default_factory=dict)
    relations: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def load(cls, root) -> "Workspace":
        root = Path(root)
        ws = cls(root=root)
        for path in sorted(root.glob("*.json")):
            stem = path.name
            if stem.endswith(".hierarchy.json"):
                ws.hierarchies[stem[: -len(".hierarchy.json")]] = _load_hierarchy(str(path))
            elif stem.endswith(".rule.json"):
                ws.rules[stem[: -len(".rule.json")]] = _load_rule(str(path))
            elif stem.endswith(".plan.json"):
                ws.plans[stem[: -len(".plan.json")]] = _load_json(str(path))
            elif stem.endswith(".relation.json"):
                ws.relations[stem[: -len(".relation.json")]] = _load_json(str(path))
        return ws


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _InputError(f"cannot parse {path}: {exc}") from exc


def _load_hierarchy(path: str, validate: bool = True):
    try:
        return hierarchy_from_json(_load_json(path), validate=validate)
    except SqpoError as exc:
        raise _InputError(f"invalid hierarchy in {path}: {exc}") from exc


def _load_rule(path: str):
    try:
        return rule_from_json(_load_json(path))
    except SqpoError as exc:
        raise _InputError(f"invalid rule in {path}: {exc}") from exc


def cmd_validate(args) -> int:
    h = _load_hierarchy(args.hierarchy, validate=False)
    violations = h.validate()
    for v in violations:
        print(v)
    return 1 if violations else 0


def _parse_anchor(pairs) -> dict[str, str]:
    anchor = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise _InputError(f"bad anchor {pair!r}: expected PATTERN=NODE")
        k, v = pair.split("=", 1)
        anchor[k] = v
    return anchor


def cmd_match(args) -> int:
    h = _load_hierarchy(args.hierarchy)
    rule = _load_rule(args.rule)
    g = h.graph(args.node)
    matches = find_matches(rule, g, args.kind, _parse_anchor(args.anchor))
    out = [
        {"kind": m.kind, "map": {k: m.instance[k] for k in sorted(m.instance.source.nodes)}}
        for m in matches
    ]
    sys.stdout.write(dumps_canonical(out))
    return 0


def _hom_map(hom: Homomorphism) -> dict:
    return {k: hom[k] for k in sorted(hom.source.nodes)}


def _report_json(reports: list[RewriteReport]) -> dict:
    apps = []
    for rep in reports:
        apps.append(
            {
                "origin": rep.origin,
                "direction": rep.direction,
                "waves": rep.waves,
                "traces": {n: _hom_map(rep.traces[n]) for n in sorted(rep.traces)},
                "instances": {
                    n: _hom_map(rep.instances[n]) for n in sorted(rep.instances)
                },
                "typings": [
                    {"from": a, "to": b, "map": _hom_map(rep.updated_typings[(a, b)])}
                    for (a, b) in sorted(rep.updated_typings)
                ],
                "steps": [
                    {"node": node, "violations": viols} for node, viols in rep.steps
                ],
            }
        )
    return {"applications": apps}


def _parse_plan(h, origin, rule_arrow, match, direction, obj) -> PropagationPlan:
    """Build a plan from the plan-file schema: explicit factorizations win,
    relations (or the canonical default) fill the remaining nodes."""
    if obj.get("origin") not in (None, origin):
        raise _InputError("plan file names a different origin than the command line")
    relations = obj.get("relation") or {}
    if not isinstance(relations, dict):
        raise _InputError("plan relation must map node names to relations")
    explicit = obj.get("factorizations", {})
    plan = build_relation_plan(
        h,
        origin,
        rule_arrow,
        match,
        direction,
        {k: v for k, v in relations.items() if k not in explicit},
    )
    sub = h.forward_subgraph(origin) if direction == FORWARD else h.backward_subgraph(origin)
    for name, spec in sorted(explicit.items()):
        if name not in sub.nodes():
            raise _InputError(f"plan factorization for {name}: not an affected node")
        mid = graph_from_json(spec["mid"])
        if direction == FORWARD:
            plan.factorizations[name] = ForwardFactorization(
                mid=mid,
                pre_arrow=Homomorphism(rule_arrow.source, mid, spec["pre"]),
                post_arrow=Homomorphism(mid, rule_arrow.target, spec["post"]),
                typing=Homomorphism(mid, h.graph(name), spec["typing_or_retyping"]),
            )
        else:
            rp = restriction_pullback(
                h.graph(name),
                h.graph(origin),
                h.composed_typing(name, origin),
                match,
            )
            # retyping keys may name instance elements; translate to pattern nodes
            raw = spec["typing_or_retyping"]
            inst_inv = {rp.instance[p]: p for p in rp.pattern.nodes}
            retyping_map = {}
            for key, value in raw.items():
                pattern_node = key if key in rp.pattern.nodes else inst_inv.get(key)
                if pattern_node is None:
                    raise _InputError(
                        f"plan factorization for {name}: {key} is neither a "
                        "restriction-pattern node nor an instance element"
                    )
                retyping_map[pattern_node] = value
            plan.factorizations[name] = BackwardFactorization(
                mid=mid,
                post_arrow=Homomorphism(mid, rule_arrow.target, spec["post"]),
                pre_arrow=Homomorphism(rule_arrow.source, mid, spec["pre"]),
                retyping=Homomorphism(rp.pattern, mid, retyping_map),
            )
    for conn in obj.get("connectors", []):
        i, j = conn["from"], conn["to"]
        fx_i = plan.factorizations.get(i)
        fx_j = plan.factorizations.get(j)
        if fx_i is None or fx_j is None:
            raise _InputError(f"connector {i}->{j} names nodes without factorizations")
        plan.connectors[(i, j)] = Homomorphism(fx_i.mid, fx_j.mid, conn["map"])
    return plan


def cmd_rewrite(args) -> int:
    h = _load_hierarchy(args.hierarchy)
    rule = _load_rule(args.rule)
    g = h.graph(args.node)

    if args.direction == "fwd":
        direction = FORWARD
        trivial = rule.left_leg
        if rule.lhs != rule.interface or any(
            trivial[n] != n for n in rule.interface.nodes
        ):
            raise _InputError(
                "forward rewriting needs a rule whose restrictive part is trivial "
                "(lhs equal to the interface, identity left leg)"
            )
        rule_arrow = rule.right_leg
        kind = EXPANSIVE
    else:
        direction = BACKWARD
        trivial = rule.right_leg
        if rule.rhs != rule.interface or any(
            trivial[n] != n for n in rule.interface.nodes
        ):
            raise _InputError(
                "backward rewriting needs a rule whose expansive part is trivial "
                "(rhs equal to the interface, identity right leg)"
            )
        rule_arrow = rule.left_leg
        kind = RESTRICTIVE

    matches = find_matches(rule, g, kind)
    if not 0 <= args.match_index < len(matches):
        print(
            f"match index {args.match_index} out of range ({len(matches)} matches)",
            file=sys.stderr,
        )
        return 1
    match = matches[args.match_index].instance

    if args.plan is not None:
        plan = _parse_plan(
            h, args.node, rule_arrow, match, direction, _load_json(args.plan)
        )
    elif args.relation is not None:
        relations = _load_json(args.relation)
        if not isinstance(relations, dict):
            raise _InputError("relation file must map node names to relations")
        plan = build_relation_plan(h, args.node, rule_arrow, match, direction, relations)
    else:
        plan = build_canonical_plan(h, args.node, rule_arrow, match, direction)

    reports = apply_plan(h, plan)
    final = reports[-1].hierarchy

    out_path = args.output or str(Path(args.hierarchy).with_suffix("")) + ".rewritten.json"
    report_path = args.report or out_path + ".report.json"
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(hierarchy_to_json(final)))
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(_report_json(reports)))
    print(f"wrote {out_path}")
    print(f"wrote {report_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqpo",
        description="Rewrite attributed graph hierarchies with propagation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a hierarchy file")
    p_validate.add_argument("hierarchy")
    p_validate.set_defaults(func=cmd_validate)

    p_match = sub.add_parser("match", help="enumerate matches of a rule at a node")
    p_match.add_argument("hierarchy")
    p_match.add_argument("node")
    p_match.add_argument("rule")
    p_match.add_argument(
        "--kind", choices=[RESTRICTIVE, EXPANSIVE], default=RESTRICTIVE
    )
    p_match.add_argument(
        "--anchor",
        action="append",
        metavar="PATTERN=NODE",
        help="pre-assign a pattern node (repeatable)",
    )
    p_match.set_defaults(func=cmd_match)

    p_rewrite = sub.add_parser(
        "rewrite", help="apply a rule at a node and propagate"
    )
    p_rewrite.add_argument("hierarchy")
    p_rewrite.add_argument("node")
    p_rewrite.add_argument("rule")
    p_rewrite.add_argument("match_index", type=int)
    p_rewrite.add_argument("--direction", choices=["fwd", "bwd"], required=True)
    group = p_rewrite.add_mutually_exclusive_group()
    group.add_argument("--plan", help="plan file with explicit factorizations")
    group.add_argument("--relation", help="relation file for controlled propagation")
    group.add_argument(
        "--canonical",
        action="store_true",
        help="propagate everything canonically (default)",
    )
    p_rewrite.add_argument("-o", "--output", help="rewritten hierarchy file")
    p_rewrite.add_argument("--report", help="report file")
    p_rewrite.set_defaults(func=cmd_rewrite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SqpoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
