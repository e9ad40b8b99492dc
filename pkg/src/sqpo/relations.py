"""Relation-controlled propagation.

Instead of spelling out a factorization per affected object, a caller can
give, per object, a single relation:

* forward — maps elements added by the rule either to existing elements of
  the target object (type them there, strictly) or to other added elements
  (give them one shared fresh type, via a derived clean-up merge);
* backward — maps instances in the source object to the clone copy that
  should retype them; fully related clones are refined strictly, partially
  related ones are cloned canonically with a derived clean-up deleting the
  unwanted copies, and unrelated ones propagate canonically.

Unrelated added elements / clones propagate canonically. Derived clean-ups
are applied as separate rule applications at the origin's direct neighbours.
"""

from __future__ import annotations

from .edits import MergeNodes
from .exceptions import RewritingError
from .graphs import (
    Graph,
    Homomorphism,
    attrs_contained,
    compose,
    fresh_id,
    identity,
)
from .category import pullback
from .hierarchy import Hierarchy
from .propagation import (
    BACKWARD,
    FORWARD,
    BackwardFactorization,
    ForwardFactorization,
    PropagationPlan,
    RewriteReport,
    propagate_backward,
    propagate_forward,
    restriction_pullback,
)
from .rules import build_rule


def canonical_forward_factorization(
    rule: Homomorphism, base_typing: Homomorphism
) -> ForwardFactorization:
    """The fully propagating factorization: nothing is typed strictly."""
    return ForwardFactorization(
        mid=rule.source,
        pre_arrow=identity(rule.source),
        post_arrow=rule,
        typing=base_typing,
    )


def canonical_backward_factorization(
    rule: Homomorphism, restriction
) -> BackwardFactorization:
    """The fully propagating factorization: every clone/deletion propagates."""
    return BackwardFactorization(
        mid=rule.target,
        post_arrow=identity(rule.target),
        pre_arrow=rule,
        retyping=restriction.to_lhs,
    )


def derive_forward_factorization(
    rule: Homomorphism,
    base_typing: Homomorphism,
    relation: dict[str, str],
) -> tuple[ForwardFactorization, list[list[tuple[str, str]]]]:
    """Derive a forward factorization (plus clean-up merge groups) from a
    relation on the rule's added elements."""
    lhs, rhs = rule.source, rule.target
    target = base_typing.target
    added = sorted(rhs.nodes - {rule[a] for a in lhs.nodes})
    added_set = set(added)

    parent: dict[str, str] = {a: a for a in added}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    direct: dict[str, str] = {}
    for key in sorted(relation):
        value = relation[key]
        if key not in added_set:
            raise RewritingError(
                f"relation key {key} is not an element added by the rule"
            )
        if value in target.nodes:  # typing into the target wins over added links
            direct[key] = value
        elif value in added_set:
            ra, rb = find(key), find(value)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        else:
            raise RewritingError(
                f"relation value {value} is neither an added element nor an "
                "element of the target object"
            )

    group_target: dict[str, str] = {}
    for a, t in direct.items():
        root = find(a)
        if group_target.setdefault(root, t) != t:
            raise RewritingError(
                f"relation maps connected added elements to two different "
                f"target elements ({group_target[root]} and {t})"
            )

    strict: dict[str, str] = {}  # added element -> target element
    for a, t in sorted(direct.items()):
        if not attrs_contained(rhs.attrs_of(a), target.attrs_of(t)):
            raise RewritingError(
                f"relation inconsistent with typing: attributes of added "
                f"element {a} are not contained in those of {t}"
            )
        strict[a] = t

    # mid object: the rule source plus the strictly typed added elements
    taken = set(lhs.nodes)
    strict_name: dict[str, str] = {}
    for a in sorted(strict):
        name = fresh_id(a, taken)
        taken.add(name)
        strict_name[a] = name
    post_map = {u: rule[u] for u in lhs.nodes}
    typing_map = {u: base_typing[u] for u in lhs.nodes}
    for a, name in strict_name.items():
        post_map[name] = a
        typing_map[name] = strict[a]

    # attribute additions stay canonical; strict elements carry their full
    # rhs attributes (containment in the target was checked above)
    node_attrs = {u: lhs.attrs_of(u) for u in lhs.nodes}
    for a, name in strict_name.items():
        node_attrs[name] = rhs.attrs_of(a)

    strict_names = set(strict_name.values())
    edges = {}
    mid_nodes = sorted(taken)
    for u in mid_nodes:
        for v in mid_nodes:
            rhs_edge = (post_map[u], post_map[v])
            if rhs_edge not in rhs.edges:
                continue
            if (u, v) in lhs.edges:
                edges[(u, v)] = lhs.attrs_of((u, v))
            elif (
                (u in strict_names or v in strict_names)
                and (typing_map[u], typing_map[v]) in target.edges
                and attrs_contained(
                    rhs.attrs_of(rhs_edge),
                    target.attrs_of((typing_map[u], typing_map[v])),
                )
            ):
                edges[(u, v)] = rhs.attrs_of(rhs_edge)
    mid = Graph(mid_nodes, edges.keys(), node_attrs, edges)
    fact = ForwardFactorization(
        mid=mid,
        pre_arrow=Homomorphism(lhs, mid, {u: u for u in lhs.nodes}),
        post_arrow=Homomorphism(mid, rhs, post_map),
        typing=Homomorphism(mid, target, typing_map),
    )
    fact.pre_arrow.validate()
    fact.post_arrow.validate()
    fact.typing.validate()

    groups: dict[str, list[str]] = {}
    for a in added:
        groups.setdefault(find(a), []).append(a)
    cleanup: list[list[tuple[str, str]]] = []
    for root in sorted(groups):
        members = groups[root]
        canonical_members = [a for a in members if a not in strict]
        refs: list[tuple[str, str]] = []
        if root in group_target:
            refs.append(("old", group_target[root]))
        refs.extend(("new", a) for a in sorted(canonical_members))
        if len(refs) >= 2:
            cleanup.append(refs)
    return fact, cleanup


def derive_backward_factorization(
    rule: Homomorphism,
    match: Homomorphism,
    source: Graph,
    typing_to_origin: Homomorphism,
    relation: dict[str, str],
) -> tuple[BackwardFactorization, list[str]]:
    """Derive a backward factorization (plus clean-up selection) from a
    relation assigning clone copies to instances of the source object."""
    lhs = rule.target  # pattern matched in the origin
    rp = restriction_pullback(source, match.target, typing_to_origin, match)
    m_hat_inv = {rp.instance[p]: p for p in rp.pattern.nodes}

    copies: dict[str, list[str]] = {l: [] for l in lhs.nodes}
    for k in sorted(rule.source.nodes):
        copies[rule[k]].append(k)
    instances: dict[str, list[str]] = {l: [] for l in lhs.nodes}
    for p in sorted(rp.pattern.nodes):
        instances[rp.to_lhs[p]].append(p)

    assigned: dict[str, str] = {}  # pattern node -> clone copy
    for g_node in sorted(relation):
        copy = relation[g_node]
        p = m_hat_inv.get(g_node)
        if p is None:
            raise RewritingError(
                f"related element {g_node} is not an instance of the matched pattern"
            )
        if copy not in rule.source.nodes or rule[copy] != rp.to_lhs[p]:
            raise RewritingError(
                f"relation inconsistent with typing: {copy} is not a copy of "
                f"the element typing {g_node}"
            )
        assigned[p] = copy

    strict_clones: set[str] = set()
    for l in sorted(lhs.nodes):
        if len(copies[l]) < 2:
            continue
        related = [p for p in instances[l] if p in assigned]
        if instances[l] and len(related) == len(instances[l]):
            strict_clones.add(l)

    taken: set[str] = set()
    copy_name: dict[str, str] = {}
    passthrough: dict[str, str] = {}
    for l in sorted(lhs.nodes):
        if l in strict_clones:
            for k in copies[l]:
                name = fresh_id(k, taken)
                taken.add(name)
                copy_name[k] = name
        else:
            name = fresh_id(l, taken)
            taken.add(name)
            passthrough[l] = name

    post_map: dict[str, str] = {}
    for k, name in copy_name.items():
        post_map[name] = rule[k]
    for l, name in passthrough.items():
        post_map[name] = l
    node_attrs = {name: lhs.attrs_of(post_map[name]) for name in taken}
    edges = {}
    for u in sorted(taken):
        for v in sorted(taken):
            l_edge = (post_map[u], post_map[v])
            if l_edge in lhs.edges:
                edges[(u, v)] = lhs.attrs_of(l_edge)
    mid = Graph(taken, edges.keys(), node_attrs, edges)

    pre_map = {}
    for k in rule.source.nodes:
        pre_map[k] = copy_name.get(k, passthrough.get(rule[k]))
    retyping_map = {}
    for p in rp.pattern.nodes:
        l = rp.to_lhs[p]
        if l in strict_clones:
            retyping_map[p] = copy_name[assigned[p]]
        else:
            retyping_map[p] = passthrough[l]
    fact = BackwardFactorization(
        mid=mid,
        post_arrow=Homomorphism(mid, lhs, post_map),
        pre_arrow=Homomorphism(rule.source, mid, pre_map),
        retyping=Homomorphism(rp.pattern, mid, retyping_map),
    )
    fact.post_arrow.validate()
    fact.pre_arrow.validate()
    fact.retyping.validate()

    # clean-up: over the canonical lifted pattern, drop clone copies the
    # relation rejected (partial refinements)
    lifted = pullback(fact.retyping, fact.pre_arrow)
    doomed = []
    for q in sorted(lifted.apex.nodes):
        p = lifted.to_a[q]
        k = lifted.to_b[q]
        g_node = rp.instance[p]
        if g_node in relation and relation[g_node] != k:
            doomed.append(q)
    return fact, doomed


def derive_factorization_from_relation(
    direction: str,
    rule: Homomorphism,
    match: Homomorphism,
    target: Graph,
    typing_to_origin: Homomorphism,
    relation: dict[str, str],
):
    """Dispatch to the forward or backward derivation; returns the
    factorization together with the derived clean-up payload."""
    if direction == FORWARD:
        return derive_forward_factorization(
            rule, compose(typing_to_origin, match), relation
        )
    if direction == BACKWARD:
        return derive_backward_factorization(
            rule, match, target, typing_to_origin, relation
        )
    raise RewritingError(f"unknown direction {direction!r}")


# -- plan builders and the application driver -------------------------------------


def build_canonical_plan(
    h: Hierarchy,
    origin: str,
    rule: Homomorphism,
    match: Homomorphism,
    direction: str,
) -> PropagationPlan:
    """Plan with the fully propagating factorization at every affected node."""
    return build_relation_plan(h, origin, rule, match, direction, {})


def build_relation_plan(
    h: Hierarchy,
    origin: str,
    rule: Homomorphism,
    match: Homomorphism,
    direction: str,
    relations: dict[str, dict[str, str]],
) -> PropagationPlan:
    """Plan whose factorizations are derived from per-node relations;
    nodes without a relation entry propagate canonically."""
    plan = PropagationPlan(
        origin=origin, rule=rule, match=match, direction=direction
    )
    sub = (
        h.forward_subgraph(origin)
        if direction == FORWARD
        else h.backward_subgraph(origin)
    )
    unknown = set(relations) - set(sub.nodes())
    if unknown:
        raise RewritingError(
            f"relations given for nodes outside the affected sub-hierarchy: "
            f"{sorted(unknown)}"
        )
    if origin in relations:
        raise RewritingError("the origin object cannot carry a relation")
    for name in sub.nodes():
        if name == origin:
            continue
        relation = relations.get(name, {})
        if direction == FORWARD:
            fact, cleanup = derive_forward_factorization(
                rule, compose(h.composed_typing(origin, name), match), relation
            )
            plan.factorizations[name] = fact
            if cleanup:
                if name not in h.successors(origin):
                    raise RewritingError(
                        f"relation at {name} derives a clean-up merge, but clean-ups "
                        "are applied at the origin's direct successors; relate the "
                        "elements there instead"
                    )
                plan.cleanups[name] = cleanup
        else:
            fact, doomed = derive_backward_factorization(
                rule,
                match,
                h.graph(name),
                h.composed_typing(name, origin),
                relation,
            )
            plan.factorizations[name] = fact
            if doomed:
                if name not in h.predecessors(origin):
                    raise RewritingError(
                        f"relation at {name} derives a clean-up deletion, but "
                        "clean-ups are applied at the origin's direct predecessors; "
                        "relate the instances there instead"
                    )
                plan.cleanups[name] = doomed
    return plan


def apply_plan(h: Hierarchy, plan: PropagationPlan) -> list[RewriteReport]:
    """Run the propagation, then any derived clean-ups as separate rule
    applications at the origin's direct neighbours. Returns all reports;
    the last one holds the final hierarchy."""
    if plan.direction == FORWARD:
        main = propagate_forward(h, plan)
    else:
        main = propagate_backward(h, plan)
    reports = [main]
    current = main.hierarchy

    # one clean-up application may propagate into the objects a later one
    # touches; track where each post-propagation element went
    adjust: dict[str, dict[str, str]] = {}

    def resolve(node: str, element: str) -> str | None:
        mapping = adjust.get(node)
        if mapping is None:
            return element
        return mapping.get(element)

    def advance(rep: RewriteReport) -> None:
        for n, trace in rep.traces.items():
            if rep.direction == FORWARD:
                step = {x: trace[x] for x in trace.source.nodes}
                pre_nodes = trace.source.nodes
            else:
                step = {trace[y]: y for y in trace.source.nodes}
                pre_nodes = trace.target.nodes
            base = adjust.get(n) or {x: x for x in pre_nodes}
            adjust[n] = {k: step[v] for k, v in base.items() if v in step}

    for node in sorted(plan.cleanups):
        if plan.direction == FORWARD:
            groups = []
            for refs in plan.cleanups[node]:
                raw = {
                    main.traces[node][elem] if tag == "old" else main.instances[node][elem]
                    for tag, elem in refs
                }
                resolved = {r for r in (resolve(node, x) for x in raw) if r}
                if len(resolved) >= 2:
                    # coalesce with any group sharing an element (two groups
                    # may point at the same existing target)
                    for other in [g2 for g2 in groups if g2 & resolved]:
                        groups.remove(other)
                        resolved |= other
                    groups.append(resolved)
            if not groups:
                continue
            groups = sorted(sorted(grp) for grp in groups)
            pattern = Graph(n for grp in groups for n in grp)
            edits = []
            taken = set(pattern.nodes)
            for grp in groups:
                merged = fresh_id("_".join(grp), taken - set(grp))
                taken.add(merged)
                edits.append(MergeNodes(tuple(grp), merged))
            merge_rule = build_rule(pattern, edits)
            match2 = Homomorphism(
                pattern, current.graph(node), {n: n for n in pattern.nodes}
            )
            plan2 = build_canonical_plan(
                current, node, merge_rule.right_leg, match2, FORWARD
            )
            rep = propagate_forward(current, plan2)
        else:
            raw = {main.instances[node][q] for q in plan.cleanups[node]}
            doomed = sorted({r for r in (resolve(node, x) for x in raw) if r})
            if not doomed:
                continue
            g_minus = current.graph(node)
            pattern = induced_subgraph(g_minus, doomed)
            arrow = Homomorphism(Graph(), pattern, {})
            match2 = Homomorphism(pattern, g_minus, {n: n for n in pattern.nodes})
            plan2 = build_canonical_plan(current, node, arrow, match2, BACKWARD)
            rep = propagate_backward(current, plan2)
        advance(rep)
        current = rep.hierarchy
        reports.append(rep)
    return reports


def induced_subgraph(g: Graph, nodes) -> Graph:
    keep = set(nodes)
    return Graph(
        keep,
        {e for e in g.edges if e[0] in keep and e[1] in keep},
        {n: a for n, a in g.node_attrs.items() if n in keep},
        {e: a for e, a in g.edge_attrs.items() if e[0] in keep and e[1] in keep},
    )
