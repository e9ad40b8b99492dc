"""Rewrite rules, match enumeration and the single-graph rewrite step.

A rule is a span of homomorphisms lhs ← interface → rhs. The left leg is
the restrictive part (clones and deletions: non-injective or non-surjective
on the interface side), the right leg the expansive part (merges and
additions). Rules can be written down directly or derived from a pattern
plus a list of primitive edits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .category import final_pbc, pushout
from .edits import (
    AddAttrs,
    AddEdge,
    AddNode,
    CloneNode,
    DeleteEdge,
    DeleteNode,
    Edit,
    MergeNodes,
    RemoveAttrs,
)
from .exceptions import GraphElementError, InvalidHomomorphism, RewritingError
from .graphs import (
    Graph,
    Homomorphism,
    attrs_contained,
    fresh_id,
    graph_from_json,
    graph_to_json,
    identity,
    is_mono,
    normalize_attrs,
)

RESTRICTIVE = "restrictive"
EXPANSIVE = "expansive"


@dataclass(frozen=True)
class Rule:
    """A span rule lhs ← interface → rhs."""

    lhs: Graph
    interface: Graph
    rhs: Graph
    left_leg: Homomorphism  # interface → lhs
    right_leg: Homomorphism  # interface → rhs

    def validate(self) -> None:
        if self.left_leg.source != self.interface or self.left_leg.target != self.lhs:
            raise InvalidHomomorphism("rule: left leg endpoints are wrong")
        if self.right_leg.source != self.interface or self.right_leg.target != self.rhs:
            raise InvalidHomomorphism("rule: right leg endpoints are wrong")
        self.left_leg.validate()
        self.right_leg.validate()

    @classmethod
    def identity_rule(cls, pattern: Graph) -> "Rule":
        ident = identity(pattern)
        return cls(pattern, pattern, pattern, ident, ident)


@dataclass(frozen=True)
class Match:
    """A mono instance of a rule: from the lhs (restrictive) or the
    interface (expansive)."""

    instance: Homomorphism
    kind: str  # RESTRICTIVE | EXPANSIVE


def rule_to_json(rule: Rule) -> dict:
    return {
        "lhs": graph_to_json(rule.lhs),
        "interface": graph_to_json(rule.interface),
        "rhs": graph_to_json(rule.rhs),
        "left": {k: rule.left_leg[k] for k in sorted(rule.interface.nodes)},
        "right": {k: rule.right_leg[k] for k in sorted(rule.interface.nodes)},
    }


def rule_from_json(obj: dict) -> Rule:
    lhs = graph_from_json(obj["lhs"])
    interface = graph_from_json(obj["interface"])
    rhs = graph_from_json(obj["rhs"])
    rule = Rule(
        lhs,
        interface,
        rhs,
        Homomorphism(interface, lhs, obj["left"]),
        Homomorphism(interface, rhs, obj["right"]),
    )
    rule.validate()
    return rule


class _RuleState:
    """Mutable scratch state while replaying edits into a rule."""

    def __init__(self, pattern: Graph):
        self.lhs = pattern
        self.p = pattern
        self.r = pattern
        self.p2l = {n: n for n in pattern.nodes}
        self.p2r = {n: n for n in pattern.nodes}

    def preimages(self, r_node: str) -> list[str]:
        return sorted(p for p, img in self.p2r.items() if img == r_node)

    def drop_interface_nodes(self, doomed) -> None:
        for n in sorted(doomed):
            self.p = self.p.delete_node(n)
            del self.p2l[n]
            del self.p2r[n]


def build_rule(pattern: Graph, edits: list[Edit]) -> Rule:
    """Derive a span rule whose effect on any match equals replaying the
    edits imperatively.

    Clones and deletions accumulate on the left leg, merges and additions
    on the right; attribute edits adjust the legs' containments.
    """
    st = _RuleState(pattern)
    for edit in edits:
        if isinstance(edit, AddNode):
            st.r = st.r.add_node(edit.node, edit.attrs)
        elif isinstance(edit, AddEdge):
            st.r = st.r.add_edge(edit.source, edit.target, edit.attrs)
        elif isinstance(edit, DeleteNode):
            st.r = st.r.delete_node(edit.node)
            st.drop_interface_nodes(st.preimages(edit.node))
        elif isinstance(edit, DeleteEdge):
            st.r = st.r.delete_edge(edit.source, edit.target)
            doomed = [
                e
                for e in st.p.edges
                if (st.p2r[e[0]], st.p2r[e[1]]) == (edit.source, edit.target)
            ]
            for e in sorted(doomed):
                st.p = st.p.delete_edge(*e)
        elif isinstance(edit, CloneNode):
            st.r = st.r.clone_node(edit.node, edit.copy1, edit.copy2)
            pre = st.preimages(edit.node)
            for p_node in pre:
                if len(pre) == 1:
                    names = (edit.copy1, edit.copy2)
                else:
                    names = (f"{p_node}∥{edit.copy1}", f"{p_node}∥{edit.copy2}")
                c1 = fresh_id(names[0], st.p.nodes - {p_node})
                c2 = fresh_id(names[1], (st.p.nodes - {p_node}) | {c1})
                st.p = st.p.clone_node(p_node, c1, c2)
                l_img = st.p2l.pop(p_node)
                st.p2r.pop(p_node)
                st.p2l[c1] = st.p2l[c2] = l_img
                st.p2r[c1] = edit.copy1
                st.p2r[c2] = edit.copy2
        elif isinstance(edit, MergeNodes):
            st.r = st.r.merge_nodes(edit.group, edit.merged)
            group = set(edit.group)
            for p_node, img in st.p2r.items():
                if img in group:
                    st.p2r[p_node] = edit.merged
        elif isinstance(edit, AddAttrs):
            st.r = st.r.add_attrs(edit.element, edit.attrs)
        elif isinstance(edit, RemoveAttrs):
            st.r = st.r.remove_attrs(edit.element, edit.attrs)
            drop = normalize_attrs(edit.attrs)
            if isinstance(edit.element, tuple):
                for e in sorted(st.p.edges):
                    if (st.p2r[e[0]], st.p2r[e[1]]) == edit.element:
                        st.p = st.p.remove_attrs(e, drop)
            else:
                for p_node in st.preimages(edit.element):
                    st.p = st.p.remove_attrs(p_node, drop)
        else:
            raise GraphElementError(f"unknown edit {edit!r}")
    rule = Rule(
        st.lhs,
        st.p,
        st.r,
        Homomorphism(st.p, st.lhs, st.p2l),
        Homomorphism(st.p, st.r, st.p2r),
    )
    rule.validate()
    return rule


def find_matches(
    rule: Rule,
    g: Graph,
    kind: str = RESTRICTIVE,
    anchor: dict[str, str] | None = None,
) -> list[Match]:
    """All monos of the rule's pattern into g, in deterministic order.

    The pattern is the lhs for restrictive matches and the interface for
    expansive ones. `anchor` pre-assigns pattern nodes to graph nodes.
    """
    if kind not in (RESTRICTIVE, EXPANSIVE):
        raise RewritingError(f"unknown match kind {kind!r}")
    pattern = rule.lhs if kind == RESTRICTIVE else rule.interface
    anchor = anchor or {}
    for k, v in anchor.items():
        if k not in pattern.nodes:
            raise GraphElementError(f"anchor: unknown pattern node {k}")
        if v not in g.nodes:
            raise GraphElementError(f"anchor: unknown graph node {v}")

    order = sorted(pattern.nodes)
    candidates: dict[str, list[str]] = {}
    for n in order:
        opts = []
        n_out = len([e for e in pattern.edges if e[0] == n])
        n_in = len([e for e in pattern.edges if e[1] == n])
        for c in sorted(g.nodes):
            if n in anchor and anchor[n] != c:
                continue
            if not attrs_contained(pattern.attrs_of(n), g.attrs_of(c)):
                continue
            if (n, n) in pattern.edges and (c, c) not in g.edges:
                continue
            if n_out > len([e for e in g.edges if e[0] == c]):
                continue
            if n_in > len([e for e in g.edges if e[1] == c]):
                continue
            opts.append(c)
        candidates[n] = opts

    matches: list[Match] = []
    assignment: dict[str, str] = {}
    used: set[str] = set()

    def compatible(n: str, c: str) -> bool:
        for p_node, img in assignment.items():
            for (u, v, x, y) in ((n, p_node, c, img), (p_node, n, img, c)):
                if (u, v) in pattern.edges:
                    if (x, y) not in g.edges:
                        return False
                    if not attrs_contained(pattern.attrs_of((u, v)), g.attrs_of((x, y))):
                        return False
        if (n, n) in pattern.edges and not attrs_contained(
            pattern.attrs_of((n, n)), g.attrs_of((c, c))
        ):
            return False
        return True

    def search(i: int):
        if i == len(order):
            matches.append(Match(Homomorphism(pattern, g, dict(assignment)), kind))
            return
        n = order[i]
        for c in candidates[n]:
            if c in used or not compatible(n, c):
                continue
            assignment[n] = c
            used.add(c)
            search(i + 1)
            del assignment[n]
            used.discard(c)

    search(0)
    return matches


@dataclass(frozen=True)
class SqpoRewriteResult:
    """Full trace of one sesqui-pushout rewrite step."""

    mid: Graph  # complement graph
    g_left: Homomorphism  # mid → input graph
    m_mid: Homomorphism  # interface ↣ mid
    output: Graph
    g_right: Homomorphism  # mid → output
    m_out: Homomorphism  # rhs ↣ output


def sqpo_rewrite(rule: Rule, match: Match) -> SqpoRewriteResult:
    """Rewrite at a restrictive match: complement out the left leg, then
    push out the right leg."""
    if match.kind != RESTRICTIVE:
        raise RewritingError("sqpo_rewrite needs a restrictive match")
    if match.instance.source != rule.lhs:
        raise RewritingError("match is not an instance of the rule's lhs")
    if not is_mono(match.instance):
        raise RewritingError("match must be a mono")
    pbc = final_pbc(rule.left_leg, match.instance)
    po = pushout(pbc.embed, rule.right_leg)
    return SqpoRewriteResult(
        mid=pbc.apex,
        g_left=pbc.project,
        m_mid=pbc.embed,
        output=po.apex,
        g_right=po.from_b,
        m_out=po.from_c,
    )
