"""Attributed simple directed graphs and their homomorphisms.

Graphs are immutable values: nodes are opaque string ids, edges are ordered
pairs of node ids (self-loops allowed, parallel edges impossible), and every
node or edge may carry set-valued attributes (a mapping from string keys to
finite sets of scalar values). Homomorphisms are total node maps that
preserve edges and satisfy key-wise attribute containment.

All edit operations return new graphs; nothing here mutates in place, so
values can be shared freely across threads.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Union

from .exceptions import (
    CompositionError,
    GraphElementError,
    InvalidHomomorphism,
)

AttrValue = Union[str, int, bool]
Attrs = dict[str, frozenset]
EdgeId = tuple[str, str]


def value_sort_key(value: AttrValue) -> tuple:
    """Total order on attribute values: booleans, then integers, then strings."""
    if isinstance(value, bool):
        return (0, int(value), "")
    if isinstance(value, int):
        return (1, value, "")
    return (2, 0, value)


def _check_value(value) -> AttrValue:
    if not isinstance(value, (str, int, bool)):
        raise GraphElementError(
            f"attribute values must be str, int or bool, got {type(value).__name__}"
        )
    return value


def normalize_attrs(raw: Mapping | None) -> Attrs:
    """Normalize an attribute mapping: freeze value sets, drop empty ones."""
    if not raw:
        return {}
    out: Attrs = {}
    for key in raw:
        values = raw[key]
        if isinstance(values, (str, int, bool)):
            values = [values]
        vs = frozenset(_check_value(v) for v in values)
        if vs:
            out[str(key)] = vs
    return out


def attrs_union(a: Mapping, b: Mapping) -> Attrs:
    out = {k: frozenset(v) for k, v in a.items()}
    for k, v in b.items():
        out[k] = out.get(k, frozenset()) | frozenset(v)
    return {k: v for k, v in out.items() if v}


def attrs_intersection(a: Mapping, b: Mapping) -> Attrs:
    out = {}
    for k in a.keys() & b.keys():
        vs = frozenset(a[k]) & frozenset(b[k])
        if vs:
            out[k] = vs
    return out


def attrs_difference(a: Mapping, b: Mapping) -> Attrs:
    """Key-wise a minus b, dropping emptied keys."""
    out = {}
    for k, v in a.items():
        vs = frozenset(v) - frozenset(b.get(k, ()))
        if vs:
            out[k] = vs
    return out


def attrs_contained(sub: Mapping, sup: Mapping) -> bool:
    """Key-wise containment: every value of sub appears in sup under the same key."""
    return all(frozenset(v) <= frozenset(sup.get(k, frozenset())) for k, v in sub.items())


def fresh_id(base: str, taken) -> str:
    """Deterministic fresh id: base itself, else base with the lowest free counter."""
    if base not in taken:
        return base
    k = 2
    while f"{base}#{k}" in taken:
        k += 1
    return f"{base}#{k}"


class Graph:
    """A finite attributed simple directed graph."""

    __slots__ = ("nodes", "edges", "node_attrs", "edge_attrs")

    def __init__(
        self,
        nodes: Iterable[str] = (),
        edges: Iterable[EdgeId] = (),
        node_attrs: Mapping[str, Mapping] | None = None,
        edge_attrs: Mapping[EdgeId, Mapping] | None = None,
    ):
        object.__setattr__(self, "nodes", frozenset(str(n) for n in nodes))
        object.__setattr__(
            self, "edges", frozenset((str(u), str(v)) for u, v in edges)
        )
        na = {}
        for n, attrs in (node_attrs or {}).items():
            normalized = normalize_attrs(attrs)
            if normalized:
                na[str(n)] = normalized
        ea = {}
        for e, attrs in (edge_attrs or {}).items():
            normalized = normalize_attrs(attrs)
            if normalized:
                ea[(str(e[0]), str(e[1]))] = normalized
        object.__setattr__(self, "node_attrs", na)
        object.__setattr__(self, "edge_attrs", ea)

    def __setattr__(self, name, value):
        raise AttributeError("Graph instances are immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.node_attrs == other.node_attrs
            and self.edge_attrs == other.edge_attrs
        )

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __repr__(self):
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    # -- accessors ---------------------------------------------------------

    def attrs_of(self, element: str | EdgeId) -> Attrs:
        if isinstance(element, tuple):
            return self.edge_attrs.get(element, {})
        return self.node_attrs.get(element, {})

    def successors(self, n: str) -> list[str]:
        return sorted(v for (u, v) in self.edges if u == n)

    def predecessors(self, n: str) -> list[str]:
        return sorted(u for (u, v) in self.edges if v == n)

    def validate(self) -> list[str]:
        """Check the graph invariants; one message per violation."""
        violations = []
        for (u, v) in sorted(self.edges):
            if u not in self.nodes:
                violations.append(f"dangling edge ({u},{v}): missing source node {u}")
            if v not in self.nodes:
                violations.append(f"dangling edge ({u},{v}): missing target node {v}")
        for n in sorted(self.node_attrs):
            if n not in self.nodes:
                violations.append(f"attributes on unknown node {n}")
        for e in sorted(self.edge_attrs):
            if e not in self.edges:
                violations.append(f"attributes on unknown edge ({e[0]},{e[1]})")
        return violations

    # -- primitive edits ---------------------------------------------------

    def add_node(self, n: str, attrs: Mapping | None = None) -> "Graph":
        if n in self.nodes:
            raise GraphElementError(f"node id collision: {n}")
        return Graph(
            self.nodes | {n},
            self.edges,
            {**self.node_attrs, n: attrs or {}},
            self.edge_attrs,
        )

    def add_edge(self, u: str, v: str, attrs: Mapping | None = None) -> "Graph":
        if u not in self.nodes or v not in self.nodes:
            raise GraphElementError(f"add_edge({u},{v}): unknown endpoint")
        if (u, v) in self.edges:
            raise GraphElementError(f"edge ({u},{v}) already exists")
        return Graph(
            self.nodes,
            self.edges | {(u, v)},
            self.node_attrs,
            {**self.edge_attrs, (u, v): attrs or {}},
        )

    def delete_node(self, n: str) -> "Graph":
        """Remove a node together with all incident edges (side-effect deletion)."""
        if n not in self.nodes:
            raise GraphElementError(f"delete_node: unknown node {n}")
        keep = {e for e in self.edges if n not in e}
        return Graph(
            self.nodes - {n},
            keep,
            {k: v for k, v in self.node_attrs.items() if k != n},
            {e: v for e, v in self.edge_attrs.items() if e in keep},
        )

    def delete_edge(self, u: str, v: str) -> "Graph":
        if (u, v) not in self.edges:
            raise GraphElementError(f"delete_edge: unknown edge ({u},{v})")
        return Graph(
            self.nodes,
            self.edges - {(u, v)},
            self.node_attrs,
            {e: a for e, a in self.edge_attrs.items() if e != (u, v)},
        )

    def clone_node(self, n: str, copy1: str, copy2: str) -> "Graph":
        """Replace n by two copies carrying its attributes and incident edges.

        A self-loop on n yields loops on both copies plus both cross edges.
        """
        if n not in self.nodes:
            raise GraphElementError(f"clone_node: unknown node {n}")
        if copy1 == copy2:
            raise GraphElementError("clone_node: copies need distinct ids")
        for c in (copy1, copy2):
            if c in self.nodes - {n}:
                raise GraphElementError(f"clone_node: id collision {c}")
        copies = (copy1, copy2)

        def expand(x):
            return copies if x == n else (x,)

        edges = set()
        edge_attrs = {}
        for (u, v) in self.edges:
            for uu in expand(u):
                for vv in expand(v):
                    edges.add((uu, vv))
                    attrs = self.edge_attrs.get((u, v))
                    if attrs:
                        edge_attrs[(uu, vv)] = attrs
        node_attrs = {k: v for k, v in self.node_attrs.items() if k != n}
        if n in self.node_attrs:
            node_attrs[copy1] = self.node_attrs[n]
            node_attrs[copy2] = self.node_attrs[n]
        return Graph((self.nodes - {n}) | set(copies), edges, node_attrs, edge_attrs)

    def merge_nodes(self, group: Iterable[str], new_id: str) -> "Graph":
        """Fuse a set of nodes: attributes united, incident edges redirected."""
        group = set(group)
        unknown = group - self.nodes
        if unknown:
            raise GraphElementError(f"merge_nodes: unknown nodes {sorted(unknown)}")
        if not group:
            raise GraphElementError("merge_nodes: empty group")
        if new_id in self.nodes - group:
            raise GraphElementError(f"merge_nodes: id collision {new_id}")

        def rename(x):
            return new_id if x in group else x

        edges = set()
        edge_attrs: dict[EdgeId, Attrs] = {}
        for (u, v) in self.edges:
            e = (rename(u), rename(v))
            edges.add(e)
            attrs = self.edge_attrs.get((u, v))
            if attrs:
                edge_attrs[e] = attrs_union(edge_attrs.get(e, {}), attrs)
        merged_attrs: Attrs = {}
        for n in group:
            merged_attrs = attrs_union(merged_attrs, self.node_attrs.get(n, {}))
        node_attrs = {k: v for k, v in self.node_attrs.items() if k not in group}
        if merged_attrs:
            node_attrs[new_id] = merged_attrs
        return Graph((self.nodes - group) | {new_id}, edges, node_attrs, edge_attrs)

    def add_attrs(self, element: str | EdgeId, attrs: Mapping) -> "Graph":
        self._check_element(element)
        new = normalize_attrs(attrs)
        if isinstance(element, tuple):
            merged = attrs_union(self.edge_attrs.get(element, {}), new)
            return Graph(self.nodes, self.edges, self.node_attrs,
                         {**self.edge_attrs, element: merged})
        merged = attrs_union(self.node_attrs.get(element, {}), new)
        return Graph(self.nodes, self.edges, {**self.node_attrs, element: merged},
                     self.edge_attrs)

    def remove_attrs(self, element: str | EdgeId, attrs: Mapping) -> "Graph":
        self._check_element(element)
        drop = normalize_attrs(attrs)
        if isinstance(element, tuple):
            left = attrs_difference(self.edge_attrs.get(element, {}), drop)
            edge_attrs = {e: a for e, a in self.edge_attrs.items() if e != element}
            if left:
                edge_attrs[element] = left
            return Graph(self.nodes, self.edges, self.node_attrs, edge_attrs)
        left = attrs_difference(self.node_attrs.get(element, {}), drop)
        node_attrs = {n: a for n, a in self.node_attrs.items() if n != element}
        if left:
            node_attrs[element] = left
        return Graph(self.nodes, self.edges, node_attrs, self.edge_attrs)

    def _check_element(self, element):
        if isinstance(element, tuple):
            if element not in self.edges:
                raise GraphElementError(f"unknown edge {element}")
        elif element not in self.nodes:
            raise GraphElementError(f"unknown node {element}")


def validate_graph(g: Graph) -> list[str]:
    return g.validate()


class Homomorphism:
    """A structure-preserving node map between two graphs."""

    __slots__ = ("source", "target", "node_map")

    def __init__(self, source: Graph, target: Graph, node_map: Mapping[str, str]):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(
            self, "node_map", {str(k): str(v) for k, v in node_map.items()}
        )

    def __setattr__(self, name, value):
        raise AttributeError("Homomorphism instances are immutable")

    def __getitem__(self, node: str) -> str:
        return self.node_map[node]

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        return all(self.node_map[n] == other.node_map[n] for n in self.source.nodes)

    def __hash__(self):
        return hash(frozenset(self.node_map.items()))

    def __repr__(self):
        items = ", ".join(f"{k}→{v}" for k, v in sorted(self.node_map.items()))
        return f"Homomorphism({{{items}}})"

    def edge_image(self, edge: EdgeId) -> EdgeId:
        return (self.node_map[edge[0]], self.node_map[edge[1]])

    def validate(self) -> None:
        """Raise InvalidHomomorphism unless this is a valid homomorphism."""
        problem = homomorphism_violation(self)
        if problem is not None:
            raise InvalidHomomorphism(problem)


def homomorphism_violation(h: Homomorphism) -> str | None:
    """First reason h fails to be a homomorphism, or None if it is one."""
    for n in sorted(h.source.nodes):
        if n not in h.node_map:
            return f"map not total: node {n} has no image"
        if h.node_map[n] not in h.target.nodes:
            return f"node {n} maps to unknown node {h.node_map[n]}"
    for n in sorted(h.node_map):
        if n not in h.source.nodes:
            return f"map defined on unknown node {n}"
    for e in sorted(h.source.edges):
        if h.edge_image(e) not in h.target.edges:
            return f"edge ({e[0]},{e[1]}) has no image edge"
    for n in sorted(h.source.nodes):
        if not attrs_contained(h.source.attrs_of(n), h.target.attrs_of(h[n])):
            return f"attributes of node {n} not contained in its image"
    for e in sorted(h.source.edges):
        if not attrs_contained(h.source.attrs_of(e), h.target.attrs_of(h.edge_image(e))):
            return f"attributes of edge ({e[0]},{e[1]}) not contained in its image"
    return None


def is_homomorphism(h: Homomorphism) -> bool:
    return homomorphism_violation(h) is None


def is_mono(h: Homomorphism) -> bool:
    """Homomorphism with an injective node map."""
    if not is_homomorphism(h):
        return False
    images = set(h.node_map[n] for n in h.source.nodes)
    return len(images) == len(h.source.nodes)


def is_epi(h: Homomorphism) -> bool:
    """Surjective on nodes and edges, with every target attribute value covered."""
    if not is_homomorphism(h):
        return False
    if {h[n] for n in h.source.nodes} != h.target.nodes:
        return False
    if {h.edge_image(e) for e in h.source.edges} != h.target.edges:
        return False
    covered_nodes: dict[str, Attrs] = {}
    for n in h.source.nodes:
        covered_nodes[h[n]] = attrs_union(
            covered_nodes.get(h[n], {}), h.source.attrs_of(n)
        )
    for t, attrs in h.target.node_attrs.items():
        if not attrs_contained(attrs, covered_nodes.get(t, {})):
            return False
    covered_edges: dict[EdgeId, Attrs] = {}
    for e in h.source.edges:
        img = h.edge_image(e)
        covered_edges[img] = attrs_union(covered_edges.get(img, {}), h.source.attrs_of(e))
    for e, attrs in h.target.edge_attrs.items():
        if not attrs_contained(attrs, covered_edges.get(e, {})):
            return False
    return True


def identity(g: Graph) -> Homomorphism:
    return Homomorphism(g, g, {n: n for n in g.nodes})


def compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    """The composite g∘f (apply f first)."""
    if f.target != g.source:
        raise CompositionError("compose: f.target differs from g.source")
    return Homomorphism(f.source, g.target, {n: g.node_map[f.node_map[n]] for n in f.source.nodes})


def hom_equal(f: Homomorphism, g: Homomorphism) -> bool:
    """Extensional equality of node maps between equal endpoints."""
    if f.source != g.source or f.target != g.target:
        raise CompositionError("hom_equal: endpoints differ")
    return all(f.node_map[n] == g.node_map[n] for n in f.source.nodes)


# -- JSON format ------------------------------------------------------------


def attrs_to_json(attrs: Mapping) -> dict:
    return {
        k: sorted(attrs[k], key=value_sort_key) for k in sorted(attrs)
    }


def attrs_from_json(obj: Mapping) -> Attrs:
    out = {}
    for k in obj:
        raw = obj[k]
        if not isinstance(raw, list):
            raise GraphElementError(f"attribute {k}: expected a list of values")
        values = [_check_value(v) for v in raw]
        # sets fuse values that are equal under Python equality (1 == True),
        # which would break byte-exact round-trips; reject them up front
        if len(frozenset(values)) != len(values):
            raise GraphElementError(
                f"attribute {k}: duplicate (or boolean/integer-colliding) value"
            )
        if values:
            out[str(k)] = frozenset(values)
    return out


def graph_to_json(g: Graph) -> dict:
    nodes = []
    for n in sorted(g.nodes):
        entry: dict = {"id": n}
        if g.node_attrs.get(n):
            entry["attrs"] = attrs_to_json(g.node_attrs[n])
        nodes.append(entry)
    edges = []
    for (u, v) in sorted(g.edges):
        entry = {"from": u, "to": v}
        if g.edge_attrs.get((u, v)):
            entry["attrs"] = attrs_to_json(g.edge_attrs[(u, v)])
        edges.append(entry)
    return {"nodes": nodes, "edges": edges}


def graph_from_json(obj: Mapping) -> Graph:
    nodes = []
    node_attrs = {}
    for entry in obj.get("nodes", []):
        nodes.append(entry["id"])
        if "attrs" in entry:
            node_attrs[entry["id"]] = attrs_from_json(entry["attrs"])
    edges = []
    edge_attrs = {}
    for entry in obj.get("edges", []):
        e = (entry["from"], entry["to"])
        edges.append(e)
        if "attrs" in entry:
            edge_attrs[e] = attrs_from_json(entry["attrs"])
    g = Graph(nodes, edges, node_attrs, edge_attrs)
    problems = g.validate()
    if problems:
        raise GraphElementError("invalid graph: " + "; ".join(problems))
    return g


def dumps_canonical(obj) -> str:
    """Canonical JSON text: sorted keys handled by construction, UTF-8, newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
