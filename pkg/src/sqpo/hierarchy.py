"""Hierarchies: DAGs of graphs and typing homomorphisms.

A hierarchy assigns a graph to each name and a typing homomorphism to each
shape edge, subject to two structural invariants that are enforced on
every mutation: the shape is acyclic, and all parallel path composites
between any two names are equal (the commutativity condition). An optional
skeleton constrains the shape: when present, every shape edge must map to
a skeleton edge under the declared assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import HierarchyError
from .graphs import (
    Graph,
    Homomorphism,
    compose,
    graph_from_json,
    graph_to_json,
    hom_equal,
    homomorphism_violation,
    identity,
)


@dataclass(frozen=True)
class Skeleton:
    """A DAG of node kinds constraining a hierarchy's shape."""

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    @classmethod
    def create(cls, nodes, edges) -> "Skeleton":
        sk = cls(frozenset(nodes), frozenset(tuple(e) for e in edges))
        for (u, v) in sk.edges:
            if u not in sk.nodes or v not in sk.nodes:
                raise HierarchyError(f"skeleton edge ({u},{v}) has unknown endpoint")
        if _has_cycle(sk.nodes, sk.edges):
            raise HierarchyError("skeleton must be acyclic")
        return sk


def _has_cycle(nodes, edges) -> bool:
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for (u, v) in edges:
        if u == v:
            return True
        succ[u].append(v)
    state: dict[str, int] = {}

    def visit(n) -> bool:
        state[n] = 1
        for m in succ[n]:
            s = state.get(m, 0)
            if s == 1 or (s == 0 and visit(m)):
                return True
        state[n] = 2
        return False

    return any(state.get(n, 0) == 0 and visit(n) for n in nodes)


@dataclass(frozen=True)
class CommutativityViolation:
    source: str
    target: str
    path_a: tuple[str, ...]
    path_b: tuple[str, ...]
    witness: str  # node of ⟦source⟧ on which the two composites differ

    def __str__(self):
        return (
            f"PAIR {self.source} {self.target}: "
            f"{'->'.join(self.path_a)} != {'->'.join(self.path_b)} "
            f"at node {self.witness}"
        )


class Hierarchy:
    """Immutable hierarchy value; mutators return extended copies."""

    __slots__ = ("_objects", "_arrows", "skeleton", "skeleton_map")

    def __init__(
        self,
        objects: dict[str, Graph] | None = None,
        arrows: dict[tuple[str, str], Homomorphism] | None = None,
        skeleton: Skeleton | None = None,
        skeleton_map: dict[str, str] | None = None,
    ):
        object.__setattr__(self, "_objects", dict(objects or {}))
        object.__setattr__(self, "_arrows", dict(arrows or {}))
        object.__setattr__(self, "skeleton", skeleton)
        object.__setattr__(self, "skeleton_map", dict(skeleton_map or {}))

    def __setattr__(self, name, value):
        raise AttributeError("Hierarchy instances are immutable")

    def __eq__(self, other):
        if not isinstance(other, Hierarchy):
            return NotImplemented
        return (
            self._objects == other._objects
            and set(self._arrows) == set(other._arrows)
            and all(hom_equal(self._arrows[e], other._arrows[e]) for e in self._arrows)
        )

    def __repr__(self):
        return f"Hierarchy({sorted(self._objects)}, {sorted(self._arrows)})"

    # -- access --------------------------------------------------------------

    def nodes(self) -> list[str]:
        return sorted(self._objects)

    def edges(self) -> list[tuple[str, str]]:
        return sorted(self._arrows)

    def graph(self, name: str) -> Graph:
        try:
            return self._objects[name]
        except KeyError:
            raise HierarchyError(f"unknown hierarchy node {name}") from None

    def typing(self, a: str, b: str) -> Homomorphism:
        try:
            return self._arrows[(a, b)]
        except KeyError:
            raise HierarchyError(f"no typing {a} -> {b}") from None

    def successors(self, n: str) -> list[str]:
        return sorted(b for (a, b) in self._arrows if a == n)

    def predecessors(self, n: str) -> list[str]:
        return sorted(a for (a, b) in self._arrows if b == n)

    # -- construction ----------------------------------------------------------

    def add_object(self, name: str, g: Graph, kind: str | None = None) -> "Hierarchy":
        if name in self._objects:
            raise HierarchyError(f"node {name} already exists")
        problems = g.validate()
        if problems:
            raise HierarchyError(f"invalid graph for {name}: " + "; ".join(problems))
        skeleton_map = dict(self.skeleton_map)
        if self.skeleton is not None:
            if kind is None:
                raise HierarchyError(f"node {name}: skeleton kind required")
            if kind not in self.skeleton.nodes:
                raise HierarchyError(f"node {name}: unknown skeleton kind {kind}")
            skeleton_map[name] = kind
        return Hierarchy(
            {**self._objects, name: g}, self._arrows, self.skeleton, skeleton_map
        )

    def add_typing(self, a: str, b: str, hom: Homomorphism) -> "Hierarchy":
        if a not in self._objects or b not in self._objects:
            raise HierarchyError(f"add_typing({a},{b}): unknown node")
        if (a, b) in self._arrows:
            raise HierarchyError(f"typing {a} -> {b} already exists")
        if hom.source != self._objects[a] or hom.target != self._objects[b]:
            raise HierarchyError(f"typing {a} -> {b}: endpoint graphs do not match")
        problem = homomorphism_violation(hom)
        if problem is not None:
            raise HierarchyError(f"typing {a} -> {b} invalid: {problem}")
        edges = set(self._arrows) | {(a, b)}
        if _has_cycle(set(self._objects), edges):
            raise HierarchyError(f"typing {a} -> {b} would introduce a cycle")
        if self.skeleton is not None:
            ka, kb = self.skeleton_map[a], self.skeleton_map[b]
            if (ka, kb) not in self.skeleton.edges:
                raise HierarchyError(
                    f"typing {a} -> {b} has no skeleton edge {ka} -> {kb}"
                )
        candidate = Hierarchy(
            self._objects, {**self._arrows, (a, b): hom}, self.skeleton, self.skeleton_map
        )
        violations = candidate.validate_commutativity()
        if violations:
            raise HierarchyError(
                "typing breaks commutativity: " + "; ".join(str(v) for v in violations)
            )
        return candidate

    def replace(
        self,
        objects: dict[str, Graph] | None = None,
        arrows: dict[tuple[str, str], Homomorphism] | None = None,
    ) -> "Hierarchy":
        """Bulk functional update used by propagation; does not re-validate."""
        new_objects = dict(self._objects)
        new_objects.update(objects or {})
        new_arrows = dict(self._arrows)
        new_arrows.update(arrows or {})
        return Hierarchy(new_objects, new_arrows, self.skeleton, self.skeleton_map)

    # -- validation ------------------------------------------------------------

    def validate_commutativity(self) -> list[CommutativityViolation]:
        """All pairs of parallel path composites must be equal.

        For each source, one composite per reachable node is fixed along a
        canonical path; every other edge extension is compared against it,
        which covers all path pairs by induction.
        """
        violations = []
        for a in self.nodes():
            canon: dict[str, Homomorphism] = {a: identity(self._objects[a])}
            paths: dict[str, tuple[str, ...]] = {a: (a,)}
            frontier = [a]
            topo_seen = []
            while frontier:
                u = frontier.pop(0)
                topo_seen.append(u)
                for v in self.successors(u):
                    if v not in canon:
                        canon[v] = compose(self._arrows[(u, v)], canon[u])
                        paths[v] = paths[u] + (v,)
                        frontier.append(v)
            for u in topo_seen:
                for v in self.successors(u):
                    candidate = compose(self._arrows[(u, v)], canon[u])
                    if not hom_equal(candidate, canon[v]):
                        witness = next(
                            n
                            for n in sorted(self._objects[a].nodes)
                            if candidate[n] != canon[v][n]
                        )
                        violations.append(
                            CommutativityViolation(
                                a, v, paths[v], paths[u] + (v,), witness
                            )
                        )
        return violations

    def validate(self) -> list[str]:
        """Full structural validation, as messages (commutativity included)."""
        problems = []
        for name in self.nodes():
            for p in self._objects[name].validate():
                problems.append(f"graph {name}: {p}")
        for (a, b) in self.edges():
            hom = self._arrows[(a, b)]
            if hom.source != self._objects[a] or hom.target != self._objects[b]:
                problems.append(f"typing {a} -> {b}: endpoint graphs do not match")
                continue
            problem = homomorphism_violation(hom)
            if problem is not None:
                problems.append(f"typing {a} -> {b}: {problem}")
        if _has_cycle(set(self._objects), set(self._arrows)):
            problems.append("shape contains a cycle")
        if self.skeleton is not None:
            for name in self.nodes():
                if name not in self.skeleton_map:
                    problems.append(f"node {name} lacks a skeleton assignment")
            for (a, b) in self.edges():
                ka, kb = self.skeleton_map.get(a), self.skeleton_map.get(b)
                if ka is not None and kb is not None and (ka, kb) not in self.skeleton.edges:
                    problems.append(f"typing {a} -> {b} has no skeleton edge {ka} -> {kb}")
        if not problems:
            problems.extend(str(v) for v in self.validate_commutativity())
        return problems

    # -- queries ---------------------------------------------------------------

    def descendants(self, s: str) -> set[str]:
        self.graph(s)
        out = {s}
        frontier = [s]
        while frontier:
            u = frontier.pop()
            for v in self.successors(u):
                if v not in out:
                    out.add(v)
                    frontier.append(v)
        return out

    def ancestors(self, s: str) -> set[str]:
        self.graph(s)
        out = {s}
        frontier = [s]
        while frontier:
            u = frontier.pop()
            for v in self.predecessors(u):
                if v not in out:
                    out.add(v)
                    frontier.append(v)
        return out

    def _induced(self, keep: set[str]) -> "Hierarchy":
        return Hierarchy(
            {n: g for n, g in self._objects.items() if n in keep},
            {e: h for e, h in self._arrows.items() if e[0] in keep and e[1] in keep},
            self.skeleton,
            {n: k for n, k in self.skeleton_map.items() if n in keep},
        )

    def forward_subgraph(self, s: str) -> "Hierarchy":
        """Largest sub-hierarchy in which s is the unique source: the
        induced sub-hierarchy on everything reachable from s."""
        return self._induced(self.descendants(s))

    def backward_subgraph(self, s: str) -> "Hierarchy":
        """Largest sub-hierarchy in which s is the unique sink: the induced
        sub-hierarchy on everything reaching s."""
        return self._induced(self.ancestors(s))

    def composed_typing(self, a: str, b: str) -> Homomorphism:
        """The (unique, by commutativity) composite of any path a → b."""
        if a == b:
            return identity(self.graph(a))
        self.graph(b)
        canon: dict[str, Homomorphism] = {a: identity(self.graph(a))}
        frontier = [a]
        while frontier:
            u = frontier.pop(0)
            if u == b:
                return canon[b]
            for v in self.successors(u):
                if v not in canon:
                    canon[v] = compose(self._arrows[(u, v)], canon[u])
                    frontier.append(v)
        if b in canon:
            return canon[b]
        raise HierarchyError(f"no path {a} -> {b}")


# -- JSON format -----------------------------------------------------------------


def hierarchy_to_json(h: Hierarchy) -> dict:
    out: dict = {}
    if h.skeleton is not None:
        out["skeleton"] = {
            "nodes": sorted(h.skeleton.nodes),
            "edges": [list(e) for e in sorted(h.skeleton.edges)],
            "assignment": {k: h.skeleton_map[k] for k in sorted(h.skeleton_map)},
        }
    out["graphs"] = {name: graph_to_json(h.graph(name)) for name in h.nodes()}
    out["typings"] = [
        {
            "from": a,
            "to": b,
            "map": {k: h.typing(a, b)[k] for k in sorted(h.graph(a).nodes)},
        }
        for (a, b) in h.edges()
    ]
    return out


def hierarchy_from_json(obj: dict, validate: bool = True) -> Hierarchy:
    """Parse a hierarchy. With validate=True (the default) any structural
    or commutativity problem raises; validate=False defers to the caller,
    so invalid files can still be loaded for reporting."""
    skeleton = None
    assignment: dict[str, str] = {}
    if "skeleton" in obj and obj["skeleton"] is not None:
        sk = obj["skeleton"]
        skeleton = Skeleton.create(sk.get("nodes", []), [tuple(e) for e in sk.get("edges", [])])
        assignment = dict(sk.get("assignment", {}))
    objects = {
        name: graph_from_json(obj["graphs"][name]) for name in obj.get("graphs", {})
    }
    arrows = {}
    for typing in obj.get("typings", []):
        a, b = typing["from"], typing["to"]
        if a not in objects or b not in objects:
            raise HierarchyError(f"typing {a} -> {b} references an unknown graph")
        arrows[(a, b)] = Homomorphism(objects[a], objects[b], typing["map"])
    h = Hierarchy(objects, arrows, skeleton, assignment)
    if validate:
        problems = h.validate()
        if problems:
            raise HierarchyError("invalid hierarchy: " + "; ".join(problems))
    return h
