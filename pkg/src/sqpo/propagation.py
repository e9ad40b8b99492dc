"""Propagation of rewrites through a hierarchy.

Expansive rewrites (adds, merges) propagate forward along typing arrows;
restrictive rewrites (clones, deletions) propagate backward against them.
Each affected object gets a factorization splitting the rule into a strict
part (already typed by / retyped into the existing object) and a canonical
part (whose effects propagate). Factorizations along a typing arrow must be
composable — connected by an arrow between their middle objects making the
rule triangles and the typing square commute — and then the whole
sub-hierarchy can be updated wave by wave while staying valid throughout.

Plans are validated up front (coverage, factorization squares,
composability) so that no wave can fail midway; a rejected plan leaves the
hierarchy untouched.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .category import final_pbc, image_factorization, pullback, pushout
from .exceptions import (
    FactorizationError,
    NotEpiError,
    NotMonoError,
    RewritingError,
)
from .graphs import (
    Graph,
    Homomorphism,
    attrs_contained,
    compose,
    hom_equal,
    identity,
    is_epi,
    is_mono,
)
from .hierarchy import Hierarchy

FORWARD = "forward"
BACKWARD = "backward"


# -- factorizations ----------------------------------------------------------


@dataclass(frozen=True)
class ForwardFactorization:
    """Split of an expansive rule L→L⁺ relative to one typing target.

    pre_arrow (L→mid) is the strict part, post_arrow (mid→L⁺) the canonical
    part, and typing (mid→target) types the strict part in the target.
    """

    mid: Graph
    pre_arrow: Homomorphism
    post_arrow: Homomorphism
    typing: Homomorphism


@dataclass(frozen=True)
class BackwardFactorization:
    """Split of a restrictive rule L⁻→L relative to one typed source.

    post_arrow (mid→L) is the strict part, pre_arrow (L⁻→mid) the canonical
    part, and retyping (restriction pattern→mid) reassigns the instances
    touched by the strict part.
    """

    mid: Graph
    post_arrow: Homomorphism
    pre_arrow: Homomorphism
    retyping: Homomorphism


@dataclass
class PropagationPlan:
    origin: str
    rule: Homomorphism  # forward: L→L⁺; backward: L⁻→L
    match: Homomorphism  # mono from L into the origin object
    direction: str
    factorizations: dict[str, ForwardFactorization | BackwardFactorization] = field(
        default_factory=dict
    )
    connectors: dict[tuple[str, str], Homomorphism] = field(default_factory=dict)
    # clean-up derived from relations; applied as separate rule applications
    cleanups: dict[str, list] = field(default_factory=dict)


@dataclass
class RewriteReport:
    """Everything a caller needs to re-anchor references after propagation."""

    hierarchy: Hierarchy
    origin: str
    direction: str
    waves: list[list[str]]
    traces: dict[str, Homomorphism]  # forward: old→new; backward: new→old
    instances: dict[str, Homomorphism]
    updated_typings: dict[tuple[str, str], Homomorphism]
    steps: list[tuple[str, list[str]]]  # per-object validation results


def _merge_assignment(context: str, *parts: dict) -> dict:
    out: dict = {}
    for part in parts:
        for k, v in part.items():
            if k in out and out[k] != v:
                raise FactorizationError(
                    f"{context}: element {k} would need to map to both {out[k]} and {v}"
                )
            out[k] = v
    return out


# -- single-edge forward phases ------------------------------------------------


@dataclass(frozen=True)
class ForwardStrictResult:
    graph: Graph  # G′
    trace: Homomorphism  # G → G′
    instance: Homomorphism  # mid ↣ G′
    typing: Homomorphism  # G′ → T


def forward_strict(
    g: Graph,
    t: Graph,
    h: Homomorphism,
    r_prime: Homomorphism,
    m: Homomorphism,
    x: Homomorphism,
) -> ForwardStrictResult:
    """Strict phase of a forward rewrite: apply the part of the rule that is
    already typed by the target, leaving the target untouched."""
    if not is_mono(m):
        raise NotMonoError("forward_strict: instance must be a mono")
    if not hom_equal(compose(x, r_prime), compose(h, m)):
        raise FactorizationError(
            "forward_strict: typing of the strict part does not extend the instance typing"
        )
    if not is_mono(r_prime):
        warnings.warn(
            "strict-phase arrow is not a mono: the strict phase merges elements",
            RuntimeWarning,
            stacklevel=2,
        )
    po = pushout(m, r_prime)
    mapping = _merge_assignment(
        "forward_strict retyping",
        {po.from_b[n]: h[n] for n in g.nodes},
        {po.from_c[l]: x[l] for l in r_prime.target.nodes},
    )
    typing = Homomorphism(po.apex, t, mapping)
    typing.validate()
    return ForwardStrictResult(po.apex, po.from_b, po.from_c, typing)


@dataclass(frozen=True)
class ForwardCanonicalResult:
    graph: Graph  # G⁺
    typing_graph: Graph  # T⁺
    typing: Homomorphism  # h⁺: G⁺ → T⁺
    trace: Homomorphism  # g⁺: G′ → G⁺
    typing_trace: Homomorphism  # t⁺: T → T⁺
    instance: Homomorphism  # m⁺: L⁺ ↣ G⁺


def forward_canonical(
    g_prime: Graph,
    t: Graph,
    h_prime: Homomorphism,
    r_plus: Homomorphism,
    m_prime: Homomorphism,
) -> ForwardCanonicalResult:
    """Canonical phase: finish the rewrite and propagate its effects to the
    typing object."""
    po1 = pushout(m_prime, r_plus)
    po2 = pushout(h_prime, po1.from_b)
    return ForwardCanonicalResult(
        graph=po1.apex,
        typing_graph=po2.apex,
        typing=po2.from_c,
        trace=po1.from_b,
        typing_trace=po2.from_b,
        instance=po1.from_c,
    )


@dataclass(frozen=True)
class ProjectedRule:
    pattern: Graph  # L_T
    to_pattern: Homomorphism  # mid → L_T
    projected: Homomorphism  # L_T → L_T⁺
    instance: Homomorphism  # L_T ↣ T
    rhs: Graph  # L_T⁺
    rhs_embed: Homomorphism  # L⁺ → L_T⁺


def project_rule(r_plus: Homomorphism, typing: Homomorphism) -> ProjectedRule:
    """Project the canonical part of a rule onto the typing object: image
    factorization of the typing followed by a pushout with the rule."""
    if r_plus.source != typing.source:
        raise FactorizationError("project_rule: arrows do not share a source")
    imf = image_factorization(typing)
    po = pushout(imf.restrict, r_plus)
    return ProjectedRule(
        pattern=imf.image,
        to_pattern=imf.restrict,
        projected=po.from_b,
        instance=imf.include,
        rhs=po.apex,
        rhs_embed=po.from_c,
    )


@dataclass(frozen=True)
class ForwardCleanupResult:
    graph: Graph  # T⊕
    trace: Homomorphism  # t⊕: T⁺ ↠ T⊕
    typing: Homomorphism | None  # t⊕ ∘ h⁺


def forward_cleanup(
    t_plus: Graph,
    m_hat_plus: Homomorphism,
    r_oplus: Homomorphism,
    h_plus: Homomorphism | None = None,
) -> ForwardCleanupResult:
    """Merge freshly added elements of the updated typing object."""
    if not is_epi(r_oplus):
        raise NotEpiError("forward_cleanup: clean-up rule must be an epi")
    if m_hat_plus.target != t_plus:
        raise FactorizationError("forward_cleanup: instance does not land in the target")
    po = pushout(m_hat_plus, r_oplus)
    typing = compose(po.from_b, h_plus) if h_plus is not None else None
    return ForwardCleanupResult(po.apex, po.from_b, typing)


# -- single-edge backward phases -------------------------------------------------


@dataclass(frozen=True)
class RestrictionResult:
    pattern: Graph  # L_G
    instance: Homomorphism  # m̂: L_G ↣ G
    to_lhs: Homomorphism  # ĥ: L_G → L


def restriction_pullback(
    g: Graph, t: Graph, h: Homomorphism, m: Homomorphism
) -> RestrictionResult:
    """The sub-object of g whose typing can be modified by a rule matched
    at m: the pullback of the typing against the match."""
    if not is_mono(m):
        raise NotMonoError("restriction_pullback: match must be a mono")
    pb = pullback(h, m)
    if not is_mono(pb.to_a):
        raise RewritingError("restriction_pullback: projection lost injectivity")
    return RestrictionResult(pb.apex, pb.to_a, pb.to_b)


@dataclass(frozen=True)
class BackwardStrictResult:
    graph: Graph  # T′
    trace: Homomorphism  # t′: T′ → T
    instance: Homomorphism  # m′: mid ↣ T′
    typing: Homomorphism  # h′: G → T′
    restriction: RestrictionResult


def backward_strict(
    t: Graph,
    m: Homomorphism,
    r_prime: Homomorphism,
    retyping: Homomorphism,
    g: Graph,
    h: Homomorphism,
) -> BackwardStrictResult:
    """Strict phase of a backward rewrite: clone/delete in the typing object
    and retype the instances, leaving the typed object untouched."""
    rp = restriction_pullback(g, t, h, m)
    if retyping.source != rp.pattern:
        raise FactorizationError(
            "backward_strict: retyping must be defined on the canonical restriction"
        )
    strict_image = {r_prime[n] for n in r_prime.source.nodes}
    for p in sorted(rp.pattern.nodes):
        if rp.to_lhs[p] not in strict_image:
            raise RewritingError(
                f"element {rp.to_lhs[p]} deleted by the strict phase still has "
                f"an instance ({rp.instance[p]})"
            )
    if not hom_equal(compose(r_prime, retyping), rp.to_lhs):
        raise FactorizationError(
            "backward_strict: retyping does not factor the restriction typing"
        )
    pbc = final_pbc(r_prime, m)
    bot: dict[str, str] = {}
    m_image = {m[l] for l in m.source.nodes}
    for d in pbc.apex.nodes:
        tn = pbc.project[d]
        if tn not in m_image:
            bot[tn] = d
    m_hat_inv = {rp.instance[p]: p for p in rp.pattern.nodes}
    mapping = {}
    for n in g.nodes:
        if n in m_hat_inv:
            mapping[n] = pbc.embed[retyping[m_hat_inv[n]]]
        else:
            mapping[n] = bot[h[n]]
    typing = Homomorphism(g, pbc.apex, mapping)
    typing.validate()
    if not hom_equal(compose(pbc.project, typing), h):
        raise FactorizationError("backward_strict: retyping does not restore the typing")
    return BackwardStrictResult(pbc.apex, pbc.project, pbc.embed, typing, rp)


@dataclass(frozen=True)
class BackwardCanonicalResult:
    typing_graph: Graph  # T⁻
    typing_trace: Homomorphism  # t⁻: T⁻ → T′
    instance: Homomorphism  # m⁻: L⁻ ↣ T⁻
    graph: Graph  # G⁻
    trace: Homomorphism  # g⁻: G⁻ → G
    typing: Homomorphism  # h⁻: G⁻ → T⁻


def backward_canonical(
    t_prime: Graph,
    h_prime: Homomorphism,
    r_minus: Homomorphism,
    m_prime: Homomorphism,
) -> BackwardCanonicalResult:
    """Canonical phase: finish the rewrite of the typing object and pull the
    typed object back along it."""
    pbc = final_pbc(r_minus, m_prime)
    pb = pullback(h_prime, pbc.project)
    return BackwardCanonicalResult(
        typing_graph=pbc.apex,
        typing_trace=pbc.project,
        instance=pbc.embed,
        graph=pb.apex,
        trace=pb.to_a,
        typing=pb.to_b,
    )


@dataclass(frozen=True)
class LiftResult:
    pattern: Graph  # L_G⁻
    lift: Homomorphism  # r̂⁻: L_G⁻ → L_G
    to_rhs: Homomorphism  # ĥ⁻: L_G⁻ → L⁻
    graph: Graph  # G⁻
    trace: Homomorphism  # g⁻: G⁻ → G
    instance: Homomorphism  # m̂⁻: L_G⁻ ↣ G⁻
    typing: Homomorphism | None  # h⁻: G⁻ → T⁻ when the T⁻ square is supplied


def lift_rule(
    retyping: Homomorphism,
    r_minus: Homomorphism,
    m_hat: Homomorphism,
    t_minus: BackwardCanonicalResult | None = None,
    h_prime: Homomorphism | None = None,
) -> LiftResult:
    """Lift the canonical part of a restrictive rule to the typed object:
    pullback against the retyping, then complement out the lifted rule."""
    if retyping.target != r_minus.target:
        raise FactorizationError("lift_rule: retyping and rule do not share a target")
    pb = pullback(retyping, r_minus)
    pbc = final_pbc(pb.to_a, m_hat)
    typing = None
    if t_minus is not None and h_prime is not None:
        emb_inv = {pbc.embed[p]: p for p in pb.apex.nodes}
        minus_clones = {t_minus.instance[k] for k in t_minus.instance.source.nodes}
        bot = {
            t_minus.typing_trace[y]: y
            for y in t_minus.typing_graph.nodes
            if y not in minus_clones
        }
        mapping = {}
        for x in pbc.apex.nodes:
            if x in emb_inv:
                mapping[x] = t_minus.instance[pb.to_b[emb_inv[x]]]
            else:
                mapping[x] = bot[h_prime[pbc.project[x]]]
        typing = Homomorphism(pbc.apex, t_minus.typing_graph, mapping)
        typing.validate()
        if not hom_equal(
            compose(t_minus.typing_trace, typing), compose(h_prime, pbc.project)
        ):
            raise FactorizationError("lift_rule: reconstructed typing does not commute")
        if not hom_equal(
            compose(typing, pbc.embed), compose(t_minus.instance, pb.to_b)
        ):
            raise FactorizationError("lift_rule: reconstructed typing misses the instance")
    return LiftResult(
        pattern=pb.apex,
        lift=pb.to_a,
        to_rhs=pb.to_b,
        graph=pbc.apex,
        trace=pbc.project,
        instance=pbc.embed,
        typing=typing,
    )


@dataclass(frozen=True)
class BackwardCleanupResult:
    graph: Graph  # G⊖
    trace: Homomorphism  # g⊖: G⊖ ↣ G⁻
    typing: Homomorphism | None


def backward_cleanup(
    g_minus: Graph,
    m_hat_minus: Homomorphism,
    r_ominus: Homomorphism,
    h_minus: Homomorphism | None = None,
) -> BackwardCleanupResult:
    """Delete unwanted clones left over by a canonical backward phase."""
    if not is_mono(r_ominus):
        raise NotMonoError("backward_cleanup: clean-up rule must be a mono")
    if m_hat_minus.target != g_minus:
        raise FactorizationError("backward_cleanup: instance does not land in the graph")
    pbc = final_pbc(r_ominus, m_hat_minus)
    typing = compose(h_minus, pbc.project) if h_minus is not None else None
    return BackwardCleanupResult(pbc.apex, pbc.project, typing)


# -- plans, composability, propagation -------------------------------------------


def _origin_factorization(h: Hierarchy, plan: PropagationPlan):
    if plan.direction == FORWARD:
        lhs = plan.rule.source
        return ForwardFactorization(
            mid=lhs,
            pre_arrow=identity(lhs),
            post_arrow=plan.rule,
            typing=plan.match,
        )
    origin_graph = h.graph(plan.origin)
    rp = restriction_pullback(origin_graph, origin_graph, identity(origin_graph), plan.match)
    return BackwardFactorization(
        mid=plan.rule.target,
        post_arrow=identity(plan.rule.target),
        pre_arrow=plan.rule,
        retyping=rp.to_lhs,
    )


def _pattern_lookup(rp: RestrictionResult) -> dict[tuple[str, str], str]:
    return {(rp.instance[p], rp.to_lhs[p]): p for p in rp.pattern.nodes}


def _restriction_connector(
    h: Hierarchy, i: str, j: str, rp_i: RestrictionResult, rp_j: RestrictionResult
) -> Homomorphism | None:
    """The induced arrow between restriction patterns along a typing edge."""
    h_ij = h.typing(i, j)
    lookup = _pattern_lookup(rp_j)
    mapping = {}
    for p in rp_i.pattern.nodes:
        target = lookup.get((h_ij[rp_i.instance[p]], rp_i.to_lhs[p]))
        if target is None:
            return None
        mapping[p] = target
    return Homomorphism(rp_i.pattern, rp_j.pattern, mapping)


def _search_connector(
    mid_i: Graph,
    mid_j: Graph,
    candidates: dict[str, list[str]],
) -> Homomorphism | None:
    """First homomorphism mid_i→mid_j consistent with the per-node candidate
    sets, in deterministic order."""
    order = sorted(mid_i.nodes)
    assignment: dict[str, str] = {}

    def edges_ok(n: str, c: str) -> bool:
        for p, q in assignment.items():
            for (u, v, xx, yy) in ((n, p, c, q), (p, n, q, c)):
                if (u, v) in mid_i.edges:
                    if (xx, yy) not in mid_j.edges:
                        return False
                    if not attrs_contained(mid_i.attrs_of((u, v)), mid_j.attrs_of((xx, yy))):
                        return False
        if (n, n) in mid_i.edges:
            if (c, c) not in mid_j.edges or not attrs_contained(
                mid_i.attrs_of((n, n)), mid_j.attrs_of((c, c))
            ):
                return False
        return True

    def search(idx: int) -> bool:
        if idx == len(order):
            return True
        n = order[idx]
        for c in candidates[n]:
            if not attrs_contained(mid_i.attrs_of(n), mid_j.attrs_of(c)):
                continue
            if not edges_ok(n, c):
                continue
            assignment[n] = c
            if search(idx + 1):
                return True
            del assignment[n]
        return False

    if any(not candidates[n] for n in order):
        return None
    return Homomorphism(mid_i, mid_j, dict(assignment)) if search(0) else None


def _derive_forward_connector(
    fx_i: ForwardFactorization, fx_j: ForwardFactorization, h_ij: Homomorphism
) -> Homomorphism | None:
    forced: dict[str, str] = {}
    for a in fx_i.pre_arrow.source.nodes:
        e, want = fx_i.pre_arrow[a], fx_j.pre_arrow[a]
        if forced.setdefault(e, want) != want:
            return None
    candidates = {}
    for e in sorted(fx_i.mid.nodes):
        opts = [forced[e]] if e in forced else sorted(fx_j.mid.nodes)
        opts = [
            c
            for c in opts
            if fx_j.post_arrow[c] == fx_i.post_arrow[e]
            and fx_j.typing[c] == h_ij[fx_i.typing[e]]
        ]
        candidates[e] = opts
    return _search_connector(fx_i.mid, fx_j.mid, candidates)


def _derive_backward_connector(
    fx_i: BackwardFactorization,
    fx_j: BackwardFactorization,
    pattern_connector: Homomorphism,
) -> Homomorphism | None:
    forced: dict[str, str] = {}
    for k in fx_i.pre_arrow.source.nodes:
        e, want = fx_i.pre_arrow[k], fx_j.pre_arrow[k]
        if forced.setdefault(e, want) != want:
            return None
    for p in fx_i.retyping.source.nodes:
        e = fx_i.retyping[p]
        want = fx_j.retyping[pattern_connector[p]]
        if forced.setdefault(e, want) != want:
            return None
    candidates = {}
    for e in sorted(fx_i.mid.nodes):
        opts = [forced[e]] if e in forced else sorted(fx_j.mid.nodes)
        opts = [c for c in opts if fx_j.post_arrow[c] == fx_i.post_arrow[e]]
        candidates[e] = opts
    return _search_connector(fx_i.mid, fx_j.mid, candidates)


def check_composability(h: Hierarchy, plan: PropagationPlan) -> list[str]:
    """All reasons the plan cannot drive a validity-preserving propagation.

    Checks coverage of the affected sub-hierarchy, the per-object
    factorization squares, and — for every typing arrow inside the
    sub-hierarchy — the composability triangles and typing square of the
    connector (deriving one when the plan does not name it)."""
    violations: list[str] = []
    origin = plan.origin
    if plan.direction == FORWARD:
        sub = h.forward_subgraph(origin)
    else:
        sub = h.backward_subgraph(origin)
    facts: dict[str, ForwardFactorization | BackwardFactorization] = {}
    restrictions: dict[str, RestrictionResult] = {}
    facts[origin] = _origin_factorization(h, plan)
    if plan.direction == BACKWARD:
        origin_graph = h.graph(origin)
        restrictions[origin] = restriction_pullback(
            origin_graph, origin_graph, identity(origin_graph), plan.match
        )

    for name in sub.nodes():
        if name == origin:
            continue
        fx = plan.factorizations.get(name)
        if fx is None:
            violations.append(f"node {name}: no factorization provided")
            continue
        facts[name] = fx
        if plan.direction == FORWARD:
            if not isinstance(fx, ForwardFactorization):
                violations.append(f"node {name}: expected a forward factorization")
                continue
            if not is_mono(fx.pre_arrow):
                warnings.warn(
                    f"factorization at {name}: strict-phase arrow is not a mono "
                    "(the strict phase merges elements)",
                    RuntimeWarning,
                    stacklevel=2,
                )
            try:
                if not hom_equal(compose(fx.post_arrow, fx.pre_arrow), plan.rule):
                    violations.append(
                        f"node {name}: strict and canonical parts do not compose to the rule"
                    )
                base = compose(h.composed_typing(origin, name), plan.match)
                if not hom_equal(compose(fx.typing, fx.pre_arrow), base):
                    violations.append(
                        f"node {name}: typing square fails (strict part typed incompatibly)"
                    )
            except Exception as exc:  # endpoint mismatches
                violations.append(f"node {name}: malformed factorization ({exc})")
        else:
            if not isinstance(fx, BackwardFactorization):
                violations.append(f"node {name}: expected a backward factorization")
                continue
            rp = restriction_pullback(
                h.graph(name),
                h.graph(origin),
                h.composed_typing(name, origin),
                plan.match,
            )
            restrictions[name] = rp
            try:
                if not hom_equal(compose(fx.post_arrow, fx.pre_arrow), plan.rule):
                    violations.append(
                        f"node {name}: strict and canonical parts do not compose to the rule"
                    )
                if fx.retyping.source != rp.pattern:
                    violations.append(
                        f"node {name}: retyping not defined on the canonical restriction"
                    )
                elif not hom_equal(compose(fx.post_arrow, fx.retyping), rp.to_lhs):
                    violations.append(
                        f"node {name}: retyping square fails (instances retyped incompatibly)"
                    )
            except Exception as exc:
                violations.append(f"node {name}: malformed factorization ({exc})")

    if violations:
        return violations

    for (i, j) in sub.edges():
        fx_i, fx_j = facts[i], facts[j]
        if plan.direction == FORWARD:
            ell = plan.connectors.get((i, j))
            if ell is None:
                ell = _derive_forward_connector(fx_i, fx_j, h.typing(i, j))
            if ell is None:
                violations.append(
                    f"connector {i}->{j}: no composability arrow exists between the "
                    "factorizations (one postpones work the other performs)"
                )
                continue
            if not hom_equal(compose(ell, fx_i.pre_arrow), fx_j.pre_arrow):
                violations.append(
                    f"connector {i}->{j}: composability triangle (rule source side) fails"
                )
            if not hom_equal(compose(fx_j.post_arrow, ell), fx_i.post_arrow):
                violations.append(
                    f"connector {i}->{j}: composability triangle (rule target side) fails"
                )
            if not hom_equal(
                compose(fx_j.typing, ell), compose(h.typing(i, j), fx_i.typing)
            ):
                violations.append(f"connector {i}->{j}: typing square fails")
        else:
            pattern_conn = _restriction_connector(h, i, j, restrictions[i], restrictions[j])
            if pattern_conn is None:
                violations.append(
                    f"connector {i}->{j}: restriction patterns are inconsistent"
                )
                continue
            ell = plan.connectors.get((i, j))
            if ell is None:
                ell = _derive_backward_connector(fx_i, fx_j, pattern_conn)
            if ell is None:
                violations.append(
                    f"connector {i}->{j}: no composability arrow exists between the "
                    "factorizations (one postpones work the other performs)"
                )
                continue
            if not hom_equal(compose(ell, fx_i.pre_arrow), fx_j.pre_arrow):
                violations.append(
                    f"connector {i}->{j}: composability triangle (rule source side) fails"
                )
            if not hom_equal(compose(fx_j.post_arrow, ell), fx_i.post_arrow):
                violations.append(
                    f"connector {i}->{j}: composability triangle (rule target side) fails"
                )
            if not hom_equal(
                compose(ell, fx_i.retyping), compose(fx_j.retyping, pattern_conn)
            ):
                violations.append(f"connector {i}->{j}: retyping square fails")
    return violations


def _forward_waves(sub: Hierarchy) -> list[list[str]]:
    remaining = set(sub.nodes())
    edges = set(sub.edges())
    waves = []
    while remaining:
        sinks = sorted(
            n
            for n in remaining
            if all(j not in remaining for (i2, j) in edges if i2 == n)
        )
        waves.append(sinks)
        remaining -= set(sinks)
    return waves


def _backward_waves(sub: Hierarchy) -> list[list[str]]:
    remaining = set(sub.nodes())
    edges = set(sub.edges())
    waves = []
    while remaining:
        sources = sorted(
            n
            for n in remaining
            if all(i2 not in remaining for (i2, j) in edges if j == n)
        )
        waves.append(sources)
        remaining -= set(sources)
    return waves


def propagate_forward(h: Hierarchy, plan: PropagationPlan) -> RewriteReport:
    """Propagate an expansive rewrite from the origin through everything it
    types, sinks first, keeping the hierarchy valid after every object."""
    if plan.direction != FORWARD:
        raise RewritingError("propagate_forward needs a forward plan")
    if plan.match.source != plan.rule.source:
        raise RewritingError("match must be an instance of the rule's source")
    if plan.match.target != h.graph(plan.origin):
        raise RewritingError("match does not land in the origin object")
    if not is_mono(plan.match):
        raise RewritingError("match must be a mono")
    violations = check_composability(h, plan)
    if violations:
        raise RewritingError(
            "plan rejected by composability check:\n" + "\n".join(violations)
        )

    origin = plan.origin
    sub = h.forward_subgraph(origin)
    waves = _forward_waves(sub)
    facts = {name: plan.factorizations[name] for name in sub.nodes() if name != origin}
    facts[origin] = _origin_factorization(h, plan)

    current = h
    traces: dict[str, Homomorphism] = {}
    instances: dict[str, Homomorphism] = {}
    updated: dict[tuple[str, str], Homomorphism] = {}
    steps: list[tuple[str, list[str]]] = []
    for wave in waves:
        for i in wave:
            fx = facts[i]
            po = pushout(fx.typing, fx.post_arrow)
            traces[i] = po.from_b
            instances[i] = po.from_c
            patch: dict[tuple[str, str], Homomorphism] = {}
            for j in current.successors(i):
                old = h.typing(i, j)
                mapping = _merge_assignment(
                    f"typing {i}->{j} after update",
                    {traces[i][n]: traces[j][old[n]] for n in old.source.nodes},
                    {
                        instances[i][c]: instances[j][c]
                        for c in plan.rule.target.nodes
                    },
                )
                arrow = Homomorphism(po.apex, traces[j].target, mapping)
                arrow.validate()
                patch[(i, j)] = arrow
            for k in current.predecessors(i):
                patch[(k, i)] = compose(traces[i], current.typing(k, i))
            current = current.replace(objects={i: po.apex}, arrows=patch)
            updated.update(patch)
            steps.append((i, [str(v) for v in current.validate_commutativity()]))
    return RewriteReport(
        hierarchy=current,
        origin=origin,
        direction=FORWARD,
        waves=waves,
        traces=traces,
        instances=instances,
        updated_typings=updated,
        steps=steps,
    )


def propagate_backward(h: Hierarchy, plan: PropagationPlan) -> RewriteReport:
    """Propagate a restrictive rewrite from the origin through everything
    typed by it, sources first, keeping the hierarchy valid throughout."""
    if plan.direction != BACKWARD:
        raise RewritingError("propagate_backward needs a backward plan")
    if plan.match.source != plan.rule.target:
        raise RewritingError("match must be an instance of the rule's target")
    if plan.match.target != h.graph(plan.origin):
        raise RewritingError("match does not land in the origin object")
    if not is_mono(plan.match):
        raise RewritingError("match must be a mono")
    violations = check_composability(h, plan)
    if violations:
        raise RewritingError(
            "plan rejected by composability check:\n" + "\n".join(violations)
        )

    origin = plan.origin
    sub = h.backward_subgraph(origin)
    waves = _backward_waves(sub)

    restrictions: dict[str, RestrictionResult] = {}
    pattern_conns: dict[tuple[str, str], Homomorphism] = {}
    for name in sub.nodes():
        if name == origin:
            origin_graph = h.graph(origin)
            restrictions[name] = restriction_pullback(
                origin_graph, origin_graph, identity(origin_graph), plan.match
            )
        else:
            restrictions[name] = restriction_pullback(
                h.graph(name),
                h.graph(origin),
                h.composed_typing(name, origin),
                plan.match,
            )
    for (i, j) in sub.edges():
        conn = _restriction_connector(h, i, j, restrictions[i], restrictions[j])
        if conn is None:
            raise RewritingError(f"restriction patterns inconsistent along {i}->{j}")
        pattern_conns[(i, j)] = conn

    current = h
    traces: dict[str, Homomorphism] = {}
    instances: dict[str, Homomorphism] = {}
    lifts: dict[str, LiftResult] = {}
    updated: dict[tuple[str, str], Homomorphism] = {}
    steps: list[tuple[str, list[str]]] = []
    bot_lookup: dict[str, dict[str, str]] = {}

    def lifted_connector(k: str, i: str, p_minus: str) -> str:
        """Image of an L_G_k⁻ node in L_G_i⁻ (or in L⁻ when i is the origin)."""
        lk = lifts[k]
        if i == origin:
            return lk.to_rhs[p_minus]
        li = lifts[i]
        pattern_pair = pattern_conns[(k, i)][lk.lift[p_minus]]
        rhs_part = lk.to_rhs[p_minus]
        lookup = {
            (li.lift[q], li.to_rhs[q]): q for q in li.pattern.nodes
        }
        return lookup[(pattern_pair, rhs_part)]

    for wave in waves:
        for i in wave:
            if i == origin:
                pbc = final_pbc(plan.rule, plan.match)
                new_graph = pbc.apex
                traces[i] = pbc.project
                instances[i] = pbc.embed
                lifts[i] = LiftResult(
                    pattern=plan.rule.source,
                    lift=identity(plan.rule.source),
                    to_rhs=identity(plan.rule.source),
                    graph=pbc.apex,
                    trace=pbc.project,
                    instance=pbc.embed,
                    typing=None,
                )
            else:
                fx = plan.factorizations[i]
                lift = lift_rule(fx.retyping, fx.pre_arrow, restrictions[i].instance)
                new_graph = lift.graph
                traces[i] = lift.trace
                instances[i] = lift.instance
                lifts[i] = lift
            embedded = {instances[i][p] for p in instances[i].source.nodes}
            bot_lookup[i] = {
                traces[i][x]: x for x in new_graph.nodes if x not in embedded
            }
            patch: dict[tuple[str, str], Homomorphism] = {}
            for k in current.predecessors(i):
                old = h.typing(k, i)
                lk = lifts[k]
                emb_inv_k = {lk.instance[p]: p for p in lk.pattern.nodes}
                mapping = {}
                for x in lk.graph.nodes:
                    if x in emb_inv_k:
                        mapping[x] = instances[i][lifted_connector(k, i, emb_inv_k[x])]
                    else:
                        mapping[x] = bot_lookup[i][old[traces[k][x]]]
                arrow = Homomorphism(lk.graph, new_graph, mapping)
                arrow.validate()
                if not hom_equal(
                    compose(traces[i], arrow), compose(old, traces[k])
                ):
                    raise RewritingError(
                        f"typing {k}->{i}: reconstructed arrow does not commute"
                    )
                patch[(k, i)] = arrow
            for j in current.successors(i):
                patch[(i, j)] = compose(current.typing(i, j), traces[i])
            current = current.replace(objects={i: new_graph}, arrows=patch)
            updated.update(patch)
            steps.append((i, [str(v) for v in current.validate_commutativity()]))
    return RewriteReport(
        hierarchy=current,
        origin=origin,
        direction=BACKWARD,
        waves=waves,
        traces=traces,
        instances=instances,
        updated_typings=updated,
        steps=steps,
    )
