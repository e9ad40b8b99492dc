"""Sesqui-pushout rewriting of attributed graph hierarchies.

Graphs with set-valued attributes, their homomorphisms, the categorical
constructions needed for rewriting (pullback, pushout, final pullback
complement, image factorization), span rules with match enumeration, DAG
hierarchies of typed graphs, and forward/backward propagation of rewrites
that keeps every typing and path equality valid.
"""

from .cli import Workspace
from .category import (
    ImageFactorizationResult,
    OracleConfig,
    PbcResult,
    PullbackResult,
    PushoutResult,
    final_pbc,
    image_factorization,
    pullback,
    pushout,
    verify_final_pbc_up,
    verify_image_up,
    verify_pullback_up,
    verify_pushout_up,
)
from .edits import (
    AddAttrs,
    AddEdge,
    AddNode,
    CloneNode,
    DeleteEdge,
    DeleteNode,
    MergeNodes,
    RemoveAttrs,
    apply_edit,
    apply_edits,
)
from .exceptions import (
    CompositionError,
    FactorizationError,
    GraphElementError,
    HierarchyError,
    InvalidHomomorphism,
    NotEpiError,
    NotMonoError,
    ResourceBoundExceeded,
    RewritingError,
    SqpoError,
)
from .graphs import (
    Graph,
    Homomorphism,
    compose,
    graph_from_json,
    graph_to_json,
    hom_equal,
    identity,
    is_epi,
    is_homomorphism,
    is_mono,
    validate_graph,
)
from .hierarchy import (
    CommutativityViolation,
    Hierarchy,
    Skeleton,
    hierarchy_from_json,
    hierarchy_to_json,
)
from .isomorphism import are_isomorphic, find_isomorphism, typed_isomorphic
from .propagation import (
    BACKWARD,
    FORWARD,
    BackwardFactorization,
    ForwardFactorization,
    PropagationPlan,
    RewriteReport,
    backward_canonical,
    backward_cleanup,
    backward_strict,
    check_composability,
    forward_canonical,
    forward_cleanup,
    forward_strict,
    lift_rule,
    project_rule,
    propagate_backward,
    propagate_forward,
    restriction_pullback,
)
from .relations import (
    apply_plan,
    build_canonical_plan,
    build_relation_plan,
    derive_backward_factorization,
    derive_factorization_from_relation,
    derive_forward_factorization,
)
from .rules import (
    EXPANSIVE,
    RESTRICTIVE,
    Match,
    Rule,
    SqpoRewriteResult,
    build_rule,
    find_matches,
    rule_from_json,
    rule_to_json,
    sqpo_rewrite,
)

__all__ = [name for name in dir() if not name.startswith("_")]
