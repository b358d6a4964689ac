"""Graph gadgets and zero-forcing certificates for homomorphism orders.

The package builds directed-cycle instances, decides classical homomorphisms,
prunes quantum-homomorphism candidates through sound zero-forcing rules,
constructs the color-gadget indicator with its arc-replacement graphs, and
realizes finite posets inside both orders at desk scale.
"""

from .gadgets import (
    MUTANT_NAMES,
    ROLE_A,
    ROLE_B,
    ROLE_E,
    SPINE_COLORS,
    CopyRecord,
    Indicator,
    ReplacementGraph,
    RoleMap,
    StructuralDefectError,
    StructuralReport,
    attach_gadget,
    build_indicator,
    color_domains,
    color_sets,
    colored_walks,
    detect_roles,
    endpoint_certificate,
    replace,
    replacement_from_json,
    replacement_to_json,
    roles_from_labels,
    structural_mutants,
    verify_structural,
)
from .graphs import (
    DiCycles,
    Digraph,
    Graph,
    GraphError,
    ParseError,
    dicycles,
    dicycles_to_digraph,
    digraph,
    directed_cycle,
    disjoint_union,
    graph,
    induced,
    parse,
    serialize,
    to_dot,
    weak_components,
)
from .homsolver import check_witness, compose, dicycles_hom, find_hom
from .posets import (
    PRIMES,
    Embedding,
    EmbeddingReport,
    OrderCheckReport,
    PhiReduction,
    Poset,
    PosetError,
    construct_phi_hom,
    encode,
    order_check_D,
    phi,
    poset,
    reduce_phi_to_D,
    verify_embedding,
)
from .prune import (
    BOUND_CAP,
    DEFAULT_RULES,
    INFEASIBLE,
    RULE_REGISTRY,
    UNKNOWN,
    PruneConfig,
    TraceEntry,
    TraceError,
    ZeroLedger,
    check_trace,
    default_bound,
    prune_closure,
    rule_closed_walk,
    rule_color_localization,
    rule_pair_walk,
    rule_support,
)
from .walks import WalkTable, closed_walk_masks, full_walk_masks, pair_walk_masks, walk_table

__version__ = "0.1.0"
