"""Dijkstra graphs: the control-flow graphs of classically structured programs.

The package decides whether a flow graph belongs to the class, produces a
replayable contraction witness, computes a canonical integer-token code that
is identical exactly for isomorphic members of the class, and extracts
explicit isomorphism mappings.  A generator, perturbations and brute-force
oracles support testing; `dgraph.cli` exposes the command-line surface.
"""

from . import errors
from .canonical import (
    CanonicalCode,
    IsoMapping,
    analyze,
    canonical_code,
    is_isomorphic,
    parse_code_line,
)
from .flowgraph import (
    CycleEdgeSet,
    FlowGraph,
    TopoOrder,
    build_graph,
    check_flow_reachability,
    detect_cycle_edges,
    topo_sort,
)
from .formats import (
    GraphDocument,
    SimilarityReport,
    batch_analyze,
    parse_graph,
    serialize_graph,
)
from .generator import (
    ExpansionScript,
    PerturbMode,
    brute_force_isomorphism,
    generate_dg,
    oracle_reduce,
    perturb,
    random_flow_graph,
    random_relabel,
    replay_script,
)
from .primes import (
    IF_THEN,
    IF_THEN_ELSE,
    KIND_NAMES,
    NON_TRIVIAL_KINDS,
    REPEAT,
    SEQUENCE,
    TRIVIAL,
    WHILE,
    PrimeMatch,
    StatementKind,
    contract,
    expand,
    find_primes,
    kind_from_name,
    match_prime_at,
    p_case,
)
from .recognizer import (
    ContractionTrace,
    PassStats,
    Reason,
    Status,
    Verdict,
    recognize,
    replay,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "FlowGraph", "CycleEdgeSet", "TopoOrder",
    "build_graph", "check_flow_reachability", "detect_cycle_edges", "topo_sort",
    "StatementKind", "PrimeMatch",
    "TRIVIAL", "SEQUENCE", "IF_THEN", "WHILE", "REPEAT", "IF_THEN_ELSE",
    "NON_TRIVIAL_KINDS", "KIND_NAMES", "p_case", "kind_from_name",
    "match_prime_at", "find_primes", "contract", "expand",
    "Status", "Reason", "Verdict", "ContractionTrace", "PassStats",
    "recognize", "replay",
    "CanonicalCode", "IsoMapping", "analyze", "canonical_code",
    "is_isomorphic", "parse_code_line",
    "ExpansionScript", "PerturbMode",
    "generate_dg", "replay_script", "perturb", "oracle_reduce",
    "brute_force_isomorphism", "random_flow_graph", "random_relabel",
    "GraphDocument", "SimilarityReport",
    "parse_graph", "serialize_graph", "batch_analyze",
    "__version__",
]
