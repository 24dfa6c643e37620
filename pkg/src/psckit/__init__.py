"""psckit: progressive simplicial complexes.

Simplify any mix of points, wires and triangles down to a single vertex
with a generalized quadric metric, reverse the collapse sequence into a
replayable vertex-split stream (a PSC), and map that stream to and from
compact token ids with a validity oracle for constrained decoding.
"""

from .complex import (
    EdgeKind,
    SimplicialComplex,
    Star,
    build_complex,
    is_boundary_edge,
    star,
)
from .metrics import chamfer_distance, complex_equal
from .quadrics import (
    PenaltyConfig,
    Quadric,
    aggregate_vertex_quadric,
    edge_collapse_quadric,
    fundamental_quadric,
    optimal_placement,
    quadric_eval,
)
from .delaunay import delaunay_virtual_edges, knn_pairs
from .simplify import (
    CandidatePair,
    CollapseLog,
    CollapseRecord,
    GreedySimplifier,
    candidate_pairs,
    collapse,
    simplify,
)
from .psc import (
    PSC,
    ReplayError,
    RuleViolation,
    RuleViolationError,
    TopoLabel,
    VertexSplit,
    apply_vsplit,
    check_rules,
    classify_split,
    reconstruct,
    reverse_log,
    star_layout,
)
from .formats import FormatError, read_psc, read_tokens, write_psc, write_tokens
from .tokenizer import (
    BASE_VOCAB,
    DecodeState,
    TokenError,
    TokenStream,
    decode_tokens,
    decode_vsplit,
    encode_psc,
    encode_vsplit,
    phi,
    token_class,
)
from .bpe import Vocabulary, bpe_apply, bpe_decode, bpe_train
from .generate import constrained_generate, uniform_scorer

__version__ = "0.1.0"

__all__ = [
    "BASE_VOCAB",
    "CandidatePair",
    "CollapseLog",
    "CollapseRecord",
    "DecodeState",
    "EdgeKind",
    "FormatError",
    "GreedySimplifier",
    "PSC",
    "PenaltyConfig",
    "Quadric",
    "ReplayError",
    "RuleViolation",
    "RuleViolationError",
    "SimplicialComplex",
    "Star",
    "TokenError",
    "TokenStream",
    "TopoLabel",
    "VertexSplit",
    "Vocabulary",
    "aggregate_vertex_quadric",
    "apply_vsplit",
    "bpe_apply",
    "bpe_decode",
    "bpe_train",
    "build_complex",
    "candidate_pairs",
    "chamfer_distance",
    "check_rules",
    "classify_split",
    "collapse",
    "complex_equal",
    "constrained_generate",
    "decode_tokens",
    "decode_vsplit",
    "delaunay_virtual_edges",
    "edge_collapse_quadric",
    "encode_psc",
    "encode_vsplit",
    "fundamental_quadric",
    "is_boundary_edge",
    "knn_pairs",
    "optimal_placement",
    "phi",
    "quadric_eval",
    "read_psc",
    "read_tokens",
    "reconstruct",
    "reverse_log",
    "simplify",
    "star",
    "star_layout",
    "token_class",
    "uniform_scorer",
    "write_psc",
    "write_tokens",
]
