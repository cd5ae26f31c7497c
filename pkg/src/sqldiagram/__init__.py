"""Compile nested conjunctive SQL queries into logic-based diagrams.

Pipeline: parse -> resolve_scopes -> build_logic_tree -> check_nondegenerate
-> simplify_forall -> build_diagram -> emit_dot / emit_json.  The reverse
direction, recover_depths, reconstructs the unique nesting structure from a
diagram's group graph.
"""

from .diagram import (
    ArrowDirection,
    Diagram,
    ReadingOrder,
    build_diagram,
    count_elements,
    count_words,
    diagram_from_json,
    diagram_isomorphic,
    diagram_to_json,
    orient_inequality,
    reading_order,
    resolve_arrow,
)
from .dot import DotDocument, StyleOptions, emit_dot, emit_json
from .errors import (
    AmbiguousColumnError,
    DegenerateQueryError,
    InvalidDiagramError,
    MalformedSubqueryError,
    SqlDiagramError,
    SqlSyntaxError,
    UnknownAliasError,
    UnsupportedFeatureError,
)
from .evaluate import evaluate
from .logic import (
    LogicTree,
    LtNode,
    Predicate,
    Quantifier,
    ValidationReport,
    Violation,
    ViolationKind,
    build_logic_tree,
    check_nondegenerate,
    lt_equal,
    lt_from_json,
    lt_to_json,
    lt_to_sql,
    render_trc,
    simplify_forall,
)
from .parser import parse
from .printer import print_sql
from .recovery import (
    DepthAssignment,
    DiagramGraph,
    PathFamily,
    brute_force_depths,
    classify_path_pattern,
    decompose_depth0,
    diagram_to_graph,
    identify_depth1,
    identify_depth2,
    recover_depths,
)
from .scopes import resolve_scopes, resolve_scopes_detailed

__all__ = [
    "ArrowDirection", "Diagram", "ReadingOrder", "build_diagram", "count_elements",
    "count_words", "diagram_from_json", "diagram_isomorphic", "diagram_to_json",
    "orient_inequality", "reading_order", "resolve_arrow",
    "DotDocument", "StyleOptions", "emit_dot", "emit_json",
    "AmbiguousColumnError", "DegenerateQueryError", "InvalidDiagramError",
    "MalformedSubqueryError", "SqlDiagramError", "SqlSyntaxError",
    "UnknownAliasError", "UnsupportedFeatureError",
    "evaluate",
    "LogicTree", "LtNode", "Predicate", "Quantifier", "ValidationReport", "Violation",
    "ViolationKind", "build_logic_tree", "check_nondegenerate", "lt_equal",
    "lt_from_json", "lt_to_json", "lt_to_sql", "render_trc", "simplify_forall",
    "parse", "print_sql",
    "DepthAssignment", "DiagramGraph", "PathFamily", "brute_force_depths",
    "classify_path_pattern", "decompose_depth0", "diagram_to_graph",
    "identify_depth1", "identify_depth2", "recover_depths",
    "resolve_scopes", "resolve_scopes_detailed",
]
