"""Command-line interface.

Commands: viz (SQL -> DOT or JSON diagram), lt (SQL -> logic tree JSON),
trc (SQL -> tuple calculus text), check (SQL -> validation report),
recover (diagram JSON -> depth assignment), roundtrip (SQL -> diagram ->
recovered structure, compared against the source) and metrics (element and
word counts).

Exit codes: 0 success, 1 validation failure (degenerate query, invalid
diagram, failed round trip), 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import os
import shutil
import subprocess
import sys

from .diagram import build_diagram, count_elements, count_words, diagram_from_json
from .dot import StyleOptions, emit_dot, emit_json
from .errors import (
    AmbiguousColumnError,
    DegenerateQueryError,
    InvalidDiagramError,
    MalformedSubqueryError,
    SqlSyntaxError,
    UnknownAliasError,
    UnsupportedFeatureError,
)
from .logic import (
    ViolationKind,
    build_logic_tree,
    check_nondegenerate,
    lt_to_json,
    render_trc,
    simplify_forall,
)
from .parser import parse
from .recovery import brute_force_depths, diagram_to_graph, recover_depths
from .scopes import resolve_scopes

RENDERER_ENV = "SQLDIAGRAM_RENDERER"

_PARSE_ERRORS = (SqlSyntaxError, UnsupportedFeatureError, UnknownAliasError,
                 AmbiguousColumnError, MalformedSubqueryError)


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqldiagram",
        description="Translate nested conjunctive SQL into logic-based diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, simplify=True, depth=True):
        p.add_argument("input", nargs="?", default="-",
                       help="input file, or - for standard input (default)")
        p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
        if simplify:
            p.add_argument("--no-simplify", action="store_true",
                           help="keep the raw not-exists form instead of forall boxes")
        if depth:
            p.add_argument("--max-depth", type=int, default=3,
                           help="maximum supported nesting depth (default 3)")

    viz = sub.add_parser("viz", help="SQL to diagram (DOT or JSON)")
    add_common(viz)
    viz.add_argument("--format", choices=("dot", "json"), default="dot")
    viz.add_argument("--render", metavar="FMT",
                     help=f"also run the external renderer named by ${RENDERER_ENV}")

    lt = sub.add_parser("lt", help="SQL to logic tree JSON")
    add_common(lt)

    trc = sub.add_parser("trc", help="SQL to tuple calculus text")
    add_common(trc)

    check = sub.add_parser("check", help="validate a query")
    add_common(check, simplify=False)

    recover = sub.add_parser("recover", help="diagram JSON to depth assignment JSON")
    add_common(recover, simplify=False, depth=False)

    roundtrip = sub.add_parser("roundtrip", help="build a diagram, recover it, compare")
    add_common(roundtrip)

    metrics = sub.add_parser("metrics", help="element and word counts")
    add_common(metrics)
    return parser


def _read_input(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_output(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _logic_tree(args, sql_text: str):
    ast = resolve_scopes(parse(sql_text))
    return build_logic_tree(ast)


def _validated_diagram(args, lt):
    """Build the diagram; degeneracy is fatal, excess depth only warns."""
    report = check_nondegenerate(lt, max_depth=args.max_depth)
    hard = [v for v in report.violations if v.kind is not ViolationKind.DEPTH_EXCEEDED]
    if hard:
        raise DegenerateQueryError(report)
    if not report.depth_ok:
        print(f"warning: nesting depth exceeds {args.max_depth}; "
              "structure recovery is not guaranteed", file=sys.stderr)
    return build_diagram(lt, simplified=not args.no_simplify,
                         max_depth=args.max_depth, allow_invalid=True)


def _cmd_viz(args) -> int:
    lt = _logic_tree(args, _read_input(args.input))
    diagram = _validated_diagram(args, lt)
    if args.format == "json":
        _write_output(args, emit_json(diagram))
        return 0
    document = emit_dot(diagram, StyleOptions())
    _write_output(args, document.text)
    if args.render:
        _render(args, document.text)
    return 0


def _render(args, dot_text: str) -> None:
    renderer = os.environ.get(RENDERER_ENV)
    if not renderer or shutil.which(renderer) is None:
        print(f"warning: no renderer available (set ${RENDERER_ENV}); skipping render",
              file=sys.stderr)
        return
    if not args.output:
        print("warning: --render needs --output to name the rendered file", file=sys.stderr)
        return
    target = os.path.splitext(args.output)[0] + "." + args.render
    subprocess.run([renderer, f"-T{args.render}", args.output, "-o", target], check=True)


def _cmd_lt(args) -> int:
    lt = _logic_tree(args, _read_input(args.input))
    if not args.no_simplify:
        lt = simplify_forall(lt)
    _write_output(args, lt_to_json(lt))
    return 0


def _cmd_trc(args) -> int:
    lt = _logic_tree(args, _read_input(args.input))
    if not args.no_simplify:
        lt = simplify_forall(lt)
    _write_output(args, render_trc(lt) + "\n")
    return 0


def _cmd_check(args) -> int:
    lt = _logic_tree(args, _read_input(args.input))
    report = check_nondegenerate(lt, max_depth=args.max_depth)
    if report.ok:
        _write_output(args, "ok: query is non-degenerate and within the depth bound\n")
        return 0
    lines = [f"violation: {v}" for v in report.violations]
    _write_output(args, "\n".join(lines) + "\n")
    return 1


def _cmd_recover(args) -> int:
    diagram = diagram_from_json(_read_input(args.input))
    assignment = recover_depths(diagram_to_graph(diagram))
    _write_output(args, assignment.to_json())
    return 0


def _cmd_roundtrip(args) -> int:
    lt = _logic_tree(args, _read_input(args.input))
    diagram = _validated_diagram(args, lt)
    graph = diagram_to_graph(diagram)
    recovered = recover_depths(graph)

    group_aliases = {g.id: tuple(sorted(b.alias for b in g.tables)) for g in diagram.groups}
    expected_depth = lt.depth_by_alias()
    node_of = lt.node_of_alias()
    for gid, aliases in group_aliases.items():
        if recovered.depths[gid] != expected_depth[aliases[0]]:
            print(f"round trip failed: group {gid} recovered at depth "
                  f"{recovered.depths[gid]}, expected {expected_depth[aliases[0]]}",
                  file=sys.stderr)
            return 1
    for gid, parent_gid in recovered.parents.items():
        child_alias = group_aliases[gid][0]
        expected_parent = None
        for _, node, parent in lt.walk():
            if child_alias in node.aliases and parent is not None:
                expected_parent = tuple(sorted(parent.aliases))
        if group_aliases[parent_gid] != expected_parent:
            print(f"round trip failed: group {gid} recovered under {parent_gid}",
                  file=sys.stderr)
            return 1
    oracle = brute_force_depths(graph) if len(graph.nodes) <= 12 else None
    suffix = ""
    if oracle is not None:
        if len(oracle) != 1:
            print(f"round trip failed: {len(oracle)} consistent structures exist",
                  file=sys.stderr)
            return 1
        suffix = ", unique by exhaustive search"
    _write_output(args, f"round trip ok: {len(diagram.groups)} groups recovered "
                        f"exactly{suffix}\n")
    return 0


def _cmd_metrics(args) -> int:
    sql_text = _read_input(args.input)
    lt = _logic_tree(args, sql_text)
    diagram = _validated_diagram(args, lt)
    _write_output(args, f"elements: {count_elements(diagram)}\n"
                        f"words: {count_words(sql_text)}\n")
    return 0


_COMMANDS = {
    "viz": _cmd_viz,
    "lt": _cmd_lt,
    "trc": _cmd_trc,
    "check": _cmd_check,
    "recover": _cmd_recover,
    "roundtrip": _cmd_roundtrip,
    "metrics": _cmd_metrics,
}


def run(argv: list[str]) -> int:
    parser = _build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateQueryError, InvalidDiagramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:  # malformed JSON and similar
        print(f"error: malformed input ({exc})", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
