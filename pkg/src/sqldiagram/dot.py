"""Deterministic DOT serialization of a diagram.

Each table box becomes one node with an HTML table label (inverted header,
highlighted selection rows), each not-exists group a dashed rounded cluster,
each forall group a double-bordered rounded cluster; exists and root groups
emit no cluster.  Edges keep their direction and operator labels.  Identical
diagrams always produce byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    SELECT_BOX_ID,
    AttributeRow,
    Diagram,
    TableBox,
    diagram_to_json,
)
from .logic import Quantifier


@dataclass(frozen=True)
class StyleOptions:
    header_bg: str = "black"
    header_fg: str = "white"
    select_header_bg: str = "lightgrey"
    select_header_fg: str = "black"
    selection_row_bg: str = "yellow"
    fontname: str = "Helvetica"
    rankdir: str = "LR"


@dataclass(frozen=True)
class DotDocument:
    text: str


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _box_label(box: TableBox, style: StyleOptions) -> str:
    header = box.table_name if box.alias == box.table_name else f"{box.alias}: {box.table_name}"
    lines = ['<TABLE BORDER="0" CELLBORDER="1" CELLSPACING="0">']
    lines.append(f'<TR><TD BGCOLOR="{style.header_bg}">'
                 f'<FONT COLOR="{style.header_fg}">{_escape(header)}</FONT></TD></TR>')
    for i, row in enumerate(box.rows):
        if isinstance(row, AttributeRow):
            lines.append(f'<TR><TD PORT="p_{i}">{_escape(row.label())}</TD></TR>')
        else:
            lines.append(f'<TR><TD PORT="p_{i}" BGCOLOR="{style.selection_row_bg}">'
                         f'{_escape(row.label())}</TD></TR>')
    lines.append("</TABLE>")
    return "".join(lines)


def _select_label(d: Diagram, style: StyleOptions) -> str:
    lines = ['<TABLE BORDER="0" CELLBORDER="1" CELLSPACING="0">']
    lines.append(f'<TR><TD BGCOLOR="{style.select_header_bg}">'
                 f'<FONT COLOR="{style.select_header_fg}">SELECT</FONT></TD></TR>')
    for i, label in enumerate(d.select_box.rows):
        lines.append(f'<TR><TD PORT="p_{i}">{_escape(label)}</TD></TR>')
    lines.append("</TABLE>")
    return "".join(lines)


def emit_dot(d: Diagram, style: StyleOptions = StyleOptions()) -> DotDocument:
    out: list[str] = []
    out.append("digraph query_diagram {")
    out.append(f'  rankdir={style.rankdir};')
    out.append(f'  node [shape=none, fontname="{style.fontname}"];')
    out.append(f'  t_{SELECT_BOX_ID} [label=<{_select_label(d, style)}>];')
    cluster_count = 0
    for group in d.groups:
        node_lines = [f't_{box.alias} [label=<{_box_label(box, style)}>];'
                      for box in group.tables]
        if group.quantifier is Quantifier.NOT_EXISTS:
            out.append(f"  subgraph cluster_{group.id} {{")
            out.append('    style="rounded,dashed";')
            out.extend(f"    {line}" for line in node_lines)
            out.append("  }")
            cluster_count += 1
        elif group.quantifier is Quantifier.FOR_ALL:
            out.append(f"  subgraph cluster_{group.id} {{")
            out.append('    style="rounded";')
            out.append("    peripheries=2;")
            out.extend(f"    {line}" for line in node_lines)
            out.append("  }")
            cluster_count += 1
        else:
            out.extend(f"  {line}" for line in node_lines)

    boxes = {box.alias: box for box in d.boxes()}
    for edge in d.edges:
        src = f"t_{edge.src[0]}:p_{boxes[edge.src[0]].row_index(edge.src[1])}"
        dst = f"t_{edge.dst[0]}:p_{boxes[edge.dst[0]].row_index(edge.dst[1])}"
        attrs = ["dir=forward" if edge.directed else "dir=none"]
        if edge.label is not None:
            attrs.append(f'label="{_escape(edge.label)}"')
        out.append(f"  {src} -> {dst} [{', '.join(attrs)}];")
    for i, (alias, attribute) in enumerate(d.select_box.links):
        dst = f"t_{alias}:p_{boxes[alias].row_index(attribute)}"
        out.append(f"  t_{SELECT_BOX_ID}:p_{i} -> {dst} [dir=none];")
    out.append("}")
    return DotDocument(text="\n".join(out) + "\n")


def emit_json(d: Diagram) -> str:
    """Canonical JSON form of a diagram (round-trips losslessly)."""
    return diagram_to_json(d)
