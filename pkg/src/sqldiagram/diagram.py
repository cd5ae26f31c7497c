"""Diagram model and its construction from a Logic Tree.

One table group per tree node (the group keeps the node's quantifier and
depth), one table box per alias, one row per relevant attribute plus one
highlighted row per selection predicate, one edge per join predicate and a
SELECT box linked to the projected attributes.

Arrow rule for cross-group joins: equal depths give an undirected edge,
depth difference one points from the shallower to the deeper group, and
difference two or more points from the deeper to the shallower group.
Whenever endpoint order is swapped to match the arrow, the comparison
operator is mirrored so the label read from source to target states the
true relation.  Equijoins carry no label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateQueryError
from .logic import LogicTree, Predicate, Quantifier, check_nondegenerate, simplify_forall
from .sqlast import FLIPPED_OP, ColumnRef, Constant

SELECT_BOX_ID = "SELECT"


@dataclass(frozen=True)
class AttributeRow:
    attribute: str

    def label(self) -> str:
        return self.attribute


@dataclass(frozen=True)
class SelectionRow:
    attribute: str
    op: str
    constant: Constant

    def label(self) -> str:
        return f"{self.attribute} {self.op} {self.constant.sql()}"


Row = AttributeRow | SelectionRow


@dataclass(frozen=True)
class TableBox:
    alias: str
    table_name: str
    rows: tuple[Row, ...]

    def row_index(self, attribute: str) -> int:
        for i, row in enumerate(self.rows):
            if isinstance(row, AttributeRow) and row.attribute == attribute:
                return i
        raise KeyError(f"{self.alias}.{attribute} has no row")


@dataclass(frozen=True)
class TableGroup:
    id: str
    quantifier: Quantifier
    depth: int
    parent: str | None
    tables: tuple[TableBox, ...]

    @property
    def boxed(self) -> bool:
        """Only not-exists and forall groups draw a bounding box."""
        return self.quantifier in (Quantifier.NOT_EXISTS, Quantifier.FOR_ALL)


@dataclass(frozen=True)
class Edge:
    src: tuple[str, str]  # (alias, attribute)
    dst: tuple[str, str]
    directed: bool
    label: str | None  # None exactly for equijoins


@dataclass(frozen=True)
class SelectBox:
    rows: tuple[str, ...]  # attribute labels, select-list order
    links: tuple[tuple[str, str], ...]  # one (alias, attribute) per row


@dataclass(frozen=True)
class Diagram:
    groups: tuple[TableGroup, ...]  # canonical pre-order
    edges: tuple[Edge, ...]  # join edges, canonical order
    select_box: SelectBox

    def group_of_alias(self) -> dict[str, TableGroup]:
        return {box.alias: group for group in self.groups for box in group.tables}

    def boxes(self) -> list[TableBox]:
        return [box for group in self.groups for box in group.tables]


class ArrowDirection(Enum):
    UNDIRECTED = "undirected"
    LOW_TO_HIGH = "low-to-high"
    HIGH_TO_LOW = "high-to-low"


def resolve_arrow(depth_a: int, depth_b: int) -> ArrowDirection:
    """Arrow direction between two groups given their nesting depths."""
    diff = abs(depth_a - depth_b)
    if diff == 0:
        return ArrowDirection.UNDIRECTED
    if diff == 1:
        return ArrowDirection.LOW_TO_HIGH
    return ArrowDirection.HIGH_TO_LOW


def orient_inequality(pred: Predicate, direction: ArrowDirection,
                      depths: dict[str, int]) -> Edge:
    """Order the edge endpoints to match the arrow and mirror the operator
    if that swaps the operands."""
    assert isinstance(pred.rhs, ColumnRef), "orient_inequality needs a join predicate"
    lhs, rhs, op = pred.lhs, pred.rhs, pred.op
    if direction is ArrowDirection.UNDIRECTED:
        swap = (lhs.alias, lhs.attribute) > (rhs.alias, rhs.attribute)
    elif direction is ArrowDirection.LOW_TO_HIGH:
        swap = depths[lhs.alias] > depths[rhs.alias]
    else:
        swap = depths[lhs.alias] < depths[rhs.alias]
    if swap:
        lhs, rhs, op = rhs, lhs, FLIPPED_OP[op]
    return Edge(src=(lhs.alias, lhs.attribute), dst=(rhs.alias, rhs.attribute),
                directed=direction is not ArrowDirection.UNDIRECTED,
                label=None if op == "=" else op)


def build_diagram(lt: LogicTree, simplified: bool = True, *,
                  max_depth: int = 3, allow_invalid: bool = False) -> Diagram:
    """Construct the diagram for a validated Logic Tree.

    Raises DegenerateQueryError when validation fails, unless allow_invalid.
    """
    report = check_nondegenerate(lt, max_depth=max_depth)
    if report.violations and not allow_invalid:
        raise DegenerateQueryError(report)
    if simplified:
        lt = simplify_forall(lt)

    depths = lt.depth_by_alias()
    select_attrs: dict[str, set[str]] = {}
    join_attrs: dict[str, set[str]] = {}
    selections: dict[str, set[SelectionRow]] = {}
    for col in lt.select_list:
        select_attrs.setdefault(col.alias, set()).add(col.attribute)

    join_predicates: list[Predicate] = []
    for _, node, _ in lt.walk():
        for pred in node.predicates:
            if isinstance(pred.rhs, ColumnRef):
                join_predicates.append(pred)
                join_attrs.setdefault(pred.lhs.alias, set()).add(pred.lhs.attribute)
                join_attrs.setdefault(pred.rhs.alias, set()).add(pred.rhs.attribute)
            else:
                selections.setdefault(pred.lhs.alias, set()).add(
                    SelectionRow(attribute=pred.lhs.attribute, op=pred.op, constant=pred.rhs))

    def rows_for(alias: str) -> tuple[Row, ...]:
        selected = sorted(select_attrs.get(alias, ()))
        joined = sorted(join_attrs.get(alias, set()) - set(selected))
        extra = sorted(selections.get(alias, ()),
                       key=lambda r: (r.attribute, r.op, r.constant.kind, r.constant.literal))
        return tuple([AttributeRow(a) for a in selected + joined] + extra)

    groups: list[TableGroup] = []
    per_depth_count: dict[int, int] = {}
    group_ids: dict[tuple[int, ...], str] = {}
    for path, node, _ in lt.walk():
        depth = len(path)
        per_depth_count[depth] = per_depth_count.get(depth, 0) + 1
        gid = f"g{depth}_{per_depth_count[depth]}"
        group_ids[path] = gid
        parent = group_ids[path[:-1]] if path else None
        boxes = tuple(TableBox(alias=alias, table_name=table, rows=rows_for(alias))
                      for alias, table in node.tables)
        groups.append(TableGroup(id=gid, quantifier=node.quantifier, depth=depth,
                                 parent=parent, tables=boxes))

    edges = [
        orient_inequality(pred, resolve_arrow(depths[pred.lhs.alias], depths[pred.rhs.alias]), depths)
        for pred in join_predicates
    ]
    edges.sort(key=lambda e: (e.src, e.dst, e.label or ""))

    select_box = SelectBox(rows=tuple(col.attribute for col in lt.select_list),
                           links=tuple((col.alias, col.attribute) for col in lt.select_list))
    return Diagram(groups=tuple(groups), edges=tuple(edges), select_box=select_box)


# ---------------------------------------------------------------------------
# Reading order


@dataclass(frozen=True)
class ReadingOrder:
    """Traversal steps over the diagram: ("select", id), ("enter", group),
    ("follow", src, dst) and ("restart", group)."""

    steps: tuple[tuple, ...]

    @property
    def visit_order(self) -> tuple[str, ...]:
        return tuple(step[1] for step in self.steps if step[0] == "enter")

    @property
    def restarts(self) -> tuple[str, ...]:
        return tuple(step[1] for step in self.steps if step[0] == "restart")


def reading_order(d: Diagram) -> ReadingOrder:
    """Depth-first traversal of the groups from the SELECT box, following
    arrows, with restarts at unvisited groups that have no unvisited
    incoming edge."""
    order = {group.id: i for i, group in enumerate(d.groups)}
    group_of = {box.alias: group.id for group in d.groups for box in group.tables}
    out_edges: dict[str, list[str]] = {gid: [] for gid in order}
    in_edges: dict[str, set[str]] = {gid: set() for gid in order}
    for edge in d.edges:
        src, dst = group_of[edge.src[0]], group_of[edge.dst[0]]
        if src == dst:
            continue
        if edge.directed:
            if dst not in out_edges[src]:
                out_edges[src].append(dst)
            in_edges[dst].add(src)
        else:
            # undirected cross-group edges are traversable either way
            if dst not in out_edges[src]:
                out_edges[src].append(dst)
            if src not in out_edges[dst]:
                out_edges[dst].append(src)
    for targets in out_edges.values():
        targets.sort(key=order.__getitem__)

    root = d.groups[0].id
    steps: list[tuple] = [("select", SELECT_BOX_ID), ("enter", root)]
    visited = {root}

    def dfs(gid: str) -> None:
        for target in out_edges[gid]:
            if target not in visited:
                visited.add(target)
                steps.append(("follow", gid, target))
                steps.append(("enter", target))
                dfs(target)

    dfs(root)
    while len(visited) < len(order):
        unvisited = [gid for gid in order if gid not in visited]
        sources = [gid for gid in unvisited if not (in_edges[gid] - visited)]
        start = sources[0] if sources else unvisited[0]
        visited.add(start)
        steps.append(("restart", start))
        steps.append(("enter", start))
        dfs(start)
    return ReadingOrder(steps=tuple(steps))


# ---------------------------------------------------------------------------
# Verbosity metrics


def count_elements(d: Diagram) -> int:
    """Fixed counting rule: boxes + rows + edges (incl. select links) +
    edge labels + quantifier bounding boxes + the SELECT box."""
    boxes = len(d.boxes())
    rows = sum(len(box.rows) for box in d.boxes()) + len(d.select_box.rows)
    edges = len(d.edges) + len(d.select_box.links)
    labels = sum(1 for e in d.edges if e.label is not None)
    quantifier_boxes = sum(1 for g in d.groups if g.boxed)
    return boxes + 1 + rows + edges + labels + quantifier_boxes


def count_words(sql_text: str) -> int:
    return len(sql_text.split())


# ---------------------------------------------------------------------------
# Canonical JSON


def diagram_to_dict(d: Diagram) -> dict:
    edges = [
        {"from": list(e.src), "to": list(e.dst), "directed": e.directed, "label": e.label}
        for e in d.edges
    ]
    for row_label, target in zip(d.select_box.rows, d.select_box.links):
        edges.append({"from": [SELECT_BOX_ID, row_label], "to": list(target),
                      "directed": False, "label": None})
    return {
        "groups": [
            {
                "id": g.id,
                "quantifier": g.quantifier.value,
                "depth": g.depth,
                "parent": g.parent,
                "tables": [
                    {"alias": box.alias, "table_name": box.table_name,
                     "rows": [_row_to_dict(r) for r in box.rows]}
                    for box in g.tables
                ],
            }
            for g in d.groups
        ],
        "edges": edges,
        "select_box": {"rows": list(d.select_box.rows)},
    }


def _row_to_dict(row: Row) -> dict:
    if isinstance(row, AttributeRow):
        return {"attribute": row.attribute}
    return {"attribute": row.attribute, "op": row.op,
            "constant": {"kind": row.constant.kind, "literal": row.constant.literal}}


def diagram_to_json(d: Diagram) -> str:
    return json.dumps(diagram_to_dict(d), indent=2, ensure_ascii=False) + "\n"


def diagram_from_json(text: str) -> Diagram:
    doc = json.loads(text)
    groups = tuple(
        TableGroup(
            id=g["id"], quantifier=Quantifier(g["quantifier"]), depth=g["depth"],
            parent=g["parent"],
            tables=tuple(
                TableBox(alias=t["alias"], table_name=t["table_name"],
                         rows=tuple(_row_from_dict(r) for r in t["rows"]))
                for t in g["tables"]))
        for g in doc["groups"])
    join_edges = []
    links = []
    for e in doc["edges"]:
        if e["from"][0] == SELECT_BOX_ID:
            links.append((e["to"][0], e["to"][1]))
        else:
            join_edges.append(Edge(src=tuple(e["from"]), dst=tuple(e["to"]),
                                   directed=e["directed"], label=e["label"]))
    select_box = SelectBox(rows=tuple(doc["select_box"]["rows"]), links=tuple(links))
    return Diagram(groups=groups, edges=tuple(join_edges), select_box=select_box)


def _row_from_dict(doc: dict) -> Row:
    if "op" in doc:
        return SelectionRow(attribute=doc["attribute"], op=doc["op"],
                            constant=Constant(kind=doc["constant"]["kind"],
                                              literal=doc["constant"]["literal"]))
    return AttributeRow(attribute=doc["attribute"])


# ---------------------------------------------------------------------------
# Isomorphism modulo label renaming


def diagram_isomorphic(a: Diagram, b: Diagram) -> bool:
    """True when some per-kind bijection of alias, table, attribute and
    constant labels maps one diagram onto the other, preserving the group
    tree, quantifiers, box rows, edges and the SELECT box.

    The search backtracks through every choice (group pairing, box pairing,
    row pairing) before the final edge comparison, so an unlucky early
    bijection cannot cause a false negative.
    """
    if len(a.groups) != len(b.groups) or len(a.edges) != len(b.edges):
        return False
    if len(a.select_box.rows) != len(b.select_box.rows):
        return False
    from .logic import _Relabeling  # shared backtracking mapper

    kids_a = _children_index(a)
    kids_b = _children_index(b)
    by_id_a = {g.id: g for g in a.groups}
    by_id_b = {g.id: g for g in b.groups}
    mapping = _Relabeling()

    def match_groups(pairs: list[tuple[str, str]], cont) -> bool:
        if not pairs:
            return cont()
        (ia, ib), rest = pairs[0], pairs[1:]
        ga, gb = by_id_a[ia], by_id_b[ib]
        if ga.quantifier is not gb.quantifier or ga.depth != gb.depth:
            return False
        if len(ga.tables) != len(gb.tables):
            return False
        ca, cb = kids_a.get(ia, []), kids_b.get(ib, [])
        if len(ca) != len(cb):
            return False
        return match_boxes(list(ga.tables), list(gb.tables),
                           lambda: pair_children(ca, cb, rest, cont))

    def pair_children(ca: list[str], cb: list[str], rest, cont) -> bool:
        if not ca:
            return match_groups(rest, cont)
        head, tail = ca[0], ca[1:]
        for j, cand in enumerate(cb):
            mark = mapping.mark()
            if pair_children(tail, cb[:j] + cb[j + 1:], rest + [(head, cand)], cont):
                return True
            mapping.undo(mark)
        return False

    def match_boxes(boxes_a: list[TableBox], boxes_b: list[TableBox], cont) -> bool:
        if not boxes_a:
            return cont()
        head, rest = boxes_a[0], boxes_a[1:]
        for j, cand in enumerate(boxes_b):
            if len(head.rows) != len(cand.rows):
                continue
            mark = mapping.mark()
            if (mapping.try_pair("alias", head.alias, cand.alias)
                    and mapping.try_pair("table", head.table_name, cand.table_name)
                    and match_rows(list(head.rows), list(cand.rows),
                                   lambda: match_boxes(rest, boxes_b[:j] + boxes_b[j + 1:], cont))):
                return True
            mapping.undo(mark)
        return False

    def match_rows(rows_a: list[Row], rows_b: list[Row], cont) -> bool:
        if not rows_a:
            return cont()
        head, rest = rows_a[0], rows_a[1:]
        for j, cand in enumerate(rows_b):
            if type(head) is not type(cand):
                continue
            mark = mapping.mark()
            ok = mapping.try_pair("attr", head.attribute, cand.attribute)
            if ok and isinstance(head, SelectionRow):
                assert isinstance(cand, SelectionRow)
                ok = (head.op == cand.op and head.constant.kind == cand.constant.kind
                      and mapping.try_pair("const", head.constant.literal, cand.constant.literal))
            if ok and match_rows(rest, rows_b[:j] + rows_b[j + 1:], cont):
                return True
            mapping.undo(mark)
        return False

    def edges_match() -> bool:
        def translate(pair: tuple[str, str]):
            return (mapping.forward.get(("alias", pair[0]), "\0" + pair[0]),
                    mapping.forward.get(("attr", pair[1]), "\0" + pair[1]))

        def canon(src, dst, directed, label):
            # an undirected edge's stored endpoint order is a label-dependent
            # convention, so compare it orientation-free
            if not directed and src > dst:
                src, dst, label = dst, src, label and FLIPPED_OP[label]
            return (src, dst, directed, label or "")

        edges_a = sorted(canon(translate(e.src), translate(e.dst), e.directed, e.label)
                         for e in a.edges)
        edges_b = sorted(canon(e.src, e.dst, e.directed, e.label) for e in b.edges)
        if edges_a != edges_b:
            return False
        if [translate(link) for link in a.select_box.links] != list(b.select_box.links):
            return False
        rows_a = [mapping.forward.get(("attr", r)) for r in a.select_box.rows]
        return rows_a == list(b.select_box.rows)

    root_a = next(g for g in a.groups if g.parent is None)
    root_b = next(g for g in b.groups if g.parent is None)
    return match_groups([(root_a.id, root_b.id)], edges_match)


def _children_index(d: Diagram) -> dict[str, list[str]]:
    index: dict[str, list[str]] = {}
    for g in d.groups:
        if g.parent is not None:
            index.setdefault(g.parent, []).append(g.id)
    return index
