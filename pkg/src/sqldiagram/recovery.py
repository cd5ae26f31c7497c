"""Recover the nesting structure of a query from its diagram's group graph.

The group graph has one node per table group and one directed edge per
cross-group join (parallel attribute edges collapse, one edge per ordered
pair).  For depth-3 path-shaped graphs the six possible edge classes are

    A: 0->1   B: 1->2   C: 2->0   D: 2->3   E: 3->1   F: 3->0

and classification deduces the unique depth labeling per family: with A and
B present the chain is read off directly; with A but no B the depth-2 node
is the remaining node without incoming edges; without A the depth-2 node is
the in-neighbour of the root that points at the other one.  Branching
graphs are cut into such paths by removing the depth-0 / depth-1 / depth-2
node, splitting into weakly connected components and re-attaching the
removed nodes to each component.

brute_force_depths is the independent oracle: it enumerates every depth
labeling and parent tree, keeping those whose edges all obey the arrow rule
and whose nodes all satisfy the connected-subquery property.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum

from .diagram import Diagram
from .errors import InvalidDiagramError
from .logic import Quantifier


@dataclass(frozen=True)
class GroupNode:
    id: str
    quantifier: Quantifier = Quantifier.EXISTS
    tables: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class DiagramGraph:
    nodes: tuple[GroupNode, ...]
    edges: frozenset[tuple[str, str]]
    root_id: str

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(sorted(n.id for n in self.nodes))

    def out_neighbors(self, node_id: str) -> list[str]:
        return sorted(dst for src, dst in self.edges if src == node_id)

    def in_neighbors(self, node_id: str) -> list[str]:
        return sorted(src for src, dst in self.edges if dst == node_id)

    def subgraph(self, keep: set[str]) -> "DiagramGraph":
        return DiagramGraph(
            nodes=tuple(n for n in self.nodes if n.id in keep),
            edges=frozenset((s, d) for s, d in self.edges if s in keep and d in keep),
            root_id=self.root_id)

    def weakly_connected_components(self, ids: set[str]) -> list[set[str]]:
        remaining = set(ids)
        components = []
        while remaining:
            seed = min(remaining)
            component = {seed}
            frontier = [seed]
            while frontier:
                current = frontier.pop()
                for s, d in self.edges:
                    if s == current and d in remaining and d not in component:
                        component.add(d)
                        frontier.append(d)
                    elif d == current and s in remaining and s not in component:
                        component.add(s)
                        frontier.append(s)
            components.append(component)
            remaining -= component
        return sorted(components, key=min)


def make_graph(ids, edges, root_id: str) -> DiagramGraph:
    """Test/CLI helper: a DiagramGraph from bare node ids and edge pairs."""
    return DiagramGraph(nodes=tuple(GroupNode(id=i) for i in ids),
                        edges=frozenset(tuple(e) for e in edges), root_id=root_id)


def diagram_to_graph(d: Diagram) -> DiagramGraph:
    """Collapse a diagram to its group-level graph."""
    group_of = {box.alias: group.id for group in d.groups for box in group.tables}
    edges = set()
    for edge in d.edges:
        for alias, _ in (edge.src, edge.dst):
            if alias not in group_of:
                raise InvalidDiagramError(f"edge endpoint {alias!r} is not a table box")
        src, dst = group_of[edge.src[0]], group_of[edge.dst[0]]
        if src == dst:
            continue
        if not edge.directed:
            raise InvalidDiagramError(
                f"undirected edge between distinct groups {src} and {dst}")
        edges.add((src, dst))
    select_aliases = {alias for alias, _ in d.select_box.links}
    unknown = sorted(select_aliases - group_of.keys())
    if unknown:
        raise InvalidDiagramError(f"SELECT box links to unknown table {unknown[0]!r}")
    roots = sorted({group_of[a] for a in select_aliases})
    if len(roots) != 1:
        raise InvalidDiagramError(f"SELECT box links into {len(roots)} groups, expected 1")
    nodes = tuple(
        GroupNode(id=g.id, quantifier=g.quantifier,
                  tables=tuple((b.alias, b.table_name) for b in g.tables))
        for g in d.groups)
    return DiagramGraph(nodes=nodes, edges=frozenset(edges), root_id=roots[0])


class PathFamily(Enum):
    AB = "A,B"
    A_NOT_B = "A,not-B"
    NOT_A = "not-A"


@dataclass
class DepthAssignment:
    depths: dict[str, int] = field(default_factory=dict)
    parents: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {"depths": dict(sorted(self.depths.items())),
               "parents": dict(sorted(self.parents.items()))}
        return json.dumps(doc, indent=2) + "\n"


# -- shared validity checks -------------------------------------------------


def _edge_direction_ok(depth_src: int, depth_dst: int) -> bool:
    """Arrow rule: difference 1 points shallow->deep, >=2 points deep->shallow."""
    return depth_dst == depth_src + 1 or depth_src >= depth_dst + 2


def _edges_consistent(g: DiagramGraph, depths: dict[str, int]) -> bool:
    return all(_edge_direction_ok(depths[s], depths[d]) for s, d in g.edges)


def _connected_subqueries_ok(g: DiagramGraph, assignment: DepthAssignment) -> bool:
    """Graph form of the connected-subquery property: every non-root group
    joins its parent directly, or has children that all join both it and
    its parent."""
    children: dict[str, list[str]] = {}
    for child, parent in assignment.parents.items():
        children.setdefault(parent, []).append(child)
    for node in assignment.depths:
        if node == g.root_id:
            continue
        parent = assignment.parents[node]
        if (parent, node) in g.edges:
            continue
        kids = children.get(node, [])
        if kids and all((node, k) in g.edges and (k, parent) in g.edges for k in kids):
            continue
        return False
    return True


def _validate_assignment(g: DiagramGraph, assignment: DepthAssignment, stage: str) -> None:
    if not _edges_consistent(g, assignment.depths):
        raise InvalidDiagramError("edge directions contradict the depth labeling", stage)
    if not _connected_subqueries_ok(g, assignment):
        raise InvalidDiagramError("connected-subquery property fails", stage)


# -- path classification ----------------------------------------------------


def classify_path_pattern(g: DiagramGraph) -> tuple[PathFamily, DepthAssignment]:
    """Depth labeling for a path-shaped graph of at most 4 nodes."""
    stage = "path-classification"
    ids = list(g.node_ids)
    n = len(ids)
    if n > 4:
        raise InvalidDiagramError(f"path patterns have at most 4 nodes, got {n}", stage)
    root = g.root_id
    if root not in ids:
        raise InvalidDiagramError(f"root {root} missing from graph", stage)
    depths = {root: 0}

    if n == 1:
        if g.edges:
            raise InvalidDiagramError("single-node graph with edges", stage)
        return PathFamily.AB, DepthAssignment(depths={root: 0}, parents={})

    out_root = g.out_neighbors(root)
    if out_root:
        if len(out_root) > 1:
            raise InvalidDiagramError("root has outgoing edges to several groups", stage)
        d1 = out_root[0]
        depths[d1] = 1
        remaining = [x for x in ids if x not in (root, d1)]
        if not remaining:
            family = PathFamily.AB
        else:
            b_targets = [t for t in g.out_neighbors(d1) if t != root]
            if b_targets:
                family = PathFamily.AB
                if len(b_targets) > 1:
                    raise InvalidDiagramError("depth-1 group links to several groups", stage)
                d2 = b_targets[0]
                depths[d2] = 2
                last = [x for x in remaining if x != d2]
                if last:
                    depths[last[0]] = 3
            else:
                family = PathFamily.A_NOT_B
                if len(remaining) != 2:
                    raise InvalidDiagramError("no link into the depth-2 group", stage)
                x, y = remaining
                has_xy = (x, y) in g.edges
                has_yx = (y, x) in g.edges
                if has_xy == has_yx:
                    raise InvalidDiagramError("cannot order the depth-2/3 groups", stage)
                d2, d3 = (x, y) if has_xy else (y, x)
                depths[d2], depths[d3] = 2, 3
    else:
        family = PathFamily.NOT_A
        in_root = g.in_neighbors(root)
        if not in_root or n == 2:
            raise InvalidDiagramError("root is disconnected", stage)
        if len(in_root) == 1:
            d2 = in_root[0]
        elif len(in_root) == 2:
            p, q = in_root
            p_to_q = (p, q) in g.edges
            q_to_p = (q, p) in g.edges
            if p_to_q == q_to_p:
                raise InvalidDiagramError("cannot tell the depth-2 group apart", stage)
            d2 = p if p_to_q else q
        else:
            raise InvalidDiagramError("more than two groups link into the root", stage)
        depths[d2] = 2
        in_d2 = g.in_neighbors(d2)
        if len(in_d2) != 1:
            raise InvalidDiagramError("depth-2 group needs exactly one incoming edge", stage)
        d1 = in_d2[0]
        depths[d1] = 1
        d3_candidates = [t for t in g.out_neighbors(d2) if t != root]
        if len(d3_candidates) > 1:
            raise InvalidDiagramError("depth-2 group links to several groups", stage)
        if d3_candidates:
            depths[d3_candidates[0]] = 3

    if len(depths) != n:
        raise InvalidDiagramError("some groups were left unlabeled", stage)
    by_depth = sorted(depths, key=depths.get)
    if sorted(depths.values()) != list(range(n)):
        raise InvalidDiagramError("depth labeling is not a path", stage)
    parents = {by_depth[i]: by_depth[i - 1] for i in range(1, n)}
    assignment = DepthAssignment(depths=depths, parents=parents)
    _validate_assignment(g, assignment, stage)
    return family, assignment


# -- decompositions ----------------------------------------------------------


def decompose_depth0(g: DiagramGraph) -> list[DiagramGraph]:
    """Split at the root: one subgraph (root re-attached) per root subtree."""
    others = set(g.node_ids) - {g.root_id}
    return [g.subgraph(component | {g.root_id})
            for component in g.weakly_connected_components(others)]


def identify_depth1(g: DiagramGraph) -> str:
    """The depth-1 group of a depth-0 decomposition output."""
    stage = "depth-1-identification"
    root = g.root_id
    out_root = g.out_neighbors(root)
    if out_root:
        if len(out_root) > 1:
            raise InvalidDiagramError("root has outgoing edges to several groups", stage)
        return out_root[0]
    # No edge from the root: every depth-2 group must link to the root, so
    # candidates are the groups not adjacent to it.  Removing the depth-1
    # group (and the root) disconnects the depth-2 subtrees from each other.
    adjacent = set(g.in_neighbors(root)) | set(out_root)
    candidates = [x for x in g.node_ids if x != root and x not in adjacent]
    if not candidates:
        raise InvalidDiagramError("no candidate for the depth-1 group", stage)
    without_root = set(g.node_ids) - {root}
    for candidate in candidates:
        components = g.weakly_connected_components(without_root - {candidate})
        if len(components) > 1:
            return candidate
    # No disconnection: the depth-1 group has a single child.  Either the
    # graph is a path, or that child branches and is the max-out-degree node.
    trimmed = g.subgraph(without_root)
    try:
        _, assignment = classify_path_pattern(g)
    except InvalidDiagramError:
        pass
    else:
        for node, depth in assignment.depths.items():
            if depth == 1:
                return node
    out_degrees = {node: len(trimmed.out_neighbors(node)) for node in trimmed.node_ids}
    best = max(out_degrees.values(), default=0)
    peaked = [node for node, deg in out_degrees.items() if deg == best]
    if best < 2 or len(peaked) != 1:
        raise InvalidDiagramError("cannot locate the depth-2 group", stage)
    d2 = peaked[0]
    direct = trimmed.in_neighbors(d2)
    if direct:
        return direct[0]
    kids = trimmed.out_neighbors(d2)
    mediated = [set(trimmed.out_neighbors(k)) for k in kids]
    common = set.intersection(*mediated) if mediated else set()
    if len(common) == 1:
        return common.pop()
    raise InvalidDiagramError("no consistent depth-1 group exists", stage)


def decompose_depth1(g: DiagramGraph, d1: str) -> list[DiagramGraph]:
    """Split below the depth-1 group: root and depth-1 re-attached to each
    subtree of the depth-1 group."""
    others = set(g.node_ids) - {g.root_id, d1}
    return [g.subgraph(component | {g.root_id, d1})
            for component in g.weakly_connected_components(others)]


def identify_depth2(g: DiagramGraph) -> str:
    """The depth-2 group of a branching depth-1 decomposition output: after
    dropping the root, the unique node with maximal out-degree."""
    stage = "depth-2-identification"
    trimmed = g.subgraph(set(g.node_ids) - {g.root_id})
    out_degrees = {node: len(trimmed.out_neighbors(node)) for node in trimmed.node_ids}
    best = max(out_degrees.values(), default=0)
    peaked = [node for node, deg in out_degrees.items() if deg == best]
    if best < 1 or len(peaked) != 1:
        raise InvalidDiagramError("out-degree tie among depth-2 candidates", stage)
    return peaked[0]


def decompose_depth2(g: DiagramGraph, d1: str, d2: str) -> list[DiagramGraph]:
    others = set(g.node_ids) - {g.root_id, d1, d2}
    return [g.subgraph(component | {g.root_id, d1, d2})
            for component in g.weakly_connected_components(others)]


# -- full recovery ------------------------------------------------------------


def recover_depths(g: DiagramGraph) -> DepthAssignment:
    """Unique depth/parent assignment for a valid diagram graph.

    Decomposes at depth 0, then 1, then 2 until every piece is a classifiable
    path, and merges the per-piece labelings.
    """
    ids = set(g.node_ids)
    if g.root_id not in ids:
        raise InvalidDiagramError(f"root {g.root_id} missing from graph", "recovery")
    if len(g.weakly_connected_components(ids)) != 1:
        raise InvalidDiagramError("graph is not weakly connected", "recovery")
    merged = DepthAssignment(depths={g.root_id: 0}, parents={})
    for subgraph in decompose_depth0(g):
        _merge(merged, _recover_subtree(subgraph))
    _validate_assignment(g, merged, "recovery")
    return merged


def _recover_subtree(g: DiagramGraph) -> DepthAssignment:
    try:
        return classify_path_pattern(g)[1]
    except InvalidDiagramError:
        pass
    d1 = identify_depth1(g)
    merged = DepthAssignment(depths={g.root_id: 0, d1: 1}, parents={d1: g.root_id})
    for part in decompose_depth1(g, d1):
        try:
            assignment = classify_path_pattern(part)[1]
        except InvalidDiagramError:
            d2 = identify_depth2(part)
            assignment = DepthAssignment(
                depths={part.root_id: 0, d1: 1, d2: 2}, parents={d1: part.root_id, d2: d1})
            for piece in decompose_depth2(part, d1, d2):
                piece_assignment = classify_path_pattern(piece)[1]
                _merge(assignment, piece_assignment)
        if assignment.depths.get(d1) != 1:
            raise InvalidDiagramError("decomposition disagrees on the depth-1 group",
                                      "depth-1-decomposition")
        _merge(merged, assignment)
    return merged


def _merge(target: DepthAssignment, part: DepthAssignment) -> None:
    for node, depth in part.depths.items():
        if target.depths.setdefault(node, depth) != depth:
            raise InvalidDiagramError(f"conflicting depths recovered for {node}", "merge")
    for node, parent in part.parents.items():
        if target.parents.setdefault(node, parent) != parent:
            raise InvalidDiagramError(f"conflicting parents recovered for {node}", "merge")


# -- independent oracle --------------------------------------------------------


def brute_force_depths(g: DiagramGraph, max_depth: int = 3) -> list[DepthAssignment]:
    """Every depth labeling plus parent tree that satisfies the arrow rule
    and the connected-subquery property.  Exponential; keep graphs small."""
    others = sorted(set(g.node_ids) - {g.root_id})
    if len(others) > 11:
        raise ValueError("brute force is limited to 12 nodes")
    survivors: list[DepthAssignment] = []
    for depth_combo in itertools.product(range(1, max_depth + 1), repeat=len(others)):
        depths = {g.root_id: 0}
        depths.update(zip(others, depth_combo))
        if not _edges_consistent(g, depths):
            continue
        candidate_parents = []
        feasible = True
        for node in others:
            options = [p for p in depths if depths[p] == depths[node] - 1]
            if not options:
                feasible = False
                break
            candidate_parents.append(options)
        if not feasible:
            continue
        for parent_combo in itertools.product(*candidate_parents):
            assignment = DepthAssignment(depths=dict(depths),
                                         parents=dict(zip(others, parent_combo)))
            if _connected_subqueries_ok(g, assignment):
                survivors.append(assignment)
    return survivors
