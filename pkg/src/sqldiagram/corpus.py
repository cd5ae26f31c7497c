"""Seeded random corpus of non-degenerate Logic Trees and databases.

The generator builds trees that satisfy the validity rules by construction:
every predicate references a local attribute, every nested block either
references its parent or has all of its children reference both the block
and the block's parent, references only go to ancestors, aliases are
globally unique and depth never exceeds 3.
"""

from __future__ import annotations

import random

from .logic import LogicTree, LtNode, Predicate, Quantifier, make_node
from .sqlast import ColumnRef, Constant

SCHEMA = {
    "R": ("a", "b"),
    "S": ("a", "b", "c"),
    "T": ("x", "y"),
    "U": ("u", "v"),
}

_OPS = ("=", "=", "=", "<", "<=", "<>", ">=", ">")


class _Budget:
    def __init__(self, nodes: int):
        self.remaining = nodes

    def take(self) -> bool:
        if self.remaining <= 0:
            return False
        self.remaining -= 1
        return True


def random_logic_tree(rng: random.Random, *, max_depth: int = 3, max_children: int = 3,
                      max_tables: int = 2, max_nodes: int = 8) -> LogicTree:
    """A random valid Logic Tree using exists/not-exists quantifiers only."""
    counter = [0]
    budget = _Budget(max_nodes - 1)

    def fresh_tables() -> list[tuple[str, str]]:
        tables = []
        for _ in range(rng.randint(1, max_tables)):
            counter[0] += 1
            tables.append((f"A{counter[0]}", rng.choice(sorted(SCHEMA))))
        return tables

    def attr_of(table: str) -> str:
        return rng.choice(SCHEMA[table])

    def join_pred(local: tuple[str, str], target: tuple[str, str]) -> Predicate:
        return Predicate(
            lhs=ColumnRef(alias=local[0], attribute=attr_of(local[1])),
            op=rng.choice(_OPS),
            rhs=ColumnRef(alias=target[0], attribute=attr_of(target[1])))

    def selection_pred(local: tuple[str, str]) -> Predicate:
        return Predicate(
            lhs=ColumnRef(alias=local[0], attribute=attr_of(local[1])),
            op=rng.choice(_OPS),
            rhs=Constant(kind="number", literal=str(rng.randint(0, 2))))

    def gen(depth: int, ancestors: list[list[tuple[str, str]]],
            forced_targets: list[tuple[str, str]], quantifier: Quantifier) -> LtNode:
        tables = fresh_tables()
        predicates = [join_pred(rng.choice(tables), target) for target in forced_targets]

        wanted_children = 0
        if depth < max_depth:
            wanted_children = rng.choice((0, 0, 1, 1, 2, max_children))
        n_children = 0
        while n_children < wanted_children and budget.take():
            n_children += 1

        parent_tables = ancestors[-1] if ancestors else None
        mediated = False
        if depth > 0 and not forced_targets:
            mediated = n_children > 0 and rng.random() < 0.35
            if not mediated:
                predicates.append(join_pred(rng.choice(tables), rng.choice(parent_tables)))
        if rng.random() < 0.3:
            predicates.append(selection_pred(rng.choice(tables)))
        if ancestors and rng.random() < 0.25:
            level = rng.randrange(len(ancestors))
            predicates.append(join_pred(rng.choice(tables), rng.choice(ancestors[level])))
        if len(tables) == 2 and rng.random() < 0.3:
            predicates.append(join_pred(tables[0], tables[1]))

        children = []
        for _ in range(n_children):
            forced: list[tuple[str, str]] = []
            if mediated:
                forced = [rng.choice(tables), rng.choice(parent_tables)]
            child_q = rng.choice((Quantifier.EXISTS, Quantifier.NOT_EXISTS))
            children.append(gen(depth + 1, ancestors + [tables], forced, child_q))
        return make_node(tables, predicates, quantifier, children)

    root = gen(0, [], [], Quantifier.ROOT)
    alias, table = root.tables[0]
    select = tuple(ColumnRef(alias=alias, attribute=attr)
                   for attr in sorted(SCHEMA[table])[:rng.randint(1, 2)])
    return LogicTree(root=root, select_list=select)


def random_database(rng: random.Random, lt: LogicTree, *, max_rows: int = 2,
                    domain: tuple[int, ...] = (0, 1, 2)) -> dict[str, list[dict[str, int]]]:
    """A random instance for every table name the tree mentions."""
    tables = sorted({table for _, node, _ in lt.walk() for _, table in node.tables})
    db = {}
    for table in tables:
        rows = []
        for _ in range(rng.randint(0, max_rows)):
            rows.append({attr: rng.choice(domain) for attr in SCHEMA[table]})
        db[table] = rows
    return db
