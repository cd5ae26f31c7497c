"""AST for the supported SQL fragment.

A query is a SELECT list, a FROM list and an optional WHERE conjunction.
Predicates are comparisons (join or selection), EXISTS / IN / quantified
subqueries with optional negation, or a flat conjunction of those.  There
is deliberately no disjunction node, no grouping and no arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

COMPARE_OPS = ("<", "<=", "=", "<>", ">=", ">")

# Mirror image of an operator: used when the two operands swap places.
FLIPPED_OP = {"<": ">", "<=": ">=", "=": "=", "<>": "<>", ">": "<", ">=": "<="}

# Logical complement: NOT (a op b) == a COMPLEMENT_OP[op] b.
COMPLEMENT_OP = {"<": ">=", "<=": ">", "=": "<>", "<>": "=", ">": "<=", ">=": "<"}


@dataclass(frozen=True)
class Constant:
    kind: str  # "string" | "number"
    literal: str  # exact text, quotes stripped for strings

    def sql(self) -> str:
        if self.kind == "string":
            return "'" + self.literal + "'"
        return self.literal


@dataclass(frozen=True)
class ColumnRef:
    alias: str | None  # None until scope resolution qualifies it
    attribute: str
    # source position for diagnostics; never part of structural equality
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    def sql(self) -> str:
        return f"{self.alias}.{self.attribute}" if self.alias else self.attribute


@dataclass(frozen=True)
class TableRef:
    table_name: str
    alias: str  # equals table_name when the query gave no alias

    def sql(self) -> str:
        if self.alias == self.table_name:
            return self.table_name
        return f"{self.table_name} {self.alias}"


@dataclass(frozen=True)
class Comparison:
    lhs: ColumnRef
    op: str
    rhs: ColumnRef | Constant

    @property
    def is_selection(self) -> bool:
        return isinstance(self.rhs, Constant)


@dataclass(frozen=True)
class Exists:
    negated: bool
    subquery: "QueryAst"


@dataclass(frozen=True)
class InSubquery:
    negated: bool
    column: ColumnRef
    subquery: "QueryAst"


@dataclass(frozen=True)
class QuantifiedComparison:
    negated: bool
    column: ColumnRef
    op: str
    mode: str  # "ANY" | "ALL"
    subquery: "QueryAst"


@dataclass(frozen=True)
class Conjunction:
    parts: tuple["PredicateAst", ...]


PredicateAst = Comparison | Exists | InSubquery | QuantifiedComparison | Conjunction


@dataclass(frozen=True)
class QueryAst:
    select_list: tuple[ColumnRef, ...]  # empty tuple encodes SELECT * (subqueries only)
    from_list: tuple[TableRef, ...]
    where_clause: Conjunction | None


def iter_predicates(conj: Conjunction | None):
    """Yield the direct (non-conjunction) predicates of a WHERE clause."""
    if conj is None:
        return
    for part in conj.parts:
        if isinstance(part, Conjunction):
            yield from iter_predicates(part)
        else:
            yield part


def subqueries(conj: Conjunction | None) -> list[QueryAst]:
    """Direct subqueries of a block, in document order."""
    result = []
    for pred in iter_predicates(conj):
        if isinstance(pred, (Exists, InSubquery, QuantifiedComparison)):
            result.append(pred.subquery)
    return result
