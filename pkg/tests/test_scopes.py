import pytest

from sqldiagram import parse, resolve_scopes, resolve_scopes_detailed
from sqldiagram.errors import AmbiguousColumnError, UnknownAliasError
from sqldiagram.fixtures import ONLY_LIKED_DRINKS, VALID_QUERIES
from sqldiagram.sqlast import Exists, iter_predicates


def _tables_per_block(ast):
    blocks = [sorted(t.table_name for t in ast.from_list)]
    for pred in iter_predicates(ast.where_clause):
        if hasattr(pred, "subquery"):
            blocks.extend(_tables_per_block(pred.subquery))
    return blocks


def test_nested_refs_resolve_through_scope_chain():
    ast = resolve_scopes(parse(ONLY_LIKED_DRINKS))
    (outer,) = list(iter_predicates(ast.where_clause))
    assert isinstance(outer, Exists)
    inner = [p for p in iter_predicates(outer.subquery.where_clause) if isinstance(p, Exists)][0]
    comparisons = [p for p in iter_predicates(inner.subquery.where_clause)
                   if not isinstance(p, Exists)]
    aliases = {p.lhs.alias for p in comparisons} | {p.rhs.alias for p in comparisons}
    assert aliases == {"L", "F", "S"}  # refs reach depth 0 (F) and depth 1 (S)


def test_unknown_alias_with_location():
    with pytest.raises(UnknownAliasError) as exc:
        resolve_scopes(parse("SELECT T.a FROM Tab T WHERE T.a = X.b"))
    assert exc.value.alias == "X"
    assert (exc.value.line, exc.value.column) == (1, 35)


def test_sibling_block_reference_is_unknown():
    sql = ("SELECT T.a FROM Tab T WHERE EXISTS (SELECT U.b FROM Us U) "
           "AND EXISTS (SELECT V.c FROM Vs V WHERE V.c = U.b)")
    with pytest.raises(UnknownAliasError):
        resolve_scopes(parse(sql))


def test_unqualified_column_single_table():
    ast = resolve_scopes(parse("SELECT a FROM T"))
    assert ast.select_list[0].alias == "T"


def test_unqualified_column_ambiguous():
    with pytest.raises(AmbiguousColumnError):
        resolve_scopes(parse("SELECT a FROM T, S"))


def test_duplicate_alias_same_block_rejected():
    with pytest.raises(AmbiguousColumnError):
        resolve_scopes(parse("SELECT L.a FROM Likes L, Serves L"))


def test_sibling_duplicate_aliases_renamed():
    sql = ("SELECT T.a FROM Tab T "
           "WHERE EXISTS (SELECT L.x FROM Likes L WHERE L.x = T.a) "
           "AND EXISTS (SELECT L.y FROM Likes L WHERE L.y = T.a)")
    resolved, renames = resolve_scopes_detailed(parse(sql))
    assert renames == {((1,), "L"): "L2"}
    subs = [p.subquery for p in iter_predicates(resolved.where_clause)]
    assert subs[0].from_list[0].alias == "L"
    assert subs[1].from_list[0].alias == "L2"
    assert subs[1].select_list[0].alias == "L2"
    # reparse of the printed form keeps aliases unique
    from sqldiagram import print_sql
    assert resolve_scopes(parse(print_sql(resolved))) == resolved


def test_shadowing_renamed_and_rebound():
    sql = ("SELECT L.a FROM Likes L "
           "WHERE EXISTS (SELECT L.b FROM Serves L WHERE L.b = 1)")
    resolved, renames = resolve_scopes_detailed(parse(sql))
    assert renames == {((0,), "L"): "L2"}
    (sub,) = [p.subquery for p in iter_predicates(resolved.where_clause)]
    assert sub.from_list[0].alias == "L2"
    (pred,) = [p for p in iter_predicates(sub.where_clause)]
    assert pred.lhs.alias == "L2"  # inner L meant the inner declaration
    assert resolved.select_list[0].alias == "L"


def test_rename_suffix_skips_taken_names():
    sql = ("SELECT T.a FROM Tab T, Other L2 "
           "WHERE EXISTS (SELECT L.x FROM Likes L WHERE L.x = T.a) "
           "AND EXISTS (SELECT L.y FROM Likes L WHERE L.y = T.a)")
    _, renames = resolve_scopes_detailed(parse(sql))
    assert renames == {((1,), "L"): "L3"}


def test_idempotent_on_fixture_corpus():
    for name, sql in VALID_QUERIES.items():
        once = resolve_scopes(parse(sql))
        assert resolve_scopes(once) == once, name


def test_table_multiset_per_block_unchanged():
    for name, sql in VALID_QUERIES.items():
        before = _tables_per_block(parse(sql))
        after = _tables_per_block(resolve_scopes(parse(sql)))
        assert before == after, name
