import pytest

from sqldiagram import parse, print_sql, resolve_scopes
from sqldiagram.errors import SqlSyntaxError, UnsupportedFeatureError
from sqldiagram.fixtures import ONLY_LIKED_DRINKS, SOME_LIKED_DRINK, VALID_QUERIES
from sqldiagram.sqlast import (
    ColumnRef,
    Comparison,
    Constant,
    Exists,
    InSubquery,
    QuantifiedComparison,
    iter_predicates,
)


def test_conjunctive_query_shape():
    ast = parse(SOME_LIKED_DRINK)
    assert [t.alias for t in ast.from_list] == ["F", "L", "S"]
    assert [t.table_name for t in ast.from_list] == ["Frequents", "Likes", "Serves"]
    preds = list(iter_predicates(ast.where_clause))
    assert len(preds) == 3
    assert all(isinstance(p, Comparison) and p.op == "=" for p in preds)
    assert all(isinstance(p.rhs, ColumnRef) for p in preds)


def test_minimal_query_no_where():
    ast = parse("SELECT T.a FROM T")
    assert ast.from_list == (parse("SELECT T.a FROM T").from_list[0],)
    assert ast.from_list[0].alias == "T"
    assert ast.from_list[0].table_name == "T"
    assert ast.where_clause is None
    assert ast.select_list == (ColumnRef(alias="T", attribute="a"),)


def test_doubly_nested_not_exists():
    ast = parse(ONLY_LIKED_DRINKS)
    (outer,) = [p for p in iter_predicates(ast.where_clause)]
    assert isinstance(outer, Exists) and outer.negated
    inner = [p for p in iter_predicates(outer.subquery.where_clause)
             if isinstance(p, Exists)]
    assert len(inner) == 1 and inner[0].negated
    # keywords are case-insensitive ("not exists" in the source)
    assert outer.subquery.select_list == ()  # SELECT *


def test_keywords_case_insensitive_identifiers_preserved():
    ast = parse("select Foo.Bar from Tab Foo where Foo.Bar = 'x'")
    assert ast.from_list[0].table_name == "Tab"
    assert ast.from_list[0].alias == "Foo"
    assert ast.select_list[0].attribute == "Bar"


def test_or_rejected():
    with pytest.raises(UnsupportedFeatureError) as exc:
        parse("SELECT F.person FROM Frequents F WHERE F.bar = 'Owl' OR F.bar = 'Fox'")
    assert exc.value.feature == "OR"


@pytest.mark.parametrize("sql,feature", [
    ("SELECT DISTINCT T.a FROM T", "DISTINCT"),
    ("SELECT T.a FROM T GROUP BY T.a", "GROUP BY"),
    ("SELECT T.a FROM T ORDER BY T.a", "ORDER BY"),
    ("SELECT T.a FROM T LIMIT 1", "LIMIT"),
    ("SELECT T.a FROM T HAVING T.a = 1", "HAVING"),
    ("SELECT T.a FROM T UNION SELECT S.a FROM S", "UNION"),
    ("SELECT T.a FROM T LEFT OUTER JOIN S ON T.a = S.a", "outer join"),
    ("SELECT COUNT(T.a) FROM T", "aggregate"),
    ("SELECT T.a FROM T WHERE T.a = T.b + 1", "arithmetic expression"),
    ("SELECT T.a FROM T WHERE T.a = -1", "arithmetic expression"),
])
def test_unsupported_features(sql, feature):
    with pytest.raises(UnsupportedFeatureError) as exc:
        parse(sql)
    assert exc.value.feature == feature


def test_syntax_error_carries_position():
    with pytest.raises(SqlSyntaxError) as exc:
        parse("SELECT T.a FROM T WHERE T.a =")
    assert exc.value.line == 1
    assert exc.value.column == 30


def test_root_star_rejected():
    with pytest.raises(SqlSyntaxError):
        parse("SELECT * FROM T")


def test_two_constant_comparison_rejected():
    with pytest.raises(SqlSyntaxError):
        parse("SELECT T.a FROM T WHERE 3 = 3")


def test_constant_on_left_is_normalized():
    ast = parse("SELECT T.a FROM T WHERE 3 < T.a")
    (pred,) = list(iter_predicates(ast.where_clause))
    assert isinstance(pred, Comparison)
    assert pred.lhs == ColumnRef(alias="T", attribute="a")
    assert pred.op == ">"
    assert pred.rhs == Constant(kind="number", literal="3")


def test_string_constant_content_preserved():
    ast = parse("SELECT T.a FROM T WHERE T.a = 'Owl  Fox'")
    (pred,) = list(iter_predicates(ast.where_clause))
    assert pred.rhs == Constant(kind="string", literal="Owl  Fox")


def test_in_and_quantified_forms():
    ast = parse("SELECT T.a FROM T WHERE T.a NOT IN (SELECT S.b FROM S) "
                "AND T.a > ALL (SELECT S.b FROM S) "
                "AND NOT T.a = ANY (SELECT S.b FROM S)")
    preds = list(iter_predicates(ast.where_clause))
    assert isinstance(preds[0], InSubquery) and preds[0].negated
    assert isinstance(preds[1], QuantifiedComparison) and preds[1].mode == "ALL"
    assert isinstance(preds[2], QuantifiedComparison)
    assert preds[2].negated and preds[2].mode == "ANY" and preds[2].op == "="


def test_trailing_semicolon_accepted():
    assert parse("SELECT T.a FROM T;") == parse("SELECT T.a FROM T")


def test_print_parse_round_trip_on_fixture_corpus():
    for name, sql in VALID_QUERIES.items():
        first = parse(sql)
        assert parse(print_sql(first)) == first, name
        resolved = resolve_scopes(first)
        assert parse(print_sql(resolved)) == resolved, name


def test_printer_output_is_single_canonical_line():
    text = print_sql(parse(ONLY_LIKED_DRINKS))
    assert "\n" not in text
    assert text.startswith("SELECT F.person FROM Frequents F WHERE NOT EXISTS (")
