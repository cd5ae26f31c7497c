import json
import random

import pytest

from sqldiagram.cli import run
from sqldiagram.corpus import random_logic_tree
from sqldiagram.fixtures import (
    ONLY_LIKED_DRINKS,
    OWL_SELECTION_BURIED,
    SOME_LIKED_DRINK,
    UNIQUE_BEER_SET,
    VALID_QUERIES,
)
from sqldiagram.logic import lt_to_sql


@pytest.fixture
def sql_file(tmp_path):
    def write(sql, name="query.sql"):
        path = tmp_path / name
        path.write_text(sql, encoding="utf-8")
        return str(path)
    return write


def test_viz_dot_to_stdout(sql_file, capsys):
    assert run(["viz", sql_file(SOME_LIKED_DRINK)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("digraph ")
    assert "t_SELECT" in out


def test_viz_no_simplify_emits_dashed_clusters(sql_file, capsys):
    assert run(["viz", "--no-simplify", sql_file(ONLY_LIKED_DRINKS)]) == 0
    out = capsys.readouterr().out
    assert out.count('style="rounded,dashed";') == 2


def test_viz_json_format(sql_file, capsys):
    assert run(["viz", "--format", "json", sql_file(UNIQUE_BEER_SET)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["groups"]) == 6


def test_viz_output_file(sql_file, tmp_path, capsys):
    target = tmp_path / "out.dot"
    assert run(["viz", sql_file(SOME_LIKED_DRINK), "-o", str(target)]) == 0
    assert target.read_text().startswith("digraph ")
    assert capsys.readouterr().out == ""


def test_viz_missing_renderer_is_only_a_warning(sql_file, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("SQLDIAGRAM_RENDERER", raising=False)
    target = tmp_path / "out.dot"
    assert run(["viz", sql_file(SOME_LIKED_DRINK), "-o", str(target), "--render", "svg"]) == 0
    assert "warning: no renderer" in capsys.readouterr().err


def test_viz_render_invokes_external_renderer(sql_file, tmp_path, monkeypatch):
    stub = tmp_path / "fake-dot"
    stub.write_text("#!/bin/sh\necho \"$@\" > \"$4\"\n")
    stub.chmod(0o755)
    monkeypatch.setenv("SQLDIAGRAM_RENDERER", str(stub))
    target = tmp_path / "out.dot"
    assert run(["viz", sql_file(SOME_LIKED_DRINK), "-o", str(target), "--render", "svg"]) == 0
    rendered = tmp_path / "out.svg"
    assert rendered.exists()
    assert f"-Tsvg {target} -o {rendered}" in rendered.read_text()


def test_lt_json(sql_file, capsys):
    assert run(["lt", sql_file(ONLY_LIKED_DRINKS)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["quantifier"] == "ROOT"
    assert doc["children"][0]["quantifier"] == "FOR_ALL"
    assert doc["select_list"] == ["F.person"]


def test_trc_text(sql_file, capsys):
    assert run(["trc", "--no-simplify", sql_file(ONLY_LIKED_DRINKS)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("{Q | ")
    assert "¬∃" in out


def test_check_clean_query(sql_file, capsys):
    assert run(["check", sql_file(UNIQUE_BEER_SET)]) == 0
    assert "ok:" in capsys.readouterr().out


def test_check_degenerate_query_exits_1(sql_file, capsys):
    assert run(["check", sql_file(OWL_SELECTION_BURIED)]) == 1
    out = capsys.readouterr().out
    assert "LocalAttributes" in out
    assert "F.bar = 'Owl'" in out


def test_viz_degenerate_query_exits_1(sql_file, capsys):
    assert run(["viz", sql_file(OWL_SELECTION_BURIED)]) == 1
    assert "error:" in capsys.readouterr().err


def test_parse_error_exits_2(sql_file, capsys):
    assert run(["viz", sql_file("SELECT FROM WHERE")]) == 2
    assert "error:" in capsys.readouterr().err


def test_unsupported_feature_exits_2(sql_file, capsys):
    assert run(["check", sql_file("SELECT T.a FROM T WHERE T.a = 1 OR T.a = 2")]) == 2
    assert "OR" in capsys.readouterr().err


def test_missing_file_exits_2(capsys):
    assert run(["viz", "/nonexistent/query.sql"]) == 2


def test_recover_from_diagram_json(sql_file, tmp_path, capsys):
    diagram_path = tmp_path / "diagram.json"
    assert run(["viz", "--format", "json", sql_file(UNIQUE_BEER_SET),
                "-o", str(diagram_path)]) == 0
    assert run(["recover", str(diagram_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["depths"] == {"g0_1": 0, "g1_1": 1, "g2_1": 2, "g3_1": 3,
                             "g2_2": 2, "g3_2": 3}
    assert doc["parents"]["g3_2"] == "g2_2"


def test_recover_malformed_json_exits_2(sql_file, capsys):
    assert run(["recover", sql_file("{not json", name="bad.json")]) == 2


def test_recover_invalid_diagram_exits_1(sql_file, tmp_path, capsys):
    diagram_path = tmp_path / "diagram.json"
    run(["viz", "--format", "json", sql_file(UNIQUE_BEER_SET), "-o", str(diagram_path)])
    doc = json.loads(diagram_path.read_text())
    doc["edges"] = [e for e in doc["edges"] if e["from"][0] != "L3"]  # cut a mandatory join
    diagram_path.write_text(json.dumps(doc))
    capsys.readouterr()
    assert run(["recover", str(diagram_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_roundtrip_fixture_queries(sql_file, capsys):
    for name, sql in VALID_QUERIES.items():
        assert run(["roundtrip", sql_file(sql, name=f"{name}.sql")]) == 0, name
        out = capsys.readouterr().out
        assert out.startswith("round trip ok:"), name


def test_roundtrip_generated_queries(sql_file, capsys):
    rng = random.Random(77)
    for i in range(25):
        sql = lt_to_sql(random_logic_tree(rng))
        assert run(["roundtrip", sql_file(sql, name=f"gen{i}.sql")]) == 0, sql
        capsys.readouterr()


def test_metrics(sql_file, capsys):
    assert run(["metrics", sql_file(SOME_LIKED_DRINK)]) == 0
    out = capsys.readouterr().out
    assert out == "elements: 15\nwords: 21\n"


def test_stdin_input(monkeypatch, capsys):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("SELECT T.a FROM Tab T"))
    assert run(["trc"]) == 0
    assert capsys.readouterr().out == "{Q | ∃T ∈ Tab [T.a = Q.a]}\n"


def test_byte_stability_across_runs(sql_file, capsys):
    commands = [
        ["viz", sql_file(UNIQUE_BEER_SET, name="u.sql")],
        ["viz", "--format", "json", sql_file(UNIQUE_BEER_SET, name="u.sql")],
        ["lt", sql_file(ONLY_LIKED_DRINKS, name="o.sql")],
        ["trc", sql_file(ONLY_LIKED_DRINKS, name="o.sql")],
        ["metrics", sql_file(SOME_LIKED_DRINK, name="s.sql")],
    ]
    for argv in commands:
        assert run(argv) == 0
        first = capsys.readouterr().out
        assert run(argv) == 0
        assert capsys.readouterr().out == first, argv


def test_usage_error_exits_2(capsys):
    assert run([]) == 2
    assert run(["frobnicate"]) == 2
