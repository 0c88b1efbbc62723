import json

import pytest

from gcmu.cli import EXIT_ERROR, EXIT_SAT, EXIT_UNSAT, EXIT_USAGE, main

from conftest import EX1, EX2_TEXT


@pytest.fixture
def files(tmp_path):
    (tmp_path / "ex1.mu").write_text(EX1 + "\n")
    (tmp_path / "ex2.mu").write_text("// satisfiable\n" + EX2_TEXT + "\n")
    return tmp_path


def test_solve_exit_codes(files, capsys):
    assert main(["solve", str(files / "ex1.mu")]) == EXIT_UNSAT
    assert capsys.readouterr().out.startswith("Unsat\n")
    assert main(["solve", "-q", str(files / "ex2.mu")]) == EXIT_SAT
    assert capsys.readouterr().out == ""


def test_solve_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("<a> p & [a] ~p"))
    assert main(["solve", "-", "--order", "lifo", "--propagate", "every:2", "--principals", "all",
                 "--no-simplify"]) == EXIT_UNSAT


def test_model_then_check(files, capsys):
    model = files / "m.json"
    assert main(["solve", str(files / "ex2.mu"), "--model", str(model),
                 "--model-dot", str(files / "m.dot"), "--stats-csv", str(files / "s.csv")]) == EXIT_SAT
    assert json.loads(model.read_text())["format_version"] == 1
    assert (files / "m.dot").read_text().startswith("digraph kripke")
    header, row = (files / "s.csv").read_text().splitlines()
    assert header.split(",")[:2] == ["verdict", "expanded"] and row.startswith("Sat,")
    assert main(["check", str(model), str(files / "ex2.mu")]) == EXIT_SAT
    (files / "no.mu").write_text("AG p & AG q")
    assert main(["check", str(model), str(files / "no.mu")]) == EXIT_UNSAT
    assert main(["check", str(model), str(files / "ex2.mu"), "--state", "99"]) == EXIT_USAGE


def test_dumps(files, capsys):
    assert main(["solve", "-q", str(files / "ex2.mu"), "--dump-closure"]) == EXIT_SAT
    assert capsys.readouterr().out.startswith("0\t")
    assert main(["solve", "-q", str(files / "ex2.mu"), "--dump-graph", str(files / "g.dot"),
                 "--dump-propagation", str(files / "p.tsv")]) == EXIT_SAT
    assert (files / "g.dot").read_text().startswith("digraph focused")
    assert (files / "p.tsv").read_text().startswith("vertex\tlabel\tfocus")


def test_errors(files, capsys):
    (files / "bad.mu").write_text("p & (")
    assert main(["solve", str(files / "bad.mu")]) == EXIT_ERROR
    assert "ParseError" in capsys.readouterr().err
    (files / "ung.mu").write_text("mu X. (p | X)")
    assert main(["solve", str(files / "ung.mu")]) == EXIT_ERROR
    assert main(["solve", str(files / "missing.mu")]) == EXIT_ERROR
    assert main(["solve", str(files / "ex1.mu"), "--propagate", "sometimes"]) == EXIT_USAGE
    assert main(["solve", str(files / "ex1.mu"), "--max-expansions", "1",
                 "--propagate", "final"]) == EXIT_ERROR
    (files / "m.json").write_text("{}")
    assert main(["check", str(files / "m.json"), str(files / "ex1.mu")]) == EXIT_ERROR
    assert main([]) == EXIT_USAGE


def test_gen_pipes_into_solve(capsys, monkeypatch):
    import io
    assert main(["gen", "early", "--n", "3", "--j", "2", "--k", "1"]) == 0
    text = capsys.readouterr().out
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    assert main(["solve", "-q", "-"]) == EXIT_UNSAT
    assert main(["gen", "early", "--n", "3", "--j", "4", "--k", "2"]) == EXIT_USAGE
    assert main(["gen", "random", "--n", "12", "--seed", "3"]) == 0
    assert main(["gen", "counter", "--n", "2"]) == 0


def test_bench_csv_and_plot(tmp_path, capsys):
    out, png = tmp_path / "b.csv", tmp_path / "b.png"
    assert main(["bench", "counter", "--n", "1-2", "--out", str(out), "--plot", str(png)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "family,params,verdict,nodes,propagations,time_ms,config"
    assert len(lines) == 3
    assert png.stat().st_size > 0
    assert main(["bench", "early", "--n", "2", "--j", "1", "--k", "1"]) == 0
    assert ",Unsat," in capsys.readouterr().out
