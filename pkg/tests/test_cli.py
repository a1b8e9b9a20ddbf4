import json

import pytest

from xtt.cli import main
from xtt.coreio import from_sexp, read_sexp
from xtt.harness.corpus import corpus_file


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def prelude():
    return str(corpus_file("prelude.xtt"))


def test_normalize(capsys):
    assert main(["normalize", "-e", "coe 0 1 (i. bool^) tt", "-t", "El bool^"]) == 0
    assert capsys.readouterr().out.strip() == "tt"


def test_normalize_with_loaded_definitions(capsys):
    code = main(["normalize", "-l", prelude(), "-e", "sym bool^ tt tt (<_> tt)",
                 "-t", "path (_. bool) tt tt"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "<i> tt"


def test_normalize_type_error_exits_1(capsys):
    assert main(["normalize", "-e", "tt tt", "-t", "bool"]) == 1
    assert "E004" in capsys.readouterr().err


def test_face(capsys):
    assert main(["face", "-c", "i", "-q", "dd i"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "verdict: false"
    assert main(["face", "-c", "i, j, i = j \\/ j = 0, j = 1", "-q", "i = 1"]) == 0
    out = capsys.readouterr().out
    assert "verdict: true" in out and "inconsistent" in out


def test_face_json(capsys):
    assert main(["face", "--report", "json-lines", "-c", "i, dd i", "-q", "dd i"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["verdict"] is True and len(obj["branches"]) == 2


def test_check_prelude(capsys):
    assert main(["check", prelude()]) == 0
    assert capsys.readouterr().out.strip().endswith("declarations ok")


def test_check_stops_at_first_failure(tmp_path, capsys):
    f = write(tmp_path, "bad.xtt", "#check tt tt : bool\n#check tt : bool\n")
    assert main(["check", f]) == 1
    out = capsys.readouterr().out
    assert f"{f}:1:" in out and "error E004" in out
    assert "0/1 declarations ok" in out
    assert main(["check", "--continue", f]) == 1
    assert "1/2 declarations ok" in capsys.readouterr().out


def test_parse_error_exits_2(tmp_path, capsys):
    f = write(tmp_path, "syntax.xtt", "def id : bool = λ x")
    assert main(["check", f]) == 2
    assert "E001" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["check", str(tmp_path / "absent.xtt")]) == 2


def test_bad_split_budget(monkeypatch, capsys):
    monkeypatch.setenv("XTT_MAX_SPLITS", "-1")
    assert main(["normalize", "-e", "tt", "-t", "bool"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["normalize", "--max-splits", "x", "-e", "tt", "-t", "bool"])
    assert exc.value.code == 2


def test_json_lines_are_deterministic(capsys):
    args = ["check", "--report", "json-lines", "--no-timing", prelude(), str(corpus_file("uip.xtt"))]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    rows = [json.loads(line) for line in first.splitlines()]
    assert all(r["status"] == "ok" and r["elapsed-ms"] == 0 for r in rows)
    assert {"name", "kind", "status", "file"} <= set(rows[0])


def test_emit_core_round_trips(capsys):
    assert main(["emit-core", prelude()]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("(def ") for line in lines)
    for line in lines:
        tag, name, ty, body = read_sexp(line)
        assert tag == "def"
        from_sexp(ty)
        from_sexp(body)


def test_fuzz_small_run(capsys):
    assert main(["fuzz", "-n", "30", "--seed", "7"]) == 0
    assert capsys.readouterr().out.startswith("30/30 canonical")


def test_fuzz_json_lines(capsys):
    assert main(["fuzz", "-n", "5", "--report", "json-lines"]) == 0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["name"] for r in rows] == [f"fuzz-{k}" for k in range(5)]
    assert all(r["result"] in ("tt", "ff") for r in rows)
