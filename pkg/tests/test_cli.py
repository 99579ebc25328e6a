import io
import json

import pytest

from koszulprop.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_dims_nilpotent():
    code, text = call("dims", "--preset", "nilpotent-algebra", "--max-weight", "4")
    assert code == 0
    rows = [line.split() for line in text.splitlines()[2:]]
    assert [r[3] for r in rows] == ["1", "0", "0", "0"]


def test_dims_json_schema():
    code, text = call("dims", "--preset", "lie-operad", "--max-biarity", "5", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["command"] == "dims"
    assert {"m", "n", "weight", "dim"} == set(doc["rows"][0])
    assert [r["dim"] for r in doc["rows"] if r["m"] == 1] == [1, 2, 6]


def test_free_and_dual():
    code, text = call("free", "--preset", "bilie", "--component", "1,3", "--format", "json")
    assert code == 0
    assert [r["dim"] for r in json.loads(text)["rows"]] == [3]
    code, text = call("dual", "--preset", "nilpotent-algebra", "--max-weight", "6", "--max-biarity", "2",
                      "--format", "json")
    assert [r["dim"] for r in json.loads(text)["rows"]] == [1] * 6


def test_d2_report():
    code, text = call("d2", "--preset", "ass-operad", "--max-weight", "2", "--max-biarity", "4")
    assert code == 0 and "all differentials square to zero" in text


def test_koszul_exit_codes():
    code, text = call("koszul", "--preset", "lie-operad", "--max-biarity", "4")
    assert code == 0 and "KOSZUL-UP-TO-TRUNCATION" in text
    code, text = call("koszul", "--preset", "anti-ass-operad", "--max-weight", "4", "--component", "1,5")
    assert code == 1 and "NOT-KOSZUL" in text and "witness" in text


def test_barcobar():
    code, text = call("barcobar", "--preset", "nilpotent-algebra", "--max-weight", "4", "--max-biarity", "2")
    assert code == 0 and "resolution holds" in text


def test_gebra(tmp_path):
    good = {"dimension": 2, "maps": [
        {"generator": "b", "entries": [[[1], [0, 1], "1"], [[1], [1, 0], "-1"]]},
        {"generator": "c", "entries": [[[0, 1], [1], "1"], [[1, 0], [1], "-1"]]}]}
    f = tmp_path / "s.json"
    f.write_text(json.dumps(good))
    assert call("gebra", "--preset", "bilie", "--structure", str(f))[0] == 0
    good["maps"][1]["entries"][1][2] = "1"
    f.write_text(json.dumps(good))
    code, text = call("gebra", "--preset", "bilie", "--structure", str(f))
    assert code == 1 and "FAIL" in text


def test_presentation_file(tmp_path):
    from koszulprop.presets import load_preset, serialize_presentation
    f = tmp_path / "p.json"
    f.write_text(json.dumps(serialize_presentation(load_preset("com-operad"))))
    code, text = call("dims", "--file", str(f), "--max-biarity", "4", "--format", "json")
    assert code == 0 and [r["dim"] for r in json.loads(text)["rows"]] == [1, 1]


@pytest.mark.parametrize("argv", [
    ["dims"],
    ["dims", "--preset", "bilie", "--file", "x.json"],
    ["dims", "--preset", "nope"],
    ["dims", "--preset", "bilie", "--max-weight", "0"],
    ["dims", "--preset", "bilie", "--component", "7,7"],
    ["dims", "--preset", "bilie", "--component", "a"],
    ["dims", "--file", "/nonexistent/p.json"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, io.StringIO()) == 2


def test_malformed_file(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"generators": [{"id": "b", "outputs": 1, "inputs": 2}],
                             "relations": [{"component": [1, 3], "terms": [{"graph": "u:b; in[1]->u.in[1]"}]}]}))
    assert run(["dims", "--file", str(f)], io.StringIO()) == 2


def test_deterministic_output(monkeypatch):
    a = call("koszul", "--preset", "bilie0", "--format", "json")[1]
    monkeypatch.setenv("KOSZULPROP_JOBS", "3")
    b = call("koszul", "--preset", "bilie0", "--format", "json")[1]
    assert a == b
