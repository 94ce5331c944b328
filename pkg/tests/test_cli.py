import csv
import io
import json

import pytest

from bigramsey.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text):
    return [l for l in text.splitlines() if not l.startswith("#")]


def test_degrees_order(capsys):
    code, out, _ = run(capsys, "degrees", "--class", "linear-order", "--max-size", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO("\n".join(body(out)))))
    assert rows[0] == ["spec", "target", "degree", "methods", "depth", "flags"]
    assert [r[2] for r in rows[1:]] == ["1", "2", "16", "272"]


def test_degrees_rado_vertex(capsys):
    code, out, _ = run(capsys, "degrees", "--class", "rado", "--max-size", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert [r["degree"] for r in doc["data"]] == [1]
    assert doc["header"]["tool"] == "bigramsey" and doc["header"]["class"] == "rado"


def test_output_is_byte_identical(capsys):
    args = ("degrees", "--class", "linear-order", "--max-size", "3")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    assert "# config: " in a and "# seed: 0" in a


@pytest.mark.parametrize("cls,n,lines", [("linear-order", 2, 2), ("linear-order", 1, 1), ("rado", 2, 4)])
def test_types_line_counts(capsys, cls, n, lines):
    code, out, _ = run(capsys, "types", "--class", cls, "-n", str(n))
    assert code == 0
    assert len(body(out)) == lines
    assert all(l.count("\t") == 3 for l in body(out))


def test_types_unsupported(capsys):
    code, _, err = run(capsys, "types", "--class", "g3", "-n", "2")
    assert code == 2 and "unsupported" in err


def test_tree_dump(capsys):
    code, out, _ = run(capsys, "tree", "--class", "rado", "--depth", "3")
    assert code == 0
    rows = body(out)
    assert len(rows) == 1 + 2 + 4 + 8
    assert rows[0] == "0 -1 . 0"


def test_tree_kronecker_only_for_orders(capsys):
    code, _, err = run(capsys, "tree", "--class", "rado", "--prefix", "kronecker")
    assert code == 1 and "kronecker" in err


def test_lab_ramsey(capsys, tmp_path):
    w = tmp_path / "witness.json"
    code, out, _ = run(capsys, "lab", "--theorem", "ramsey", "--params", "N=5,k=2,r=2,target=3",
                       "--emit-witness", str(w))
    assert code == 0
    assert "CounterexampleColoring" in out
    doc = json.loads(w.read_text())
    assert doc["verdict"] == "CounterexampleColoring" and len(doc["coloring"]) == 10
    code, out, _ = run(capsys, "lab", "--theorem", "ramsey", "--format", "json")
    assert code == 0 and json.loads(out)["data"]["verdict"] == "AllColoringsAdmitWitness"


def test_lab_budget_inconclusive(capsys):
    code, out, _ = run(capsys, "lab", "--theorem", "hl", "--params", "m=2,r=2,N=3", "--budget", "5")
    assert code == 3 and "Inconclusive" in out


def test_lab_param_errors(capsys):
    assert run(capsys, "lab", "--theorem", "hl", "--params", "q=1")[0] == 1
    assert run(capsys, "lab", "--theorem", "hl", "--params", "N=x")[0] == 1
    assert run(capsys, "lab", "--theorem", "ramsey", "--params", "N=2,target=3")[0] == 1


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick")
    assert code == 0
    lines = body(out)
    assert any(l.startswith("SKIP") for l in lines)
    assert not any(l.startswith("FAIL") for l in lines)


def test_verify_injected_fault(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--inject-fault", "c5")
    assert code == 2
    assert any(l.startswith("FAIL") and "integrality" in l for l in body(out))


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"class": "linear-order", "max_size": 2, "format": "csv"}))
    code, out, _ = run(capsys, "degrees", "--config", str(cfg))
    assert code == 0 and len(body(out)) == 3
    # the command line wins over the file
    code, out, _ = run(capsys, "degrees", "--config", str(cfg), "--max-size", "1")
    assert len(body(out)) == 2


def test_config_class_document(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    tri = {"size": 3, "relations": {"E": [[0, 1], [1, 2], [0, 2]]}}
    sig = [{"name": "E", "arity": 2, "symmetric": True}]
    cfg.write_text(json.dumps({"class": {"class": "forb", "signature": sig, "forbidden": [tri]},
                               "max_size": 2, "format": "csv"}))
    code, out, err = run(capsys, "degrees", "--config", str(cfg))
    assert code == 0, err
    rows = list(csv.reader(io.StringIO("\n".join(body(out)))))
    assert [r[2] for r in rows[1:]] == ["1", "2"]     # vertex and edge; the non-edge row is unsupported
    assert "# class: g3" in out


@pytest.mark.parametrize("text,where", [
    ('{"class": "rado",\n "colour": 1}', "key 'colour': unknown key"),
    ('{"class": "rado", }', ":1:"),
    ('{"class": "nope"}', "unknown class"),
    ('{"max_size": "four", "class": "rado"}', "expected an integer"),
    ('[1]', "top level"),
])
def test_malformed_config(capsys, tmp_path, text, where):
    cfg = tmp_path / "bad.json"
    cfg.write_text(text)
    code, _, err = run(capsys, "degrees", "--config", str(cfg))
    assert code == 1
    assert where in err


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "degrees", "--max-size", "2")[0] == 1     # no class
    assert run(capsys, "degrees", "--class", "rado", "--max-size", "zero")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "--version")[0] == 0
