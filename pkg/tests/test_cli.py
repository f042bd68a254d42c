import json
import subprocess
import sys

import jsonschema
import pytest

from uqboson.cli import main
from uqboson.relcheck import shipped_corpus


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    return json.loads(shipped_corpus(name).read_text())


def test_module_entry_point_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "uqboson", "limit", "--kind", "dyson", "--n", "2",
                         "--p", "2", "--trunc", "4"], capture_output=True, text=True)
    assert ok.returncode == 0
    bad = subprocess.run([sys.executable, "-m", "uqboson", "build", "--backend", "exact", "--n", "1",
                          "--p", "2.5", "--trunc", "2"], capture_output=True, text=True)
    assert bad.returncode == 2 and "exact backend requires integer p" in bad.stderr


def test_build_hp_two_dim(capsys):
    code, out, _ = run(["build", "--n", "1", "--p", "1", "--trunc", "1", "--kind", "hp",
                        "--backend", "numeric", "--q", "0.8"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("operators.schema.json"))
    assert doc["basis"] == [[0], [1]]
    assert doc["operators"]["e1"]["cols"] == {"1": [[0, {"numeric": "1.0"}]]}
    assert doc["meta"]["q"] == "4/5" and doc["meta"]["dps"] >= 50


def test_build_dyson_exact(capsys):
    code, out, _ = run(["build", "--n", "2", "--p", "2", "--trunc", "2", "--kind", "dyson",
                        "--backend", "exact", "--gl"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("operators.schema.json"))
    entries = [v for op in doc["operators"].values() for col in op["cols"].values() for _, v in col]
    assert entries and all("laurent" in v for v in entries)
    assert "I" in doc["operators"]


def test_build_text(capsys):
    code, out, _ = run(["build", "--n", "1", "--p", "2", "--trunc", "2", "--format", "text"], capsys)
    assert code == 0 and out.startswith("# dyson realization n=1 p=2 L=2")


def test_matrixmarket(tmp_path, capsys):
    code, _, _ = run(["build", "--n", "1", "--p", "1", "--trunc", "1", "--kind", "hp", "--q", "0.8",
                      "--format", "matrixmarket", "--output", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "e1.mtx").read_text().splitlines()
    assert lines[0] == "%%MatrixMarket matrix coordinate real general"
    assert lines[2:] == ["2 2 1", "1 2 1.0"]
    code, _, err = run(["build", "--n", "1", "--p", "1", "--trunc", "1", "--kind", "hp",
                        "--format", "matrixmarket", "--output", str(tmp_path)], capsys)
    assert code == 2 and "numeric" in err


@pytest.mark.parametrize("args,code", [
    (["verify", "--n", "2", "--p", "3", "--trunc", "5", "--kind", "dyson", "--backend", "exact"], 0),
    (["verify", "--n", "2", "--p", "3", "--trunc", "5", "--kind", "hp", "--backend", "numeric", "--q", "0.7"], 0),
    (["verify", "--n", "1", "--p", "2", "--trunc", "3", "--kind", "hp-deformed"], 0),
    (["verify", "--n", "1", "--p", "2", "--trunc", "5", "--kind", "hp", "--backend", "exact"], 3),
    (["verify", "--n", "1", "--p", "2", "--trunc", "3", "--q", "-1"], 2),
    (["verify", "--n", "1", "--p", "2", "--trunc", "3", "--q", "1"], 2),
    (["verify", "--n", "0", "--p", "2", "--trunc", "3"], 2),
])
def test_verify_exit_codes(args, code, capsys):
    assert run(args, capsys)[0] == code


def test_verify_report_schema_and_residual(capsys):
    code, out, _ = run(["verify", "--n", "2", "--p", "3", "--trunc", "5", "--kind", "hp", "--q", "0.7"], capsys)
    doc = json.loads(out)
    jsonschema.validate(doc, schema("verify_report.schema.json"))
    assert doc["summary"]["total"] == 24 and float(doc["summary"]["max_residual"]) < 1e-10


def test_verify_bad_corpus(tmp_path, capsys):
    corpus = tmp_path / "bad.rel"
    corpus.write_text("# missing the q-bracket\n[e1,f1] = 0\n")
    code, out, _ = run(["verify", "--n", "1", "--p", "2", "--trunc", "3", "--corpus", str(corpus)], capsys)
    assert code == 1
    rep = json.loads(out)["reports"][0]
    assert rep["verdict"] == "fail"
    assert rep["witness"]["row"] == rep["witness"]["col"]
    corpus.write_text("[e1,f1 = 0\n")
    assert run(["verify", "--n", "1", "--p", "2", "--trunc", "3", "--corpus", str(corpus)], capsys)[0] == 2


def test_verify_restrict_f0(capsys):
    code, out, _ = run(["verify", "--n", "2", "--p", "2", "--trunc", "4", "--kind", "hp", "--q", "0.5",
                        "--restrict", "F0"], capsys)
    assert code == 0
    assert {r["subspace"] for r in json.loads(out)["reports"]} == {"F0"}


@pytest.mark.parametrize("args", [
    ["analyze", "--kind", "hp", "--n", "2", "--p", "1", "--trunc", "3", "--q", "0.8", "--invariance", "--unitarity"],
    ["analyze", "--kind", "dyson", "--n", "1", "--p", "2", "--trunc", "5", "--invariance"],
    ["analyze", "--kind", "hp", "--n", "1", "--p", "2.5", "--trunc", "8", "--q", "0.9", "--irreducibility-probe"],
    ["analyze", "--kind", "hp", "--n", "1", "--p", "2", "--trunc", "3", "--weights"],
    ["analyze", "--kind", "dyson", "--n", "1", "--p", "2", "--trunc", "3", "--q", "0.8", "--unitarity"],
])
def test_analyze_examples(args, capsys):
    code, out, _ = run(args, capsys)
    assert code == 0
    assert json.loads(out)["holds"] is True


def test_analyze_details(capsys):
    _, out, _ = run(["analyze", "--kind", "dyson", "--n", "1", "--p", "2", "--trunc", "5", "--invariance"], capsys)
    inv = json.loads(out)["invariance"]
    assert inv["F0"]["witnesses"]["f1"]["col_state"] == [2]
    _, out, _ = run(["analyze", "--kind", "hp", "--n", "1", "--p", "2.5", "--trunc", "8", "--q", "0.9",
                     "--irreducibility-probe"], capsys)
    assert len(json.loads(out)["irreducibility_probe"]["coefficients"]) == 9


def test_analyze_config_errors(capsys):
    assert run(["analyze", "--kind", "hp", "--n", "1", "--p", "2", "--trunc", "3"], capsys)[0] == 2
    assert run(["analyze", "--kind", "dyson", "--n", "1", "--p", "2", "--trunc", "3", "--invariance"], capsys)[0] == 2
    assert run(["analyze", "--kind", "hp", "--n", "1", "--p", "2", "--trunc", "4", "--q", "0.9",
                "--irreducibility-probe"], capsys)[0] == 2


@pytest.mark.parametrize("args,code", [
    (["limit", "--kind", "dyson", "--n", "2", "--p", "2", "--trunc", "4"], 0),
    (["limit", "--kind", "hp", "--n", "1", "--p", "1", "--trunc", "1"], 0),
    (["limit", "--kind", "hp", "--n", "1", "--p", "1", "--trunc", "1", "--backend", "numeric", "--q", "0.5"], 2),
])
def test_limit(args, code, capsys):
    assert run(args, capsys)[0] == code


def test_reports_are_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        run(["verify", "--n", "2", "--p", "2", "--trunc", "3", "--kind", "hp", "--backend", "exact",
             "--seed", "7", "--output", str(path)], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
