import json
import subprocess
import sys

import numpy as np
import pytest

from witnesskit import cli
from witnesskit.states import catalog_names


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_singlet(capsys):
    code, out, _ = run(["analyze", "catalog:singlet"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1
    ppt = report["results"]["verdicts"]["A|B"][0]
    assert ppt["status"] == "entangled-certified"
    assert ppt["evidence"]["min_eigenvalue"] == pytest.approx(-0.5, abs=1e-9)
    assert ppt["tolerance_used"] == 1e-9


def test_analyze_shifts(capsys):
    code, out, _ = run(["analyze", "catalog:shifts", "--restarts", "50"], capsys)
    assert code == 0
    results = json.loads(out)["results"]
    assert results["cut_report"]["summary"]["ppt_on_all_cuts"]
    assert results["nondistillability"]["status"] == "certified"
    assert results["nondistillability"]["bound_entangled"]


def test_analyze_cut_and_criteria(capsys):
    code, out, _ = run(["analyze", "catalog:ghz:n=3", "--cut", "AB|C", "--criteria", "ppt,rank"], capsys)
    assert code == 0
    verdicts = json.loads(out)["results"]["verdicts"]["AB|C"]
    assert [v["criterion"] for v in verdicts] == ["ppt", "rank"]
    assert run(["analyze", "catalog:singlet", "--criteria", "magic"], capsys)[0] == 2
    assert run(["analyze", "catalog:singlet", "--cut", "A|C"], capsys)[0] == 2


def test_witness_pure_plan(capsys):
    code, out, _ = run(["witness", "catalog:bell-theta", "--method", "pure"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    terms = {t["pauli"]: t["coeff"] for t in res["measurement_plan"]["terms"]}
    assert terms == pytest.approx({"II": 0.25, "YY": 0.25, "XX": -0.25, "ZZ": -0.25}, abs=1e-12)
    assert res["value"] == pytest.approx(-0.5)
    assert res["robustness_radius"] == pytest.approx(0.5)


def test_witness_lowdim_and_errors(capsys):
    code, out, _ = run(["witness", "catalog:isotropic:n=2,p=0.5", "--method", "lowdim"], capsys)
    assert code == 0 and json.loads(out)["results"]["value"] < 0
    assert run(["witness", "catalog:isotropic:n=2,p=0.5", "--method", "pure"], capsys)[0] == 4
    assert run(["witness", "catalog:singlet", "--method", "indecomposable"], capsys)[0] == 4


def test_witness_indecomposable_shifts(capsys):
    code, out, _ = run(["witness", "catalog:shifts", "--method", "indecomposable", "--restarts", "30"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    assert res["detected"] and res["witness"]["kind"] == "indecomposable"


def test_bell_command(capsys):
    code, out, _ = run(["bell", "catalog:ghz:n=3"], capsys)
    assert code == 0
    bell = json.loads(out)["results"]["bell"]
    assert bell["value"] >= 3.999 and bell["separable_bound"] == 2.0
    code, out, _ = run(["bell", "catalog:singlet"], capsys)
    assert json.loads(out)["results"]["bell"]["value"] >= 2.828
    code, out, _ = run(["bell", "catalog:product"], capsys)
    assert json.loads(out)["results"]["bell"]["value"] <= 2.000000001
    assert run(["bell", "catalog:isotropic:n=3,p=0.5"], capsys)[0] == 4


def test_catalog_round_trip(tmp_path, capsys):
    path = tmp_path / "werner.json"
    assert run(["catalog", "werner", "--n", "3", "--lambda", "2", "--out", str(path)], capsys)[0] == 0
    doc = json.loads(path.read_text())
    assert doc["dims"] == [3, 3]
    code, out, _ = run(["analyze", str(path), "--no-timestamp"], capsys)
    from_file = json.loads(out)
    code, out, _ = run(["analyze", "catalog:werner:n=3,lambda=2", "--no-timestamp"], capsys)
    from_catalog = json.loads(out)
    assert from_file["input"]["digest"] == from_catalog["input"]["digest"]
    assert from_file["results"] == from_catalog["results"]


@pytest.mark.parametrize("name", catalog_names())
def test_statefile_round_trip_exact(name):
    from witnesskit.states import catalog

    state = catalog(name).state
    doc = json.loads(json.dumps(cli.state_to_document(state)))
    parsed = cli.document_to_state(doc)
    original = getattr(state, "vector", None)
    if original is None:
        assert np.array_equal(parsed.matrix, state.matrix)
    else:
        assert np.array_equal(parsed.vector, original)


def test_catalog_errors(capsys):
    code, _, err = run(["catalog", "nope"], capsys)
    assert code == 2 and "shifts" in err
    assert run(["catalog", "werner", "--lambda", "0.1"], capsys)[0] == 3
    assert run(["catalog", "singlet", "--n", "3"], capsys)[0] == 2


def test_parse_diagnostics(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"dims": [2], "matrix": [[{"re": 1}, {"re": 0}], [{"re": 0}]]}))
    code, _, err = run(["analyze", str(path)], capsys)
    assert code == 2 and "row 1" in err
    path.write_text(json.dumps({"dims": [2, 2]}))
    code, _, err = run(["analyze", str(path)], capsys)
    assert code == 2 and "matrix" in err
    path.write_text(json.dumps({"dims": [2], "vector": [{"re": 1}, {"re": 1}]}))
    assert run(["analyze", str(path)], capsys)[0] == 3
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "witnesskit.cli", "catalog", "shifts"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["dims"] == [2, 2, 2]
