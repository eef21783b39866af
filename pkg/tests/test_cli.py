import json
import subprocess
import sys

import pytest

from hforest.cli import main
from hforest.graph import graph_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_families(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "hypercube", "--n", "3")
    assert code == 0 and graph_from_json(out).n_vertices == 8
    code, out, _ = run(capsys, "gen", "hypercube-diag", "--n", "2")
    assert code == 0 and graph_from_json(out).n_arcs == 12
    code, out, _ = run(capsys, "gen", "cartesian", "--g", "k3", "--h", "k2")
    assert code == 0 and graph_from_json(out).n_arcs == 18
    code, out, _ = run(capsys, "gen", "strongk2", "--base", "k3")
    assert code == 0 and graph_from_json(out).n_arcs == 30
    code, out, _ = run(capsys, "gen", "bipartite", "--p", "3", "--m", "2")
    assert code == 0 and graph_from_json(out).n_vertices == 6
    dest = tmp_path / "k4.json"
    assert run(capsys, "gen", "complete", "--p", "4", "--out", str(dest))[0] == 0
    assert graph_from_json(dest.read_text()).n_arcs == 12


def test_gen_bad_params(capsys):
    assert run(capsys, "gen", "hypercube", "--n", "-1")[0] == 2
    assert run(capsys, "gen", "bipartite", "--p", "3", "--m", "3")[0] == 2
    assert run(capsys, "gen", "hypercube")[0] == 2
    assert run(capsys, "gen", "nonsense")[0] == 2


def test_enumerator(capsys, tmp_path):
    k2 = tmp_path / "k2.json"
    c2 = tmp_path / "c2.json"
    run(capsys, "gen", "complete", "--p", "2", "--out", str(k2))
    run(capsys, "gen", "hypercube", "--n", "2", "--out", str(c2))
    code, out, _ = run(capsys, "enumerator", "--graph", str(k2), "--method", "det")
    assert code == 0 and out.strip() == "t^2 + t*x1_0 + t*x1_1"
    _, det, _ = run(capsys, "enumerator", "--graph", str(c2), "--method", "det")
    _, brute, _ = run(capsys, "enumerator", "--graph", str(c2), "--method", "brute")
    assert det == brute
    code, out, _ = run(capsys, "enumerator", "--graph", str(k2), "--format", "json")
    data = json.loads(out)
    assert data["polynomial"] == "t^2 + t*x1_0 + t*x1_1" and len(data["terms"]) == 3


def test_enumerator_errors(capsys, tmp_path):
    big = tmp_path / "big.json"
    run(capsys, "gen", "hypercube", "--n", "3", "--out", str(big))
    assert run(capsys, "enumerator", "--graph", str(big), "--method", "brute", "--budget", "10")[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_vertices": 2, "arcs": [{"from": 0, "to": 9, "weight": 1}]}')
    code, _, err = run(capsys, "enumerator", "--graph", str(bad))
    assert code == 2 and "$.arcs[0].to" in err
    assert run(capsys, "enumerator", "--graph", str(tmp_path / "missing.json"))[0] == 2


def test_env_budget(capsys, tmp_path, monkeypatch):
    big = tmp_path / "big.json"
    run(capsys, "gen", "hypercube", "--n", "3", "--out", str(big))
    monkeypatch.setenv("HFOREST_BUDGET", "10")
    assert run(capsys, "enumerator", "--graph", str(big), "--method", "brute")[0] == 3
    monkeypatch.setenv("HFOREST_BUDGET", "lots")
    assert run(capsys, "enumerator", "--graph", str(big))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "cube", "--n", "3"],
        ["verify", "diagonals", "--n", "2"],
        ["verify", "complete-product", "--p", "2", "3"],
        ["verify", "cayley", "--p", "4"],
        ["verify", "k2-induction", "--base", "triangle"],
        ["verify", "collapse", "--base", "k2"],
        ["verify", "collapse", "--n", "2", "--diag"],
        ["verify", "matrix-tree", "--graph", "p3"],
        ["verify", "kronecker", "--g", "k3", "--h", "k2"],
        ["verify", "prop41", "--g", "k2", "--h", "k3"],
        ["verify", "prop41", "--g", "k3:unit", "--h", "k3:unit"],
        ["verify", "rooted-at-v", "--n", "2"],
        ["verify", "degree-enumerator", "--n", "2"],
        ["verify", "root-vanishing", "--n", "2"],
        ["verify", "root-vanishing", "--n", "3", "--S", "1", "3"],
    ],
)
def test_verify_identities(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0, out
    assert json.loads(out)["ok"] is True


def test_verify_count(capsys):
    code, out, _ = run(capsys, "verify", "count", "--n", "4", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == 42467328
    code, out, _ = run(capsys, "verify", "count", "--n", "3")
    assert code == 0 and "384" in out


def test_verify_unknown_identity(capsys):
    assert run(capsys, "verify", "nope")[0] == 2
    assert run(capsys, "verify", "cube", "--n", "3", "--bogus")[0] == 2


def test_independence_commands(capsys):
    code, out, _ = run(capsys, "independence", "spin", "--base", "k3", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "PASS"
    code, out, _ = run(capsys, "independence", "bipartite", "--p", "3", "--m", "2", "--format", "json")
    assert code == 0
    code, out, _ = run(capsys, "independence", "multispin", "--base", "k2", "--p", "3", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "PASS" and data["experimental"] is True
    assert run(capsys, "independence", "spin", "--base", "k3", "--budget", "5")[0] == 3


def test_subforest_counterexample_command(capsys):
    code, out, _ = run(capsys, "independence", "subforest-counterexample", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["witness"]["multispin"]["independent"] is True


def test_independence_json_is_byte_stable(capsys):
    _, a, _ = run(capsys, "independence", "spin", "--base", "p3", "--format", "json")
    _, b, _ = run(capsys, "independence", "spin", "--base", "p3", "--format", "json", "--threads", "1")
    assert a == b


def test_verify_all_budget_skips(capsys):
    code, out, _ = run(capsys, "verify-all", "--budget", "100", "--format", "json")
    data = json.loads(out)
    statuses = {r["name"]: r["status"] for r in data["results"]}
    assert code == 0 and "SKIPPED(budget)" in statuses.values()
    assert "FAIL" not in statuses.values()


def test_verify_all_injected_fault(capsys):
    code, out, _ = run(capsys, "verify-all", "--budget", "100", "--inject-fault", "cube")
    assert code == 1
    assert "lhs - rhs: t" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hforest", "verify", "cube", "--n", "2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and "PASS" in proc.stdout
