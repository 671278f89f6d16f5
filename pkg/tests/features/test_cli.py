import json
import subprocess
import sys

import pytest

from colouring_lab.report import HAS_PANDAS

CLI_CMD = [sys.executable, "-m", "colouring_lab"]


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(CLI_CMD + [str(a) for a in args], capture_output=True, text=True)


def assertion(data: dict, name: str) -> dict:
    return next(a for a in data["assertions"] if a["name"] == name)


# ==========================================
# verify-cover
# ==========================================


def test_verify_cover_twisted_c4(twisted_c4_file):
    result = run_cli("verify-cover", twisted_c4_file)
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["command"] == "verify-cover"
    assert data["results"]["structure"] == {"ok": True, "errors": []}
    assert data["results"]["feasibility"] == "infeasible"
    assert data["results"]["oracle"]["colourable"] is False
    assert data["passed"] is True


def test_verify_cover_clique_freeness(twisted_c4_file):
    result = run_cli("verify-cover", "--instance", twisted_c4_file, "--r", "3")
    data = json.loads(result.stdout)
    assert data["results"]["f_free"] == {"r": 3, "ok": True, "witness": None}


def test_verify_cover_list_instance(path_lists_file):
    result = run_cli("verify-cover", path_lists_file, "--r", "3")
    data = json.loads(result.stdout)
    assert data["results"]["feasibility"] == "colourable"
    assert data["results"]["f_free"]["ok"] is True
    assert data["results"]["f_free"]["list_witness"] is None


def test_verify_cover_reports_broken_structure(tmp_path, twisted_c4_document):
    twisted_c4_document["matchings"][0]["pairs"] = [[1, 1], [1, 2]]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(twisted_c4_document), encoding="utf-8")
    result = run_cli("verify-cover", path)
    assert result.returncode == 1
    data = json.loads(result.stdout)
    assert data["results"]["structure"]["errors"] == [
        "Cover vertex 0_1 is matched twice on edge (0, 1)"
    ]
    assert "feasibility" not in data["results"]


# ==========================================
# Experiments
# ==========================================


def test_lottery_small_instance():
    result = run_cli("lottery", "--n", "8", "--m", "4", "--trials", "500", "--seed", "3")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["seed"] == 3
    assert data["results"]["tail"]["asserted"] is False
    assert data["results"]["exact"]["outcomes"] == 9**4
    assert assertion(data, "product_formula")["passed"]
    assert assertion(data, "negative_correlation")["passed"]


def test_lottery_asserted_size():
    result = run_cli("lottery", "--n", "64", "--epsilon", "0.3", "--trials", "2000")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["tail"]["m"] == 186
    assert data["results"]["tail"]["asserted"] is True
    assert data["results"]["exact"] is None


def test_lottery_too_many_decks():
    result = run_cli("lottery", "--n", "100", "--m", "300", "--epsilon", "0.5", "--trials", "10")
    assert result.returncode == 2
    assert "230.2585" in result.stderr


def test_sample_list_instance(path_lists_file):
    result = run_cli("sample", path_lists_file, "--seed", "1")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["outcomes"] == 17
    assert data["results"]["list_sweep"]["violations"] == 0
    assert data["results"]["chi_square"] is not None


def test_sample_cover_instance(twisted_c4_file):
    result = run_cli("sample", twisted_c4_file)
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["cover_sweep"]["violations"] == 0


@pytest.mark.parametrize("extra", [[], ["--mode", "predrawn", "--delta", "2", "--r", "3"]])
def test_chain(twisted_c4_file, extra):
    result = run_cli("chain", twisted_c4_file, "--vertex", "0", *extra)
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["distribution"]["target_size"] == 9
    assert assertion(data, "chain_uniform")["passed"]


def test_chain_with_fixed_set(twisted_c4_file):
    result = run_cli("chain", twisted_c4_file, "--fixed", "0_1")
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["results"]["distribution"]["target_size"] == 4


def test_chain_bad_fixed_set(twisted_c4_file):
    result = run_cli("chain", twisted_c4_file, "--fixed", "01")
    assert result.returncode == 2
    assert "vertex_colour" in result.stderr


def test_solve_list_instance(path_lists_file):
    result = run_cli("solve", path_lists_file, "--budget", "200")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["pipeline"]["kind"] == "list"
    assert data["results"]["oracle"]["colourable"] is True


def test_dp_solve_twisted_c4(twisted_c4_file):
    result = run_cli("dp-solve", twisted_c4_file, "--budget", "50")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["pipeline"]["status"] == "exhausted"
    assert assertion(data, "oracle_agreement")["passed"]


def test_dp_solve_without_oracle(twisted_c4_file):
    result = run_cli("dp-solve", twisted_c4_file, "--budget", "5", "--no-oracle")
    data = json.loads(result.stdout)
    assert "oracle" not in data["results"]


def test_shearer_instance(c5_file):
    result = run_cli("shearer", c5_file, "--r", "3")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["results"]["graphs"][0]["ind"] == 11


def test_shearer_rejects_clique(tmp_path):
    path = tmp_path / "k3.json"
    path.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}), encoding="utf-8")
    result = run_cli("shearer", path, "--r", "3")
    assert result.returncode == 1
    assert not assertion(json.loads(result.stdout), "graph_0_clique_free")["passed"]


def test_shearer_sweep():
    result = run_cli("shearer", "--trials", "5", "--n", "8", "--r", "3", "--seed", "2")
    assert result.returncode == 0, result.stderr
    assert len(json.loads(result.stdout)["results"]["graphs"]) == 5


# ==========================================
# gen and output options
# ==========================================


def test_gen_empty_random_graph():
    result = run_cli("gen", "--kind", "random-triangle-free", "--n", "0")
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout) == {"n": 0, "edges": []}


def test_gen_with_lists(tmp_path):
    out = tmp_path / "cycle.json"
    result = run_cli("gen", "--kind", "cycle", "--n", "5", "--lists", "3", "--out", out)
    assert result.returncode == 0, result.stderr
    document = json.loads(out.read_text(encoding="utf-8"))
    assert len(document["edges"]) == 5
    assert document["lists"] == [[1, 2, 3]] * 5


def test_gen_needs_kind():
    result = run_cli("gen", "--n", "3")
    assert result.returncode == 2


def test_text_format(twisted_c4_file):
    result = run_cli("verify-cover", twisted_c4_file, "--format", "text")
    assert result.stdout.splitlines()[0] == "verify-cover (seed 0)"
    assert "[PASS] structure" in result.stdout


def test_out_writes_report_and_metadata(tmp_path, c5_file):
    out = tmp_path / "shearer.json"
    result = run_cli("shearer", c5_file, "--r", "3", "--out", out)
    assert result.returncode == 0, result.stderr
    assert result.stdout == ""
    assert json.loads(out.read_text(encoding="utf-8"))["passed"] is True
    assert (tmp_path / "shearer.json.meta.json").exists()


@pytest.mark.skipif(not HAS_PANDAS, reason="Pandas not installed")
def test_csv_format():
    result = run_cli("lottery", "--n", "6", "--m", "3", "--trials", "100", "--format", "csv")
    assert result.returncode == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0].startswith("coupon,")
    assert len(lines) == 7


def test_csv_without_rows(twisted_c4_file):
    result = run_cli("verify-cover", twisted_c4_file, "--format", "csv")
    assert result.returncode == 2
    assert result.stderr.startswith("Error:")


# ==========================================
# Input errors
# ==========================================


def test_missing_file():
    result = run_cli("verify-cover", "nonexistent.json")
    assert result.returncode == 2
    assert "not found" in result.stderr


def test_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    result = run_cli("verify-cover", path)
    assert result.returncode == 2
    assert "Invalid JSON" in result.stderr


def test_missing_instance():
    result = run_cli("sample")
    assert result.returncode == 2
    assert "needs an instance file" in result.stderr


def test_conflicting_instances(twisted_c4_file, c5_file):
    result = run_cli("verify-cover", twisted_c4_file, "--instance", c5_file)
    assert result.returncode == 2


def test_guard_error_is_input_error(twisted_c4_file):
    result = run_cli("verify-cover", twisted_c4_file, "--guard", "4")
    assert result.returncode == 2
    assert "--guard" in result.stderr
