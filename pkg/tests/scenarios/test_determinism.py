import json
import subprocess
import sys

import pytest

from colouring_lab.cli import main
from colouring_lab.lottery import full_deck_instance, monte_carlo_tails
from colouring_lab.schemas import MonteCarloSchema

CLI_CMD = [sys.executable, "-m", "colouring_lab"]


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(CLI_CMD + [str(a) for a in args], capture_output=True, text=True)


@pytest.mark.parametrize(
    "args",
    [
        ["lottery", "--n", "8", "--m", "4", "--trials", "3000", "--seed", "11"],
        ["shearer", "--trials", "4", "--n", "9", "--r", "3", "--seed", "5"],
        ["gen", "--kind", "random-triangle-free", "--n", "12", "--p", "0.4", "--seed", "9"],
    ],
)
def test_same_seed_gives_identical_output(args):
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout


def test_instance_commands_are_repeatable(twisted_c4_file, path_lists_file):
    for args in (
        ["sample", path_lists_file, "--seed", "3"],
        ["chain", twisted_c4_file, "--seed", "3"],
        ["dp-solve", twisted_c4_file, "--budget", "20", "--seed", "3"],
    ):
        assert run_cli(*args).stdout == run_cli(*args).stdout


def test_written_reports_keep_timestamps_in_sidecar(tmp_path, c5_file):
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["shearer", str(c5_file), "--r", "3", "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]

    meta = json.loads((tmp_path / "a.json.meta.json").read_text(encoding="utf-8"))
    assert "written_at" in meta
    assert "written_at" not in json.loads(outputs[0])


def test_monte_carlo_is_repeatable():
    inst = full_deck_instance(10, 11)
    first = monte_carlo_tails(inst, 0.5, trials=1000, seed=2, schema=MonteCarloSchema(block_size=100))
    again = monte_carlo_tails(inst, 0.5, trials=1000, seed=2, schema=MonteCarloSchema(block_size=100))
    assert first == again


def test_different_seeds_differ():
    first = run_cli("lottery", "--n", "8", "--m", "4", "--trials", "3000", "--seed", "1")
    second = run_cli("lottery", "--n", "8", "--m", "4", "--trials", "3000", "--seed", "2")
    assert json.loads(first.stdout)["results"]["tail"] != json.loads(second.stdout)["results"]["tail"]
