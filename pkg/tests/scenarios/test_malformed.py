import json
import subprocess
import sys

import pytest

from colouring_lab.cover import ensure_valid, residual, twisted_c4, validate_cover
from colouring_lab.lists import colouring_violations, is_list_colouring
from colouring_lab.loader import load_cover
from colouring_lab.models import Cover, CoverVertex, Graph, ListAssignment, LotteryInstance, PartialColouring
from colouring_lab.validation import CoverValidationError

CLI_CMD = [sys.executable, "-m", "colouring_lab"]


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(CLI_CMD + [str(a) for a in args], capture_output=True, text=True)


def write(tmp_path, document, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


# ==========================================
# Broken covers
# ==========================================


def test_every_structural_problem_is_reported():
    """
    One cover with several problems lists all of them, not just the first.
    """
    cov = Cover(
        Graph(3, frozenset({(0, 1)})),
        ListAssignment.from_lists([[1, 2], [1], [1]]),
        {(0, 1): frozenset({(1, 1), (2, 1), (3, 1)}), (1, 2): frozenset({(1, 1)})},
    )
    errors = validate_cover(cov)
    assert "Matching given for non-edge (1, 2)" in errors
    assert "Matching on (0, 1) uses colour 3 outside L(0)" in errors
    assert "Cover vertex 1_1 is matched twice on edge (0, 1)" in errors
    with pytest.raises(CoverValidationError) as exc:
        ensure_valid(cov)
    assert exc.value.errors == errors


def test_list_count_mismatch_stops_validation():
    cov = Cover(Graph(3), ListAssignment.from_lists([[1], [1]]))
    assert validate_cover(cov) == ["Expected 3 lists, got 2"]


def test_broken_cover_is_loaded_but_rejected(tmp_path, twisted_c4_document):
    twisted_c4_document["matchings"].append({"edge": [0, 2], "pairs": [[1, 1]]})
    cov = load_cover(write(tmp_path, twisted_c4_document))
    assert validate_cover(cov) == ["Matching given for non-edge (0, 2)"]


@pytest.mark.parametrize("command", ["dp-solve", "chain"])
def test_commands_refuse_broken_covers(tmp_path, twisted_c4_document, command):
    twisted_c4_document["matchings"][1]["pairs"] = [[1, 3]]
    result = run_cli(command, write(tmp_path, twisted_c4_document))
    assert result.returncode == 2
    assert "Cover validation failed" in result.stderr
    assert "colour 3 outside L(2)" in result.stderr


def test_sample_refuses_broken_cover(tmp_path, twisted_c4_document):
    twisted_c4_document["matchings"][0]["pairs"] = [[1, 1], [2, 1]]
    result = run_cli("sample", write(tmp_path, twisted_c4_document))
    assert result.returncode == 2
    assert "matched twice" in result.stderr


# ==========================================
# Malformed values
# ==========================================


@pytest.mark.parametrize(
    "build, fragment",
    [
        (lambda: Graph(-1), "non-negative"),
        (lambda: Graph(2, frozenset({(1, 1)})), "Self-loop"),
        (lambda: Graph(2, frozenset({(0, 2)})), "out of range"),
        (lambda: Graph(3, frozenset({(0, 2)}), alive=frozenset({0, 1})), "not a vertex"),
        (lambda: ListAssignment.from_lists([[0, 1]]), "colour 0 is reserved"),
        (lambda: PartialColouring((1, -1)), "non-negative"),
        (lambda: LotteryInstance(0), "at least one coupon"),
        (lambda: LotteryInstance.from_decks(3, [[1], []]), "Deck 1 is empty"),
        (lambda: LotteryInstance.from_decks(3, [[4]]), "outside [1, 3]"),
    ],
)
def test_invalid_values_are_rejected(build, fragment):
    with pytest.raises(ValueError, match=fragment.replace("[", r"\[")):
        build()


def test_unknown_cover_vertex_is_rejected():
    with pytest.raises(ValueError, match="0_3 is not a cover vertex"):
        residual(twisted_c4(), [CoverVertex(0, 3)])


def test_colouring_of_wrong_length():
    graph = Graph(3, frozenset({(0, 1)}))
    lists = ListAssignment.uniform(3, (1, 2))
    assert colouring_violations(graph, lists, PartialColouring((1, 2))) == [
        "Colouring covers 2 vertices, graph has 3"
    ]
    assert not is_list_colouring(graph, lists, PartialColouring((1, 2)))


def test_colouring_outside_lists_and_monochromatic():
    graph = Graph(3, frozenset({(0, 1), (1, 2)}))
    lists = ListAssignment.uniform(3, (1, 2))
    assert colouring_violations(graph, lists, PartialColouring((3, 1, 1))) == [
        "Vertex 0 has colour 3 outside its list",
        "Edge (1, 2) is monochromatic in colour 1",
    ]


# ==========================================
# Malformed command lines
# ==========================================


def test_lottery_document_with_stray_coupon(tmp_path):
    result = run_cli("lottery", write(tmp_path, {"n": 2, "decks": [[1, 3]]}))
    assert result.returncode == 2
    assert "outside [1, 2]" in result.stderr


def test_lottery_needs_a_size():
    result = run_cli("lottery")
    assert result.returncode == 2
    assert "--n" in result.stderr


def test_lottery_epsilon_out_of_range():
    result = run_cli("lottery", "--n", "8", "--m", "2", "--epsilon", "1.5", "--trials", "10")
    assert result.returncode == 2
    assert "epsilon" in result.stderr


def test_solve_rejects_bad_epsilon(path_lists_file):
    result = run_cli("solve", path_lists_file, "--epsilon", "0.4")
    assert result.returncode == 2


def test_chain_rejects_fixed_set_outside_sub_cover(twisted_c4_file):
    result = run_cli("chain", twisted_c4_file, "--fixed", "1_1")
    assert result.returncode == 2
    assert "sub-cover" in result.stderr


def test_unknown_subcommand():
    result = run_cli("colour-everything")
    assert result.returncode == 2
    assert "invalid choice" in result.stderr
