from dataclasses import replace

import pytest

from colouring_lab import solver
from colouring_lab.cover import canonical_cover, is_h_colouring, twisted_c4
from colouring_lab.graph import generate_graph
from colouring_lab.lists import is_list_colouring
from colouring_lab.models import CoverVertex, Graph, ListAssignment, PartialColouring
from colouring_lab.schemas import SolverSchema
from colouring_lab.solver import (
    TransversalResult,
    availability_cut,
    default_fold,
    detect_a_u,
    detect_b_events,
    detect_dp_a_u,
    exhaustive_colourable,
    greedy_complete,
    haxell_transversal,
    kr_list_size,
    lll_report,
    moser_tardos_reed,
    asymptotic_list_size,
    size_cut,
    solve_pipeline,
)
from colouring_lab.validation import EnumerationGuardError

V = CoverVertex
K2 = generate_graph("complete", 2)


# ==========================================
# Thresholds
# ==========================================


def test_cuts():
    assert size_cut(0.3, 100) == pytest.approx(0.7 * 100**0.3)
    assert availability_cut(0.3, 100) == pytest.approx(0.09 * 100**0.3)


def test_reported_list_sizes():
    assert asymptotic_list_size(16, 0.3) == 12
    assert kr_list_size(16, 4) == pytest.approx(32.0)
    with pytest.raises(ValueError):
        asymptotic_list_size(1, 0.3)
    with pytest.raises(ValueError):
        kr_list_size(2, 4)


def test_default_fold():
    lists = ListAssignment.from_lists([[1, 2, 3], [1, 2], [4]])
    assert default_fold(generate_graph("path", 3), lists) == 1


# ==========================================
# Bad events
# ==========================================


def test_a_u_holds_on_blank_path():
    path = generate_graph("path", 3)
    lists = ListAssignment.uniform(3, (1, 2, 3))
    report = detect_a_u(path, lists, PartialColouring.blank(3), 1, 0.3, 1)
    assert report.holds
    assert report.kind == "A_u"
    assert report.violating == (1, 2, 3)
    assert report.quantities["max_availability"] == 2.0


def test_a_u_clears_when_neighbours_are_coloured():
    path = generate_graph("path", 3)
    lists = ListAssignment.uniform(3, (1, 2, 3))
    report = detect_a_u(path, lists, PartialColouring((1, 0, 1)), 1, 0.3, 1)
    assert not report.holds
    assert report.quantities["residual_size"] == 2.0


def test_a_u_never_holds_on_coloured_vertex():
    path = generate_graph("path", 3)
    lists = ListAssignment.uniform(3, (1, 2, 3))
    assert not detect_a_u(path, lists, PartialColouring((0, 2, 0)), 1, 0.3, 1).holds


def test_a_u_short_list():
    lists = ListAssignment.from_lists([[1], [1]])
    report = detect_a_u(K2, lists, PartialColouring((1, 0)), 1, 0.3, 1)
    assert report.holds
    assert report.violating == ()
    assert report.quantities["residual_size"] == 0.0


def test_a_u_input_checks():
    lists = ListAssignment.uniform(2, (1, 2))
    with pytest.raises(ValueError, match="epsilon"):
        detect_a_u(K2, lists, PartialColouring.blank(2), 0, 0.5, 4)
    with pytest.raises(ValueError, match="monochromatic"):
        detect_a_u(K2, lists, PartialColouring((1, 1)), 0, 0.3, 4)


def test_dp_a_u_on_twisted_c4():
    cov = twisted_c4()
    report = detect_dp_a_u(cov, [], 0, 0.3, 2)
    assert report.holds
    assert report.kind == "DP_A_u"
    assert report.violating == (1, 2)
    assert not detect_dp_a_u(cov, [V(0, 1)], 0, 0.3, 2).holds


def test_b_events_on_twisted_c4():
    cov = twisted_c4()
    first, second = detect_b_events(cov, [V(0, 1)], 2, 2)
    assert not first.holds
    assert not second.holds
    assert second.violating == (1, 3)
    first, _ = detect_b_events(cov, [V(0, 1)], 1, 2)
    assert first.holds


def test_b2_holds_on_rich_triangle():
    cov = canonical_cover(generate_graph("complete", 3), ListAssignment.uniform(3, (1, 2, 3)))
    first, second = detect_b_events(cov, [], 0, 2)
    assert not first.holds
    assert second.holds


def test_b_events_with_list_event():
    reports = detect_b_events(twisted_c4(), [], 0, 2, epsilon=0.3, n=2)
    assert [r.kind for r in reports] == ["B1_u", "B2_u", "DP_A_u"]


def test_b_events_reject_negative_l():
    with pytest.raises(ValueError):
        detect_b_events(twisted_c4(), [], 0, -1)


# ==========================================
# Finishers
# ==========================================


def test_lll_report():
    report = lll_report(K2, ListAssignment.uniform(2, (1, 2)))
    assert report.probability == 0.25
    assert report.dependency_degree == 1
    assert not report.ok
    assert lll_report(Graph(3), ListAssignment.uniform(3, (1,))).ok


def test_moser_tardos_edgeless():
    result = moser_tardos_reed(Graph(3), ListAssignment.uniform(3, (3,)))
    assert result.status == "success"
    assert result.resamples == 0
    assert result.colouring == PartialColouring((3, 3, 3))


def test_moser_tardos_cycle():
    cycle = generate_graph("cycle", 5)
    lists = ListAssignment.uniform(5, (1, 2, 3))
    result = moser_tardos_reed(cycle, lists, l=3, seed=4)
    assert result.status == "success"
    assert result.colouring is not None
    assert is_list_colouring(cycle, lists, result.colouring)
    assert result.condition is not None
    assert not result.condition.ok
    assert moser_tardos_reed(cycle, lists, seed=4) == moser_tardos_reed(cycle, lists, seed=4)


def test_moser_tardos_exhausts_on_impossible_edge():
    result = moser_tardos_reed(K2, ListAssignment.from_lists([[1], [1]]), max_resamples=5)
    assert result.status == "exhausted"
    assert result.resamples == 5
    assert result.colouring is None


def test_moser_tardos_empty_list():
    result = moser_tardos_reed(K2, ListAssignment.from_lists([[1], []]))
    assert result.status == "infeasible"
    assert "vertex 1" in result.detail


def test_haxell_transversal():
    graph = Graph(4, frozenset({(0, 2), (1, 3)}))
    result = haxell_transversal(graph, [[0, 1], [2, 3]], 2)
    assert result.transversal == {0, 3}
    assert result.max_degree == 1
    assert result.min_part == 2
    assert result.hypothesis
    assert not result.weak_hypothesis


def test_haxell_transversal_missing():
    result = haxell_transversal(K2, [[0], [1]], 1)
    assert result.transversal is None


def test_haxell_transversal_input_checks():
    graph = Graph(3)
    with pytest.raises(ValueError, match="not disjoint"):
        haxell_transversal(graph, [[0, 1], [1, 2]], 1)
    with pytest.raises(ValueError, match="do not cover"):
        haxell_transversal(graph, [[0], [1]], 1)
    with pytest.raises(EnumerationGuardError):
        haxell_transversal(Graph(4, frozenset({(0, 2), (1, 3)})), [[0, 1], [2, 3]], 2, search_guard=1)


def test_greedy_complete_on_path():
    cov = canonical_cover(generate_graph("path", 3), ListAssignment.uniform(3, (1, 2)))
    result = greedy_complete(cov, [])
    assert result.complete
    assert result.independent_set == {V(0, 1), V(1, 2), V(2, 1)}


def test_greedy_complete_gets_stuck_on_twisted_c4():
    result = greedy_complete(twisted_c4(), [])
    assert not result.complete
    assert result.stuck == 3
    assert result.independent_set == {V(0, 1), V(1, 2), V(2, 1)}


def test_greedy_complete_rejects_dependent_start():
    with pytest.raises(ValueError, match="not independent"):
        greedy_complete(twisted_c4(), [V(0, 1), V(1, 1)])


# ==========================================
# Oracle
# ==========================================


def test_oracle_twisted_c4():
    result = exhaustive_colourable(twisted_c4())
    assert not result.colourable
    assert result.witness is None


def test_oracle_list_instance():
    cycle = generate_graph("cycle", 4)
    lists = ListAssignment.uniform(4, (1, 2))
    result = exhaustive_colourable((cycle, lists))
    assert result.colourable
    assert result.witness is not None
    assert is_h_colouring(canonical_cover(cycle, lists), result.witness)


def test_oracle_guard():
    with pytest.raises(EnumerationGuardError):
        exhaustive_colourable(twisted_c4(), search_guard=15)


# ==========================================
# Pipelines
# ==========================================


def test_list_pipeline_on_edgeless_graph():
    graph = Graph(3)
    lists = ListAssignment.uniform(3, (1, 2))
    result = solve_pipeline((graph, lists), seed=1)
    assert result.kind == "list"
    assert result.success
    assert result.colouring is not None
    assert is_list_colouring(graph, lists, result.colouring)


def test_list_pipeline_exhausts_on_impossible_edge():
    result = solve_pipeline(
        (K2, ListAssignment.from_lists([[1], [1]])), schema=SolverSchema(max_resamples=20)
    )
    assert result.status == "exhausted"
    assert result.resamples == 20
    assert result.diagnostic["stage"] == "resample"
    assert result.colouring is None


def test_pipeline_empty_list_is_infeasible():
    result = solve_pipeline((K2, ListAssignment.from_lists([[1], []])))
    assert result.status == "infeasible"
    assert result.diagnostic["stage"] == "input"


def test_pipeline_input_checks():
    lists = ListAssignment.uniform(2, (1, 2))
    with pytest.raises(ValueError, match="epsilon"):
        solve_pipeline((K2, lists), epsilon=0.5)
    with pytest.raises(ValueError, match="list pipeline"):
        solve_pipeline(twisted_c4(), kind="list")
    with pytest.raises(ValueError, match="r >= 3"):
        solve_pipeline((K2, lists), kind="kr")


def test_dp_pipeline_on_edgeless_cover():
    cov = canonical_cover(Graph(2), ListAssignment.uniform(2, (1, 2)))
    result = solve_pipeline(cov, seed=2)
    assert result.kind == "dp"
    assert result.success
    assert result.independent_set is not None
    assert is_h_colouring(cov, result.independent_set)
    assert result.diagnostic["n"] == 2


def test_dp_pipeline_never_succeeds_on_twisted_c4():
    result = solve_pipeline(twisted_c4(), schema=SolverSchema(max_resamples=200))
    assert result.status == "exhausted"
    assert result.independent_set is None


def test_failed_finish_is_not_reported_as_infeasible(monkeypatch):
    cov = canonical_cover(Graph(2), ListAssignment.uniform(2, (1, 2)))

    def no_transversal(*args, **kwargs):
        return TransversalResult(None, False, False, 0, 0, 0)

    monkeypatch.setattr(solver, "haxell_transversal", no_transversal)
    result = solve_pipeline(cov, seed=2)
    assert result.status == "failed"
    assert result.diagnostic["stage"] == "finish"
    assert exhaustive_colourable(cov).colourable


def test_finisher_empty_residual_list_is_a_failed_run(monkeypatch):
    real = solver.moser_tardos_reed

    def empty_residual(*args, **kwargs):
        return replace(real(*args, **kwargs), status="infeasible", colouring=None)

    monkeypatch.setattr(solver, "moser_tardos_reed", empty_residual)
    graph = Graph(3)
    lists = ListAssignment.uniform(3, (1, 2))
    result = solve_pipeline((graph, lists), seed=1)
    assert result.status == "failed"
    assert result.diagnostic["finisher"]["status"] == "infeasible"
    assert exhaustive_colourable((graph, lists)).colourable


def test_kr_pipeline_on_edgeless_instance():
    graph = Graph(3)
    lists = ListAssignment.uniform(3, (1, 2))
    result = solve_pipeline((graph, lists), kind="kr", r=4, l=1.0, seed=3)
    assert result.kind == "kr"
    assert result.success
    assert result.independent_set is not None
    assert is_h_colouring(canonical_cover(graph, lists), result.independent_set)


def test_cover_with_large_r_defaults_to_kr():
    result = solve_pipeline(twisted_c4(), r=4, schema=SolverSchema(max_resamples=50))
    assert result.kind == "kr"
    assert not result.success
    assert result.diagnostic["r"] == 4
    assert "bookkeeping" in result.diagnostic
