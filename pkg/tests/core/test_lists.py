from collections import Counter, defaultdict
from itertools import product

import pytest

from colouring_lab.graph import build_graph, generate_graph
from colouring_lab.lists import (
    availability,
    colouring_violations,
    find_f_free_violation,
    is_f_free_assignment,
    is_list_colouring,
    is_partial_colouring,
    lottery_reduction,
    narrow,
    neighbourhood_subassignment,
    reed_condition,
    residual_lists,
    strip_used_colours,
    subassignment_ops,
    uncoloured_neighbours,
)
from colouring_lab.models import Graph, ListAssignment, LotteryInstance, PartialColouring
from colouring_lab.sampler import PartialColouringIndex
from colouring_lab.utils import make_rng

K2 = generate_graph("complete", 2)
K3 = generate_graph("complete", 3)


def star(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# ============================================================================
# Availability and F-freeness
# ============================================================================


def test_availability_star():
    graph = star(3)
    lists = ListAssignment.uniform(4, [1])
    assert availability(graph, lists, 0, 1) == {1, 2, 3}
    assert availability(graph, lists, 0, 2) == frozenset()


def test_availability_path():
    path = generate_graph("path", 3)
    lists = ListAssignment.from_lists([[1, 2], [2], [2]])
    assert availability(path, lists, 1, 2) == {0, 2}


def test_availability_rejects_blank():
    with pytest.raises(ValueError, match="blank"):
        availability(K2, ListAssignment.uniform(2, [1]), 0, 0)


def test_f_free_examples():
    assert is_f_free_assignment(K3, ListAssignment.from_lists([[1], [2], [3]]), 3)
    violation = find_f_free_violation(K3, ListAssignment.uniform(3, [1]), 3)
    assert violation is not None
    assert violation.colour == 1
    assert set(violation.clique) == {0, 1, 2}
    k4 = generate_graph("complete", 4)
    assert not is_f_free_assignment(k4, ListAssignment.uniform(4, [1]), 4)


def test_f_free_needs_r_at_least_three():
    with pytest.raises(ValueError):
        is_f_free_assignment(K3, ListAssignment.uniform(3, [1]), 2)


# ============================================================================
# Partial colourings and residual lists
# ============================================================================


def test_blank_colouring_is_partial():
    lists = ListAssignment.uniform(3, [1])
    assert is_partial_colouring(K3, lists, PartialColouring.blank(3))


def test_monochromatic_edge():
    lists = ListAssignment.uniform(2, [1])
    assert not is_partial_colouring(K2, lists, PartialColouring((1, 1)))
    assert colouring_violations(K2, lists, PartialColouring((1, 1))) == [
        "Edge (0, 1) is monochromatic in colour 1"
    ]
    colouring = PartialColouring((1, 0))
    assert is_partial_colouring(K2, lists, colouring)
    assert colouring.uncoloured == {1}
    assert uncoloured_neighbours(K2, colouring, 0) == {1}


def test_colour_outside_list():
    lists = ListAssignment.from_lists([[1], [2]])
    assert colouring_violations(K2, lists, PartialColouring((2, 0))) == [
        "Vertex 0 has colour 2 outside its list"
    ]


def test_full_list_colouring():
    lists = ListAssignment.uniform(3, [1, 2, 3])
    assert is_list_colouring(K3, lists, PartialColouring((1, 2, 3)))
    assert not is_list_colouring(K3, lists, PartialColouring((1, 2, 0)))


def test_residual_lists():
    lists = ListAssignment.uniform(2, [1, 2])
    assert residual_lists(K2, lists, PartialColouring.blank(2)) == lists
    assert residual_lists(K2, lists, PartialColouring((1, 0))).lists == (frozenset(), frozenset({2}))


def test_residual_isolated_vertex():
    lists = ListAssignment.from_lists([[4, 5]])
    assert residual_lists(Graph(1), lists, PartialColouring((0,)))[0] == {4, 5}


def test_residual_rejects_improper_colouring():
    with pytest.raises(ValueError, match="Not a partial colouring"):
        residual_lists(K2, ListAssignment.uniform(2, [1]), PartialColouring((1, 1)))


def test_strip_used_colours_skips_validation():
    stripped = strip_used_colours(K2, ListAssignment.uniform(2, [1]), PartialColouring((3, 0)))
    assert stripped.lists == (frozenset(), frozenset({1}))


# ============================================================================
# Sub-assignments
# ============================================================================


def test_subassignment_identity():
    lists = ListAssignment.uniform(2, [1, 2])
    colouring = PartialColouring((1, 2))
    rest, narrowed = subassignment_ops(lists, lists, colouring)
    assert rest.lists == (frozenset(), frozenset())
    assert narrowed == colouring


def test_subassignment_empty():
    lists = ListAssignment.uniform(2, [1, 2])
    empty = ListAssignment.from_lists([[], []])
    rest, narrowed = subassignment_ops(lists, empty, PartialColouring((1, 2)))
    assert rest == lists
    assert narrowed == PartialColouring.blank(2)


def test_subassignment_single_vertex():
    rest, narrowed = subassignment_ops(
        ListAssignment.from_lists([[1, 2]]),
        ListAssignment.from_lists([[2]]),
        PartialColouring((1,)),
    )
    assert rest[0] == {1}
    assert narrowed.colours == (0,)


def test_subassignment_must_be_contained():
    with pytest.raises(ValueError, match="not contained"):
        subassignment_ops(
            ListAssignment.from_lists([[1]]),
            ListAssignment.from_lists([[2]]),
            PartialColouring((0,)),
        )


# ============================================================================
# Reed's condition
# ============================================================================


def test_reed_condition_holds_at_threshold():
    lists = ListAssignment.uniform(2, range(1, 7))
    assert reed_condition(K2, lists, 6).ok


def test_reed_condition_short_list():
    lists = ListAssignment.from_lists([range(1, 6), range(1, 7)])
    check = reed_condition(K2, lists, 6)
    assert not check.ok
    assert check.vertex == 0
    assert check.colour is None


def test_reed_condition_high_availability():
    check = reed_condition(star(10), ListAssignment.uniform(11, [1]), 1)
    assert not check.ok
    assert (check.vertex, check.colour) == (0, 1)


def test_reed_condition_rejects_non_positive_l():
    with pytest.raises(ValueError):
        reed_condition(K2, ListAssignment.uniform(2, [1]), 0)


# ============================================================================
# Neighbourhood lottery
# ============================================================================


def _path_instance():
    # 1 - 0 - 2
    graph = build_graph(3, [(0, 1), (0, 2)])
    lists = ListAssignment.from_lists([[5, 7], [5, 9], [7]])
    return graph, lists


def test_neighbourhood_subassignment():
    graph, lists = _path_instance()
    sub = neighbourhood_subassignment(graph, lists, 0)
    assert sub.lists == (frozenset({5, 7}), frozenset({9}), frozenset())


def test_lottery_reduction_blank():
    graph, lists = _path_instance()
    reduction = lottery_reduction(graph, lists, 0, PartialColouring.blank(3))
    assert reduction.coupons == (5, 7)
    assert reduction.deck_owners == (1, 2)
    assert reduction.instance == LotteryInstance.from_decks(2, [[1], [2]])
    assert reduction.colour_of(2) == 7


def test_lottery_reduction_drops_coloured_neighbours():
    graph, lists = _path_instance()
    reduction = lottery_reduction(graph, lists, 0, PartialColouring((0, 9, 0)))
    assert reduction.deck_owners == (2,)
    assert reduction.instance == LotteryInstance.from_decks(2, [[2]])


def test_lottery_reduction_rejects_foreign_fixing():
    graph, lists = _path_instance()
    with pytest.raises(ValueError):
        lottery_reduction(graph, lists, 0, PartialColouring((0, 5, 0)))


@pytest.mark.parametrize("seed", range(10))
def test_lottery_reduction_law_matches_conditioning(seed):
    graph = generate_graph("random-triangle-free", 5, p=0.6, seed=seed)
    rng = make_rng(seed, 1)
    rows = []
    for _ in range(5):
        size = int(rng.integers(1, 4))
        rows.append(sorted(int(c) + 1 for c in rng.choice(3, size=size, replace=False)))
    lists = ListAssignment.from_lists(rows)
    colourings = list(PartialColouringIndex(graph, lists))
    for u in sorted(graph.vertices):
        sub = neighbourhood_subassignment(graph, lists, u)
        groups: dict[PartialColouring, list[PartialColouring]] = defaultdict(list)
        for colouring in colourings:
            groups[narrow(colouring, sub)].append(colouring)

        for fixed, members in groups.items():
            reduction = lottery_reduction(graph, lists, u, fixed)
            assert reduction.instance is not None
            rename = {c: k for k, c in enumerate(reduction.coupons, start=1)}
            others = graph.neighbours(u) - set(reduction.deck_owners)
            law = Counter()
            for colouring in members:
                assert all(colouring[v] not in rename for v in others)
                law[tuple(rename.get(colouring[v], 0) for v in reduction.deck_owners)] += 1
            # Each lottery outcome is hit by exactly one conditioned colouring, so the law is uniform.
            outcomes = product(*((0, *sorted(deck)) for deck in reduction.instance.decks))
            assert law == Counter(outcomes), f"u={u} fixed={fixed.colours}"
