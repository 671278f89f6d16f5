import pytest

from colouring_lab.graph import contains_clique, distance, generate_graph
from colouring_lab.models import Graph
from colouring_lab.sampler import IndependentSetIndex
from colouring_lab.shearer import profile

try:
    import networkx as nx

    HAS_NETWORKX = True
except ImportError:
    HAS_NETWORKX = False
    nx = None  # type: ignore


def to_networkx(graph: Graph):
    assert nx is not None
    g = nx.Graph()
    g.add_nodes_from(sorted(graph.vertices))
    g.add_edges_from(graph.edges)
    return g


def nx_independent_set_count(graph: Graph) -> int:
    assert nx is not None
    # Independent sets of G are the cliques of its complement, plus the empty set.
    return 1 + sum(1 for _ in nx.enumerate_all_cliques(nx.complement(to_networkx(graph))))


def nx_clique_number(graph: Graph) -> int:
    assert nx is not None
    g = to_networkx(graph)
    return max((len(c) for c in nx.find_cliques(g)), default=0)


RANDOM_GRAPHS = [
    generate_graph("random-edge-density", n, p=p, seed=seed)
    for seed, (n, p) in enumerate([(6, 0.3), (8, 0.5), (9, 0.7), (10, 0.4), (12, 0.25)])
]


@pytest.mark.skipif(not HAS_NETWORKX, reason="networkx not installed")
@pytest.mark.parametrize("graph", RANDOM_GRAPHS)
def test_independent_set_count_matches_networkx(graph):
    assert len(IndependentSetIndex(graph)) == nx_independent_set_count(graph)


@pytest.mark.skipif(not HAS_NETWORKX, reason="networkx not installed")
@pytest.mark.parametrize("graph", RANDOM_GRAPHS)
def test_clique_search_matches_networkx(graph):
    omega = nx_clique_number(graph)
    for r in range(2, 6):
        assert contains_clique(graph, r) == (omega >= r)


@pytest.mark.skipif(not HAS_NETWORKX, reason="networkx not installed")
@pytest.mark.parametrize("seed", range(4))
def test_random_clique_free_graphs_are_clique_free(seed):
    graph = generate_graph("random-clique-free", 11, p=0.6, r=4, seed=seed)
    assert nx_clique_number(graph) <= 3
    assert profile(graph, 4).ind_count == nx_independent_set_count(graph)


@pytest.mark.skipif(not HAS_NETWORKX, reason="networkx not installed")
@pytest.mark.parametrize("graph", RANDOM_GRAPHS)
def test_distance_matches_networkx(graph):
    assert nx is not None
    lengths = dict(nx.all_pairs_shortest_path_length(to_networkx(graph)))
    for u in sorted(graph.vertices):
        for v in sorted(graph.vertices):
            assert distance(graph, u, v) == lengths[u].get(v)
