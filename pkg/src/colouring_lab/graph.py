import logging
from collections import deque
from collections.abc import Iterable
from itertools import combinations
from typing import Literal

from .models import Edge, Graph, normalize_edge
from .utils import iter_bits, make_rng

logger = logging.getLogger(__name__)

GraphKind = Literal[
    "complete",
    "cycle",
    "path",
    "edgeless",
    "random-edge-density",
    "random-triangle-free",
    "random-clique-free",
]

GRAPH_KINDS: tuple[GraphKind, ...] = (
    "complete",
    "cycle",
    "path",
    "edgeless",
    "random-edge-density",
    "random-triangle-free",
    "random-clique-free",
)


def build_graph(vertex_count: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """
    Builds a simple graph, deduplicating edges given in either orientation.

    Args:
        vertex_count (int): Number of vertices; ids are 0..vertex_count-1.
        edges (Iterable[tuple[int, int]]): Vertex pairs.

    Returns:
        Graph: The normalised graph.

    Raises:
        ValueError: On a self-loop or an endpoint out of range.
    """
    return Graph(vertex_count, frozenset((int(u), int(v)) for u, v in edges))


def neighbourhood(graph: Graph, vertices: Iterable[int], closed: bool = False) -> frozenset[int]:
    """
    Returns N(A), or N[A] = N(A) ∪ A when closed is set.
    """
    chosen = frozenset(vertices)
    result: set[int] = set()
    for v in chosen:
        result |= graph.neighbours(v)
    if closed:
        result |= chosen
    return frozenset(result)


def edges_between(graph: Graph, left: Iterable[int], right: Iterable[int]) -> frozenset[Edge]:
    """
    Returns E[A, B], the edges with one endpoint in A and the other in B.
    """
    a = frozenset(left)
    b = frozenset(right)
    for v in a | b:
        graph.check_vertex(v)
    return frozenset(
        e
        for e in graph.edges
        if (e[0] in a and e[1] in b) or (e[1] in a and e[0] in b)
    )


def remove_vertices(graph: Graph, vertices: Iterable[int]) -> Graph:
    """
    Returns G - A. Surviving vertices keep their ids.
    """
    removed = frozenset(vertices)
    for v in removed:
        graph.check_vertex(v)
    return graph.induced(graph.vertices - removed)


def induced_subgraph(graph: Graph, vertices: Iterable[int]) -> Graph:
    return graph.induced(vertices)


def _bfs(graph: Graph, source: int, limit: int | None = None) -> dict[int, int]:
    graph.check_vertex(source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for w in graph.adjacency[v]:
            if w in graph.vertices and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def distance(graph: Graph, u: int, v: int) -> int | None:
    """
    Length of a shortest u-v path, or None when v is unreachable from u.
    """
    graph.check_vertex(v)
    return _bfs(graph, u).get(v)


def ball(graph: Graph, u: int, radius: int) -> frozenset[int]:
    """
    Vertices at distance at most radius from u.
    """
    if radius < 0:
        raise ValueError(f"Radius must be non-negative, got {radius}")
    return frozenset(_bfs(graph, u, radius))


def dependency_set(graph: Graph, u: int) -> frozenset[int]:
    """
    Vertices whose local events can share a colour variable with the event at u:
    everything within distance 3.
    """
    return ball(graph, u, 3)


def _search_clique(masks: tuple[int, ...], allowed: int, size: int) -> tuple[int, ...] | None:
    # Vertices are tried in increasing order and only later vertices extend a
    # partial clique, so each clique is visited once.
    if size == 0:
        return ()
    while allowed:
        if allowed.bit_count() < size:
            return None
        low = allowed & -allowed
        v = low.bit_length() - 1
        allowed ^= low
        rest = _search_clique(masks, allowed & masks[v], size - 1)
        if rest is not None:
            return (v, *rest)
    return None


def find_clique(graph: Graph, r: int) -> tuple[int, ...] | None:
    """
    Finds a copy of K_r by backtracking with degree pruning.

    Args:
        graph (Graph): The graph to search.
        r (int): Clique size, at least 2.

    Returns:
        tuple[int, ...] | None: The clique's vertices in ascending order, or None.

    Raises:
        ValueError: If r < 2.
    """
    if r < 2:
        raise ValueError(f"Clique size must be at least 2, got {r}")
    masks = graph.masks
    candidates = graph.vertex_mask
    # A vertex of K_r needs r - 1 neighbours among the candidates.
    while True:
        pruned = candidates
        for v in iter_bits(candidates):
            if (masks[v] & candidates).bit_count() < r - 1:
                pruned &= ~(1 << v)
        if pruned == candidates:
            break
        candidates = pruned
    return _search_clique(masks, candidates, r)


def contains_clique(graph: Graph, r: int) -> bool:
    return find_clique(graph, r) is not None


def _closes_clique(masks: list[int], u: int, v: int, r: int) -> bool:
    # Adding uv creates K_r iff the common neighbourhood holds a K_{r-2}.
    common = masks[u] & masks[v]
    if r == 2:
        return True
    return _search_clique(tuple(masks), common, r - 2) is not None


def _random_clique_free(vertex_count: int, p: float, r: int, seed: int) -> Graph:
    rng = make_rng(seed)
    pairs = list(combinations(range(vertex_count), 2))
    order = rng.permutation(len(pairs)) if pairs else []
    keep = rng.random(len(pairs)) < p
    masks = [0] * vertex_count
    edges: set[Edge] = set()
    rejected = 0
    for position, index in enumerate(order):
        if not keep[position]:
            continue
        u, v = pairs[int(index)]
        if _closes_clique(masks, u, v, r):
            rejected += 1
            continue
        masks[u] |= 1 << v
        masks[v] |= 1 << u
        edges.add((u, v))
    logger.debug("random K_%d-free graph: kept %d edges, rejected %d", r, len(edges), rejected)
    return Graph(vertex_count, frozenset(edges))


def generate_graph(
    kind: GraphKind,
    n: int,
    p: float | None = None,
    r: int | None = None,
    seed: int = 0,
) -> Graph:
    """
    Generates a graph of the given kind, deterministically for a given seed.

    Args:
        kind (GraphKind): Family to draw from.
        n (int): Number of vertices.
        p (float | None): Edge probability for the random kinds.
        r (int | None): Forbidden clique size for random-clique-free.
        seed (int): Seed for the random kinds.

    Returns:
        Graph: The generated graph.

    Raises:
        ValueError: If the parameters are infeasible for the kind.
    """
    if n < 0:
        raise ValueError(f"Vertex count must be non-negative, got {n}")

    if kind == "complete":
        return Graph(n, frozenset(combinations(range(n), 2)))
    if kind == "edgeless":
        return Graph(n)
    if kind == "path":
        return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))
    if kind == "cycle":
        if n < 3:
            raise ValueError(f"A cycle needs at least 3 vertices, got {n}")
        return Graph(n, frozenset(normalize_edge(i, (i + 1) % n) for i in range(n)))

    if kind not in GRAPH_KINDS:
        raise ValueError(f"Unknown graph kind: {kind}")
    if n == 0:
        return Graph(0)
    if p is None:
        raise ValueError(f"Kind {kind} needs an edge probability p")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Edge probability must lie in [0, 1], got {p}")

    if kind == "random-edge-density":
        rng = make_rng(seed)
        pairs = list(combinations(range(n), 2))
        coins = rng.random(len(pairs)) < p
        return Graph(n, frozenset(e for e, kept in zip(pairs, coins) if kept))

    clique = 3 if kind == "random-triangle-free" else r
    if clique is None or clique < 2:
        raise ValueError(f"Kind {kind} needs a clique size r >= 2, got {r}")
    graph = _random_clique_free(n, p, clique, seed)
    witness = find_clique(graph, clique)
    if witness is not None:
        raise RuntimeError(f"Generated graph contains K_{clique} on {list(witness)}")
    return graph
