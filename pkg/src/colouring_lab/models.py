from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Any, Literal, NamedTuple, TypedDict

Edge = tuple[int, int]
ColourPair = tuple[int, int]

EventKind = Literal["A_u", "A_uv_c", "B1_u", "B2_u", "DP_A_u"]


def normalize_edge(u: int, v: int) -> Edge:
    """
    Returns the edge with its smaller endpoint first.
    """
    return (u, v) if u < v else (v, u)


class GraphJSON(TypedDict):
    """
    JSON-compatible dictionary representation of a Graph.
    """

    n: int
    edges: list[list[int]]


class ListAssignmentJSON(TypedDict):
    lists: list[list[int]]


class PartialColouringJSON(TypedDict):
    colours: list[int]


class MatchingJSON(TypedDict):
    edge: list[int]
    pairs: list[list[int]]


class CoverJSON(TypedDict):
    """
    JSON-compatible dictionary representation of a Cover.
    Shares the instance document format: a graph, its lists and the matchings.
    """

    n: int
    edges: list[list[int]]
    lists: list[list[int]]
    matchings: list[MatchingJSON]


class LotteryInstanceJSON(TypedDict):
    n: int
    decks: list[list[int]]


class BadEventJSON(TypedDict):
    kind: EventKind
    subject: list[int]
    holds: bool
    quantities: dict[str, float]
    violating: list[int]


class IndProfileJSON(TypedDict):
    n: int
    r: int
    ind: int
    histogram: list[int]


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph over the integer id space [0, vertex_count).

    Removing vertices keeps the original ids, the survivors are recorded in
    `alive`. Adjacency is cached both as frozensets and as bitmasks.

    Attributes:
        vertex_count (int): Size of the id space.
        edges (frozenset[Edge]): Edges, normalised so that u < v.
        alive (frozenset[int] | None): Surviving vertices. None means all ids.
    """

    vertex_count: int
    edges: frozenset[Edge] = frozenset()
    alive: frozenset[int] | None = None

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError(f"Vertex count must be non-negative, got {self.vertex_count}")
        if self.alive is None:
            object.__setattr__(self, "alive", frozenset(range(self.vertex_count)))
        else:
            stray = sorted(v for v in self.alive if not 0 <= v < self.vertex_count)
            if stray:
                raise ValueError(f"Vertex {stray[0]} out of range [0, {self.vertex_count})")
            object.__setattr__(self, "alive", frozenset(self.alive))

        normalized: set[Edge] = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"Self-loop at vertex {u}")
            for w in (u, v):
                if not 0 <= w < self.vertex_count:
                    raise ValueError(f"Vertex {w} out of range [0, {self.vertex_count})")
                if w not in self.vertices:
                    raise ValueError(f"Edge endpoint {w} is not a vertex of the graph")
            normalized.add(normalize_edge(int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @property
    def vertices(self) -> frozenset[int]:
        assert self.alive is not None
        return self.alive

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        buckets: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            buckets[u].add(v)
            buckets[v].add(u)
        return tuple(frozenset(b) for b in buckets)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """
        Neighbourhood of every id as a bitmask.
        """
        result = []
        for nbrs in self.adjacency:
            mask = 0
            for w in nbrs:
                mask |= 1 << w
            result.append(mask)
        return tuple(result)

    @cached_property
    def vertex_mask(self) -> int:
        mask = 0
        for v in self.vertices:
            mask |= 1 << v
        return mask

    @cached_property
    def max_degree(self) -> int:
        return max((len(self.adjacency[v]) for v in self.vertices), default=0)

    def check_vertex(self, v: int) -> None:
        """
        Raises:
            ValueError: If v is out of range or has been removed.
        """
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"Vertex {v} out of range [0, {self.vertex_count})")
        if v not in self.vertices:
            raise ValueError(f"Vertex {v} is not a vertex of the graph")

    def neighbours(self, v: int) -> frozenset[int]:
        self.check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbours(v))

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_edge(u, v) in self.edges

    def induced(self, keep: Iterable[int]) -> "Graph":
        """
        Returns the subgraph induced by keep, preserving vertex ids.
        """
        kept = frozenset(keep)
        for v in kept:
            self.check_vertex(v)
        edges = frozenset(e for e in self.edges if e[0] in kept and e[1] in kept)
        return Graph(self.vertex_count, edges, kept)

    @property
    def json(self) -> GraphJSON:
        """
        Returns a JSON-compatible dictionary representation of the graph.
        Removed vertices are not recorded; the id space is kept.
        """
        return {
            "n": self.vertex_count,
            "edges": [[u, v] for u, v in sorted(self.edges)],
        }


@dataclass(frozen=True)
class ListAssignment:
    """
    Finite set of positive colours per vertex id.
    Colour 0 is reserved for "blank" and is rejected in lists.
    """

    lists: tuple[frozenset[int], ...]

    def __post_init__(self):
        normalized = tuple(frozenset(int(c) for c in lst) for lst in self.lists)
        for v, lst in enumerate(normalized):
            bad = sorted(c for c in lst if c <= 0)
            if bad:
                raise ValueError(
                    f"List of vertex {v} contains non-positive colour {bad[0]}; colour 0 is reserved for blank"
                )
        object.__setattr__(self, "lists", normalized)

    @classmethod
    def from_lists(cls, lists: Iterable[Iterable[int]]) -> "ListAssignment":
        return cls(tuple(frozenset(lst) for lst in lists))

    @classmethod
    def uniform(cls, vertex_count: int, colours: Iterable[int]) -> "ListAssignment":
        palette = frozenset(colours)
        return cls(tuple(palette for _ in range(vertex_count)))

    def __getitem__(self, v: int) -> frozenset[int]:
        return self.lists[v]

    def __len__(self) -> int:
        return len(self.lists)

    @cached_property
    def palette(self) -> frozenset[int]:
        return frozenset().union(*self.lists)

    def blanked(self, v: int) -> tuple[int, ...]:
        """
        The list of v with the blank prepended, in ascending order.
        """
        return (0, *sorted(self.lists[v]))

    def is_k_assignment(self, k: int, vertices: Iterable[int] | None = None) -> bool:
        ids = range(len(self.lists)) if vertices is None else vertices
        return all(len(self.lists[v]) == k for v in ids)

    def min_size(self, vertices: Iterable[int]) -> int:
        return min((len(self.lists[v]) for v in vertices), default=0)

    def is_subassignment_of(self, other: "ListAssignment") -> bool:
        return len(self) == len(other) and all(
            mine <= theirs for mine, theirs in zip(self.lists, other.lists)
        )

    @property
    def json(self) -> ListAssignmentJSON:
        return {"lists": [sorted(lst) for lst in self.lists]}


@dataclass(frozen=True)
class PartialColouring:
    """
    Colour per vertex id, 0 meaning uncoloured.
    """

    colours: tuple[int, ...]

    def __post_init__(self):
        normalized = tuple(int(c) for c in self.colours)
        if any(c < 0 for c in normalized):
            raise ValueError("Colours must be non-negative")
        object.__setattr__(self, "colours", normalized)

    @classmethod
    def blank(cls, vertex_count: int) -> "PartialColouring":
        return cls((0,) * vertex_count)

    def __getitem__(self, v: int) -> int:
        return self.colours[v]

    def __len__(self) -> int:
        return len(self.colours)

    @cached_property
    def uncoloured(self) -> frozenset[int]:
        return frozenset(v for v, c in enumerate(self.colours) if c == 0)

    def uncoloured_neighbours(self, graph: Graph, u: int) -> frozenset[int]:
        return graph.neighbours(u) & self.uncoloured

    def with_colours(self, updates: Mapping[int, int]) -> "PartialColouring":
        """
        Returns a new colouring with the given vertices recoloured.
        """
        colours = list(self.colours)
        for v, c in updates.items():
            colours[v] = c
        return replace(self, colours=tuple(colours))

    @property
    def json(self) -> PartialColouringJSON:
        return {"colours": list(self.colours)}


class CoverVertex(NamedTuple):
    """
    Cover vertex (v, c): colour c at base vertex v.
    """

    owner: int
    colour: int

    @property
    def label(self) -> str:
        return f"{self.owner}_{self.colour}"


@dataclass(frozen=True)
class Cover:
    """
    A cover (L, H) of a base graph: one v-set per base vertex and a partial
    matching between the v-sets of every base edge.

    Matchings are stored per normalised base edge as pairs (colour at the
    smaller endpoint, colour at the larger endpoint). Structural validity is
    checked by `violations`; derived graphs are built on integer cover ids in
    (owner, colour) order.

    Attributes:
        base (Graph): The base graph G.
        lists (ListAssignment): The v-sets, as colours per base vertex.
        matchings (Mapping[Edge, frozenset[ColourPair]]): The matching M_uv.
    """

    base: Graph
    lists: ListAssignment
    matchings: Mapping[Edge, frozenset[ColourPair]] = field(default_factory=dict)

    def __post_init__(self):
        normalized: dict[Edge, set[ColourPair]] = {}
        for (u, v), pairs in self.matchings.items():
            key = normalize_edge(u, v)
            bucket = normalized.setdefault(key, set())
            for a, b in pairs:
                bucket.add((int(a), int(b)) if u < v else (int(b), int(a)))
        object.__setattr__(
            self, "matchings", {k: frozenset(p) for k, p in sorted(normalized.items())}
        )

    def violations(self) -> list[str]:
        """
        Lists every structural problem of the cover; empty when it is valid.
        """
        errors: list[str] = []
        if len(self.lists) != self.base.vertex_count:
            errors.append(
                f"Expected {self.base.vertex_count} lists, got {len(self.lists)}"
            )
            return errors
        for (u, v), pairs in self.matchings.items():
            if not self.base.has_edge(u, v):
                errors.append(f"Matching given for non-edge ({u}, {v})")
                continue
            seen_u: dict[int, int] = {}
            seen_v: dict[int, int] = {}
            for a, b in sorted(pairs):
                if a not in self.lists[u]:
                    errors.append(f"Matching on ({u}, {v}) uses colour {a} outside L({u})")
                if b not in self.lists[v]:
                    errors.append(f"Matching on ({u}, {v}) uses colour {b} outside L({v})")
                if a in seen_u:
                    errors.append(
                        f"Cover vertex {u}_{a} is matched twice on edge ({u}, {v})"
                    )
                if b in seen_v:
                    errors.append(
                        f"Cover vertex {v}_{b} is matched twice on edge ({u}, {v})"
                    )
                seen_u[a] = b
                seen_v[b] = a
        return errors

    @cached_property
    def cover_vertices(self) -> tuple[CoverVertex, ...]:
        return tuple(
            CoverVertex(v, c)
            for v in range(len(self.lists))
            for c in sorted(self.lists[v])
        )

    @cached_property
    def index(self) -> dict[CoverVertex, int]:
        return {x: i for i, x in enumerate(self.cover_vertices)}

    @cached_property
    def v_sets(self) -> tuple[tuple[int, ...], ...]:
        """
        Cover ids of every v-set, in ascending colour order.
        """
        buckets: list[list[int]] = [[] for _ in range(len(self.lists))]
        for i, x in enumerate(self.cover_vertices):
            buckets[x.owner].append(i)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def star_graph(self) -> Graph:
        """
        H*: only the matching edges, on cover ids.
        """
        edges = set()
        for (u, v), pairs in self.matchings.items():
            for a, b in pairs:
                edges.add((self.index[CoverVertex(u, a)], self.index[CoverVertex(v, b)]))
        return Graph(len(self.cover_vertices), frozenset(edges))

    @cached_property
    def conflict_graph(self) -> Graph:
        """
        H: the matching edges plus a clique on every v-set.
        """
        edges = set(self.star_graph.edges)
        for ids in self.v_sets:
            for i, a in enumerate(ids):
                for b in ids[i + 1 :]:
                    edges.add((a, b))
        return Graph(len(self.cover_vertices), frozenset(edges))

    def ids(self, members: Iterable[CoverVertex]) -> frozenset[int]:
        """
        Converts cover vertices to cover ids.

        Raises:
            ValueError: If a member is not a vertex of the cover.
        """
        result = set()
        for x in members:
            x = CoverVertex(*x)
            if x not in self.index:
                raise ValueError(f"{x.label} is not a cover vertex")
            result.add(self.index[x])
        return frozenset(result)

    def members(self, ids: Iterable[int]) -> frozenset[CoverVertex]:
        return frozenset(self.cover_vertices[i] for i in ids)

    def partner(self, x: CoverVertex, v: int) -> CoverVertex | None:
        """
        The cover vertex of v matched to x, if any.
        """
        key = normalize_edge(x.owner, v)
        for a, b in self.matchings.get(key, frozenset()):
            mine, theirs = (a, b) if x.owner < v else (b, a)
            if mine == x.colour:
                return CoverVertex(v, theirs)
        return None

    @property
    def json(self) -> CoverJSON:
        """
        Returns a JSON-compatible dictionary representation of the cover.
        """
        return {
            "n": self.base.vertex_count,
            "edges": [[u, v] for u, v in sorted(self.base.edges)],
            "lists": [sorted(lst) for lst in self.lists.lists],
            "matchings": [
                {"edge": [u, v], "pairs": [[a, b] for a, b in sorted(pairs)]}
                for (u, v), pairs in self.matchings.items()
            ],
        }


@dataclass(frozen=True)
class LotteryInstance:
    """
    n coupons and m decks, each deck a non-empty subset of {1..n}.
    A draw picks a card uniformly from every deck with a blank added.
    """

    n: int
    decks: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"Lottery needs at least one coupon, got n={self.n}")
        normalized = tuple(frozenset(int(c) for c in deck) for deck in self.decks)
        for i, deck in enumerate(normalized):
            if not deck:
                raise ValueError(f"Deck {i} is empty")
            stray = sorted(c for c in deck if not 1 <= c <= self.n)
            if stray:
                raise ValueError(f"Deck {i} contains coupon {stray[0]} outside [1, {self.n}]")
        object.__setattr__(self, "decks", normalized)

    @classmethod
    def from_decks(cls, n: int, decks: Iterable[Iterable[int]]) -> "LotteryInstance":
        return cls(n, tuple(frozenset(deck) for deck in decks))

    @property
    def m(self) -> int:
        return len(self.decks)

    @property
    def outcome_count(self) -> int:
        return prod(len(deck) + 1 for deck in self.decks)

    def containing(self, coupon: int) -> tuple[int, ...]:
        """
        Indices of the decks holding the coupon.
        """
        return tuple(i for i, deck in enumerate(self.decks) if coupon in deck)

    @property
    def json(self) -> LotteryInstanceJSON:
        return {"n": self.n, "decks": [sorted(deck) for deck in self.decks]}


@dataclass(frozen=True)
class LotteryOutcome:
    """
    One card per deck, 0 for the blank.
    """

    draws: tuple[int, ...]

    @property
    def json(self) -> dict[str, list[int]]:
        return {"draws": list(self.draws)}


@dataclass(frozen=True)
class LotteryReduction:
    """
    A lottery obtained from the neighbourhood of a vertex.

    Attributes:
        vertex (int): The centre vertex u.
        coupons (tuple[int, ...]): The colours of u, coupon i being coupons[i - 1].
        deck_owners (tuple[int, ...]): The neighbour each deck comes from.
        instance (LotteryInstance | None): The lottery, None when u has no colours.
    """

    vertex: int
    coupons: tuple[int, ...]
    deck_owners: tuple[int, ...]
    instance: LotteryInstance | None

    def colour_of(self, coupon: int) -> int:
        return self.coupons[coupon - 1]


@dataclass(frozen=True)
class BadEventReport:
    """
    Outcome of testing one bad event.

    Attributes:
        kind (EventKind): Which family the event belongs to.
        subject (tuple[int, ...]): The vertex (and for edge events, the edge and colour).
        holds (bool): True when the bad event occurs.
        quantities (dict[str, float]): The measured values and their cutoffs.
        violating (tuple[int, ...]): Colours or vertices witnessing the event.
    """

    kind: EventKind
    subject: tuple[int, ...]
    holds: bool
    quantities: dict[str, float] = field(default_factory=dict)
    violating: tuple[int, ...] = ()

    @property
    def json(self) -> BadEventJSON:
        return {
            "kind": self.kind,
            "subject": list(self.subject),
            "holds": self.holds,
            "quantities": dict(self.quantities),
            "violating": list(self.violating),
        }


@dataclass(frozen=True)
class IndProfile:
    """
    Number of independent sets of a K_r-free graph, by size.
    """

    vertex_count: int
    r: int
    ind_count: int
    size_histogram: tuple[int, ...]

    def __post_init__(self):
        if sum(self.size_histogram) != self.ind_count:
            raise ValueError("Histogram does not sum to the independent set count")
        if not self.size_histogram or self.size_histogram[0] != 1:
            raise ValueError("Histogram must count the empty set exactly once")

    @property
    def json(self) -> IndProfileJSON:
        return {
            "n": self.vertex_count,
            "r": self.r,
            "ind": self.ind_count,
            "histogram": list(self.size_histogram),
        }


def as_json_ready(value: Any) -> Any:
    """
    Recursively converts tuples, frozensets and numpy scalars into plain JSON values.
    Sets are emitted sorted so that output is canonical.
    """
    if isinstance(value, dict):
        return {str(k): as_json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [as_json_ready(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return [as_json_ready(v) for v in sorted(value)]
    if isinstance(value, Fraction):
        return str(value)
    if hasattr(value, "tolist") and callable(value.tolist):
        return value.tolist()
    return value
