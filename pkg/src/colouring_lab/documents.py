from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from .models import ColourPair, Cover, Edge, Graph, ListAssignment, LotteryInstance, normalize_edge
from .validation import DocumentError

DocumentT = TypeVar("DocumentT", bound=BaseModel)


class GraphDocument(BaseModel):
    """
    On-disk form of a simple graph: `{"n": 5, "edges": [[0, 1], ...]}`.
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=0)
    edges: list[tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_edges(self) -> "GraphDocument":
        seen: set[Edge] = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"Self-loop on vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"Edge ({u}, {v}) leaves the vertex range 0..{self.n - 1}")
            edge = normalize_edge(u, v)
            if edge in seen:
                raise ValueError(f"Duplicate edge {edge}")
            seen.add(edge)
        return self

    def to_graph(self) -> Graph:
        return Graph(self.n, frozenset(normalize_edge(u, v) for u, v in self.edges))


class MatchingDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    edge: tuple[int, int]
    pairs: list[tuple[int, int]] = Field(default_factory=list)


class InstanceDocument(GraphDocument):
    """
    A graph with lists, and optionally the matchings of a cover.

    Without `matchings` the document describes a list-colouring instance; with
    them it describes a cover. Matching pairs are `[colour at edge[0], colour
    at edge[1]]` in the order the edge is written.
    """

    lists: list[list[int]]
    matchings: list[MatchingDocument] | None = None

    @model_validator(mode="after")
    def _check_lists(self) -> "InstanceDocument":
        if len(self.lists) != self.n:
            raise ValueError(f"Expected {self.n} lists, got {len(self.lists)}")
        for v, lst in enumerate(self.lists):
            if any(c <= 0 for c in lst):
                raise ValueError(f"List of vertex {v} contains a colour <= 0")
        return self

    @property
    def is_cover(self) -> bool:
        return self.matchings is not None

    def to_lists(self) -> ListAssignment:
        return ListAssignment.from_lists(self.lists)

    def to_cover(self) -> Cover:
        """
        Builds the cover. Structural problems (pairs outside lists, non-edges,
        repeated cover vertices) are left for `cover.validate_cover` to report.
        """
        matchings: dict[Edge, frozenset[ColourPair]] = {}
        for m in self.matchings or []:
            u, v = m.edge
            pairs = m.pairs if u <= v else [(b, a) for a, b in m.pairs]
            key = normalize_edge(u, v)
            matchings[key] = matchings.get(key, frozenset()) | frozenset(pairs)
        return Cover(self.to_graph(), self.to_lists(), matchings)


class LotteryDocument(BaseModel):
    """
    `{"n": 10, "decks": [[1, 2, 3], ...]}` with coupons numbered 1..n.
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    decks: list[list[int]] = Field(default_factory=list)

    def to_instance(self) -> LotteryInstance:
        return LotteryInstance.from_decks(self.n, self.decks)


def parse_document(data: Any, model: type[DocumentT]) -> DocumentT:
    """
    Validates decoded JSON against a document model.

    Raises:
        DocumentError: With one "Field 'loc' - msg" line per pydantic error.
    """
    try:
        return model.model_validate(data)
    except PydanticValidationError as e:
        errors = []
        for err in e.errors():
            loc = ".".join(map(str, err["loc"])) or "<root>"
            errors.append(f"Field '{loc}' - {err['msg']}")
        raise DocumentError(errors) from e
