import logging
from abc import ABC, abstractmethod
from collections import Counter, defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Any, Generic, TypeVar

from .cover import canonical_cover, conflict_graph
from .lists import colouring_violations, narrow, strip_used_colours, subtract_assignment
from .models import Cover, CoverVertex, Graph, ListAssignment, PartialColouring
from .schemas import DEFAULT_ENUMERATION_SCHEMA, EnumerationSchema
from .utils import format_colours, iter_bits, make_rng, mask_of
from .validation import EnumerationGuardError

logger = logging.getLogger(__name__)

T = TypeVar("T")


class IndependentSetCounter:
    """
    Memoised counts of independent sets inside vertex subsets of one graph.

    Subsets are bitmasks over vertex ids. Counting branches on a vertex of
    maximum degree within the subset: either it is left out, or it is taken
    and its closed neighbourhood is removed. Edgeless subsets are counted in
    closed form.

    Counts only grow with the subset, so with a limit the recursion stops as
    soon as any subset holds more than `limit` independent sets. The count
    carried by the error is then a lower bound on the full count.
    """

    def __init__(self, graph: Graph, limit: int | None = None, what: str = "Independent sets"):
        self.graph = graph
        self.limit = limit
        self.what = what
        self._masks = graph.masks
        self._closed = tuple(m | (1 << v) for v, m in enumerate(graph.masks))
        self._polys: dict[int, tuple[int, ...]] = {0: (1,)}

    def closed(self, v: int) -> int:
        return self._closed[v]

    def _pivot(self, mask: int) -> int | None:
        best, best_degree = None, 0
        for v in iter_bits(mask):
            degree = (self._masks[v] & mask).bit_count()
            if degree > best_degree:
                best, best_degree = v, degree
        return best

    def size_polynomial(self, mask: int) -> tuple[int, ...]:
        """
        Coefficient j is the number of independent sets of size j inside mask.
        """
        cached = self._polys.get(mask)
        if cached is not None:
            return cached
        pivot = self._pivot(mask)
        if pivot is None:
            k = mask.bit_count()
            result = tuple(comb(k, j) for j in range(k + 1))
        else:
            without = self.size_polynomial(mask & ~(1 << pivot))
            taken = self.size_polynomial(mask & ~self._closed[pivot])
            width = max(len(without), len(taken) + 1)
            coeffs = [0] * width
            for j, a in enumerate(without):
                coeffs[j] += a
            for j, a in enumerate(taken):
                coeffs[j + 1] += a
            result = tuple(coeffs)
        if self.limit is not None and sum(result) > self.limit:
            raise EnumerationGuardError(self.what, sum(result), self.limit)
        self._polys[mask] = result
        return result

    def count(self, mask: int) -> int:
        return sum(self.size_polynomial(mask))

    def count_of_size(self, mask: int, size: int) -> int:
        poly = self.size_polynomial(mask)
        return poly[size] if 0 <= size < len(poly) else 0


class EnumerationIndex(ABC, Generic[T]):
    """
    A bijection between [0, total_count) and a finite family of objects.
    """

    total_count: int

    @abstractmethod
    def unrank(self, k: int) -> T: ...

    @abstractmethod
    def rank(self, obj: T) -> int: ...

    def __len__(self) -> int:
        return self.total_count

    def __iter__(self) -> Iterator[T]:
        for k in range(self.total_count):
            yield self.unrank(k)

    def _check_rank(self, k: int) -> None:
        if not 0 <= k < self.total_count:
            raise IndexError(f"Rank {k} out of range [0, {self.total_count})")

    def sample(self, seed: int, trial: int = 0) -> T:
        """
        Uniform draw via a uniform rank from the (seed, trial) substream.
        """
        rng = make_rng(seed, trial)
        return self.unrank(int(rng.integers(self.total_count)))

    def sample_many(self, count: int, seed: int) -> list[T]:
        rng = make_rng(seed)
        return [self.unrank(int(k)) for k in rng.integers(self.total_count, size=count)]


class IndependentSetIndex(EnumerationIndex[frozenset[int]]):
    """
    Independent sets of a graph ordered by size, then lexicographically.

    Args:
        graph (Graph): The graph; only its surviving vertices are used.
        schema (EnumerationSchema, optional): Enumeration guard.

    Raises:
        EnumerationGuardError: If the graph has more independent sets than the guard.
    """

    def __init__(self, graph: Graph, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA):
        self.graph = graph
        self.counter = IndependentSetCounter(graph, schema.guard)
        self.universe = graph.vertex_mask
        self.histogram = self.counter.size_polynomial(self.universe)
        self.total_count = sum(self.histogram)
        offsets = [0]
        for h in self.histogram:
            offsets.append(offsets[-1] + h)
        self._offsets = tuple(offsets)

    def offset_of_size(self, size: int) -> int:
        """
        Rank of the first independent set of the given size.
        """
        return self._offsets[min(size, len(self.histogram))]

    def unrank(self, k: int) -> frozenset[int]:
        self._check_rank(k)
        size = 0
        while self._offsets[size + 1] <= k:
            size += 1
        k -= self._offsets[size]
        chosen = []
        allowed = self.universe
        need = size
        while need:
            candidates = allowed
            while True:
                low = candidates & -candidates
                v = low.bit_length() - 1
                candidates ^= low
                rest = candidates & ~self.graph.masks[v]
                block = self.counter.count_of_size(rest, need - 1)
                if k < block:
                    chosen.append(v)
                    allowed = rest
                    need -= 1
                    break
                k -= block
        return frozenset(chosen)

    def rank(self, obj: Iterable[int]) -> int:
        members = sorted(obj)
        chosen = mask_of(members)
        if chosen & ~self.universe:
            raise ValueError("Set contains vertices outside the graph")
        if any(self.graph.masks[v] & chosen for v in members):
            raise ValueError("Set is not independent")
        k = self._offsets[len(members)]
        allowed = self.universe
        need = len(members)
        for v in members:
            candidates = allowed
            while True:
                low = candidates & -candidates
                w = low.bit_length() - 1
                candidates ^= low
                rest = candidates & ~self.graph.masks[w]
                if w == v:
                    allowed = rest
                    need -= 1
                    break
                k += self.counter.count_of_size(rest, need - 1)
        return k


class PartialColouringIndex(EnumerationIndex[PartialColouring]):
    """
    Partial L-colourings in vertex order, each vertex trying blank then ascending colours.

    Counting goes through the conflict graph of the canonical cover, where
    partial colourings are exactly the independent sets.

    Raises:
        EnumerationGuardError: If there are more colourings than the guard.
    """

    def __init__(
        self,
        graph: Graph,
        lists: ListAssignment,
        schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
    ):
        self.graph = graph
        self.lists = lists
        self.cover = canonical_cover(graph, lists)
        self.counter = IndependentSetCounter(
            conflict_graph(self.cover), schema.guard, "Partial colourings"
        )
        self.order = tuple(sorted(graph.vertices))
        later = []
        tail = 0
        for v in reversed(self.order):
            later.append(tail)
            tail |= mask_of(self.cover.v_sets[v])
        self._later = tuple(reversed(later))
        self._all = tail
        self.total_count = self.counter.count(tail)

    def _options(self, v: int, blocked: int) -> Iterator[tuple[int, int]]:
        # (colour, cover id) pairs still available at v; colour 0 has id -1.
        yield 0, -1
        for i in self.cover.v_sets[v]:
            if not blocked >> i & 1:
                yield self.cover.cover_vertices[i].colour, i

    def unrank(self, k: int) -> PartialColouring:
        self._check_rank(k)
        colours = [0] * self.graph.vertex_count
        blocked = 0
        for position, v in enumerate(self.order):
            later = self._later[position]
            for colour, i in self._options(v, blocked):
                extra = self.counter.closed(i) if i >= 0 else 0
                block = self.counter.count(later & ~(blocked | extra))
                if k < block:
                    colours[v] = colour
                    blocked |= extra
                    break
                k -= block
        return PartialColouring(tuple(colours))

    def rank(self, obj: PartialColouring) -> int:
        errors = colouring_violations(self.graph, self.lists, obj)
        if errors:
            raise ValueError("Not a partial colouring: " + "; ".join(errors))
        k = 0
        blocked = 0
        for position, v in enumerate(self.order):
            later = self._later[position]
            for colour, i in self._options(v, blocked):
                extra = self.counter.closed(i) if i >= 0 else 0
                if colour == obj[v]:
                    blocked |= extra
                    break
                k += self.counter.count(later & ~(blocked | extra))
        return k


def enumerate_partial_colourings(
    graph: Graph, lists: ListAssignment, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA
) -> PartialColouringIndex:
    return PartialColouringIndex(graph, lists, schema)


def sample_uniform_partial_colouring(
    graph: Graph,
    lists: ListAssignment,
    seed: int,
    trial: int = 0,
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> PartialColouring:
    """
    Exactly uniform partial L-colouring, deterministic per (seed, trial).

    Raises:
        EnumerationGuardError: If the instance has too many colourings.
    """
    return PartialColouringIndex(graph, lists, schema).sample(seed, trial)


def enumerate_independent_sets(
    graph: Graph, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA
) -> IndependentSetIndex:
    return IndependentSetIndex(graph, schema)


def sample_uniform_independent_set(
    graph: Graph,
    seed: int,
    trial: int = 0,
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> frozenset[int]:
    return IndependentSetIndex(graph, schema).sample(seed, trial)


@dataclass(frozen=True)
class UniformityCheck:
    """
    Conditional distribution of the free part of a uniform object given the fixed part.

    Attributes:
        ok (bool): Outcome set equals the expected set and all counts are equal.
        table (dict[str, int]): Outcome key to number of conditioned objects.
        expected_outcomes (int): Size of the family the law should be uniform on.
        conditioned (int): Number of objects agreeing with the fixed part.
    """

    ok: bool
    table: dict[str, int]
    expected_outcomes: int
    conditioned: int

    @property
    def json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "table": dict(sorted(self.table.items())),
            "expected_outcomes": self.expected_outcomes,
            "conditioned": self.conditioned,
        }


@dataclass(frozen=True)
class SweepSummary:
    """
    Result of checking every conditioning choice of an instance.
    """

    conditions: int
    violations: int
    first_violation: str | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0

    @property
    def json(self) -> dict[str, Any]:
        return {
            "conditions": self.conditions,
            "violations": self.violations,
            "first_violation": self.first_violation,
        }


def _judge(table: Counter, expected: set) -> bool:
    return set(table) == expected and len(set(table.values())) <= 1


def verify_conditional_uniformity_lists(
    graph: Graph,
    lists: ListAssignment,
    sub: ListAssignment,
    fixed: PartialColouring,
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> UniformityCheck:
    """
    Checks that fixing the L'-part of a uniform partial L-colouring leaves the
    rest uniform over the partial colourings of (L - L')^{fixed}.

    Args:
        graph (Graph): The graph.
        lists (ListAssignment): The lists L.
        sub (ListAssignment): A sub-assignment L' of L.
        fixed (PartialColouring): A partial L'-colouring to condition on.
        schema (EnumerationSchema, optional): Enumeration guard.

    Returns:
        UniformityCheck: Verdict and the conditional distribution table.

    Raises:
        ValueError: If L' is not inside L or fixed is not a partial L'-colouring.
    """
    rest = subtract_assignment(lists, sub)
    errors = colouring_violations(graph, sub, fixed)
    if errors:
        raise ValueError("Not a partial colouring of the sub-assignment: " + "; ".join(errors))

    target = strip_used_colours(graph, rest, fixed)
    expected = {format_colours(w.colours) for w in PartialColouringIndex(graph, target, schema)}

    table: Counter = Counter()
    for colouring in PartialColouringIndex(graph, lists, schema):
        if narrow(colouring, sub) == fixed:
            table[format_colours(narrow(colouring, rest).colours)] += 1
    return UniformityCheck(
        ok=_judge(table, expected),
        table=dict(table),
        expected_outcomes=len(expected),
        conditioned=sum(table.values()),
    )


def _sub_assignments(lists: ListAssignment, vertices: Iterable[int]) -> Iterator[ListAssignment]:
    ids = sorted(vertices)
    per_vertex = []
    for v in ids:
        colours = sorted(lists[v])
        per_vertex.append(
            [frozenset(c for j, c in enumerate(colours) if bits >> j & 1) for bits in range(1 << len(colours))]
        )
    for choice in product(*per_vertex):
        sub: list[frozenset[int]] = [frozenset()] * len(lists)
        for v, lst in zip(ids, choice):
            sub[v] = lst
        yield ListAssignment(tuple(sub))


def sweep_conditional_uniformity_lists(
    graph: Graph, lists: ListAssignment, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA
) -> SweepSummary:
    """
    Checks conditional uniformity for every sub-assignment and every partial colouring of it.

    All partial L-colourings are enumerated once; for each L' they are grouped
    by their narrowing, and each group must be uniform over its target family.
    """
    colourings = list(PartialColouringIndex(graph, lists, schema))
    conditions = 0
    violations = 0
    first: str | None = None
    for sub in _sub_assignments(lists, graph.vertices):
        rest = subtract_assignment(lists, sub)
        groups: dict[PartialColouring, Counter] = defaultdict(Counter)
        for colouring in colourings:
            groups[narrow(colouring, sub)][narrow(colouring, rest).colours] += 1
        for fixed, table in groups.items():
            conditions += 1
            target = strip_used_colours(graph, rest, fixed)
            expected = {w.colours for w in PartialColouringIndex(graph, target, schema)}
            if not _judge(table, expected):
                violations += 1
                if first is None:
                    first = f"L'={[sorted(s) for s in sub.lists]} fixed={format_colours(fixed.colours)}"
    logger.info("list sweep: %d conditions, %d violations", conditions, violations)
    return SweepSummary(conditions, violations, first)


def _cover_check_inputs(cov: Cover, sub: Iterable[int], fixed: Iterable[CoverVertex]) -> tuple[Graph, int, int]:
    graph = conflict_graph(cov)
    sub_mask = mask_of(sub)
    if sub_mask & ~graph.vertex_mask:
        raise ValueError("Sub-cover contains ids outside the cover")
    fixed_mask = mask_of(cov.ids(fixed))
    if fixed_mask & ~sub_mask:
        raise ValueError("Fixed set must lie inside the sub-cover")
    if any(graph.masks[i] & fixed_mask for i in iter_bits(fixed_mask)):
        raise ValueError("Fixed set is not independent in the sub-cover")
    return graph, sub_mask, fixed_mask


def _blocked(graph: Graph, members: int) -> int:
    blocked = members
    for i in iter_bits(members):
        blocked |= graph.masks[i]
    return blocked


def verify_conditional_uniformity_cover(
    cov: Cover,
    sub: Iterable[int],
    fixed: Iterable[CoverVertex],
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> UniformityCheck:
    """
    Cover version of the conditional uniformity check.

    For a uniform independent set I of H, conditioned on I ∩ H' = fixed, the
    part I - H' must be uniform over the independent sets of (H - H')^{fixed}.

    Args:
        cov (Cover): The cover.
        sub (Iterable[int]): Cover ids spanning the induced sub-cover H'.
        fixed (Iterable[CoverVertex]): An independent set of H'.

    Raises:
        ValueError: If fixed is not an independent subset of H'.
    """
    graph, sub_mask, fixed_mask = _cover_check_inputs(cov, sub, fixed)
    outside = graph.vertex_mask & ~sub_mask
    target = outside & ~_blocked(graph, fixed_mask)
    expected = {
        format_colours(sorted(s))
        for s in IndependentSetIndex(graph.induced(iter_bits(target)), schema)
    }
    table: Counter = Counter()
    for members in IndependentSetIndex(graph, schema):
        mask = mask_of(members)
        if mask & sub_mask == fixed_mask:
            table[format_colours(sorted(iter_bits(mask & outside)))] += 1
    return UniformityCheck(
        ok=_judge(table, expected),
        table=dict(table),
        expected_outcomes=len(expected),
        conditioned=sum(table.values()),
    )


def sweep_conditional_uniformity_cover(
    cov: Cover, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA
) -> SweepSummary:
    """
    Checks the cover observation for every induced sub-cover and every independent set of it.
    """
    graph = conflict_graph(cov)
    members = [mask_of(s) for s in IndependentSetIndex(graph, schema)]
    universe = graph.vertex_mask
    conditions = 0
    violations = 0
    first: str | None = None
    sub_mask = universe
    # All submasks of the universe, including the empty one.
    while True:
        outside = universe & ~sub_mask
        groups: dict[int, Counter] = defaultdict(Counter)
        for mask in members:
            groups[mask & sub_mask][mask & outside] += 1
        for fixed_mask, table in groups.items():
            conditions += 1
            target = outside & ~_blocked(graph, fixed_mask)
            expected = {mask_of(s) for s in IndependentSetIndex(graph.induced(iter_bits(target)), schema)}
            if not _judge(table, expected):
                violations += 1
                if first is None:
                    first = (
                        f"H'={sorted(x.label for x in cov.members(iter_bits(sub_mask)))} "
                        f"fixed={sorted(x.label for x in cov.members(iter_bits(fixed_mask)))}"
                    )
        if sub_mask == 0:
            break
        sub_mask = (sub_mask - 1) & universe
    logger.info("cover sweep: %d conditions, %d violations", conditions, violations)
    return SweepSummary(conditions, violations, first)
