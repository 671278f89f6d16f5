import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

from .bounds import lll_threshold
from .chain import chain_bookkeeping
from .cover import (
    CoverResidual,
    canonical_cover,
    colouring_from_independent_set,
    conflict_graph,
    is_h_colouring,
    residual,
)
from .graph import ball
from .lists import (
    TWO_E,
    ReedCheck,
    is_list_colouring,
    narrow,
    reed_condition,
    residual_lists,
    strip_used_colours,
    subtract_assignment,
)
from .models import (
    BadEventReport,
    Cover,
    CoverVertex,
    Graph,
    ListAssignment,
    PartialColouring,
)
from .sampler import IndependentSetIndex, PartialColouringIndex
from .schemas import DEFAULT_SOLVER_SCHEMA, SolverSchema
from .utils import iter_bits, make_rng, mask_of
from .validation import EnumerationGuardError

logger = logging.getLogger(__name__)

PipelineKind = Literal["list", "dp", "kr"]
Status = Literal["success", "exhausted", "infeasible", "stuck", "failed"]


def _check_epsilon(epsilon: float) -> None:
    if not 0 < epsilon < 1 / 3:
        raise ValueError(f"epsilon must lie in (0, 1/3), got {epsilon}")


def size_cut(epsilon: float, n: int) -> float:
    """
    Residual lists shorter than (1 - ε) n^ε are bad.
    """
    return (1 - epsilon) * n**epsilon


def availability_cut(epsilon: float, n: int) -> float:
    """
    Residual availabilities above ε² n^ε are bad.
    """
    return epsilon**2 * n**epsilon


def asymptotic_list_size(delta: int, epsilon: float) -> int:
    """
    floor((1 + 4ε) Δ / log Δ), reported for comparison only.
    """
    if delta < 2:
        raise ValueError(f"Δ must be at least 2, got {delta}")
    return math.floor((1 + 4 * epsilon) * delta / math.log(delta))


def kr_list_size(delta: int, r: int) -> float:
    """
    2 (r - 2) Δ log2 log2 Δ / log2 Δ, reported for comparison only.
    """
    if delta <= 2:
        raise ValueError(f"Δ must exceed 2, got {delta}")
    return 2 * (r - 2) * delta * math.log2(math.log2(delta)) / math.log2(delta)


# --- Bad events ---------------------------------------------------------------------


def _a_u_report(
    graph: Graph,
    colouring: PartialColouring,
    remaining: ListAssignment,
    u: int,
    epsilon: float,
    n: int,
) -> BadEventReport:
    graph.check_vertex(u)
    cut_size = size_cut(epsilon, n)
    cut_avail = availability_cut(epsilon, n)
    if colouring[u] > 0:
        return BadEventReport(
            "A_u", (u,), False, {"size_cut": cut_size, "availability_cut": cut_avail}
        )
    own = remaining[u]
    violating = []
    worst = 0
    for c in sorted(own):
        avail = sum(1 for v in graph.adjacency[u] if v in graph.vertices and c in remaining[v])
        worst = max(worst, avail)
        if avail > cut_avail:
            violating.append(c)
    short = len(own) < cut_size
    return BadEventReport(
        "A_u",
        (u,),
        short or bool(violating),
        {
            "residual_size": float(len(own)),
            "size_cut": cut_size,
            "max_availability": float(worst),
            "availability_cut": cut_avail,
        },
        tuple(violating),
    )


def detect_a_u(
    graph: Graph,
    lists: ListAssignment,
    colouring: PartialColouring,
    u: int,
    epsilon: float,
    n: int,
) -> BadEventReport:
    """
    Tests the list bad event at u.

    It holds when u is uncoloured and either its residual list is shorter than
    (1 - ε) n^ε or some residual colour has residual availability above ε² n^ε.
    Every such colour is listed in `violating`.

    Raises:
        ValueError: If ε is outside (0, 1/3) or the colouring is improper.
    """
    _check_epsilon(epsilon)
    return _a_u_report(graph, colouring, residual_lists(graph, lists, colouring), u, epsilon, n)


def _dp_a_u_report(
    cov: Cover, res: CoverResidual, u: int, epsilon: float, n: int
) -> BadEventReport:
    cut_size = size_cut(epsilon, n)
    cut_avail = availability_cut(epsilon, n)
    if u not in res.uncovered:
        return BadEventReport(
            "DP_A_u", (u,), False, {"size_cut": cut_size, "availability_cut": cut_avail}
        )
    own = sorted(res.lists[u])
    violating = []
    worst = 0
    for x in own:
        degree = len(res.residual_star.neighbours(cov.index[x]))
        worst = max(worst, degree)
        if degree > cut_avail:
            violating.append(x.colour)
    short = len(own) < cut_size
    return BadEventReport(
        "DP_A_u",
        (u,),
        short or bool(violating),
        {
            "residual_size": float(len(own)),
            "size_cut": cut_size,
            "max_availability": float(worst),
            "availability_cut": cut_avail,
        },
        tuple(violating),
    )


def detect_dp_a_u(
    cov: Cover, members: Iterable[CoverVertex], u: int, epsilon: float, n: int
) -> BadEventReport:
    """
    Cover form of the list bad event: u uncovered and either L^I_u is short or
    some u_c in L^I_u has more than ε² n^ε neighbours in (H^I)*.
    """
    _check_epsilon(epsilon)
    cov.base.check_vertex(u)
    return _dp_a_u_report(cov, residual(cov, members), u, epsilon, n)


def _b_reports(res: CoverResidual, u: int, l: float) -> tuple[BadEventReport, BadEventReport]:
    own = res.list_size(u)
    first = BadEventReport(
        "B1_u",
        (u,),
        u in res.uncovered and own < l,
        {"residual_size": float(own), "l": l},
    )
    if u in res.uncovered:
        nbrs = sorted(res.base.neighbours(u))
        sizes = [res.list_size(v) for v in nbrs]
    else:
        nbrs, sizes = [], []
    second = BadEventReport(
        "B2_u",
        (u,),
        u in res.uncovered and len(nbrs) >= l and all(s >= l for s in sizes),
        {
            "residual_degree": float(len(nbrs)),
            "min_neighbour_residual": float(min(sizes, default=0)),
            "l": l,
        },
        tuple(nbrs),
    )
    return first, second


def detect_b_events(
    cov: Cover,
    members: Iterable[CoverVertex],
    u: int,
    l: float,
    epsilon: float | None = None,
    n: int | None = None,
) -> tuple[BadEventReport, ...]:
    """
    Tests the two K_r-free bad events at u, plus the cover list event when ε and n are given.

    B1 holds when u is uncovered with |L^I_u| < l. B2 holds when u is uncovered,
    has at least l uncovered neighbours, and each of them keeps at least l
    residual colours.

    Raises:
        ValueError: If I is not independent or l is negative.
    """
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    cov.base.check_vertex(u)
    res = residual(cov, members)
    reports = _b_reports(res, u, l)
    if epsilon is not None and n is not None:
        _check_epsilon(epsilon)
        reports = (*reports, _dp_a_u_report(cov, res, u, epsilon, n))
    return reports


# --- Moser-Tardos finisher ------------------------------------------------------------


@dataclass(frozen=True)
class LLLReport:
    """
    Exact symmetric Local Lemma parameters of the monochromatic-edge events.
    """

    probability: float
    dependency_degree: int
    ok: bool

    @property
    def json(self) -> dict[str, Any]:
        return {"p": self.probability, "D": self.dependency_degree, "ok": self.ok}


def lll_report(graph: Graph, lists: ListAssignment) -> LLLReport:
    """
    p is the largest Pr(both ends of an edge get colour c) = 1/(|L(u)||L(v)|);
    D is the largest number of other events sharing a colour variable with one.
    """
    # Events at w: one per neighbour x and common colour.
    load = {
        w: sum(len(lists[w] & lists[x]) for x in graph.adjacency[w] if x in graph.vertices)
        for w in graph.vertices
    }
    p = 0.0
    d = 0
    for u, v in graph.edges:
        common = len(lists[u] & lists[v])
        if not common:
            continue
        p = max(p, 1 / (len(lists[u]) * len(lists[v])))
        d = max(d, load[u] + load[v] - common - 1)
    return LLLReport(p, d, lll_threshold(d, p))


@dataclass(frozen=True)
class ReedResult:
    status: Status
    colouring: PartialColouring | None
    resamples: int
    condition: ReedCheck | None
    lll: LLLReport
    detail: str = ""

    @property
    def json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "colouring": None if self.colouring is None else list(self.colouring.colours),
            "resamples": self.resamples,
            "condition": None if self.condition is None else self.condition.json,
            "lll": self.lll.json,
            "detail": self.detail,
        }


def moser_tardos_reed(
    graph: Graph,
    lists: ListAssignment,
    l: float | None = None,
    seed: int = 0,
    max_resamples: int = DEFAULT_SOLVER_SCHEMA.max_resamples,
) -> ReedResult:
    """
    Colours the graph from its lists by resampling monochromatic edges.

    Every vertex starts with an independent uniform colour from its list.
    While some edge is monochromatic, the lowest such edge has both endpoints
    redrawn. The finishing condition at l is evaluated and reported but does
    not gate the run.

    Args:
        graph (Graph): The graph; removed vertices are ignored.
        lists (ListAssignment): Lists of every vertex.
        l (float | None, optional): Parameter of the finishing condition to report.
        seed (int, optional): Seed of the (seed,) stream.
        max_resamples (int, optional): Resampling budget.

    Returns:
        ReedResult: success with a proper colouring, exhausted, or infeasible
            when some vertex has an empty list.
    """
    condition = reed_condition(graph, lists, l) if l is not None and l > 0 else None
    lll = lll_report(graph, lists)
    order = sorted(graph.vertices)
    empty = [v for v in order if not lists[v]]
    if empty:
        return ReedResult(
            "infeasible", None, 0, condition, lll, f"vertex {empty[0]} has an empty list"
        )

    rng = make_rng(seed)
    palettes = {v: sorted(lists[v]) for v in order}
    colours = [0] * graph.vertex_count

    def redraw(w: int) -> None:
        options = palettes[w]
        colours[w] = options[int(rng.integers(len(options)))]

    for v in order:
        redraw(v)
    bad = {(u, v) for u, v in graph.edges if colours[u] == colours[v]}
    resamples = 0
    while bad:
        if resamples >= max_resamples:
            logger.info("moser-tardos exhausted after %d resamples", resamples)
            return ReedResult(
                "exhausted", None, resamples, condition, lll, f"{len(bad)} monochromatic edges left"
            )
        u, v = min(bad)
        redraw(u)
        redraw(v)
        resamples += 1
        for w in (u, v):
            for x in graph.adjacency[w]:
                if x not in graph.vertices:
                    continue
                edge = (w, x) if w < x else (x, w)
                if colours[w] == colours[x]:
                    bad.add(edge)
                else:
                    bad.discard(edge)
    logger.debug("moser-tardos finished after %d resamples", resamples)
    return ReedResult("success", PartialColouring(tuple(colours)), resamples, condition, lll)


# --- Independent transversals --------------------------------------------------------


@dataclass(frozen=True)
class TransversalResult:
    """
    Outcome of the independent transversal search.

    Attributes:
        transversal (frozenset[int] | None): One vertex per part, pairwise non-adjacent.
        hypothesis (bool): Δ(F) <= l/2 and every part has at least l vertices.
        weak_hypothesis (bool): The same with Δ(F) <= l/(2e).
        max_degree (int): Δ(F).
        min_part (int): Smallest part size.
        nodes (int): Search nodes visited.
    """

    transversal: frozenset[int] | None
    hypothesis: bool
    weak_hypothesis: bool
    max_degree: int
    min_part: int
    nodes: int

    @property
    def json(self) -> dict[str, Any]:
        return {
            "transversal": None if self.transversal is None else sorted(self.transversal),
            "hypothesis": self.hypothesis,
            "weak_hypothesis": self.weak_hypothesis,
            "max_degree": self.max_degree,
            "min_part": self.min_part,
            "nodes": self.nodes,
        }


def haxell_transversal(
    graph: Graph,
    parts: Sequence[Iterable[int]],
    l: float,
    search_guard: int = DEFAULT_SOLVER_SCHEMA.search_guard,
) -> TransversalResult:
    """
    Finds an independent set meeting every part exactly once, by exact backtracking.

    The part with the fewest surviving candidates is branched on first;
    candidates are tried in ascending id order.

    Raises:
        ValueError: If the parts are not a partition of the vertices.
        EnumerationGuardError: If the search visits more nodes than the guard.
    """
    masks = [mask_of(p) for p in parts]
    union = 0
    for m in masks:
        if union & m:
            raise ValueError("Parts are not disjoint")
        union |= m
    if union != graph.vertex_mask:
        raise ValueError("Parts do not cover the vertex set")

    max_degree = graph.max_degree
    min_part = min((m.bit_count() for m in masks), default=0)
    hypothesis = max_degree <= l / 2 and min_part >= l
    weak = max_degree * TWO_E <= l and min_part >= l

    closed = {v: graph.masks[v] | (1 << v) for v in graph.vertices}
    nodes = 0

    def search(remaining: list[int], blocked: int) -> list[int] | None:
        nonlocal nodes
        if not remaining:
            return []
        nodes += 1
        if nodes > search_guard:
            raise EnumerationGuardError("Transversal search nodes", nodes, search_guard)
        pick = min(range(len(remaining)), key=lambda j: (remaining[j] & ~blocked).bit_count())
        options = remaining[pick] & ~blocked
        rest = remaining[:pick] + remaining[pick + 1 :]
        for v in iter_bits(options):
            found = search(rest, blocked | closed[v])
            if found is not None:
                return [v, *found]
        return None

    found = search(masks, 0)
    logger.debug("transversal search visited %d nodes", nodes)
    return TransversalResult(
        transversal=None if found is None else frozenset(found),
        hypothesis=hypothesis,
        weak_hypothesis=weak,
        max_degree=max_degree,
        min_part=min_part,
        nodes=nodes,
    )


# --- Greedy completion ---------------------------------------------------------------


@dataclass(frozen=True)
class GreedyResult:
    independent_set: frozenset[CoverVertex]
    stuck: int | None = None

    @property
    def complete(self) -> bool:
        return self.stuck is None


def greedy_complete(cov: Cover, members: Iterable[CoverVertex]) -> GreedyResult:
    """
    Extends I one cover vertex at a time: the lowest uncovered vertex with a
    non-empty residual list takes its lowest available colour.

    Returns the extended set, with `stuck` naming the lowest uncovered vertex
    left with an empty residual list when not every vertex could be covered.
    """
    graph = conflict_graph(cov)
    ids = cov.ids(members)
    chosen = mask_of(ids)
    if any(graph.masks[i] & chosen for i in ids):
        raise ValueError("Starting set is not independent in the conflict graph")
    blocked = chosen
    for i in ids:
        blocked |= graph.masks[i]
    covered = {cov.cover_vertices[i].owner for i in ids}

    while True:
        progress = False
        for v in sorted(cov.base.vertices):
            if v in covered:
                continue
            free = [i for i in cov.v_sets[v] if not blocked >> i & 1]
            if free:
                i = free[0]
                chosen |= 1 << i
                blocked |= graph.masks[i] | (1 << i)
                covered.add(v)
                progress = True
                break
        if not progress:
            break

    stuck = next((v for v in sorted(cov.base.vertices) if v not in covered), None)
    return GreedyResult(cov.members(iter_bits(chosen)), stuck)


# --- Exhaustive oracle ---------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    colourable: bool
    witness: frozenset[CoverVertex] | None
    explored: int

    @property
    def json(self) -> dict[str, Any]:
        return {
            "colourable": self.colourable,
            "witness": None if self.witness is None else sorted(x.label for x in self.witness),
            "explored": self.explored,
        }


def _as_cover(instance: Cover | tuple[Graph, ListAssignment]) -> Cover:
    if isinstance(instance, Cover):
        return instance
    graph, lists = instance
    return canonical_cover(graph, lists)


def exhaustive_colourable(
    instance: Cover | tuple[Graph, ListAssignment],
    search_guard: int = DEFAULT_SOLVER_SCHEMA.search_guard,
) -> OracleResult:
    """
    Decides whether an H-colouring exists by trying one cover vertex per v-set.

    Raises:
        EnumerationGuardError: If the product of list sizes exceeds the guard.
    """
    cov = _as_cover(instance)
    graph = conflict_graph(cov)
    order = sorted(cov.base.vertices)
    selections = math.prod(len(cov.v_sets[v]) for v in order)
    if selections > search_guard:
        raise EnumerationGuardError("Colour selections", selections, search_guard)

    explored = 0

    def search(position: int, blocked: int) -> list[int] | None:
        nonlocal explored
        if position == len(order):
            return []
        for i in cov.v_sets[order[position]]:
            if blocked >> i & 1:
                continue
            explored += 1
            rest = search(position + 1, blocked | graph.masks[i] | (1 << i))
            if rest is not None:
                return [i, *rest]
        return None

    found = search(0, 0)
    witness = None if found is None else cov.members(found)
    return OracleResult(found is not None, witness, explored)


# --- Pipelines ----------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    """
    Outcome of an end-to-end pipeline run.

    On success `colouring` (list pipeline) or `independent_set` (cover
    pipelines) holds a validated solution. Otherwise `diagnostic` names the
    stage that failed and what was measured there. "infeasible" is kept for
    instances that provably have no colouring (an empty input list); a run
    whose finisher or validation fails is "failed".
    """

    status: Status
    kind: PipelineKind
    seed: int
    resamples: int
    colouring: PartialColouring | None = None
    independent_set: frozenset[CoverVertex] | None = None
    diagnostic: dict[str, Any] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.status == "success"

    @property
    def json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "kind": self.kind,
            "seed": self.seed,
            "resamples": self.resamples,
            "colouring": None if self.colouring is None else list(self.colouring.colours),
            "independent_set": None
            if self.independent_set is None
            else sorted(x.label for x in self.independent_set),
            "diagnostic": self.diagnostic,
        }


def _failure(
    status: Status, kind: PipelineKind, seed: int, resamples: int, stage: str, **detail: Any
) -> PipelineResult:
    logger.info("%s pipeline stopped at %s: %s", kind, stage, status)
    return PipelineResult(
        status, kind, seed, resamples, diagnostic={"stage": stage, "resamples": resamples, **detail}
    )


def _resample_ball_lists(
    graph: Graph,
    lists: ListAssignment,
    colouring: PartialColouring,
    centre: int,
    schema: SolverSchema,
    seed: int,
    trial: int,
) -> PartialColouring:
    # Uniform recolouring of the ball given everything outside it.
    region = ball(graph, centre, schema.ball_radius)
    outside = ListAssignment(
        tuple(frozenset() if v in region else lst for v, lst in enumerate(lists.lists))
    )
    kept = narrow(colouring, outside)
    target = strip_used_colours(graph, subtract_assignment(lists, outside), kept)
    fresh = PartialColouringIndex(graph, target, schema.enumeration).sample(seed, trial)
    return kept.with_colours({v: fresh[v] for v in region})


def _resample_ball_cover(
    cov: Cover,
    current: int,
    centre: int,
    schema: SolverSchema,
    seed: int,
    trial: int,
) -> int:
    graph = cov.conflict_graph
    region = ball(cov.base, centre, schema.ball_radius)
    inside = mask_of(i for v in region for i in cov.v_sets[v])
    kept = current & ~inside
    blocked = kept
    for i in iter_bits(kept):
        blocked |= graph.masks[i]
    target = graph.induced(iter_bits(inside & ~blocked))
    fresh = IndependentSetIndex(target, schema.enumeration).sample(seed, trial)
    return kept | mask_of(fresh)


def _list_pipeline(
    graph: Graph,
    lists: ListAssignment,
    epsilon: float,
    n: int,
    l: float,
    seed: int,
    schema: SolverSchema,
) -> PipelineResult:
    kind: PipelineKind = "list"
    try:
        colouring = PartialColouringIndex(graph, lists, schema.enumeration).sample(seed, 0)
    except EnumerationGuardError as e:
        return _failure("exhausted", kind, seed, 0, "sample", reason=str(e))

    resamples = 0
    while True:
        remaining = strip_used_colours(graph, lists, colouring)
        event = next(
            (
                report
                for u in sorted(graph.vertices)
                if (report := _a_u_report(graph, colouring, remaining, u, epsilon, n)).holds
            ),
            None,
        )
        if event is None:
            break
        if resamples >= schema.max_resamples:
            return _failure("exhausted", kind, seed, resamples, "resample", event=event.json)
        try:
            colouring = _resample_ball_lists(
                graph, lists, colouring, event.subject[0], schema, seed, resamples + 1
            )
        except EnumerationGuardError as e:
            return _failure("exhausted", kind, seed, resamples, "resample", reason=str(e))
        resamples += 1

    uncoloured = colouring.uncoloured & graph.vertices
    remaining = residual_lists(graph, lists, colouring)
    finish = moser_tardos_reed(
        graph.induced(uncoloured),
        remaining,
        l,
        seed=seed,
        max_resamples=schema.max_resamples,
    )
    if finish.status != "success" or finish.colouring is None:
        # An empty residual list says nothing about the instance itself.
        status: Status = "failed" if finish.status == "infeasible" else finish.status
        return _failure(status, kind, seed, resamples, "finish", finisher=finish.json)

    final = colouring.with_colours({v: finish.colouring[v] for v in uncoloured})
    if not is_list_colouring(graph, lists, final):
        return _failure("failed", kind, seed, resamples, "validate", colouring=list(final.colours))
    logger.info("list pipeline succeeded after %d resamples", resamples)
    return PipelineResult(
        "success",
        kind,
        seed,
        resamples,
        colouring=final,
        diagnostic={"finisher": finish.json},
    )


def _cover_pipeline(
    cov: Cover,
    kind: PipelineKind,
    epsilon: float,
    n: int,
    l: float,
    seed: int,
    schema: SolverSchema,
    extra: dict[str, Any],
) -> PipelineResult:
    graph = conflict_graph(cov)
    try:
        current = mask_of(IndependentSetIndex(graph, schema.enumeration).sample(seed, 0))
    except EnumerationGuardError as e:
        return _failure("exhausted", kind, seed, 0, "sample", reason=str(e), **extra)

    resamples = 0
    while True:
        res = residual(cov, cov.members(iter_bits(current)))
        event = None
        for u in sorted(cov.base.vertices):
            if kind == "dp":
                reports: tuple[BadEventReport, ...] = (_dp_a_u_report(cov, res, u, epsilon, n),)
            else:
                reports = _b_reports(res, u, l)
            event = next((r for r in reports if r.holds), None)
            if event is not None:
                break
        if event is None:
            break
        if resamples >= schema.max_resamples:
            return _failure("exhausted", kind, seed, resamples, "resample", event=event.json, **extra)
        try:
            current = _resample_ball_cover(cov, current, event.subject[0], schema, seed, resamples + 1)
        except EnumerationGuardError as e:
            return _failure("exhausted", kind, seed, resamples, "resample", reason=str(e), **extra)
        resamples += 1

    members = cov.members(iter_bits(current))
    if kind == "dp":
        res = residual(cov, members)
        parts = [[cov.index[x] for x in sorted(res.lists[v])] for v in sorted(res.uncovered)]
        try:
            found = haxell_transversal(res.residual_star, parts, l, schema.search_guard)
        except EnumerationGuardError as e:
            return _failure("exhausted", kind, seed, resamples, "finish", reason=str(e), **extra)
        if found.transversal is None:
            return _failure(
                "failed", kind, seed, resamples, "finish", transversal=found.json, **extra
            )
        final = members | cov.members(found.transversal)
        extra = {**extra, "transversal": found.json}
    else:
        greedy = greedy_complete(cov, members)
        if not greedy.complete:
            return _failure("stuck", kind, seed, resamples, "finish", vertex=greedy.stuck, **extra)
        final = greedy.independent_set

    if not is_h_colouring(cov, final):
        return _failure(
            "failed", kind, seed, resamples, "validate", independent_set=sorted(x.label for x in final)
        )
    logger.info("%s pipeline succeeded after %d resamples", kind, resamples)
    return PipelineResult("success", kind, seed, resamples, independent_set=final, diagnostic=extra)


def default_fold(graph: Graph, lists: ListAssignment) -> int:
    """
    The n of an n-fold instance: the smallest list size over the vertices.
    """
    return lists.min_size(graph.vertices)


def solve_pipeline(
    instance: Cover | tuple[Graph, ListAssignment],
    epsilon: float = 0.3,
    l: float | None = None,
    seed: int = 0,
    kind: PipelineKind | None = None,
    r: int | None = None,
    n: int | None = None,
    schema: SolverSchema = DEFAULT_SOLVER_SCHEMA,
) -> PipelineResult:
    """
    Runs sample, bad-event resampling, finishing and validation end to end.

    List instances run the list pipeline by default; covers run the cover
    pipeline with the list bad event and a transversal finish, or with the
    K_r-free events and greedy completion when kind is "kr".

    Args:
        instance (Cover | tuple[Graph, ListAssignment]): The instance.
        epsilon (float, optional): ε in (0, 1/3) for the list and dp pipelines.
        l (float | None, optional): Finishing parameter. Defaults to (1 - ε) n^ε,
            or Δ^{1/2 + 1/(8r)} for the kr pipeline.
        seed (int, optional): Seed; the initial draw uses stream (seed, 0) and
            the t-th resample stream (seed, t).
        kind (PipelineKind | None, optional): Pipeline to run.
        r (int | None, optional): Clique bound of the kr pipeline.
        n (int | None, optional): The n of the bad events; defaults to the smallest list size.
        schema (SolverSchema, optional): Budgets and guards.

    Returns:
        PipelineResult: A validated solution or a diagnostic. Never an unvalidated success.

    Raises:
        ValueError: If ε is out of range or ε² >= (1 - ε)/(2e).
    """
    if kind is None:
        if isinstance(instance, Cover):
            kind = "kr" if r is not None and r >= 4 else "dp"
        else:
            kind = "list"
    if kind == "list" and isinstance(instance, Cover):
        raise ValueError("The list pipeline needs a (graph, lists) instance")

    graph, lists = (instance.base, instance.lists) if isinstance(instance, Cover) else instance
    if kind != "kr":
        _check_epsilon(epsilon)
        if not epsilon**2 < (1 - epsilon) / TWO_E:
            raise ValueError(f"epsilon = {epsilon} violates ε² < (1 - ε)/(2e)")

    empty = [v for v in sorted(graph.vertices) if not lists[v]]
    if empty:
        return _failure("infeasible", kind, seed, 0, "input", vertex=empty[0], reason="empty list")

    fold = default_fold(graph, lists) if n is None else n
    if kind == "kr":
        if r is None or r < 3:
            raise ValueError(f"The kr pipeline needs r >= 3, got {r}")
        delta = graph.max_degree
        if l is None:
            l = delta ** (0.5 + 1 / (8 * r))
        extra: dict[str, Any] = {"l": l, "r": r, "delta": delta}
        if delta > 0:
            extra["bookkeeping"] = chain_bookkeeping(delta, r, fold)
        return _cover_pipeline(_as_cover(instance), kind, epsilon, fold, l, seed, schema, extra)

    if l is None:
        l = size_cut(epsilon, fold)
    if kind == "dp":
        return _cover_pipeline(
            _as_cover(instance), kind, epsilon, fold, l, seed, schema, {"l": l, "n": fold}
        )
    return _list_pipeline(graph, lists, epsilon, fold, l, seed, schema)
