from collections.abc import Iterable
from dataclasses import dataclass

from .graph import find_clique
from .models import (
    ColourPair,
    Cover,
    CoverVertex,
    Edge,
    Graph,
    ListAssignment,
    LotteryInstance,
    LotteryReduction,
    PartialColouring,
)
from .utils import iter_bits, mask_of
from .validation import CoverValidationError


def canonical_cover(graph: Graph, lists: ListAssignment) -> Cover:
    """
    The cover whose cross edges join equal colours on adjacent vertices.

    Partial L-colourings of G correspond exactly to independent sets in the
    conflict graph of this cover.
    """
    if len(lists) != graph.vertex_count:
        raise ValueError(
            f"List assignment covers {len(lists)} vertices, graph has {graph.vertex_count}"
        )
    matchings: dict[Edge, frozenset[ColourPair]] = {}
    for u, v in sorted(graph.edges):
        matchings[(u, v)] = frozenset((c, c) for c in lists[u] & lists[v])
    return Cover(graph, lists, matchings)


def validate_cover(cov: Cover) -> list[str]:
    """
    Returns the structural violations of the cover; an empty list means valid.
    """
    return cov.violations()


def ensure_valid(cov: Cover) -> Cover:
    """
    Raises:
        CoverValidationError: If the cover has any structural violation.
    """
    errors = cov.violations()
    if errors:
        raise CoverValidationError(errors)
    return cov


def h_star(cov: Cover) -> Graph:
    """
    The matching edges only, over cover ids in (owner, colour) order.
    """
    return ensure_valid(cov).star_graph


def conflict_graph(cov: Cover) -> Graph:
    """
    The full conflict graph H: matching edges plus a clique on every v-set.
    """
    return ensure_valid(cov).conflict_graph


def find_f_free_cover_violation(cov: Cover, r: int) -> tuple[CoverVertex, ...] | None:
    """
    A K_r inside the matching graph, as cover vertices, or None.
    """
    if r < 3:
        raise ValueError(f"Forbidden clique size must be at least 3, got {r}")
    clique = find_clique(h_star(cov), r)
    if clique is None:
        return None
    return tuple(cov.cover_vertices[i] for i in clique)


def is_f_free_cover(cov: Cover, r: int) -> bool:
    return find_f_free_cover_violation(cov, r) is None


def is_independent(cov: Cover, members: Iterable[CoverVertex]) -> bool:
    """
    True when no two members share a v-set or a matching edge.

    Raises:
        ValueError: If a member is not a cover vertex.
    """
    graph = conflict_graph(cov)
    ids = cov.ids(members)
    chosen = mask_of(ids)
    return all(not graph.masks[i] & chosen for i in ids)


def embed(cov: Cover, colouring: PartialColouring) -> frozenset[CoverVertex]:
    """
    Maps a colouring to the cover vertices it selects, {v_c : colouring(v) = c > 0}.

    Raises:
        CoverValidationError: If a colour is outside its list or the selection
            contains an edge of H; the offending edge is named.
    """
    graph = conflict_graph(cov)
    if len(colouring) != cov.base.vertex_count:
        raise ValueError(
            f"Colouring covers {len(colouring)} vertices, graph has {cov.base.vertex_count}"
        )
    selected = []
    errors = []
    for v, c in enumerate(colouring.colours):
        if c == 0:
            continue
        x = CoverVertex(v, c)
        if x not in cov.index:
            errors.append(f"Colour {c} is not in the list of vertex {v}")
        else:
            selected.append(x)
    ids = sorted(cov.index[x] for x in selected)
    for a in ids:
        for b in ids:
            if a < b and graph.masks[a] >> b & 1:
                x, y = cov.cover_vertices[a], cov.cover_vertices[b]
                errors.append(f"Selection contains the H-edge {x.label} - {y.label}")
    if errors:
        raise CoverValidationError(errors)
    return frozenset(selected)


def colouring_from_independent_set(cov: Cover, members: Iterable[CoverVertex]) -> PartialColouring:
    """
    Inverse of `embed` for independent sets with at most one member per v-set.
    """
    colours = [0] * cov.base.vertex_count
    for x in members:
        x = CoverVertex(*x)
        if colours[x.owner]:
            raise ValueError(f"Vertex {x.owner} is selected twice")
        colours[x.owner] = x.colour
    return PartialColouring(tuple(colours))


@dataclass(frozen=True)
class CoverResidual:
    """
    What is left of a cover after fixing an independent set I.

    Attributes:
        remaining (frozenset[int]): Cover ids of H^I = H - N_H[I].
        residual (Graph): H^I, with the in-set cliques.
        residual_star (Graph): (H^I)*, the matching edges of H^I.
        lists (dict[int, frozenset[CoverVertex]]): L^I_u for every surviving base vertex.
        uncovered (frozenset[int]): O_I, base vertices whose v-set misses I.
        base (Graph): G_I = G[O_I].
    """

    remaining: frozenset[int]
    residual: Graph
    residual_star: Graph
    lists: dict[int, frozenset[CoverVertex]]
    uncovered: frozenset[int]
    base: Graph

    def list_size(self, u: int) -> int:
        return len(self.lists.get(u, frozenset()))


def residual(cov: Cover, members: Iterable[CoverVertex]) -> CoverResidual:
    """
    Computes H^I, the residual lists L^I_u, the uncovered set O_I and G_I.

    Raises:
        ValueError: If I is not independent in H.
    """
    graph = conflict_graph(cov)
    ids = cov.ids(members)
    chosen = mask_of(ids)
    if any(graph.masks[i] & chosen for i in ids):
        raise ValueError("Fixed set is not independent in the conflict graph")
    blocked = chosen
    for i in ids:
        blocked |= graph.masks[i]
    remaining = frozenset(i for i in range(len(cov.cover_vertices)) if not blocked >> i & 1)
    owners = {cov.cover_vertices[i].owner for i in ids}
    uncovered = frozenset(v for v in cov.base.vertices if v not in owners)
    lists = {
        v: frozenset(cov.cover_vertices[i] for i in cov.v_sets[v] if i in remaining)
        for v in sorted(uncovered)
    }
    return CoverResidual(
        remaining=remaining,
        residual=graph.induced(remaining),
        residual_star=cov.star_graph.induced(remaining),
        lists=lists,
        uncovered=uncovered,
        base=cov.base.induced(uncovered),
    )


def is_h_colouring(cov: Cover, members: Iterable[CoverVertex]) -> bool:
    """
    True when the selection is independent in H and meets every v-set.
    """
    chosen = frozenset(CoverVertex(*x) for x in members)
    if any(x not in cov.index for x in chosen):
        return False
    owners = {x.owner for x in chosen}
    return (
        len(chosen) == len(cov.base.vertices)
        and owners == set(cov.base.vertices)
        and is_independent(cov, chosen)
    )


def twisted_c4() -> Cover:
    """
    The standard cover of C4 with no H-colouring.

    Lists are all {1, 2}; three edges carry the identity matching and the
    edge (0, 3) swaps the colours.
    """
    base = Graph(4, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))
    identity = frozenset({(1, 1), (2, 2)})
    return Cover(
        base,
        ListAssignment.uniform(4, (1, 2)),
        {(0, 1): identity, (1, 2): identity, (2, 3): identity, (0, 3): frozenset({(1, 2), (2, 1)})},
    )


def cover_subassignment_around(cov: Cover, u: int) -> frozenset[int]:
    """
    Cover ids of H' = H minus the matching neighbourhoods of all cover vertices of u.
    """
    cov.base.check_vertex(u)
    star = h_star(cov)
    removed = 0
    for i in cov.v_sets[u]:
        removed |= star.masks[i]
    return frozenset(i for i in range(len(cov.cover_vertices)) if not removed >> i & 1)


def dp_lottery_reduction(
    cov: Cover, u: int, fixed: Iterable[CoverVertex]
) -> LotteryReduction:
    """
    Decks seen by u once the part of the cover away from u is fixed.

    With H' from `cover_subassignment_around` and fixed an independent set of
    H', deck i (for the i-th neighbour v_i) holds every colour c of u whose
    partner in the v-set of v_i survives in (H - H') minus N_H[fixed].
    Colours of u are renamed 1..|L(u)| in ascending order.

    Raises:
        ValueError: If fixed is not an independent subset of H'.
    """
    sub = cover_subassignment_around(cov, u)
    graph = conflict_graph(cov)
    ids = cov.ids(fixed)
    if not ids <= sub:
        raise ValueError("Fixed set must lie inside the sub-cover around the vertex")
    chosen = mask_of(ids)
    if any(graph.masks[i] & chosen for i in ids):
        raise ValueError("Fixed set is not independent in the conflict graph")
    blocked = chosen
    for i in ids:
        blocked |= graph.masks[i]
    alive = {i for i in range(len(cov.cover_vertices)) if i not in sub and not blocked >> i & 1}

    coupons = tuple(sorted(cov.lists[u]))
    owners = []
    decks = []
    for v in sorted(cov.base.neighbours(u)):
        deck = set()
        for k, c in enumerate(coupons, start=1):
            partner = cov.partner(CoverVertex(u, c), v)
            if partner is not None and cov.index[partner] in alive:
                deck.add(k)
        if deck:
            owners.append(v)
            decks.append(frozenset(deck))
    instance = LotteryInstance(len(coupons), tuple(decks)) if coupons else None
    return LotteryReduction(u, coupons, tuple(owners), instance)


def members_of_mask(cov: Cover, mask: int) -> frozenset[CoverVertex]:
    return frozenset(cov.cover_vertices[i] for i in iter_bits(mask))
