import math
from dataclasses import dataclass

from .graph import find_clique
from .models import Graph, ListAssignment, LotteryInstance, LotteryReduction, PartialColouring

# Reed's availability threshold is l / (2e); compared as availability * 2e <= l.
TWO_E = 2.0 * math.e


@dataclass(frozen=True)
class CliqueViolation:
    """
    A colour whose holders contain a K_r, with the clique as witness.
    """

    colour: int
    clique: tuple[int, ...]


@dataclass(frozen=True)
class ReedCheck:
    """
    Outcome of the finishing condition check.

    Attributes:
        ok (bool): True when every list is long enough and every availability is small.
        vertex (int | None): First violating vertex.
        colour (int | None): Violating colour, None when the list itself is too short.
        reason (str): Human-readable explanation of the first violation.
    """

    ok: bool
    vertex: int | None = None
    colour: int | None = None
    reason: str = ""

    @property
    def json(self) -> dict[str, object]:
        return {
            "ok": self.ok,
            "vertex": self.vertex,
            "colour": self.colour,
            "reason": self.reason,
        }


def _check_lists(graph: Graph, lists: ListAssignment) -> None:
    if len(lists) != graph.vertex_count:
        raise ValueError(
            f"List assignment covers {len(lists)} vertices, graph has {graph.vertex_count}"
        )


def _check_colouring(graph: Graph, colouring: PartialColouring) -> None:
    if len(colouring) != graph.vertex_count:
        raise ValueError(
            f"Colouring covers {len(colouring)} vertices, graph has {graph.vertex_count}"
        )


def availability(graph: Graph, lists: ListAssignment, u: int, colour: int) -> frozenset[int]:
    """
    Neighbours of u whose lists contain the colour.

    Args:
        graph (Graph): The graph.
        lists (ListAssignment): Lists of every vertex.
        u (int): Centre vertex.
        colour (int): A positive colour.

    Returns:
        frozenset[int]: The neighbours holding the colour; its size is the availability.

    Raises:
        ValueError: If colour is 0 (the blank) or negative.
    """
    if colour <= 0:
        raise ValueError(f"Colour must be positive, got {colour}; 0 is the blank")
    _check_lists(graph, lists)
    return frozenset(v for v in graph.neighbours(u) if colour in lists[v])


def find_f_free_violation(graph: Graph, lists: ListAssignment, r: int) -> CliqueViolation | None:
    """
    Looks for a colour whose holders induce a K_r.
    Colours are scanned in ascending order; the first hit is returned.
    """
    if r < 3:
        raise ValueError(f"Forbidden clique size must be at least 3, got {r}")
    _check_lists(graph, lists)
    for colour in sorted(lists.palette):
        holders = [v for v in graph.vertices if colour in lists[v]]
        if len(holders) < r:
            continue
        clique = find_clique(graph.induced(holders), r)
        if clique is not None:
            return CliqueViolation(colour, clique)
    return None


def is_f_free_assignment(graph: Graph, lists: ListAssignment, r: int) -> bool:
    return find_f_free_violation(graph, lists, r) is None


def colouring_violations(
    graph: Graph, lists: ListAssignment, colouring: PartialColouring
) -> list[str]:
    """
    Lists every reason why the colouring is not a partial L-colouring.
    """
    _check_lists(graph, lists)
    if len(colouring) != graph.vertex_count:
        return [f"Colouring covers {len(colouring)} vertices, graph has {graph.vertex_count}"]
    errors = []
    for v in sorted(graph.vertices):
        c = colouring[v]
        if c and c not in lists[v]:
            errors.append(f"Vertex {v} has colour {c} outside its list")
    for u, v in sorted(graph.edges):
        if colouring[u] and colouring[u] == colouring[v]:
            errors.append(f"Edge ({u}, {v}) is monochromatic in colour {colouring[u]}")
    return errors


def is_partial_colouring(graph: Graph, lists: ListAssignment, colouring: PartialColouring) -> bool:
    return not colouring_violations(graph, lists, colouring)


def is_list_colouring(graph: Graph, lists: ListAssignment, colouring: PartialColouring) -> bool:
    """
    True when the colouring is proper, respects lists and colours every vertex.
    """
    return is_partial_colouring(graph, lists, colouring) and all(
        colouring[v] > 0 for v in graph.vertices
    )


def uncoloured_neighbours(graph: Graph, colouring: PartialColouring, u: int) -> frozenset[int]:
    _check_colouring(graph, colouring)
    return colouring.uncoloured_neighbours(graph, u)


def strip_used_colours(
    graph: Graph, lists: ListAssignment, colouring: PartialColouring
) -> ListAssignment:
    """
    Applies the residual formula without checking the colouring against the lists.

    Coloured vertices get empty lists; an uncoloured vertex loses every colour
    used on its neighbours. Removed vertices get empty lists as well.
    """
    _check_lists(graph, lists)
    _check_colouring(graph, colouring)
    result = []
    for v in range(graph.vertex_count):
        if v not in graph.vertices or colouring[v] > 0:
            result.append(frozenset())
            continue
        used = {colouring[w] for w in graph.adjacency[v] if w in graph.vertices}
        result.append(lists[v] - used)
    return ListAssignment(tuple(result))


def residual_lists(graph: Graph, lists: ListAssignment, colouring: PartialColouring) -> ListAssignment:
    """
    Returns the lists of colours still available after a partial colouring.

    Args:
        graph (Graph): The graph.
        lists (ListAssignment): The original lists.
        colouring (PartialColouring): A partial L-colouring.

    Returns:
        ListAssignment: Empty on coloured vertices; L(u) minus the neighbours' colours elsewhere.

    Raises:
        ValueError: If the colouring is not a partial L-colouring.
    """
    errors = colouring_violations(graph, lists, colouring)
    if errors:
        raise ValueError("Not a partial colouring: " + "; ".join(errors))
    return strip_used_colours(graph, lists, colouring)


def subtract_assignment(lists: ListAssignment, sub: ListAssignment) -> ListAssignment:
    """
    Returns L - L', pointwise.

    Raises:
        ValueError: If L' is not contained in L pointwise.
    """
    if len(lists) != len(sub):
        raise ValueError(f"Sub-assignment covers {len(sub)} vertices, expected {len(lists)}")
    for v, (mine, theirs) in enumerate(zip(lists.lists, sub.lists)):
        if not theirs <= mine:
            raise ValueError(f"Sub-assignment is not contained in L at vertex {v}")
    return ListAssignment(tuple(mine - theirs for mine, theirs in zip(lists.lists, sub.lists)))


def narrow(colouring: PartialColouring, sub: ListAssignment) -> PartialColouring:
    """
    Keeps a vertex's colour only when it lies in L'(v).
    """
    if len(colouring) != len(sub):
        raise ValueError(f"Sub-assignment covers {len(sub)} vertices, expected {len(colouring)}")
    return PartialColouring(
        tuple(c if c in sub[v] else 0 for v, c in enumerate(colouring.colours))
    )


def subassignment_ops(
    lists: ListAssignment, sub: ListAssignment, colouring: PartialColouring
) -> tuple[ListAssignment, PartialColouring]:
    """
    Returns (L - L', colouring narrowed to L').
    """
    return subtract_assignment(lists, sub), narrow(colouring, sub)


def reed_condition(graph: Graph, lists: ListAssignment, l: float) -> ReedCheck:
    """
    Checks |L(u)| >= l and availability <= l/(2e) for every vertex and listed colour.

    Equality passes: a violation needs availability * 2e strictly above l.

    Raises:
        ValueError: If l is not positive.
    """
    if l <= 0:
        raise ValueError(f"l must be positive, got {l}")
    _check_lists(graph, lists)
    for u in sorted(graph.vertices):
        if len(lists[u]) < l:
            return ReedCheck(False, u, None, f"|L({u})| = {len(lists[u])} < l = {l}")
        for c in sorted(lists[u]):
            avail = sum(1 for v in graph.adjacency[u] if v in graph.vertices and c in lists[v])
            if avail * TWO_E > l:
                return ReedCheck(
                    False, u, c, f"availability of {c} around {u} is {avail} > l/(2e) = {l / TWO_E:.6f}"
                )
    return ReedCheck(True)


def neighbourhood_subassignment(graph: Graph, lists: ListAssignment, u: int) -> ListAssignment:
    """
    The sub-assignment fixing every colour except those of L(u) on the neighbours of u.

    L'(v) = L(v) minus L(u) for neighbours v, and L'(v) = L(v) everywhere else.
    """
    _check_lists(graph, lists)
    around = graph.neighbours(u)
    centre = lists[u]
    return ListAssignment(
        tuple(lst - centre if v in around else lst for v, lst in enumerate(lists.lists))
    )


def lottery_reduction(
    graph: Graph, lists: ListAssignment, u: int, fixed: PartialColouring
) -> LotteryReduction:
    """
    Turns the neighbourhood of u into a lottery with blanks.

    Conditioned on the colouring narrowed to the neighbourhood sub-assignment,
    the neighbours v_1 < v_2 < ... of u choose independently and uniformly from
    {0} ∪ (L - L')^{fixed}(v_i). Those non-empty lists become the decks, with
    the colours of u renamed 1..|L(u)| in ascending order.

    Args:
        graph (Graph): The graph.
        lists (ListAssignment): The lists.
        u (int): Centre vertex.
        fixed (PartialColouring): A partial colouring for the neighbourhood sub-assignment.

    Returns:
        LotteryReduction: The decks and the renaming.

    Raises:
        ValueError: If fixed is not a partial colouring of the sub-assignment.
    """
    sub = neighbourhood_subassignment(graph, lists, u)
    errors = colouring_violations(graph, sub, fixed)
    if errors:
        raise ValueError("Not a partial colouring of the sub-assignment: " + "; ".join(errors))
    remaining = strip_used_colours(graph, subtract_assignment(lists, sub), fixed)

    coupons = tuple(sorted(lists[u]))
    rename = {c: i + 1 for i, c in enumerate(coupons)}
    owners = []
    decks = []
    for v in sorted(graph.neighbours(u)):
        deck = remaining[v]
        if deck:
            owners.append(v)
            decks.append(frozenset(rename[c] for c in deck))
    instance = LotteryInstance(len(coupons), tuple(decks)) if coupons else None
    return LotteryReduction(u, coupons, tuple(owners), instance)
