import logging
import math
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal

from .cover import conflict_graph, cover_subassignment_around, is_f_free_cover
from .graph import find_clique
from .models import Cover, CoverVertex, Graph
from .sampler import IndependentSetIndex
from .schemas import DEFAULT_ENUMERATION_SCHEMA, EnumerationSchema
from .utils import iter_bits, make_rng, mask_of
from .validation import EnumerationGuardError

logger = logging.getLogger(__name__)

ChainMode = Literal["direct", "predrawn"]


class ChainInvariantError(RuntimeError):
    """
    Raised when a structural property the chain relies on fails at runtime.
    """


@dataclass(frozen=True)
class ChainStep:
    """
    One resampling step around a colour of the centre vertex.

    Attributes:
        colour (int): The colour c_i whose matching neighbourhood was resampled.
        neighbourhood (int): |N_i|.
        choices (int): l_i, the number of independent sets of H_i.
        chosen (frozenset[CoverVertex]): The new I'_i.
        source (str): "direct", or the pre-drawn variable used ("X3", "Y1", ...).
    """

    colour: int
    neighbourhood: int
    choices: int
    chosen: frozenset[CoverVertex]
    source: str

    @property
    def json(self) -> dict[str, Any]:
        return {
            "colour": self.colour,
            "neighbourhood": self.neighbourhood,
            "choices": self.choices,
            "chosen": sorted(x.label for x in self.chosen),
            "source": self.source,
        }


@dataclass(frozen=True)
class ChainResult:
    independent_set: frozenset[CoverVertex]
    initial: frozenset[CoverVertex]
    steps: tuple[ChainStep, ...]
    x_used: int | None = None

    @property
    def json(self) -> dict[str, Any]:
        return {
            "independent_set": sorted(x.label for x in self.independent_set),
            "initial": sorted(x.label for x in self.initial),
            "steps": [s.json for s in self.steps],
            "x_used": self.x_used,
        }


@dataclass(frozen=True)
class _ChainSetup:
    graph: Graph
    base: int
    neighbourhoods: tuple[tuple[int, int], ...]
    clique_size: int | None


def small_choice_threshold(delta: float, r: int) -> float:
    """
    Below this many choices a step reads the X variables: Δ^{1/2 - 1/(4r)}.
    """
    return delta ** (0.5 - 1 / (4 * r))


def _prepare(cov: Cover, u: int, fixed: Iterable[CoverVertex], r: int | None) -> _ChainSetup:
    graph = conflict_graph(cov)
    sub = mask_of(cover_subassignment_around(cov, u))
    fixed_mask = mask_of(cov.ids(fixed))
    if fixed_mask & ~sub:
        raise ValueError("Fixed set must lie inside the sub-cover around the vertex")
    if any(graph.masks[i] & fixed_mask for i in iter_bits(fixed_mask)):
        raise ValueError("Fixed set is not independent in the conflict graph")

    blocked = fixed_mask
    for i in iter_bits(fixed_mask):
        blocked |= graph.masks[i]
    base = graph.vertex_mask & ~sub & ~blocked

    star = cov.star_graph
    neighbourhoods = tuple(
        (cov.cover_vertices[i].colour, star.masks[i] & base) for i in cov.v_sets[u]
    )
    clique_size = None
    if r is not None and r - 1 >= 2 and is_f_free_cover(cov, r):
        clique_size = r - 1
    return _ChainSetup(graph, base, neighbourhoods, clique_size)


def _step_graph(setup: _ChainSetup, current: int, around: int) -> int:
    # H_i: the neighbourhood minus everything adjacent to the part of I kept outside it.
    kept = current & ~around
    blocked = kept
    for i in iter_bits(kept):
        blocked |= setup.graph.masks[i]
    return around & ~blocked


def _check_clique_free(setup: _ChainSetup, vertices: int, colour: int) -> None:
    if setup.clique_size is None:
        return
    witness = find_clique(setup.graph.induced(iter_bits(vertices)), setup.clique_size)
    if witness is not None:
        raise ChainInvariantError(
            f"Step graph for colour {colour} contains K_{setup.clique_size} on {list(witness)}"
        )


def resampling_chain(
    cov: Cover,
    u: int,
    fixed: Iterable[CoverVertex],
    seed: int,
    mode: ChainMode = "direct",
    delta: float | None = None,
    r: int | None = None,
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> ChainResult:
    """
    Draws a uniform independent set of (H - H')^{fixed} in stages around u.

    First I_0 is drawn uniformly. Then, for every colour c of u in ascending
    order, the matching neighbourhood N_i of u_c is redrawn: I'_i is uniform
    over the independent sets of H_i (N_i minus the neighbours of the rest of
    I) and I_i = (I_{i-1} - N_i) ∪ I'_i.

    In predrawn mode 2k uniforms X_1..X_k, Y_1..Y_k are fixed up front. A step
    with fewer than Δ^{1/2 - 1/(4r)} choices consumes the next X, otherwise
    Y_{i - k_x}; the uniform selects the independent set of H_i at its position
    in the size-then-lexicographic order.

    Args:
        cov (Cover): The cover.
        u (int): Centre vertex.
        fixed (Iterable[CoverVertex]): Independent set of the sub-cover around u.
        seed (int): Seed; the whole run uses the (seed,) stream.
        mode (ChainMode, optional): "direct" or "predrawn".
        delta (float | None): Maximum degree Δ, required in predrawn mode.
        r (int | None): Clique bound, required in predrawn mode. When the cover
            is K_r-free, every H_i is checked to be K_{r-1}-free.
        schema (EnumerationSchema, optional): Guard for each independent-set index.

    Returns:
        ChainResult: The final set and a step log.

    Raises:
        ValueError: If fixed is invalid or predrawn parameters are missing.
        EnumerationGuardError: If a step graph has too many independent sets.
        ChainInvariantError: If a step graph contains K_{r-1} although the cover is K_r-free.
    """
    if mode == "predrawn" and (delta is None or r is None):
        raise ValueError("Predrawn mode needs both delta and r")
    setup = _prepare(cov, u, fixed, r)
    rng = make_rng(seed)
    k = len(setup.neighbourhoods)

    start_index = IndependentSetIndex(setup.graph.induced(iter_bits(setup.base)), schema)
    current = mask_of(start_index.unrank(int(rng.integers(start_index.total_count))))
    initial = current

    xs = rng.random(k) if mode == "predrawn" else None
    ys = rng.random(k) if mode == "predrawn" else None
    threshold = small_choice_threshold(delta, r) if delta is not None and r is not None else None
    kx = 0
    steps = []
    for i, (colour, around) in enumerate(setup.neighbourhoods, start=1):
        vertices = _step_graph(setup, current, around)
        _check_clique_free(setup, vertices, colour)
        index = IndependentSetIndex(setup.graph.induced(iter_bits(vertices)), schema)
        choices = index.total_count
        if xs is None or ys is None or threshold is None:
            position = int(rng.integers(choices))
            source = "direct"
        elif choices < threshold:
            kx += 1
            if kx > k:
                raise ChainInvariantError(f"k_x = {kx} exceeds k = {k}")
            position = math.floor(xs[kx - 1] * choices)
            source = f"X{kx}"
        else:
            j = i - kx
            if not 1 <= j <= k:
                raise ChainInvariantError(f"Y index {j} outside [1, {k}]")
            position = math.floor(ys[j - 1] * choices)
            source = f"Y{j}"
        chosen = mask_of(index.unrank(min(position, choices - 1)))
        current = (current & ~around) | chosen
        steps.append(
            ChainStep(colour, around.bit_count(), choices, cov.members(iter_bits(chosen)), source)
        )
        logger.debug("chain step %d colour %d: %d choices via %s", i, colour, choices, source)

    return ChainResult(
        independent_set=cov.members(iter_bits(current)),
        initial=cov.members(iter_bits(initial)),
        steps=tuple(steps),
        x_used=kx if mode == "predrawn" else None,
    )


def uniform_target(cov: Cover, u: int, fixed: Iterable[CoverVertex]) -> set[frozenset[CoverVertex]]:
    """
    The family the chain output should be uniform on: Ind((H - H')^{fixed}).
    """
    setup = _prepare(cov, u, fixed, None)
    index = IndependentSetIndex(setup.graph.induced(iter_bits(setup.base)))
    return {cov.members(s) for s in index}


def chain_distribution(
    cov: Cover,
    u: int,
    fixed: Iterable[CoverVertex],
    mode: ChainMode = "direct",
    delta: float | None = None,
    r: int | None = None,
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> dict[frozenset[CoverVertex], Fraction]:
    """
    Exact output law of `resampling_chain`, by sweeping every random choice.

    States that coincide are merged, so the sweep is a dynamic program over
    (current set, k_x). In predrawn mode each variable is fresh when read, so
    a step selects each of its l_i sets with probability 1/l_i in both modes.

    Raises:
        EnumerationGuardError: If the number of explored branches exceeds the guard.
        ChainInvariantError: On a K_{r-1} step graph or an out-of-range variable index.
    """
    if mode == "predrawn" and (delta is None or r is None):
        raise ValueError("Predrawn mode needs both delta and r")
    setup = _prepare(cov, u, fixed, r)
    k = len(setup.neighbourhoods)
    threshold = small_choice_threshold(delta, r) if delta is not None and r is not None else None

    start = IndependentSetIndex(setup.graph.induced(iter_bits(setup.base)), schema)
    branches = start.total_count
    share = Fraction(1, start.total_count)
    states: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for members in start:
        states[(mask_of(members), 0)] += share

    for i, (colour, around) in enumerate(setup.neighbourhoods, start=1):
        nxt: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for (current, kx), weight in states.items():
            vertices = _step_graph(setup, current, around)
            _check_clique_free(setup, vertices, colour)
            index = IndependentSetIndex(setup.graph.induced(iter_bits(vertices)), schema)
            choices = index.total_count
            if mode == "predrawn" and threshold is not None:
                if choices < threshold:
                    kx += 1
                    if kx > k:
                        raise ChainInvariantError(f"k_x = {kx} exceeds k = {k}")
                elif not 1 <= i - kx <= k:
                    raise ChainInvariantError(f"Y index {i - kx} outside [1, {k}]")
            branches += choices
            if branches > schema.guard:
                raise EnumerationGuardError("Chain branches", branches, schema.guard)
            piece = weight / choices
            kept = current & ~around
            for chosen in index:
                nxt[(kept | mask_of(chosen), kx)] += piece
        states = nxt

    result: dict[frozenset[CoverVertex], Fraction] = defaultdict(Fraction)
    for (current, _), weight in states.items():
        result[cov.members(iter_bits(current))] += weight
    logger.debug("chain sweep explored %d branches into %d outcomes", branches, len(result))
    return dict(result)


@dataclass(frozen=True)
class ChainCheck:
    ok: bool
    mode: ChainMode
    outcomes: int
    target_size: int

    @property
    def json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "mode": self.mode,
            "outcomes": self.outcomes,
            "target_size": self.target_size,
        }


def verify_chain_uniformity(
    cov: Cover,
    u: int,
    fixed: Iterable[CoverVertex],
    mode: ChainMode = "direct",
    delta: float | None = None,
    r: int | None = None,
    schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA,
) -> ChainCheck:
    """
    Compares the exact chain law with the uniform law on its target family.
    """
    fixed = frozenset(fixed)
    distribution = chain_distribution(cov, u, fixed, mode, delta, r, schema)
    target = uniform_target(cov, u, fixed)
    share = Fraction(1, len(target))
    ok = set(distribution) == target and all(p == share for p in distribution.values())
    return ChainCheck(ok, mode, len(distribution), len(target))


def chain_bookkeeping(delta: float, r: int, k: int) -> dict[str, float]:
    """
    Read-only constants of the K_r-free argument at a given Δ, r and list size k.

    p1 = Δ^{-1/2 + 1/(4r)}, p2 = 1 - Δ^{-1/r^3}, k1 = ceil(2 Δ^{1 - 1/(8r)}),
    k2 = k - k1, together with the step threshold and the target residual size
    l = Δ^{1/2 + 1/(8r)}. None of these drive control flow.
    """
    if delta <= 0:
        raise ValueError(f"Δ must be positive, got {delta}")
    if r < 3:
        raise ValueError(f"r must be at least 3, got {r}")
    k1 = math.ceil(2 * delta ** (1 - 1 / (8 * r)))
    return {
        "p1": delta ** (-0.5 + 1 / (4 * r)),
        "p2": 1 - delta ** (-1 / r**3),
        "k1": float(k1),
        "k2": float(k - k1),
        "step_threshold": small_choice_threshold(delta, r),
        "l": delta ** (0.5 + 1 / (8 * r)),
    }
