from collections.abc import Iterable, Iterator

import numpy as np

from .schemas import RELATIVE_SLACK


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Returns a counter-based generator for the given seed and substream.

    Every randomised routine derives its generator from (seed, *stream) so that
    results do not depend on call order or on how many draws another routine
    consumed. Example: make_rng(7, 3) is the stream of trial 3 under seed 7.
    """
    if seed < 0 or any(s < 0 for s in stream):
        raise ValueError("Seeds and stream ids must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def within_slack(lhs: float, rhs: float, slack: float = RELATIVE_SLACK) -> bool:
    """
    True when lhs <= rhs up to a relative slack.
    """
    return lhs <= rhs + slack * max(1.0, abs(rhs))


def mask_of(items: Iterable[int]) -> int:
    mask = 0
    for item in items:
        mask |= 1 << item
    return mask


def iter_bits(mask: int) -> Iterator[int]:
    """
    Yields the positions of set bits in ascending order.
    """
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def format_colours(colours: Iterable[int]) -> str:
    """
    Renders a colour vector compactly for diagnostics and table keys.
    Example: (1, 0, 2) -> "1,0,2"
    """
    return ",".join(str(c) for c in colours)
