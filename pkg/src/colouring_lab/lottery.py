import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .bounds import exceeds_bound, standard_error
from .models import LotteryInstance, LotteryOutcome
from .schemas import (
    DEFAULT_ENUMERATION_SCHEMA,
    DEFAULT_MONTE_CARLO_SCHEMA,
    RELATIVE_SLACK,
    EnumerationSchema,
    MonteCarloSchema,
)
from .utils import make_rng, within_slack
from .validation import EnumerationGuardError, LotteryPreconditionError

logger = logging.getLogger(__name__)


def full_deck_instance(n: int, m: int) -> LotteryInstance:
    """
    m copies of the full deck [n].
    """
    deck = frozenset(range(1, n + 1))
    return LotteryInstance(n, tuple(deck for _ in range(m)))


def max_decks(n: int, epsilon: float) -> int:
    """
    Largest m allowed by the tail bounds: floor((1 - epsilon) n log n).
    """
    return math.floor((1 - epsilon) * n * math.log(n))


def random_instance(n: int, m: int, seed: int) -> LotteryInstance:
    """
    m decks, each a uniformly random non-empty subset of [n].
    """
    rng = make_rng(seed)
    decks = []
    for _ in range(m):
        while True:
            picks = rng.random(n) < 0.5
            if picks.any():
                break
        decks.append(frozenset(int(c) + 1 for c in np.flatnonzero(picks)))
    return LotteryInstance(n, tuple(decks))


def _check_outcome(inst: LotteryInstance, out: LotteryOutcome) -> None:
    if len(out.draws) != inst.m:
        raise ValueError(f"Outcome has {len(out.draws)} draws, instance has {inst.m} decks")
    for i, (c, deck) in enumerate(zip(out.draws, inst.decks)):
        if c != 0 and c not in deck:
            raise ValueError(f"Draw {c} of deck {i} is neither blank nor in the deck")


def draw(inst: LotteryInstance, seed: int, trial: int = 0) -> LotteryOutcome:
    """
    Draws one card from every deck with a blank added, uniformly and independently.

    The result depends only on (instance, seed, trial).
    """
    rng = make_rng(seed, trial)
    draws = []
    for deck in inst.decks:
        choices = (0, *sorted(deck))
        draws.append(choices[int(rng.integers(len(choices)))])
    return LotteryOutcome(tuple(draws))


def draw_avoiding(inst: LotteryInstance, coupon: int, seed: int, trial: int = 0) -> LotteryOutcome:
    """
    Draws normally, but whenever a deck yields the coupon it is redrawn from the rest.

    The output has the law of a lottery conditioned on the coupon staying uncollected.
    """
    if not 1 <= coupon <= inst.n:
        raise ValueError(f"Coupon {coupon} out of range [1, {inst.n}]")
    rng = make_rng(seed, trial)
    draws = []
    for deck in inst.decks:
        choices = (0, *sorted(deck))
        pick = choices[int(rng.integers(len(choices)))]
        if pick == coupon:
            rest = tuple(c for c in choices if c != coupon)
            pick = rest[int(rng.integers(len(rest)))]
        draws.append(pick)
    return LotteryOutcome(tuple(draws))


def uncollected(inst: LotteryInstance, out: LotteryOutcome) -> frozenset[int]:
    """
    Returns U, the coupons of [n] that no deck produced.
    """
    _check_outcome(inst, out)
    return frozenset(range(1, inst.n + 1)) - frozenset(out.draws)


def missed_containing(inst: LotteryInstance, out: LotteryOutcome, coupon: int) -> int:
    """
    Number of decks holding the coupon whose draw was blank.
    """
    if not 1 <= coupon <= inst.n:
        raise ValueError(f"Coupon {coupon} out of range [1, {inst.n}]")
    _check_outcome(inst, out)
    return sum(1 for i in inst.containing(coupon) if out.draws[i] == 0)


@dataclass(frozen=True)
class ExactLotteryStats:
    """
    Exact statistics of a lottery obtained by enumerating every outcome.

    Probabilities are exact fractions. The float fields hold the closed-form
    bounds they are compared against.
    """

    n: int
    m: int
    outcome_count: int
    uncollected_probability: dict[int, Fraction]
    product_formula_ok: bool
    size_distribution: dict[int, Fraction]
    expected_uncollected: Fraction
    jensen_step: float
    expectation_lower_bound: float
    expectation_chain_ok: bool
    sandwich: dict[int, tuple[float, float]]
    sandwich_ok: bool
    expected_missed: dict[int, Fraction]
    negative_correlation_ok: bool | None
    worst_correlation_ratio: float | None

    @property
    def json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "outcomes": self.outcome_count,
            "uncollected_probability": {
                str(c): float(p) for c, p in self.uncollected_probability.items()
            },
            "product_formula_ok": self.product_formula_ok,
            "size_distribution": {str(k): float(p) for k, p in self.size_distribution.items()},
            "expected_uncollected": float(self.expected_uncollected),
            "jensen_step": self.jensen_step,
            "expectation_lower_bound": self.expectation_lower_bound,
            "expectation_chain_ok": self.expectation_chain_ok,
            "sandwich": {str(c): list(b) for c, b in self.sandwich.items()},
            "sandwich_ok": self.sandwich_ok,
            "expected_missed": {str(c): float(e) for c, e in self.expected_missed.items()},
            "negative_correlation_ok": self.negative_correlation_ok,
            "worst_correlation_ratio": self.worst_correlation_ratio,
        }


def _collected_mask_counts(inst: LotteryInstance) -> dict[int, int]:
    # Number of outcomes per collected set, as a bitmask over coupons 1..n (bit c-1).
    counts: dict[int, int] = {0: 1}
    for deck in inst.decks:
        nxt: dict[int, int] = defaultdict(int)
        bits = [1 << (c - 1) for c in sorted(deck)]
        for mask, cnt in counts.items():
            nxt[mask] += cnt
            for bit in bits:
                nxt[mask | bit] += cnt
        counts = dict(nxt)
    return counts


def _negative_correlation(
    n: int, counts: dict[int, int], total: int, marginals: list[Fraction]
) -> tuple[bool, float]:
    # f[S] = #outcomes collecting every coupon of S, via a superset-sum transform.
    f = np.zeros(1 << n, dtype=np.int64)
    for mask, cnt in counts.items():
        f[mask] += cnt
    for bit in range(n):
        step = 1 << bit
        view = f.reshape(-1, 2 * step)
        view[:, :step] += view[:, step:]

    probs = np.array([float(p) for p in marginals])
    product = np.ones(1 << n)
    for bit in range(n):
        step = 1 << bit
        view = product.reshape(-1, 2 * step)
        view[:, step:] *= probs[bit]

    joint = f / total
    sizes = np.array([bin(s).count("1") for s in range(1 << n)])
    relevant = sizes >= 2
    allowed = product + RELATIVE_SLACK * np.maximum(1.0, product)
    ok = bool(np.all(joint[relevant] <= allowed[relevant]))
    positive = relevant & (product > 0)
    worst = float(np.max(joint[positive] / product[positive])) if positive.any() else 1.0
    return ok, worst


def exact_stats(
    inst: LotteryInstance, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA
) -> ExactLotteryStats:
    """
    Computes the exact law of the uncollected set by enumerating outcomes.

    Checks Pr(c in U) against the product over the decks holding c of |L|/(|L|+1),
    the two-sided exponential sandwich around it, the expectation chain
    E|U| >= Σ_c e^{-Σ 1/|L|} >= n e^{-m/n}, and negative correlation of the
    collected indicators over every coupon subset.

    Args:
        inst (LotteryInstance): The lottery.
        schema (EnumerationSchema, optional): Guard and correlation limit.

    Returns:
        ExactLotteryStats: The exact statistics and verdicts.

    Raises:
        EnumerationGuardError: If the number of outcomes exceeds the guard.
    """
    total = inst.outcome_count
    if total > schema.guard:
        raise EnumerationGuardError("Lottery outcomes", total, schema.guard)

    n = inst.n
    counts = _collected_mask_counts(inst)
    logger.debug("exact lottery: %d outcomes collapse to %d collected sets", total, len(counts))

    missing = [0] * n
    size_counts: dict[int, int] = defaultdict(int)
    for mask, cnt in counts.items():
        size_counts[n - mask.bit_count()] += cnt
        for c in range(n):
            if not mask >> c & 1:
                missing[c] += cnt

    probability: dict[int, Fraction] = {}
    sandwich: dict[int, tuple[float, float]] = {}
    expected_missed: dict[int, Fraction] = {}
    product_ok = True
    sandwich_ok = True
    jensen = 0.0
    for c in range(1, n + 1):
        holding = [inst.decks[i] for i in inst.containing(c)]
        p = Fraction(missing[c - 1], total)
        probability[c] = p
        formula = Fraction(1)
        for deck in holding:
            formula *= Fraction(len(deck), len(deck) + 1)
        product_ok &= p == formula
        low = math.exp(-sum(1 / len(deck) for deck in holding))
        high = math.exp(-sum(1 / (len(deck) + 1) for deck in holding))
        sandwich[c] = (low, high)
        sandwich_ok &= within_slack(low, float(p)) and within_slack(float(p), high)
        expected_missed[c] = sum((Fraction(1, len(deck) + 1) for deck in holding), Fraction(0))
        jensen += low

    expected = sum(probability.values(), Fraction(0))
    lower_bound = n * math.exp(-inst.m / n)
    chain_ok = within_slack(jensen, float(expected)) and within_slack(lower_bound, jensen)

    nc_ok: bool | None = None
    worst: float | None = None
    if n <= schema.correlation_limit:
        collected = [1 - probability[c] for c in range(1, n + 1)]
        nc_ok, worst = _negative_correlation(n, counts, total, collected)

    return ExactLotteryStats(
        n=n,
        m=inst.m,
        outcome_count=total,
        uncollected_probability=probability,
        product_formula_ok=product_ok,
        size_distribution={k: Fraction(v, total) for k, v in sorted(size_counts.items())},
        expected_uncollected=expected,
        jensen_step=jensen,
        expectation_lower_bound=lower_bound,
        expectation_chain_ok=chain_ok,
        sandwich=sandwich,
        sandwich_ok=sandwich_ok,
        expected_missed=expected_missed,
        negative_correlation_ok=nc_ok,
        worst_correlation_ratio=worst,
    )


@dataclass(frozen=True)
class TailReport:
    """
    Monte Carlo estimate of both lottery tail events against their bounds.

    Event (i) is |U| < (1 - epsilon) n^epsilon. Event (ii), per coupon c, is
    "c in U and more than epsilon^2 n^epsilon decks holding c were missed".
    """

    n: int
    m: int
    epsilon: float
    trials: int
    seed: int
    deck_threshold: float
    size_cut: float
    missed_cut: float
    size_bound: float
    missed_bound: float
    size_frequency: float
    size_standard_error: float
    missed_frequencies: tuple[float, ...]
    missed_standard_error: float
    uncollected_frequencies: tuple[float, ...]
    expected_uncollected: float
    expected_missed: tuple[float, ...]
    branch_via_uncollected: tuple[bool, ...]
    size_violation: bool
    missed_violation: bool
    asserted: bool

    @property
    def max_missed_frequency(self) -> float:
        return max(self.missed_frequencies, default=0.0)

    @property
    def passed(self) -> bool:
        """
        False only when the bounds are asserted at this size and one is violated.
        """
        return not (self.asserted and (self.size_violation or self.missed_violation))

    @property
    def json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "epsilon": self.epsilon,
            "trials": self.trials,
            "seed": self.seed,
            "deck_threshold": self.deck_threshold,
            "size_cut": self.size_cut,
            "missed_cut": self.missed_cut,
            "bounds": {"size": self.size_bound, "missed": self.missed_bound},
            "frequencies": {
                "size": self.size_frequency,
                "missed_max": self.max_missed_frequency,
            },
            "standard_errors": {
                "size": self.size_standard_error,
                "missed": self.missed_standard_error,
            },
            "expected_uncollected": self.expected_uncollected,
            "violations": {"size": self.size_violation, "missed": self.missed_violation},
            "asserted": self.asserted,
            "passed": self.passed,
        }

    def coupon_rows(self) -> list[dict[str, Any]]:
        """
        Per-coupon table for CSV export.
        """
        return [
            {
                "coupon": c + 1,
                "uncollected_frequency": self.uncollected_frequencies[c],
                "missed_event_frequency": self.missed_frequencies[c],
                "expected_missed": self.expected_missed[c],
                "branch_via_uncollected": self.branch_via_uncollected[c],
            }
            for c in range(self.n)
        ]


def monte_carlo_tails(
    inst: LotteryInstance,
    epsilon: float,
    trials: int | None = None,
    seed: int = 0,
    schema: MonteCarloSchema = DEFAULT_MONTE_CARLO_SCHEMA,
) -> TailReport:
    """
    Estimates both tail events of the lottery by vectorised simulation.

    Trials are simulated in blocks; block b draws from the substream (seed, b),
    so the estimate does not depend on how blocks are scheduled.

    Args:
        inst (LotteryInstance): The lottery, with m <= (1 - epsilon) n log n.
        epsilon (float): Exponent in (0, 1).
        trials (int | None, optional): Number of lotteries, defaults to schema.trials.
        seed (int, optional): Base seed.
        schema (MonteCarloSchema, optional): Block size and assertion policy.

    Returns:
        TailReport: Frequencies, bounds and violation flags.

    Raises:
        ValueError: If epsilon is outside (0, 1) or trials < 1.
        LotteryPreconditionError: If the instance has too many decks.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    trials = schema.trials if trials is None else trials
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")

    n, m = inst.n, inst.m
    deck_threshold = (1 - epsilon) * n * math.log(n)
    if m > deck_threshold:
        raise LotteryPreconditionError(m, deck_threshold)

    n_eps = n**epsilon
    size_cut = (1 - epsilon) * n_eps
    missed_cut = epsilon**2 * n_eps
    size_bound = math.exp(-(epsilon**2) * n_eps / 2)
    missed_bound = math.exp(-(epsilon**2) * n_eps / 6)

    sizes = np.array([len(deck) for deck in inst.decks], dtype=np.int64)
    width = int(sizes.max()) + 1 if m else 1
    # Row i holds 0 followed by deck i in ascending order, padded with zeros.
    choices = np.zeros((m, width), dtype=np.int64)
    membership = np.zeros((m, n), dtype=np.int64)
    for i, deck in enumerate(inst.decks):
        ordered = sorted(deck)
        choices[i, 1 : len(ordered) + 1] = ordered
        membership[i, [c - 1 for c in ordered]] = 1

    size_hits = 0
    missed_hits = np.zeros(n, dtype=np.int64)
    uncollected_hits = np.zeros(n, dtype=np.int64)
    rows = np.arange(m)[None, :]
    for block, start in enumerate(range(0, trials, schema.block_size)):
        size = min(schema.block_size, trials - start)
        rng = make_rng(seed, block)
        picks = np.floor(rng.random((size, m)) * (sizes + 1)).astype(np.int64)
        draws = choices[rows, picks]

        collected = np.zeros((size, n + 1), dtype=bool)
        collected[np.arange(size)[:, None], draws] = True
        missing = ~collected[:, 1:]

        size_hits += int(np.count_nonzero(missing.sum(axis=1) < size_cut))
        missed = (draws == 0).astype(np.int64) @ membership
        missed_hits += np.count_nonzero(missing & (missed > missed_cut), axis=0)
        uncollected_hits += missing.sum(axis=0)

    size_frequency = size_hits / trials
    missed_frequencies = tuple(float(x) / trials for x in missed_hits)
    size_violation = exceeds_bound(size_frequency, size_bound, trials, schema.sigma_slack)
    missed_violation = any(
        exceeds_bound(f, missed_bound, trials, schema.sigma_slack) for f in missed_frequencies
    )
    asserted = n >= schema.min_asserted_n and any(
        math.isclose(epsilon, e) for e in schema.asserted_epsilons
    )

    expected_missed = []
    expected_uncollected = 0.0
    branch = []
    for c in range(1, n + 1):
        holding = [len(inst.decks[i]) for i in inst.containing(c)]
        expected_missed.append(sum(1 / (k + 1) for k in holding))
        expected_uncollected += math.prod(k / (k + 1) for k in holding)
        branch.append(expected_missed[-1] > missed_cut / 2)

    report = TailReport(
        n=n,
        m=m,
        epsilon=epsilon,
        trials=trials,
        seed=seed,
        deck_threshold=deck_threshold,
        size_cut=size_cut,
        missed_cut=missed_cut,
        size_bound=size_bound,
        missed_bound=missed_bound,
        size_frequency=size_frequency,
        size_standard_error=standard_error(size_bound, trials),
        missed_frequencies=missed_frequencies,
        missed_standard_error=standard_error(missed_bound, trials),
        uncollected_frequencies=tuple(float(x) / trials for x in uncollected_hits),
        expected_uncollected=expected_uncollected,
        expected_missed=tuple(expected_missed),
        branch_via_uncollected=tuple(branch),
        size_violation=size_violation,
        missed_violation=missed_violation,
        asserted=asserted,
    )
    logger.info(
        "lottery n=%d m=%d eps=%.3f: size freq %.5f (bound %.5f), max missed freq %.5f (bound %.5f)",
        n,
        m,
        epsilon,
        size_frequency,
        size_bound,
        report.max_missed_frequency,
        missed_bound,
    )
    return report
