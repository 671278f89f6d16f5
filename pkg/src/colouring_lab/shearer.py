import math
from dataclasses import dataclass
from typing import Any

from .graph import find_clique
from .models import Graph, IndProfile
from .sampler import IndependentSetIndex
from .schemas import DEFAULT_ENUMERATION_SCHEMA, EnumerationSchema
from .utils import within_slack
from .validation import CliqueFoundError


def profile(
    graph: Graph, r: int, schema: EnumerationSchema = DEFAULT_ENUMERATION_SCHEMA
) -> IndProfile:
    """
    Counts the independent sets of a K_r-free graph by size.

    Raises:
        ValueError: If r < 2.
        CliqueFoundError: If the graph contains K_r; the clique is attached.
        EnumerationGuardError: If the count exceeds the guard.
    """
    witness = find_clique(graph, r)
    if witness is not None:
        raise CliqueFoundError(witness, r)
    index = IndependentSetIndex(graph, schema)
    return IndProfile(len(graph.vertices), r, index.total_count, index.histogram)


@dataclass(frozen=True)
class ShearerCheck:
    lower: float
    upper: int
    ok: bool

    @property
    def json(self) -> dict[str, Any]:
        return {"lower": self.lower, "upper": self.upper, "ok": self.ok}


def verify_shearer(prof: IndProfile) -> ShearerCheck:
    """
    Checks 2^{n^{1/(r-1)} - 1} <= ind(F) <= 2^n.
    """
    n = prof.vertex_count
    lower = 2.0 ** (n ** (1 / (prof.r - 1)) - 1)
    upper = 2**n
    ok = within_slack(lower, prof.ind_count) and prof.ind_count <= upper
    return ShearerCheck(lower, upper, ok)


@dataclass(frozen=True)
class SmallSetReport:
    """
    How many independent sets are small, measured against ind(F)^{1 - 1/r^2}.

    `below_t_count` counts sets of size < t and `at_most_t_count` sets of size
    <= t; the claim is evaluated on the latter. The subset-count claim
    Σ_{j<=t} C(n, j) <= bound is asserted only when every explicit inequality
    of its derivation holds at this size (`asserted`); otherwise `claim_ok`
    is None and the numbers are only reported.
    """

    applicable: bool
    t: int | None = None
    size_threshold: float | None = None
    below_t_count: int | None = None
    at_most_t_count: int | None = None
    fraction_small: float | None = None
    bound: float | None = None
    subset_sum: int | None = None
    count_claim_ok: bool | None = None
    subset_claim_ok: bool | None = None
    preconditions: dict[str, bool] | None = None
    chain: tuple[float, ...] = ()
    chain_ok: bool | None = None
    asserted: bool = False
    claim_ok: bool | None = None

    @property
    def json(self) -> dict[str, Any]:
        return {
            "applicable": self.applicable,
            "t": self.t,
            "size_threshold": self.size_threshold,
            "below_t_count": self.below_t_count,
            "at_most_t_count": self.at_most_t_count,
            "fraction_small": self.fraction_small,
            "bound": self.bound,
            "subset_sum": self.subset_sum,
            "count_claim_ok": self.count_claim_ok,
            "subset_claim_ok": self.subset_claim_ok,
            "preconditions": self.preconditions,
            "chain": list(self.chain),
            "chain_ok": self.chain_ok,
            "asserted": self.asserted,
            "claim_ok": self.claim_ok,
        }


def _derivation_chain(n: int, r: int, t: int, log_i: float) -> tuple[float, ...]:
    # Successive upper bounds on Σ_{j<=t} C(n, j), ending at i^{1 - 1/r^2}.
    loglog_i = math.log2(log_i)
    e = math.e
    return (
        float(sum(math.comb(n, j) for j in range(t + 1))),
        (t + 1) * (e * n / t) ** t,
        (t + 1) * (e / t) ** t * (1 + log_i) ** ((r - 1) * t),
        (3 / t) ** t * log_i ** ((r - 1) * t),
        (3 * (r - 1) * loglog_i / log_i) ** t * log_i ** ((r - 1) * t),
        log_i ** ((1 - 1 / r) * (r - 1) * t),
        log_i ** ((1 - 1 / r) * (1 + 1 / r) * log_i / loglog_i),
    )


def small_set_fraction(prof: IndProfile) -> SmallSetReport:
    """
    Evaluates the small-independent-set bound on an exact profile.

    With i = ind(F), t = floor(((1 + 1/r)/(r - 1)) log2 i / log2 log2 i).
    Not applicable when i <= 2, where log2 log2 i is not positive.
    """
    i = prof.ind_count
    n = prof.vertex_count
    r = prof.r
    if i <= 2:
        return SmallSetReport(applicable=False)

    log_i = math.log2(i)
    loglog_i = math.log2(log_i)
    threshold = ((1 + 1 / r) / (r - 1)) * log_i / loglog_i
    t = math.floor(threshold)
    hist = prof.size_histogram
    below = sum(hist[:t])
    at_most = sum(hist[: t + 1])
    bound = i ** (1 - 1 / r**2)
    subset_sum = sum(math.comb(n, j) for j in range(t + 1))

    preconditions = {
        "t_positive": t >= 1,
        "shearer_size": (1 + log_i) ** (r - 1) >= n,
        "n_at_least_log_i": n >= log_i,
        "log_i_at_least_2t": log_i >= 2 * t,
    }
    chain: tuple[float, ...] = ()
    chain_ok = False
    if t >= 1:
        chain = _derivation_chain(n, r, t, log_i)
        chain_ok = all(within_slack(a, b) for a, b in zip(chain, chain[1:]))
    asserted = all(preconditions.values()) and chain_ok
    count_ok = within_slack(at_most, bound)
    subset_ok = within_slack(subset_sum, bound)
    return SmallSetReport(
        applicable=True,
        t=t,
        size_threshold=threshold,
        below_t_count=below,
        at_most_t_count=at_most,
        fraction_small=at_most / i,
        bound=bound,
        subset_sum=subset_sum,
        count_claim_ok=count_ok,
        subset_claim_ok=subset_ok,
        preconditions=preconditions,
        chain=chain,
        chain_ok=chain_ok,
        asserted=asserted,
        claim_ok=(count_ok and subset_ok) if asserted else None,
    )
