import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

from scipy import stats

ToolkitKind = Literal["chernoff_upper", "chernoff_lower", "lll_threshold"]


def _check_chernoff(a: float, expectation: float) -> None:
    if not 0 < a <= 1:
        raise ValueError(f"Deviation a must lie in (0, 1], got {a}")
    if expectation < 0:
        raise ValueError(f"Expectation must be non-negative, got {expectation}")


def chernoff_upper(a: float, expectation: float) -> float:
    """
    Bound on Pr(X > (1 + a) E(X)) for sums of negatively correlated indicators: e^{-a^2 E/3}.
    """
    _check_chernoff(a, expectation)
    return math.exp(-a * a * expectation / 3)


def chernoff_lower(a: float, expectation: float) -> float:
    """
    Bound on Pr(X < (1 - a) E(X)): e^{-a^2 E/2}.
    """
    _check_chernoff(a, expectation)
    return math.exp(-a * a * expectation / 2)


def lll_threshold(dependency_degree: int, probability: float) -> bool:
    """
    Symmetric Local Lemma condition p <= 1 / (e (D + 1)).

    Raises:
        ValueError: If D < 0 or p is outside [0, 1].
    """
    if dependency_degree < 0:
        raise ValueError(f"Dependency degree must be non-negative, got {dependency_degree}")
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"Probability must lie in [0, 1], got {probability}")
    return probability <= 1.0 / (math.e * (dependency_degree + 1))


def probability_toolkit(kind: ToolkitKind, **params: float) -> float | bool:
    """
    Dispatches to one of the probability tools by name.

    Example:
        probability_toolkit("chernoff_upper", a=0.5, expectation=50)
        probability_toolkit("lll_threshold", dependency_degree=0, probability=0.3)
    """
    if kind == "chernoff_upper":
        return chernoff_upper(params["a"], params["expectation"])
    if kind == "chernoff_lower":
        return chernoff_lower(params["a"], params["expectation"])
    if kind == "lll_threshold":
        return lll_threshold(int(params["dependency_degree"]), params["probability"])
    raise ValueError(f"Unknown toolkit kind: {kind}")


def binomial_tail(trials: int, p: float, threshold: float, upper: bool = True) -> float:
    """
    Exact tail of Bin(trials, p): Pr(X > threshold), or Pr(X < threshold) when upper is False.
    """
    if upper:
        return float(stats.binom.sf(math.floor(threshold), trials, p))
    return float(stats.binom.cdf(math.ceil(threshold) - 1, trials, p))


def standard_error(p: float, trials: int) -> float:
    """
    Binomial standard error of a frequency estimating p.
    """
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1 - p) / trials)


def exceeds_bound(frequency: float, bound: float, trials: int, sigmas: float) -> bool:
    """
    True when an empirical frequency overshoots its bound by more than `sigmas` standard errors.
    """
    return frequency > bound + sigmas * standard_error(bound, trials)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    threshold: float
    dof: int
    ok: bool

    @property
    def json(self) -> dict[str, float | int | bool]:
        return {
            "statistic": self.statistic,
            "threshold": self.threshold,
            "dof": self.dof,
            "ok": self.ok,
        }


def chi_square_uniformity(counts: Sequence[int], quantile: float = 0.999) -> ChiSquareResult:
    """
    Pearson statistic of observed counts against the uniform law on len(counts) categories.

    Categories that were never observed must be passed as zeros.
    """
    categories = len(counts)
    if categories == 0:
        raise ValueError("Need at least one category")
    total = sum(counts)
    if categories == 1 or total == 0:
        return ChiSquareResult(0.0, 0.0, categories - 1, True)
    expected = total / categories
    statistic = sum((c - expected) ** 2 for c in counts) / expected
    threshold = float(stats.chi2.ppf(quantile, categories - 1))
    return ChiSquareResult(statistic, threshold, categories - 1, statistic <= threshold)
