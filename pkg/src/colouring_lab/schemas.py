from dataclasses import asdict, dataclass, field
from typing import Any

# Relative slack used whenever a floating-point quantity is compared against
# a closed-form bound: lhs <= rhs + RELATIVE_SLACK * max(1, |rhs|).
RELATIVE_SLACK = 1e-12


@dataclass(frozen=True)
class EnumerationSchema:
    """
    Configuration for exhaustive enumeration and exact samplers.
    Designed to be immutable and passed to pure functions.

    Attributes:
        guard (int): Maximum number of objects (colourings, independent sets,
            lottery outcomes) an exact routine may enumerate. Defaults to 2**24.
        correlation_limit (int): Largest number of coupons for which the
            negative-correlation check walks all 2**n coupon subsets. Defaults to 20.
    """

    guard: int = 2**24
    correlation_limit: int = 20

    def __post_init__(self):
        if self.guard < 1:
            raise ValueError(f"Enumeration guard must be positive, got {self.guard}")
        if self.correlation_limit < 0:
            raise ValueError("correlation_limit must be non-negative")


DEFAULT_ENUMERATION_SCHEMA = EnumerationSchema()


@dataclass(frozen=True)
class MonteCarloSchema:
    """
    Configuration for the vectorised lottery Monte Carlo.

    Attributes:
        trials (int): Default number of simulated lotteries. Defaults to 100_000.
        block_size (int): Trials simulated per numpy block. Each block draws from
            its own Philox substream (seed, block). Defaults to 1024.
        sigma_slack (float): Number of binomial standard errors an empirical
            frequency may exceed its bound by before it counts as a violation.
        min_asserted_n (int): Smallest number of coupons for which tail bounds
            are asserted rather than only reported.
        asserted_epsilons (tuple[float, ...]): Exponents for which tail bounds
            are asserted.
    """

    trials: int = 100_000
    block_size: int = 1024
    sigma_slack: float = 3.0
    min_asserted_n: int = 64
    asserted_epsilons: tuple[float, ...] = (0.3, 0.5, 0.7)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.block_size < 1:
            raise ValueError(f"block_size must be positive, got {self.block_size}")
        if self.sigma_slack < 0:
            raise ValueError("sigma_slack must be non-negative")


DEFAULT_MONTE_CARLO_SCHEMA = MonteCarloSchema()


@dataclass(frozen=True)
class SolverSchema:
    """
    Configuration for the constructive solvers and the brute-force oracle.

    Attributes:
        max_resamples (int): Resampling budget shared by the pipeline loop and
            the Moser-Tardos finisher. Defaults to 10**6.
        guard (int): Enumeration guard for the exact samplers used inside the
            pipeline (initial draw and ball resampling).
        search_guard (int): Guard for the exhaustive oracle, compared against the
            product of list sizes, and for the transversal search node count.
        ball_radius (int): Radius of the ball resampled around a bad vertex.
    """

    max_resamples: int = 10**6
    guard: int = 2**24
    search_guard: int = 2**24
    ball_radius: int = 2

    def __post_init__(self):
        if self.max_resamples < 0:
            raise ValueError("max_resamples must be non-negative")
        if self.ball_radius < 0:
            raise ValueError("ball_radius must be non-negative")
        if self.guard < 1 or self.search_guard < 1:
            raise ValueError("Guards must be positive")

    @property
    def enumeration(self) -> EnumerationSchema:
        return EnumerationSchema(guard=self.guard)


DEFAULT_SOLVER_SCHEMA = SolverSchema()


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Bundle of every knob a CLI run depends on.
    Serialised verbatim into reports so that a run can be replayed.

    Attributes:
        command (str): The subcommand that was run.
        seed (int): Root seed of every random stream in the run.
        params (dict[str, Any]): Subcommand parameters and input paths, as given.
        output_format (str): "json", "text" or "csv".
    """

    command: str = ""
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    enumeration: EnumerationSchema = field(default_factory=EnumerationSchema)
    monte_carlo: MonteCarloSchema = field(default_factory=MonteCarloSchema)
    solver: SolverSchema = field(default_factory=SolverSchema)

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError(f"Seed must fit in 64 unsigned bits, got {self.seed}")
        if self.output_format not in ("json", "text", "csv"):
            raise ValueError(f"Unknown output format '{self.output_format}'")

    @property
    def json(self) -> dict[str, Any]:
        return asdict(self)
