from .graph import (
    build_graph,
    contains_clique,
    find_clique,
    generate_graph,
)
from .lists import (
    availability,
    is_f_free_assignment,
    is_list_colouring,
    is_partial_colouring,
    reed_condition,
    residual_lists,
)
from .lottery import (
    draw,
    exact_stats,
    monte_carlo_tails,
    uncollected,
)
from .cover import (
    canonical_cover,
    conflict_graph,
    embed,
    h_star,
    is_f_free_cover,
    residual,
    twisted_c4,
    validate_cover,
)
from .sampler import (
    enumerate_independent_sets,
    enumerate_partial_colourings,
    sample_uniform_partial_colouring,
    verify_conditional_uniformity_cover,
    verify_conditional_uniformity_lists,
)
from .chain import resampling_chain, verify_chain_uniformity
from .solver import (
    exhaustive_colourable,
    haxell_transversal,
    moser_tardos_reed,
    solve_pipeline,
)
from .shearer import profile, small_set_fraction, verify_shearer
from .loader import load_cover, load_graph, load_instance, load_lottery
from .models import (
    Cover,
    CoverVertex,
    Graph,
    IndProfile,
    ListAssignment,
    LotteryInstance,
    LotteryOutcome,
    PartialColouring,
)
from .schemas import (
    DEFAULT_ENUMERATION_SCHEMA,
    DEFAULT_MONTE_CARLO_SCHEMA,
    DEFAULT_SOLVER_SCHEMA,
    EnumerationSchema,
    ExperimentConfig,
    MonteCarloSchema,
    SolverSchema,
)
from .validation import (
    CliqueFoundError,
    CoverValidationError,
    DocumentError,
    EnumerationGuardError,
    LotteryPreconditionError,
)

__all__ = [
    "build_graph",
    "contains_clique",
    "find_clique",
    "generate_graph",
    "availability",
    "is_f_free_assignment",
    "is_list_colouring",
    "is_partial_colouring",
    "reed_condition",
    "residual_lists",
    "draw",
    "exact_stats",
    "monte_carlo_tails",
    "uncollected",
    "canonical_cover",
    "conflict_graph",
    "embed",
    "h_star",
    "is_f_free_cover",
    "residual",
    "twisted_c4",
    "validate_cover",
    "enumerate_independent_sets",
    "enumerate_partial_colourings",
    "sample_uniform_partial_colouring",
    "verify_conditional_uniformity_cover",
    "verify_conditional_uniformity_lists",
    "resampling_chain",
    "verify_chain_uniformity",
    "exhaustive_colourable",
    "haxell_transversal",
    "moser_tardos_reed",
    "solve_pipeline",
    "profile",
    "small_set_fraction",
    "verify_shearer",
    "load_cover",
    "load_graph",
    "load_instance",
    "load_lottery",
    "Cover",
    "CoverVertex",
    "Graph",
    "IndProfile",
    "ListAssignment",
    "LotteryInstance",
    "LotteryOutcome",
    "PartialColouring",
    "DEFAULT_ENUMERATION_SCHEMA",
    "DEFAULT_MONTE_CARLO_SCHEMA",
    "DEFAULT_SOLVER_SCHEMA",
    "EnumerationSchema",
    "ExperimentConfig",
    "MonteCarloSchema",
    "SolverSchema",
    "CliqueFoundError",
    "CoverValidationError",
    "DocumentError",
    "EnumerationGuardError",
    "LotteryPreconditionError",
]
