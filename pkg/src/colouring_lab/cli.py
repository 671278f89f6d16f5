import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from .bounds import ChiSquareResult, chi_square_uniformity
from .chain import resampling_chain, verify_chain_uniformity
from .cover import canonical_cover, ensure_valid, find_f_free_cover_violation, is_h_colouring
from .graph import GRAPH_KINDS, generate_graph
from .lists import find_f_free_violation, is_list_colouring
from .loader import dump_json, load_cover, load_document, load_graph, load_lottery
from .lottery import exact_stats, full_deck_instance, max_decks, monte_carlo_tails
from .models import CoverVertex
from .report import Report
from .sampler import (
    EnumerationIndex,
    IndependentSetIndex,
    PartialColouringIndex,
    sweep_conditional_uniformity_cover,
    sweep_conditional_uniformity_lists,
)
from .schemas import EnumerationSchema, ExperimentConfig, MonteCarloSchema, SolverSchema
from .shearer import profile, small_set_fraction, verify_shearer
from .solver import exhaustive_colourable, solve_pipeline
from .utils import make_rng
from .validation import (
    CliqueFoundError,
    CoverValidationError,
    DocumentError,
    EnumerationGuardError,
)

logger = logging.getLogger("colouring_lab")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

# Arguments that do not change what a run computes.
_NOT_CONFIG = {"command", "out", "verbose", "format", "seed", "handler"}

SAMPLE_DRAWS = 2000
SHEARER_GRAPHS = 50
SHEARER_MAX_N = 14


class InputError(ValueError):
    """Bad command-line input that argparse cannot catch on its own."""


def _parse_members(text: str | None) -> list[CoverVertex]:
    """
    Parses "0_1,2_2" into cover vertices; empty or None gives no members.
    """
    members = []
    for token in (text or "").split(","):
        token = token.strip()
        if not token:
            continue
        owner, sep, colour = token.partition("_")
        if not sep:
            raise InputError(f"Cover vertex '{token}' must look like vertex_colour")
        try:
            members.append(CoverVertex(int(owner), int(colour)))
        except ValueError as e:
            raise InputError(f"Cover vertex '{token}' must look like vertex_colour") from e
    return members


def _require_instance(args: argparse.Namespace) -> Path:
    if args.instance is None:
        raise InputError(f"'{args.command}' needs an instance file")
    return Path(args.instance)


# --- Subcommands ----------------------------------------------------------------------


def _run_lottery(args: argparse.Namespace, report: Report) -> None:
    config = report.config
    if args.instance is not None:
        inst = load_lottery(args.instance)
    else:
        if args.n is None:
            raise InputError("lottery needs --n or an instance file")
        m = args.m if args.m is not None else max_decks(args.n, args.epsilon)
        inst = full_deck_instance(args.n, m)

    tail = monte_carlo_tails(
        inst, args.epsilon, trials=args.trials, seed=config.seed, schema=config.monte_carlo
    )
    report.results["tail"] = tail.json
    report.rows = tail.coupon_rows()
    report.check(
        "tail_bounds",
        tail.passed,
        f"asserted={tail.asserted} size={tail.size_frequency:.6f}/{tail.size_bound:.6f} "
        f"missed={tail.max_missed_frequency:.6f}/{tail.missed_bound:.6f}",
    )

    if inst.outcome_count > config.enumeration.guard:
        report.results["exact"] = None
        logger.info("Skipping exact statistics: %d outcomes", inst.outcome_count)
        return
    stats = exact_stats(inst, config.enumeration)
    report.results["exact"] = stats.json
    report.check("product_formula", stats.product_formula_ok)
    report.check("sandwich", stats.sandwich_ok)
    report.check("expectation_chain", stats.expectation_chain_ok)
    if stats.negative_correlation_ok is not None:
        report.check("negative_correlation", stats.negative_correlation_ok)


def _chi_square_draws(index: EnumerationIndex[Any], draws: int, seed: int) -> ChiSquareResult | None:
    total = index.total_count
    if total * 5 > draws:
        return None
    counts = [0] * total
    for obj in index.sample_many(draws, seed):
        counts[index.rank(obj)] += 1
    return chi_square_uniformity(counts)


def _run_sample(args: argparse.Namespace, report: Report) -> None:
    config = report.config
    doc = load_document(_require_instance(args))
    draws = args.trials if args.trials is not None else SAMPLE_DRAWS
    if doc.is_cover:
        cov = ensure_valid(doc.to_cover())
        sweep = sweep_conditional_uniformity_cover(cov, config.enumeration)
        report.results["cover_sweep"] = sweep.json
        report.check("cover_conditional_uniformity", sweep.ok, sweep.first_violation or "")
        index: EnumerationIndex[Any] = IndependentSetIndex(
            cov.conflict_graph, config.enumeration
        )
    else:
        graph, lists = doc.to_graph(), doc.to_lists()
        sweep = sweep_conditional_uniformity_lists(graph, lists, config.enumeration)
        report.results["list_sweep"] = sweep.json
        report.check("list_conditional_uniformity", sweep.ok, sweep.first_violation or "")
        index = PartialColouringIndex(graph, lists, config.enumeration)

    report.results["outcomes"] = index.total_count
    chi = _chi_square_draws(index, draws, config.seed)
    report.results["chi_square"] = None if chi is None else chi.json
    if chi is not None:
        report.check("sampler_chi_square", chi.ok, f"{chi.statistic:.3f} <= {chi.threshold:.3f}")


def _run_chain(args: argparse.Namespace, report: Report) -> None:
    config = report.config
    cov = ensure_valid(load_cover(_require_instance(args)))
    fixed = _parse_members(args.fixed)
    u = args.vertex
    check = verify_chain_uniformity(
        cov, u, fixed, mode=args.mode, delta=args.delta, r=args.r, schema=config.enumeration
    )
    report.results["distribution"] = check.json
    report.check("chain_uniform", check.ok)
    run = resampling_chain(
        cov, u, fixed, config.seed, mode=args.mode, delta=args.delta, r=args.r,
        schema=config.enumeration,
    )
    report.results["run"] = run.json


def _oracle(args: argparse.Namespace, report: Report, instance) -> bool | None:
    if args.no_oracle:
        return None
    oracle = exhaustive_colourable(instance, report.config.solver.search_guard)
    report.results["oracle"] = oracle.json
    return oracle.colourable


def _run_solve(args: argparse.Namespace, report: Report) -> None:
    config = report.config
    doc = load_document(_require_instance(args))
    graph, lists = doc.to_graph(), doc.to_lists()
    result = solve_pipeline(
        (graph, lists), epsilon=args.epsilon, l=args.l, seed=config.seed, kind="list",
        schema=config.solver,
    )
    report.results["pipeline"] = result.json
    if result.colouring is not None:
        report.check("colouring_valid", is_list_colouring(graph, lists, result.colouring))
    colourable = _oracle(args, report, (graph, lists))
    if colourable is not None:
        report.check("oracle_agreement", colourable or not result.success)


def _run_dp_solve(args: argparse.Namespace, report: Report) -> None:
    config = report.config
    cov = ensure_valid(load_cover(_require_instance(args)))
    result = solve_pipeline(
        cov, epsilon=args.epsilon, l=args.l, seed=config.seed, r=args.r, schema=config.solver
    )
    report.results["pipeline"] = result.json
    if result.independent_set is not None:
        report.check("h_colouring_valid", is_h_colouring(cov, result.independent_set))
    colourable = _oracle(args, report, cov)
    if colourable is not None:
        report.check("oracle_agreement", colourable or not result.success)


def _run_verify_cover(args: argparse.Namespace, report: Report) -> None:
    doc = load_document(_require_instance(args))
    cov = doc.to_cover() if doc.is_cover else canonical_cover(doc.to_graph(), doc.to_lists())
    errors = cov.violations()
    report.results["structure"] = {"ok": not errors, "errors": errors}
    if not report.check("structure", not errors, f"{len(errors)} errors"):
        return
    if args.r is not None:
        witness = find_f_free_cover_violation(cov, args.r)
        report.results["f_free"] = {
            "r": args.r,
            "ok": witness is None,
            "witness": None if witness is None else [x.label for x in witness],
        }
        if not doc.is_cover:
            clique = find_f_free_violation(doc.to_graph(), doc.to_lists(), args.r)
            report.results["f_free"]["list_witness"] = (
                None if clique is None else {"colour": clique.colour, "clique": list(clique.clique)}
            )
    colourable = _oracle(args, report, cov)
    if colourable is not None:
        report.results["feasibility"] = "colourable" if colourable else "infeasible"


def _run_shearer(args: argparse.Namespace, report: Report) -> None:
    config = report.config
    r = args.r if args.r is not None else 4
    if args.instance is not None:
        graphs = [load_graph(args.instance)]
    else:
        rng = make_rng(config.seed)
        count = args.trials if args.trials is not None else SHEARER_GRAPHS
        max_n = args.n if args.n is not None else SHEARER_MAX_N
        graphs = []
        for i in range(count):
            n = int(rng.integers(0, max_n + 1))
            p = float(rng.uniform(0.1, 0.9))
            graphs.append(generate_graph("random-clique-free", n, p=p, r=r, seed=config.seed + i))

    rows = []
    for i, graph in enumerate(graphs):
        try:
            prof = profile(graph, r, config.enumeration)
        except CliqueFoundError as e:
            report.check(f"graph_{i}_clique_free", False, str(e))
            continue
        shearer = verify_shearer(prof)
        small = small_set_fraction(prof)
        report.check(f"graph_{i}_shearer", shearer.ok, f"ind={prof.ind_count}")
        if small.asserted:
            report.check(f"graph_{i}_small_sets", bool(small.claim_ok))
        rows.append(
            {
                "n": prof.vertex_count,
                "r": r,
                "ind": prof.ind_count,
                "lower": shearer.lower,
                "upper": shearer.upper,
                "t": small.t,
                "fraction": small.fraction_small,
                "preconditions": small.preconditions,
            }
        )
    report.results["graphs"] = rows
    report.rows = [{k: v for k, v in row.items() if k != "preconditions"} for row in rows]


def _run_gen(args: argparse.Namespace) -> int:
    if args.kind is None or args.n is None:
        raise InputError("gen needs --kind and --n")
    graph = generate_graph(args.kind, args.n, p=args.p, r=args.r, seed=args.seed)
    document: dict[str, Any] = dict(graph.json)
    if args.lists is not None:
        document["lists"] = [list(range(1, args.lists + 1)) for _ in range(graph.vertex_count)]
    text = dump_json(document)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_HANDLERS: dict[str, Callable[[argparse.Namespace, Report], None]] = {
    "lottery": _run_lottery,
    "sample": _run_sample,
    "chain": _run_chain,
    "solve": _run_solve,
    "dp-solve": _run_dp_solve,
    "verify-cover": _run_verify_cover,
    "shearer": _run_shearer,
}


# --- Entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Root seed of every random stream.")
    common.add_argument("--out", type=str, default=None, help="Write the report here.")
    common.add_argument(
        "--format", choices=["json", "text", "csv"], default="json", help="Report format."
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs."
    )
    common.add_argument("--instance", type=str, default=None, help="Input JSON document.")
    common.add_argument("--trials", type=int, default=None, help="Number of random trials.")
    common.add_argument("--epsilon", type=float, default=0.3, help="Epsilon of the bounds.")
    common.add_argument("--r", type=int, default=None, help="Forbidden clique size K_r.")
    common.add_argument("--l", type=float, default=None, help="Finishing parameter l.")
    common.add_argument("--n", type=int, default=None, help="Number of vertices or coupons.")
    common.add_argument("--budget", type=int, default=None, help="Resampling budget.")
    common.add_argument(
        "--guard", type=int, default=None, help="Enumeration and search guard."
    )
    common.add_argument(
        "--no-oracle", action="store_true", help="Skip the exhaustive feasibility oracle."
    )

    parser = argparse.ArgumentParser(
        prog="colouring-lab",
        description="Exact and randomised checks for list and cover colouring.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(
            name,
            parents=[common],
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        p.add_argument("file", nargs="?", default=None, help="Input JSON document.")
        return p

    lottery = add("lottery", "Exact and Monte Carlo lottery statistics.")
    lottery.add_argument("--m", type=int, default=None, help="Number of full decks.")
    add("sample", "Uniform sampler and conditional-uniformity sweeps.")
    chain = add("chain", "Exact output law of the resampling chain.")
    chain.add_argument("--vertex", type=int, default=0, help="Vertex the chain resamples around.")
    chain.add_argument("--mode", choices=["direct", "predrawn"], default="direct")
    chain.add_argument("--fixed", type=str, default=None, help="Fixed set, e.g. '2_1,3_2'.")
    chain.add_argument("--delta", type=float, default=None, help="Degree bound for predrawn mode.")
    add("solve", "List-colouring pipeline with oracle cross-check.")
    add("dp-solve", "Cover-colouring pipeline with oracle cross-check.")
    add("verify-cover", "Structural cover check and feasibility oracle.")
    add("shearer", "Independent-set counts of K_r-free graphs.")
    gen = add("gen", "Generate a graph document.")
    gen.add_argument("--kind", choices=list(GRAPH_KINDS), default=None)
    gen.add_argument("--p", type=float, default=None, help="Edge probability.")
    gen.add_argument("--lists", type=int, default=None, help="Attach lists {1..k} to every vertex.")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    guard = {} if args.guard is None else {"guard": args.guard}
    solver_args = dict(guard)
    if args.guard is not None:
        solver_args["search_guard"] = args.guard
    if args.budget is not None:
        solver_args["max_resamples"] = args.budget
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}
    return ExperimentConfig(
        command=args.command,
        seed=args.seed,
        params=params,
        output_format=args.format,
        enumeration=EnumerationSchema(**guard),
        monte_carlo=MonteCarloSchema(**({} if args.trials is None else {"trials": args.trials})),
        solver=SolverSchema(**solver_args),
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if args.file is not None:
        if args.instance is not None and args.instance != args.file:
            print("Error: give the instance either positionally or with --instance.", file=sys.stderr)
            return EXIT_INPUT
        args.instance = args.file
    args.file = None

    try:
        if args.command == "gen":
            return _run_gen(args)
        report = Report(_build_config(args))
        _HANDLERS[args.command](args, report)
        text = report.render()
    except FileNotFoundError as e:
        print(f"Error: File '{e.filename}' not found.", file=sys.stderr)
        return EXIT_INPUT
    except (DocumentError, CoverValidationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except EnumerationGuardError as e:
        print(f"Error: {e}. Raise --guard or pass --no-oracle.", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ImportError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT

    if args.out:
        report.write(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
