"""
Commands: generate, solve, backbone.

Each command has a `cmd_*` handler taking parsed arguments and returning an
exit status; the work itself lives in plain functions (`solve_instance`,
`resolve_budget`, ...) that the experiment harness and the tests call
directly.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from typing import Any, Dict, Mapping, Optional

import numpy as np

from models.abma import OPERATOR_CHOICES, AbmaParams, abma_solve
from models.backbone import exact_backbone, enumerate_optima
from models.errors import ConfigError, InputError
from models.generator import budget_from_ratio, generate
from models.instance import Budget, Instance, solution_cost
from models.search import SearchParams, get_operator
from utils.config import get_settings
from utils.data_helpers import RunReport, load_instance, load_preset, run_name
from utils.instance_io import load_generator_config, save_instance_file

logger = logging.getLogger(__name__)

ALGORITHMS = ("random", "hillclimb", "gcs", "lmsa", "abma", "exact")

OPTION_KEYS = (
    "iters",
    "restarts",
    "temperature",
    "beta",
    "operator",
    "local_optima",
    "stop_ratio",
    "min_customers",
    "cap",
)


def default_options() -> Dict[str, Any]:
    settings = get_settings()
    return {
        "iters": settings.default_iterations,
        "restarts": settings.default_restarts,
        "temperature": 0.3,
        "beta": 1e-8,
        "operator": "gcs",
        "local_optima": 10,
        "stop_ratio": 0.30,
        "min_customers": 0,
        "cap": settings.enumeration_cap,
    }


def merge_options(overrides: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Defaults updated with `overrides`; None values are ignored."""
    options = default_options()
    for key, value in (overrides or {}).items():
        if key not in OPTION_KEYS:
            raise ConfigError(f"unknown parameter {key!r}; expected one of {', '.join(OPTION_KEYS)}")
        if value is not None:
            options[key] = value
    return options


def resolve_budget(
    instance: Instance, ratio: Optional[str] = None, bound: Optional[int] = None
) -> Budget:
    """Budget from --ratio or --budget, falling back to the file's budget line."""
    if ratio is not None and bound is not None:
        raise InputError("give either a ratio or a budget, not both")
    if ratio is not None:
        return budget_from_ratio(instance, ratio)
    if bound is not None:
        return Budget(int(bound))
    if instance.declared_budget is not None:
        return instance.declared_budget
    raise InputError(f"{instance.name} has no budget line; pass --ratio or --budget")


def _algorithm_params(algorithm: str, options: Mapping[str, Any], seed: int) -> Dict[str, Any]:
    """The options that actually affect `algorithm`, for the report."""
    if algorithm == "exact":
        return {"cap": options["cap"]}
    params = {"iters": options["iters"], "restarts": options["restarts"]}
    if algorithm == "lmsa" or (algorithm == "abma" and options["operator"] == "lmsa"):
        params.update(temperature=options["temperature"], beta=options["beta"])
    if algorithm == "abma":
        params.update(
            operator=options["operator"],
            local_optima=options["local_optima"],
            stop_ratio=options["stop_ratio"],
            min_customers=options["min_customers"],
        )
    return params


def solve_instance(
    instance: Instance,
    budget: Budget,
    algorithm: str,
    seed: int,
    options: Optional[Mapping[str, Any]] = None,
) -> RunReport:
    """
    Run one algorithm once and build its report.

    Args:
        instance: Instance to solve
        budget: Budget bound
        algorithm: One of ALGORITHMS
        seed: Seed of the PCG64 stream for the run
        options: Overrides of default_options()

    Raises:
        InputError: Unknown algorithm or invalid parameters
        CapacityError: `exact` above the enumeration cap
    """
    if algorithm not in ALGORITHMS:
        raise InputError(f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
    opts = merge_options(options)
    rng = np.random.Generator(np.random.PCG64(seed))
    traces = []
    evaluations = 0

    started = time.perf_counter()
    if algorithm == "exact":
        optima = enumerate_optima(instance, budget, cap=int(opts["cap"]))
        best = optima.solutions[0]
        profit = optima.profit
        cost = solution_cost(instance, best)
    elif algorithm == "abma":
        params = AbmaParams(
            restarts=int(opts["restarts"]),
            local_optima_per_level=int(opts["local_optima"]),
            operator_params=SearchParams(
                iterations=int(opts["iters"]),
                seed=seed,
                lmsa_temperature=float(opts["temperature"]),
                lmsa_beta=float(opts["beta"]),
            ),
            scale_stop_ratio=float(opts["stop_ratio"]),
            operator=str(opts["operator"]),
            min_customers=int(opts["min_customers"]),
        )
        result, level_traces = abma_solve(instance, budget, params, rng)
        best, profit, cost = result.best, result.profit, result.cost
        evaluations = result.evaluations
        traces = [t.to_dict() for t in level_traces]
    else:
        params = SearchParams(
            iterations=int(opts["iters"]),
            restarts=int(opts["restarts"]),
            seed=seed,
            lmsa_temperature=float(opts["temperature"]),
            lmsa_beta=float(opts["beta"]),
        )
        result = get_operator(algorithm)(instance, budget, params, rng)
        best, profit, cost = result.best, result.profit, result.cost
        evaluations = result.evaluations
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    logger.info(
        "%s on %s: profit %s, cost %d/%d (%.1f ms)",
        algorithm, run_name(instance, budget), profit, cost, budget.bound, elapsed_ms,
    )
    return RunReport(
        instance_name=run_name(instance, budget),
        algorithm=algorithm,
        params=_algorithm_params(algorithm, opts, seed),
        seed=seed,
        profit=profit,
        cost=cost,
        budget=budget.bound,
        elapsed_ms=elapsed_ms,
        selected=sorted(best.selected),
        evaluations=evaluations,
        level_traces=traces,
    )


def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy % (2**32))


def _write_out(text: str, out_path: Optional[str]) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(out_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def add_budget_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--ratio", help="Budget as a fraction of the total cost, e.g. 0.7")
    group.add_argument("--budget", type=int, help="Budget bound")


def add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iters", type=int, help="Iterations per run")
    parser.add_argument("--restarts", type=int, help="Independent restarts")
    parser.add_argument("--temperature", type=float, help="LMSA initial temperature")
    parser.add_argument("--beta", type=float, help="LMSA cooling parameter")


def _options_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, key, None) for key in OPTION_KEYS}


def cmd_generate(args: argparse.Namespace) -> int:
    if args.config:
        config = load_generator_config(args.config)
    else:
        config = load_preset(args.preset)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    instance = generate(config)
    budget = budget_from_ratio(instance, args.ratio) if args.ratio is not None else None
    save_instance_file(instance, args.out, budget)
    print(f"✓ Wrote {instance.name} (m={instance.m}, n={instance.n}) to {args.out}", file=sys.stderr)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    budget = resolve_budget(instance, args.ratio, args.budget)
    seed = args.seed
    if seed is None:
        seed = fresh_seed()
        print(f"seed: {seed}", file=sys.stderr)
    report = solve_instance(instance, budget, args.algo, seed, _options_from_args(args))
    _write_out(report.to_json() + "\n", args.out)
    return 0


def cmd_backbone(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    budget = resolve_budget(instance, args.ratio, args.budget)
    cap = args.cap if args.cap is not None else get_settings().enumeration_cap
    bone = exact_backbone(instance, budget, cap=cap)
    logger.info("backbone of %s: %d of %d customers fixed", run_name(instance, budget), len(bone), instance.n)
    lines = bone.to_lines()
    _write_out("".join(line + "\n" for line in lines), args.out)
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    """Register generate, solve and backbone."""
    gen = subparsers.add_parser("generate", help="Generate an instance from a config or preset")
    source = gen.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="Generator config file")
    source.add_argument("--preset", help="Preset name (nrp-1 ... nrp-5)")
    gen.add_argument("--seed", type=int, help="Override the config seed")
    gen.add_argument("--ratio", help="Also write a budget line for this cost ratio")
    gen.add_argument("--out", required=True, help="Output instance file")
    gen.set_defaults(handler=cmd_generate)

    solve = subparsers.add_parser("solve", help="Solve an instance and print a JSON report")
    solve.add_argument("instance", help="Instance file (or name under the data directory)")
    add_budget_flags(solve)
    solve.add_argument("--algo", choices=ALGORITHMS, default="abma")
    solve.add_argument("--seed", type=int, help="Seed; a random one is printed when omitted")
    add_search_flags(solve)
    solve.add_argument("--operator", choices=OPERATOR_CHOICES, help="ABMA embedded operator")
    solve.add_argument("--local-optima", dest="local_optima", type=int, help="ABMA local optima per level")
    solve.add_argument("--stop-ratio", dest="stop_ratio", type=float, help="ABMA scale stop ratio")
    solve.add_argument("--min-customers", dest="min_customers", type=int, help="ABMA minimum sub-instance size")
    solve.add_argument("--cap", type=int, help="Enumeration cap for --algo exact")
    solve.add_argument("--out", help="Write the report here instead of stdout")
    solve.set_defaults(handler=cmd_solve)

    bb = subparsers.add_parser("backbone", help="List the exact backbone as 'fix <customer> <bit>' lines")
    bb.add_argument("instance")
    add_budget_flags(bb)
    bb.add_argument("--cap", type=int, help="Enumeration cap")
    bb.add_argument("--out", help="Write the listing here instead of stdout")
    bb.set_defaults(handler=cmd_backbone)
