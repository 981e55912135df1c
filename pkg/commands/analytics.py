"""
Commands: landscape and experiment.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from commands.solve_commands import (
    ALGORITHMS,
    add_budget_flags,
    merge_options,
    resolve_budget,
    solve_instance,
)
from models.abma import AbmaParams, abma_solve
from models.backbone import enumerate_optima
from models.errors import CapacityError, ConfigError
from models.generator import as_ratio, budget_from_ratio, generate
from models.instance import Budget, Instance, Solution, hamming_distance
from models.search import SearchParams, get_operator
from utils.config import get_settings
from utils.data_helpers import (
    RunReport,
    get_run_summary_stats,
    load_instance,
    load_preset,
    percent_change,
    ratio_label,
    resolve_data_path,
)

logger = logging.getLogger(__name__)

LANDSCAPE_ALGORITHMS = ("random", "hillclimb", "gcs", "lmsa")
EXPERIMENT_COLUMNS = [
    "instance",
    "ratio",
    "bound",
    "algo",
    "profit",
    "time_s",
    "profit_ratio_pct",
    "time_ratio_pct",
]


# ---------------------------------------------------------------------------
# landscape
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Reference:
    """Reference point of a landscape: every optimum, or one best-known solution."""

    kind: str
    profit: Any
    solutions: Tuple[Solution, ...]

    def distance(self, solution: Solution) -> int:
        return min(hamming_distance(solution, ref) for ref in self.solutions)


def landscape_reference(
    instance: Instance,
    budget: Budget,
    seed: int,
    cap: Optional[int] = None,
    iterations: int = 10000,
) -> Reference:
    """Exact optima when enumeration is allowed, else a long ABMA run labelled best-known."""
    try:
        optima = enumerate_optima(instance, budget, cap=cap)
        return Reference("exact", optima.profit, optima.solutions)
    except CapacityError:
        logger.info("%s is above the enumeration cap; using a best-known reference", instance.name)
    params = AbmaParams(
        restarts=get_settings().default_restarts,
        operator_params=SearchParams(iterations=iterations),
    )
    result, _ = abma_solve(instance, budget, params, np.random.Generator(np.random.PCG64(seed)))
    return Reference("best-known", result.profit, (result.best,))


def landscape(
    instance: Instance,
    budget: Budget,
    algorithm: str,
    rounds: int,
    iterations: int,
    seed: int,
    reference: Optional[Reference] = None,
) -> Tuple[pd.DataFrame, Reference]:
    """
    Run `rounds` independent local searches and place each local optimum
    relative to the reference.

    Returns:
        DataFrame with columns normalized_distance (d_H / n) and
        normalized_profit (profit / reference profit), plus the reference
    """
    if algorithm not in LANDSCAPE_ALGORITHMS:
        raise ConfigError(f"landscape algorithm must be one of {', '.join(LANDSCAPE_ALGORITHMS)}")
    if rounds < 1:
        raise ConfigError("rounds must be >= 1")
    reference = reference or landscape_reference(instance, budget, seed)
    operator = get_operator(algorithm)
    params = SearchParams(iterations=iterations, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed))

    n = max(instance.n, 1)
    ref_profit = float(reference.profit)
    rows = []
    for _ in range(rounds):
        result = operator(instance, budget, params, rng)
        distance = reference.distance(result.best) / n
        profit = float(result.profit) / ref_profit if ref_profit else 1.0
        rows.append({"normalized_distance": distance, "normalized_profit": profit})
    return pd.DataFrame(rows, columns=["normalized_distance", "normalized_profit"]), reference


def landscape_csv(df: pd.DataFrame, reference: Reference) -> str:
    buf = io.StringIO()
    buf.write(f"# reference: {reference.kind} profit={reference.profit}\n")
    df.to_csv(buf, index=False, lineterminator="\n")
    return buf.getvalue()


def cmd_landscape(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    budget = resolve_budget(instance, args.ratio, args.budget)
    reference = landscape_reference(
        instance, budget, args.seed, cap=args.cap, iterations=args.ref_iters
    )
    df, reference = landscape(
        instance, budget, args.algo, args.rounds, args.iters, args.seed, reference=reference
    )
    text = landscape_csv(df, reference)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        print(f"✓ Saved {len(df)} rows to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Manifest:
    seed: int
    instances: Tuple[Dict[str, Any], ...]
    ratios: Tuple[Fraction, ...]
    algorithms: Tuple[str, ...]
    repetitions: int
    baseline: str
    params: Dict[str, Any]
    workers: int
    base_dir: str


def parse_manifest(data: Dict[str, Any], base_dir: str = ".") -> Manifest:
    """
    Validate a manifest dict.

    Raises:
        ConfigError: Missing seed, unknown keys or algorithms, bad baseline, ...
    """
    if not isinstance(data, dict):
        raise ConfigError("manifest must be a JSON object")
    allowed = {"seed", "instances", "ratios", "algorithms", "repetitions", "baseline", "params", "workers"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown manifest keys: {', '.join(sorted(unknown))}")
    if "seed" not in data or not isinstance(data["seed"], int):
        raise ConfigError("manifest needs an integer 'seed'")

    instances = data.get("instances") or []
    if not instances:
        raise ConfigError("manifest lists no instances")
    for entry in instances:
        if not isinstance(entry, dict) or not (("path" in entry) ^ ("preset" in entry)):
            raise ConfigError(f"instance entry {entry!r} needs exactly one of 'path' or 'preset'")
        if "preset" in entry and not isinstance(entry.get("seed"), int):
            raise ConfigError(f"preset entry {entry!r} needs an integer 'seed'")

    ratios = []
    for value in data.get("ratios") or []:
        ratio = as_ratio(value)
        if not 0 <= ratio <= 1:
            raise ConfigError(f"ratio {value} outside [0, 1]")
        ratios.append(ratio)
    if not ratios:
        raise ConfigError("manifest lists no ratios")

    algorithms = tuple(data.get("algorithms") or ())
    if not algorithms:
        raise ConfigError("manifest lists no algorithms")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {algo!r}")
    baseline = data.get("baseline", algorithms[0])
    if baseline not in algorithms:
        raise ConfigError(f"baseline {baseline!r} is not among the algorithms")

    repetitions = data.get("repetitions", 1)
    if not isinstance(repetitions, int) or repetitions < 1:
        raise ConfigError("repetitions must be a positive integer")
    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers must be a positive integer")
    params = dict(data.get("params") or {})
    merge_options(params)

    return Manifest(
        seed=data["seed"],
        instances=tuple(instances),
        ratios=tuple(ratios),
        algorithms=algorithms,
        repetitions=repetitions,
        baseline=baseline,
        params=params,
        workers=workers,
        base_dir=base_dir,
    )


def load_manifest(path: str) -> Manifest:
    path = resolve_data_path(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_manifest(data, base_dir=os.path.dirname(os.path.abspath(path)))


def _load_manifest_instance(entry: Dict[str, Any], base_dir: str) -> Instance:
    if "preset" in entry:
        return generate(load_preset(entry["preset"]).with_seed(entry["seed"]))
    path = entry["path"]
    candidate = os.path.join(base_dir, path)
    return load_instance(candidate if os.path.exists(candidate) else path)


def _run_cell(task: Tuple[Instance, Budget, str, int, int, Dict[str, Any]]) -> List[RunReport]:
    instance, budget, algorithm, seed, repetitions, params = task
    return [
        solve_instance(instance, budget, algorithm, seed + r, params)
        for r in range(repetitions)
    ]


def run_experiment(
    manifest: Manifest, workers: Optional[int] = None
) -> Tuple[pd.DataFrame, List[Dict[str, Any]]]:
    """
    Run every (instance, ratio, algorithm) cell; repetition r uses seed + r.

    Returns:
        The results table (manifest order) and per-cell JSON records
    """
    instances = [_load_manifest_instance(e, manifest.base_dir) for e in manifest.instances]
    cells = []
    tasks = []
    for entry_index, instance in enumerate(instances):
        for ratio in manifest.ratios:
            budget = budget_from_ratio(instance, ratio)
            for algorithm in manifest.algorithms:
                cells.append((entry_index, instance, budget, algorithm))
                tasks.append(
                    (instance, budget, algorithm, manifest.seed, manifest.repetitions, manifest.params)
                )

    workers = workers or manifest.workers
    logger.info("Running %d cells x %d repetitions on %d worker(s)", len(tasks), manifest.repetitions, workers)
    results: List[List[RunReport]] = []
    if workers > 1:
        with Pool(processes=workers) as pool:
            # imap keeps manifest order
            for k, reports in enumerate(pool.imap(_run_cell, tasks), start=1):
                results.append(reports)
                logger.info("Processed %d/%d cells...", k, len(tasks))
    else:
        for k, task in enumerate(tasks, start=1):
            results.append(_run_cell(task))
            logger.info("Processed %d/%d cells...", k, len(tasks))

    rows = []
    records = []
    baseline: Dict[Tuple[int, str], Dict[str, Any]] = {}
    for (entry_index, instance, budget, algorithm), reports in zip(cells, results):
        stats = get_run_summary_stats(reports)
        row = {
            "instance": instance.name,
            "ratio": ratio_label(budget.ratio),
            "bound": budget.bound,
            "algo": algorithm,
            "profit": stats["mean_profit"],
            "time_s": stats["mean_time_s"],
        }
        rows.append(row)
        records.append(
            {
                "instance": instance.name,
                "ratio": row["ratio"],
                "bound": budget.bound,
                "algo": algorithm,
                "summary": stats,
                "runs": [r.to_dict() for r in reports],
            }
        )
        # cells of one manifest entry share its baseline, even when names repeat
        if algorithm == manifest.baseline:
            baseline[(entry_index, row["ratio"])] = row

    for (entry_index, *_), row, record in zip(cells, rows, records):
        base = baseline[(entry_index, row["ratio"])]
        row["profit_ratio_pct"] = record["profit_ratio_pct"] = percent_change(row["profit"], base["profit"])
        row["time_ratio_pct"] = record["time_ratio_pct"] = percent_change(row["time_s"], base["time_s"])
    return pd.DataFrame(rows, columns=EXPERIMENT_COLUMNS), records


def experiment_csv(df: pd.DataFrame) -> str:
    formatted = df.copy()
    for column in ("time_s", "profit_ratio_pct", "time_ratio_pct"):
        formatted[column] = formatted[column].map(lambda v: f"{v:.2f}")
    return formatted.to_csv(index=False, lineterminator="\n")


def cmd_experiment(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    df, records = run_experiment(manifest, workers=args.workers)
    text = experiment_csv(df)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        print(f"✓ Saved CSV: {args.csv}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    if args.json:
        payload = {
            "seed": manifest.seed,
            "baseline": manifest.baseline,
            "repetitions": manifest.repetitions,
            "cells": records,
        }
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
        print(f"✓ Saved JSON: {args.json}", file=sys.stderr)
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    """Register landscape and experiment."""
    land = subparsers.add_parser("landscape", help="Local optima vs. a reference solution, as CSV")
    land.add_argument("instance")
    add_budget_flags(land)
    land.add_argument("--algo", choices=LANDSCAPE_ALGORITHMS, default="hillclimb")
    land.add_argument("--rounds", type=int, default=1000)
    land.add_argument("--iters", type=int, default=1000)
    land.add_argument("--seed", type=int, default=0)
    land.add_argument("--cap", type=int, help="Enumeration cap for the exact reference")
    land.add_argument(
        "--ref-iters", dest="ref_iters", type=int, default=10000,
        help="ABMA iterations for the best-known reference above the cap",
    )
    land.add_argument("--out", help="Write the CSV here instead of stdout")
    land.set_defaults(handler=cmd_landscape)

    exp = subparsers.add_parser("experiment", help="Run a comparison manifest")
    exp.add_argument("manifest", help="Manifest JSON file")
    exp.add_argument("--csv", help="Results table output")
    exp.add_argument("--json", help="Per-cell JSON output")
    exp.add_argument("--workers", type=int, help="Override the manifest's worker count")
    exp.set_defaults(handler=cmd_experiment)
