"""
Data helper utilities: data-directory lookup, fixture/preset loaders, run
reports and summary statistics.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from models.errors import InputError
from models.generator import GeneratorConfig
from models.instance import Budget, Instance, Solution, solution_cost, solution_profit
from utils.config import get_settings
from utils.instance_io import load_generator_config, load_instance_file


def get_data_dir() -> str:
    """Get the data directory path (NRP_DATA_DIR or <repo>/data)."""
    return get_settings().data_dir


def resolve_data_path(path: str) -> str:
    """Paths that do not exist as given are looked up under the data directory."""
    if os.path.exists(path) or os.path.isabs(path):
        return path
    candidate = os.path.join(get_data_dir(), path)
    return candidate if os.path.exists(candidate) else path


def load_instance(name_or_path: str) -> Instance:
    """
    Load an instance file.

    Args:
        name_or_path: File path, or a file name inside the data directory
            (`comm3.nrp` or just `comm3`)

    Raises:
        FileNotFoundError: If no such instance exists
    """
    path = resolve_data_path(name_or_path)
    if not os.path.exists(path) and not path.endswith(".nrp"):
        path = resolve_data_path(name_or_path + ".nrp")
    if not os.path.exists(path):
        raise FileNotFoundError(
            f"instance {name_or_path!r} not found (data dir: {get_data_dir()})"
        )
    return load_instance_file(path)


def load_preset(name: str) -> GeneratorConfig:
    """
    Load a generator preset (nrp-1 ... nrp-5) from data/presets/.

    Raises:
        FileNotFoundError: If the preset file doesn't exist
    """
    path = os.path.join(get_data_dir(), "presets", f"{name}.cfg")
    if not os.path.exists(path):
        raise FileNotFoundError(
            f"preset {name!r} not found at {path}. Available: {', '.join(list_presets()) or 'none'}"
        )
    return load_generator_config(path)


def list_presets() -> List[str]:
    directory = os.path.join(get_data_dir(), "presets")
    if not os.path.isdir(directory):
        return []
    return sorted(f[:-4] for f in os.listdir(directory) if f.endswith(".cfg"))


def round_half_up(value: float, digits: int = 0) -> float:
    """Round like the reports do: 0.5 goes up, regardless of parity."""
    scale = 10 ** digits
    return math.floor(value * scale + 0.5) / scale


def ratio_label(ratio: Optional[Fraction]) -> str:
    """`7/10` -> `0.7`; None when the bound was given directly."""
    if ratio is None:
        return "-"
    return format(float(ratio), "g")


def run_name(instance: Instance, budget: Budget) -> str:
    """nrp-1-s7 at ratio 0.3 -> nrp-1-s7-0.3."""
    if budget.ratio is None:
        return instance.name
    return f"{instance.name}-{ratio_label(budget.ratio)}"


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    return value


@dataclass
class RunReport:
    """
    One solver run, as emitted by `solve`.

    Attributes:
        instance_name: Instance name, with the ratio suffix when a ratio was used
        algorithm: random / hillclimb / gcs / lmsa / abma / exact
        params: Algorithm flags that were in effect
        seed: Seed of the run
        profit: Profit of the reported solution
        cost: Cost of the reported solution
        budget: Budget bound
        elapsed_ms: Wall time in milliseconds
        selected: Selected customer ids, ascending
        evaluations: Cost evaluations performed (0 for exact)
        level_traces: ABMA level traces (empty for other algorithms)
    """

    instance_name: str
    algorithm: str
    params: Dict[str, Any]
    seed: Optional[int]
    profit: Any
    cost: int
    budget: int
    elapsed_ms: float
    selected: List[int]
    evaluations: int = 0
    level_traces: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["profit"] = _jsonable(self.profit)
        data["elapsed_ms"] = round(self.elapsed_ms, 3)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        return cls(**data)


def validate_report(instance: Instance, report: RunReport) -> None:
    """
    Re-score the report's selected customers against the instance.

    Raises:
        InputError: If profit, cost or feasibility do not reproduce
    """
    solution = Solution.from_selected(instance.n, report.selected)
    profit = solution_profit(instance, solution)
    cost = solution_cost(instance, solution)
    if profit != report.profit:
        raise InputError(f"report profit {report.profit} re-scores to {profit}")
    if cost != report.cost:
        raise InputError(f"report cost {report.cost} re-scores to {cost}")
    if cost > report.budget:
        raise InputError(f"report cost {cost} exceeds its budget {report.budget}")


def get_run_summary_stats(reports: Sequence[RunReport]) -> Dict[str, Any]:
    """
    Summary statistics over repeated runs of one cell.

    Returns:
        Dict with run count, mean/min/max profit, mean time and feasible count
    """
    if not reports:
        return {
            "runs": 0,
            "mean_profit": 0,
            "min_profit": 0,
            "max_profit": 0,
            "mean_time_s": 0.0,
            "feasible_runs": 0,
        }

    df = pd.DataFrame(
        {
            "profit": [float(r.profit) for r in reports],
            "time_s": [r.elapsed_ms / 1000.0 for r in reports],
            "feasible": [r.cost <= r.budget for r in reports],
        }
    )
    return {
        "runs": len(df),
        "mean_profit": int(round_half_up(df["profit"].mean())),
        "min_profit": _jsonable(min(r.profit for r in reports)),
        "max_profit": _jsonable(max(r.profit for r in reports)),
        "mean_time_s": round_half_up(df["time_s"].mean(), 2),
        "feasible_runs": int(df["feasible"].sum()),
    }


def percent_change(value: float, baseline: float) -> float:
    """Percent deviation from a baseline, two decimals; 0 when the baseline is 0."""
    if baseline == 0:
        return 0.0
    return round_half_up((value - baseline) / abs(baseline) * 100.0, 2)
