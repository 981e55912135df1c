"""
Rule-driven NRP instance generation and budget derivation.

Requirements are laid out level by level (level 1 gets the lowest ids).
A requirement in level k depends on up to `max_parents` requirements of
level k+1; the last level depends on nothing, so the graph is acyclic by
construction.

All draws come from numpy's PCG64 bit generator seeded with
`GeneratorConfig.seed`, so a config reproduces the same instance on every
platform with the same numpy stream.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from models.errors import ConfigError, InputError
from models.instance import Budget, Customer, Instance, Requirement

logger = logging.getLogger(__name__)

IntRange = Tuple[int, int]


@dataclass(frozen=True)
class LevelSpec:
    count: int
    cost_min: int
    cost_max: int
    max_parents: int


@dataclass(frozen=True)
class GeneratorConfig:
    """
    One family of generated instances.

    Attributes:
        levels: Requirement levels, first level first
        customer_count: Number of customers
        requests_per_customer: Inclusive range of requested requirements
        profit_range: Inclusive range of customer profits
        seed: Seed of the PCG64 stream
        name: Family name (nrp-1 ...)
    """

    levels: Tuple[LevelSpec, ...]
    customer_count: int
    requests_per_customer: IntRange
    profit_range: IntRange
    seed: int = 0
    name: str = "generated"

    @property
    def requirement_count(self) -> int:
        return sum(level.count for level in self.levels)

    def with_seed(self, seed: int) -> "GeneratorConfig":
        return replace(self, seed=seed)

    def validate(self) -> None:
        """Raise ConfigError on any rule the generator cannot honour."""
        if not self.levels:
            raise ConfigError("at least one requirement level is required")
        for index, level in enumerate(self.levels, start=1):
            if level.count < 1:
                raise ConfigError(f"level {index}: count must be >= 1")
            if level.cost_min < 0 or level.cost_max < level.cost_min:
                raise ConfigError(f"level {index}: invalid cost range {level.cost_min}..{level.cost_max}")
            if level.max_parents < 0:
                raise ConfigError(f"level {index}: max_parents must be >= 0")
            if index < len(self.levels) and level.max_parents > self.levels[index].count:
                raise ConfigError(
                    f"level {index}: max_parents {level.max_parents} exceeds the "
                    f"{self.levels[index].count} requirements of level {index + 1}"
                )
        if self.levels[-1].max_parents != 0:
            raise ConfigError("the last level cannot have parents")
        if self.customer_count < 1:
            raise ConfigError("customer_count must be >= 1")
        low, high = self.requests_per_customer
        if low < 0 or high < low:
            raise ConfigError(f"invalid request range {low}..{high}")
        if high > self.requirement_count:
            raise ConfigError(
                f"customers may request {high} requirements but only {self.requirement_count} exist"
            )
        low, high = self.profit_range
        if low < 1 or high < low:
            raise ConfigError(f"invalid profit range {low}..{high}; profits must be positive")


def _uniform(rng: np.random.Generator, low: int, high: int) -> int:
    return int(rng.integers(low, high + 1))


def generate(config: GeneratorConfig, name: Optional[str] = None) -> Instance:
    """Draw an instance following `config`'s rules."""
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))

    level_ids: List[List[int]] = []
    next_id = 1
    for level in config.levels:
        level_ids.append(list(range(next_id, next_id + level.count)))
        next_id += level.count

    requirements: List[Requirement] = []
    for level, ids in zip(config.levels, level_ids):
        costs = rng.integers(level.cost_min, level.cost_max + 1, size=level.count)
        requirements.extend(Requirement(rid, int(cost)) for rid, cost in zip(ids, costs))

    arcs: List[Tuple[int, int]] = []
    for k, (level, ids) in enumerate(zip(config.levels, level_ids)):
        if level.max_parents == 0:
            continue
        pool = np.array(level_ids[k + 1])
        for rid in ids:
            count = _uniform(rng, 0, level.max_parents)
            if count:
                for parent in rng.choice(pool, size=count, replace=False):
                    arcs.append((int(parent), rid))

    m = len(requirements)
    customers: List[Customer] = []
    low, high = config.requests_per_customer
    for cid in range(1, config.customer_count + 1):
        k = _uniform(rng, low, high)
        requested = rng.choice(m, size=k, replace=False) + 1
        profit = _uniform(rng, *config.profit_range)
        customers.append(Customer(cid, profit, frozenset(int(r) for r in requested)))

    instance = Instance(
        requirements,
        arcs,
        customers,
        name=name or f"{config.name}-s{config.seed}",
    )
    logger.info(
        "Generated %s: %d requirements, %d arcs, %d customers",
        instance.name, instance.m, len(instance.arcs), instance.n,
    )
    return instance


def as_ratio(value: Union[str, float, int, Fraction]) -> Fraction:
    """Exact ratio from user input; floats go through their decimal text."""
    if isinstance(value, Fraction):
        return value
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"invalid ratio {value!r}") from None


def budget_from_ratio(instance: Instance, ratio: Union[str, float, int, Fraction]) -> Budget:
    """Bound = ratio × total cost, rounded half up (0.7 × 51 = 35.7 -> 36)."""
    exact = as_ratio(ratio)
    if not 0 <= exact <= 1:
        raise InputError(f"cost ratio must lie in [0, 1], got {ratio}")
    bound = math.floor(exact * instance.total_cost() + Fraction(1, 2))
    return Budget(bound, exact)
