"""
Backbones of NRP instances.

- enumerate_optima / exact_backbone: exhaustive oracle for small instances.
- biased_instance: profits w_i + 2^-i, giving a unique optimum that is also
  optimal for the original weights.
- approximate_backbone: pairs shared by a set of local optima.
- reduce / refine: fix a partial assignment to get a smaller instance, and
  map a sub-instance solution back.

Refinement identity, for every sub-feasible x:
    profit(refine(x)) = record.profit_delta + profit_sub(x)
    cost(refine(x))   = record.budget_delta + cost_sub(x)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from models.errors import CapacityError, InputError, PreconditionError, ReductionError
from models.instance import (
    Budget,
    Customer,
    Instance,
    Pair,
    Solution,
    solution_profit,
)
from utils.config import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartialAssignment:
    """A set of (customer-id, bit) pairs with at most one pair per customer."""

    pairs: FrozenSet[Pair] = frozenset()

    def __post_init__(self) -> None:
        pairs = frozenset((int(c), int(b)) for c, b in self.pairs)
        seen = set()
        for cid, bit in pairs:
            if bit not in (0, 1):
                raise InputError(f"customer {cid}: bit must be 0 or 1")
            if cid in seen:
                raise InputError(f"customer {cid} fixed to both 0 and 1")
            seen.add(cid)
        object.__setattr__(self, "pairs", pairs)

    @property
    def customers(self) -> FrozenSet[int]:
        return frozenset(cid for cid, _ in self.pairs)

    def ones(self) -> List[int]:
        return sorted(cid for cid, bit in self.pairs if bit == 1)

    def zeros(self) -> List[int]:
        return sorted(cid for cid, bit in self.pairs if bit == 0)

    def without(self, customer_ids: Iterable[int]) -> "PartialAssignment":
        drop = set(customer_ids)
        return PartialAssignment(frozenset(p for p in self.pairs if p[0] not in drop))

    def to_lines(self) -> List[str]:
        """Log form: one `fix <customer-id> <bit>` line per pair."""
        return [f"fix {cid} {bit}" for cid, bit in sorted(self.pairs)]

    def __len__(self) -> int:
        return len(self.pairs)

    def __bool__(self) -> bool:
        return bool(self.pairs)


@dataclass(frozen=True)
class OptimaSet:
    """All global optima of an instance, in ascending bit-string order."""

    solutions: Tuple[Solution, ...]
    profit: object


@dataclass(frozen=True)
class ReductionRecord:
    """
    One reduction level.

    Attributes:
        fixed: Pairs fixed at this level (ids of the parent instance)
        implemented_requirements: Requirements priced into budget_delta
        budget_delta: Union closure cost of the fixed-in customers
        profit_delta: Sum of their profits
        customer_index_map: Sub-instance id k (1-based) -> parent id at k-1
        parent_customers: Customer count of the parent instance
    """

    fixed: PartialAssignment
    implemented_requirements: FrozenSet[int]
    budget_delta: int
    profit_delta: object
    customer_index_map: Tuple[int, ...]
    parent_customers: int


class BiasedInstance(Instance):
    """
    Instance with profits ŵ_i = w_i + 2^-i held as exact fractions.

    Solutions are ordered by (Σ w_i, Σ 2^-i) lexicographically; the second
    component is compared as an integer whose most significant bit is
    customer 1, which is exactly the order of the binary fraction.
    """

    def __init__(self, base: Instance) -> None:
        self.base_profits: Tuple[int, ...] = tuple(int(p) for p in base.profits)
        customers = [
            Customer(c.id, Fraction(int(c.profit)) + Fraction(1, 2 ** c.id), c.requested)
            for c in base.customers
        ]
        super().__init__(
            base.requirements,
            base.graph,
            customers,
            name=f"{base.name}-biased",
            declared_budget=base.declared_budget,
        )

    def tiebreak(self, selected_indices: Iterable[int]) -> int:
        n = self.n
        return sum(1 << (n - 1 - i) for i in selected_indices)


def biased_instance(instance: Instance) -> BiasedInstance:
    """Biased copy of `instance`; every profit must be a positive integer."""
    for cust in instance.customers:
        profit = cust.profit
        if isinstance(profit, Fraction) and profit.denominator == 1:
            continue
        if not isinstance(profit, Integral):
            raise PreconditionError(
                f"customer {cust.id}: biased instances need integer profits, got {profit!r}"
            )
    return BiasedInstance(instance)


def _key_fn(instance: Instance):
    """Integer-comparable weights for pruning, plus the biased tie-break if any."""
    if isinstance(instance, BiasedInstance):
        weights = list(instance.base_profits)
        return weights, instance.tiebreak
    weights = list(instance.profits)
    return weights, None


def enumerate_optima(
    instance: Instance, budget: Budget, cap: Optional[int] = None
) -> OptimaSet:
    """
    Every maximizer over all 2^n assignments.

    Depth-first over customers with two prunings: a branch whose union cost
    exceeds the bound is infeasible for every extension (cost is monotone),
    and a branch whose profit plus all remaining profit is strictly below
    the incumbent cannot reach an optimum.
    """
    cap = get_settings().enumeration_cap if cap is None else cap
    n = instance.n
    if n > cap:
        raise CapacityError(f"enumeration needs n <= {cap}, instance has {n} customers")

    weights, tiebreak = _key_fn(instance)
    costs = [int(c) for c in instance.costs]
    masks = [sum(1 << (rid - 1) for rid in closure) for closure in instance.closures]
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]

    def mask_cost(mask: int) -> int:
        total = 0
        while mask:
            low = mask & -mask
            total += costs[low.bit_length() - 1]
            mask ^= low
        return total

    best_profit = None
    winners: List[Tuple[int, ...]] = []
    visited = 0
    bound = budget.bound
    selected: List[int] = []

    def walk(depth: int, union: int, cost: int, profit) -> None:
        nonlocal best_profit, winners, visited
        visited += 1
        if best_profit is not None and profit + suffix[depth] < best_profit:
            return
        if depth == n:
            if best_profit is None or profit > best_profit:
                best_profit = profit
                winners = [tuple(selected)]
            elif profit == best_profit:
                winners.append(tuple(selected))
            return
        new = masks[depth] & ~union
        added = mask_cost(new) if new else 0
        if cost + added <= bound:
            selected.append(depth)
            walk(depth + 1, union | new, cost + added, profit + weights[depth])
            selected.pop()
        walk(depth + 1, union, cost, profit)

    walk(0, 0, 0, 0)
    logger.debug("enumerate_optima(%s): visited %d nodes", instance.name, visited)

    if tiebreak is not None:
        top = max(tiebreak(sel) for sel in winners)
        winners = [sel for sel in winners if tiebreak(sel) == top]

    solutions = sorted(
        (Solution.from_selected(n, [i + 1 for i in sel]) for sel in winners),
        key=lambda s: tuple(int(b) for b in s.bits),
    )
    profit = solution_profit(instance, solutions[0])
    return OptimaSet(solutions=tuple(solutions), profit=profit)


def optimal_profit(instance: Instance, budget: Budget, cap: Optional[int] = None):
    return enumerate_optima(instance, budget, cap).profit


def approximate_backbone(solutions: Sequence[Solution]) -> PartialAssignment:
    """Pairs (i, b) present in the ordered-pair form of every solution."""
    if not solutions:
        raise InputError("approximate_backbone needs at least one solution")
    n = solutions[0].n
    if any(s.n != n for s in solutions):
        raise InputError("solutions span different customer sets")
    stacked = np.vstack([s.bits for s in solutions]) if n else np.zeros((len(solutions), 0), dtype=bool)
    first = stacked[0]
    agree = (stacked == first).all(axis=0)
    return PartialAssignment(
        frozenset((int(i) + 1, int(first[i])) for i in np.flatnonzero(agree))
    )


def exact_backbone(instance: Instance, budget: Budget, cap: Optional[int] = None) -> PartialAssignment:
    """Intersection of all global optima."""
    return approximate_backbone(enumerate_optima(instance, budget, cap).solutions)


def reduce(
    instance: Instance, budget: Budget, fixed: PartialAssignment
) -> Tuple[Instance, Budget, ReductionRecord]:
    """
    Remove the customers in `fixed`. Customers fixed to 1 are implemented:
    the union of their closures is charged against the budget and those
    requirements cost 0 in the sub-instance. Customers fixed to 0 are
    dropped.
    """
    for cid in fixed.customers:
        if not 1 <= cid <= instance.n:
            raise InputError(f"cannot fix unknown customer {cid}")

    ones = fixed.ones()
    implemented = frozenset().union(*(instance.closures[cid - 1] for cid in ones)) if ones else frozenset()
    budget_delta = int(sum(int(instance.costs[rid - 1]) for rid in implemented))
    if budget_delta > budget.bound:
        raise ReductionError(
            f"fixed-in customers {ones} cost {budget_delta}, over the bound {budget.bound}",
            cost=budget_delta,
            bound=budget.bound,
        )
    profit_delta = sum((instance.profits[cid - 1] for cid in ones), 0)

    fixed_ids = fixed.customers
    keep = tuple(cid for cid in range(1, instance.n + 1) if cid not in fixed_ids)
    sub = instance.with_customers(keep, zero_cost=implemented)
    sub_budget = Budget(budget.bound - budget_delta)
    record = ReductionRecord(
        fixed=fixed,
        implemented_requirements=implemented,
        budget_delta=budget_delta,
        profit_delta=profit_delta,
        customer_index_map=keep,
        parent_customers=instance.n,
    )
    return sub, sub_budget, record


def refine(sub_solution: Solution, record: ReductionRecord) -> Solution:
    """Fixed pairs plus the sub-solution's bits mapped back to parent ids."""
    if sub_solution.n != len(record.customer_index_map):
        raise InputError(
            f"sub-solution has {sub_solution.n} customers, reduction left {len(record.customer_index_map)}"
        )
    bits = np.zeros(record.parent_customers, dtype=bool)
    for cid in record.fixed.ones():
        bits[cid - 1] = True
    for k, parent_id in enumerate(record.customer_index_map):
        bits[parent_id - 1] = sub_solution.bits[k]
    return Solution(bits)
