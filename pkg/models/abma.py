"""
Approximate-backbone-based multilevel algorithm.

Per restart, the driver repeatedly runs the local-search operator several
times on the current (sub-)instance, fixes the pairs those local optima
share, and reduces. When the sub-instance is small enough (fewer customers
than `scale_stop_ratio` times the original count) or the local optima share
nothing (or everything), the remaining sub-instance is solved once more and
the solution is refined back through the stack of reductions.

Greedy operators agree on their mistakes, so by default each operator result
is climbed to a 1-flip optimum before the backbone is taken, and a restart
returns the best whole-instance solution seen at any level.

Fixing n' of n customers shrinks the assignment space from 2^n to 2^(n-n'):
for n = 100 and n' = 30 the upper limit drops from 2^100 to 2^70.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from numbers import Real
from typing import List, Optional, Tuple

import numpy as np

from models.backbone import (
    PartialAssignment,
    ReductionRecord,
    approximate_backbone,
    reduce,
    refine,
)
from models.errors import InputError, ReductionError
from models.instance import (
    Budget,
    Instance,
    Solution,
    solution_cost,
    solution_profit,
)
from models.search import (
    Operator,
    SearchParams,
    SearchResult,
    get_operator,
    hill_climb,
    restart_streams,
)

logger = logging.getLogger(__name__)

OPERATOR_CHOICES = ("gcs", "lmsa", "hill_climb", "hillclimb")


@dataclass(frozen=True)
class AbmaParams:
    """
    Attributes:
        restarts: Independent multilevel runs
        local_optima_per_level: Operator runs intersected per level
        operator_params: Parameters for every embedded operator call
        scale_stop_ratio: Stop reducing below this fraction of the original n
        operator: Embedded local search
        min_customers: Also stop once a sub-instance has this many customers or fewer
        polish: Climb every feasible operator result, and the final solution, to a 1-flip optimum
    """

    restarts: int = 10
    local_optima_per_level: int = 10
    operator_params: SearchParams = field(default_factory=SearchParams)
    scale_stop_ratio: float = 0.30
    operator: str = "gcs"
    min_customers: int = 0
    polish: bool = True

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.local_optima_per_level < 2:
            raise InputError("local_optima_per_level must be >= 2")
        if not 0 < self.scale_stop_ratio < 1:
            raise InputError("scale_stop_ratio must lie in (0, 1)")
        if self.operator not in OPERATOR_CHOICES:
            raise InputError(f"operator must be one of {OPERATOR_CHOICES}")
        if self.min_customers < 0:
            raise InputError("min_customers must be >= 0")


@dataclass(frozen=True)
class LevelTrace:
    level: int
    customers_before: int
    customers_after: int
    backbone_size: int
    budget_after: int
    requirements_before: int
    requirements_after: int
    search_space_log2: int
    fixed: Tuple[Tuple[int, int], ...]

    def to_dict(self) -> dict:
        data = asdict(self)
        data["fixed"] = [list(p) for p in self.fixed]
        return data


def search_space_exponent(n: int, fixed: int) -> int:
    """log2 of the assignment-space upper limit after fixing `fixed` customers."""
    return n - fixed


def _shrink_to_feasible(
    instance: Instance, budget: Budget, bone: PartialAssignment
) -> PartialAssignment:
    """Drop 1-pairs in increasing-profit order until the fixed-in set fits."""
    ones = sorted(bone.ones(), key=lambda cid: (instance.profits[cid - 1], cid))
    while ones:
        if instance.closure_cost(ones) <= budget.bound:
            break
        bone = bone.without([ones.pop(0)])
    return bone


def _original_ids(stack: List[ReductionRecord], bone: PartialAssignment) -> Tuple[Tuple[int, int], ...]:
    """Translate pairs of the current sub-instance back to original ids."""
    pairs = []
    for cid, bit in sorted(bone.pairs):
        for record in reversed(stack):
            cid = record.customer_index_map[cid - 1]
        pairs.append((cid, bit))
    return tuple(sorted(pairs))


def _polish(instance: Instance, budget: Budget, run: SearchResult, rng: np.random.Generator) -> SearchResult:
    """Steepest-ascent from a feasible operator result; draws nothing from `rng`."""
    if run.cost > budget.bound:
        return run
    climbed = hill_climb(instance, budget, SearchParams(iterations=max(instance.n, 1)), rng, start=run.best)
    return SearchResult(
        best=climbed.best,
        profit=climbed.profit,
        cost=climbed.cost,
        evaluations=run.evaluations + climbed.evaluations,
        elapsed=run.elapsed + climbed.elapsed,
    )


def _lift(solution: Solution, stack: List[ReductionRecord]) -> Solution:
    for record in reversed(stack):
        solution = refine(solution, record)
    return solution


def _solve_restart(
    instance: Instance,
    budget: Budget,
    params: AbmaParams,
    operator: Operator,
    rng: np.random.Generator,
) -> Tuple[SearchResult, List[LevelTrace]]:
    started = time.perf_counter()
    evaluations = 0
    n0 = instance.n
    threshold = params.scale_stop_ratio * n0

    def run_operator(sub: Instance, sub_budget: Budget) -> SearchResult:
        nonlocal evaluations
        run = operator(sub, sub_budget, params.operator_params, rng)
        if params.polish:
            run = _polish(sub, sub_budget, run, rng)
        evaluations += run.evaluations
        return run

    current, current_budget = instance, budget
    stack: List[ReductionRecord] = []
    traces: List[LevelTrace] = []
    # best whole-instance solution seen at any level: (solution, profit, cost)
    elite: Optional[Tuple[Solution, Real, int]] = None

    while current.n >= threshold and current.n > params.min_customers:
        runs = [run_operator(current, current_budget) for _ in range(params.local_optima_per_level)]
        for run in runs:
            if run.cost > current_budget.bound:
                continue
            whole = _lift(run.best, stack)
            cost = solution_cost(instance, whole)
            if cost > budget.bound:
                continue
            profit = solution_profit(instance, whole)
            if elite is None or profit > elite[1]:
                elite = (whole, profit, cost)

        bone = approximate_backbone([r.best for r in runs])
        # an empty backbone fixes nothing; a full one leaves nothing to search
        if not bone or len(bone) == current.n:
            break
        try:
            sub, sub_budget, record = reduce(current, current_budget, bone)
        except ReductionError as exc:
            logger.debug("backbone infeasible (%s); dropping low-profit fixations", exc)
            bone = _shrink_to_feasible(current, current_budget, bone)
            if not bone:
                break
            sub, sub_budget, record = reduce(current, current_budget, bone)

        trace = LevelTrace(
            level=len(stack) + 1,
            customers_before=current.n,
            customers_after=sub.n,
            backbone_size=len(bone),
            budget_after=sub_budget.bound,
            requirements_before=current.scale()[1],
            requirements_after=sub.scale()[1],
            search_space_log2=search_space_exponent(n0, n0 - sub.n),
            fixed=_original_ids(stack, bone),
        )
        traces.append(trace)
        logger.debug(json.dumps(trace.to_dict()))
        stack.append(record)
        current, current_budget = sub, sub_budget

    terminal = run_operator(current, current_budget)
    solution = _lift(terminal.best, stack)
    profit = solution_profit(instance, solution)
    cost = solution_cost(instance, solution)
    assert cost <= budget.bound, "refined solution violates the budget"
    if elite is not None and elite[1] > profit:
        solution, profit, cost = elite

    if params.polish:
        final = _polish(
            instance,
            budget,
            SearchResult(best=solution, profit=profit, cost=cost, evaluations=0, elapsed=0.0),
            rng,
        )
        evaluations += final.evaluations
        solution, profit, cost = final.best, final.profit, final.cost

    result = SearchResult(
        best=solution,
        profit=profit,
        cost=cost,
        evaluations=evaluations,
        elapsed=time.perf_counter() - started,
    )
    return result, traces


def abma_solve(
    instance: Instance,
    budget: Budget,
    params: AbmaParams,
    rng: np.random.Generator,
    operator: Optional[Operator] = None,
) -> Tuple[SearchResult, List[LevelTrace]]:
    """
    Multi-restart ABMA. Returns the best restart (ties: lowest restart index)
    and the level traces of that restart. `operator` overrides the operator
    named in `params`.
    """
    op = operator or get_operator(params.operator)
    outcomes: List[Tuple[SearchResult, List[LevelTrace]]] = []
    for index, stream in enumerate(restart_streams(rng, params.restarts)):
        result, traces = _solve_restart(instance, budget, params, op, stream)
        outcomes.append((result, traces))
        logger.debug("restart %d: profit %s, %d levels", index, result.profit, len(traces))

    winner, winner_traces = outcomes[0]
    for result, traces in outcomes[1:]:
        if result.profit > winner.profit:
            winner, winner_traces = result, traces
    total = SearchResult(
        best=winner.best,
        profit=winner.profit,
        cost=winner.cost,
        evaluations=sum(r.evaluations for r, _ in outcomes),
        elapsed=sum(r.elapsed for r, _ in outcomes),
    )
    return total, winner_traces
