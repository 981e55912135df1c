"""
Local-search operators for NRP: randomized search, steepest-ascent hill
climbing, greedy climbing search (GCS) and Lundy-Mees simulated annealing
(LMSA).

Every operator has the signature

    operator(instance, budget, params, rng) -> SearchResult

and runs `params.restarts` independent runs, keeping the best feasible one.
Cost queries go through an evaluation counter so work can be checked
without wall-clock timing.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from numbers import Real
from typing import Callable, Dict, Iterator, List, Optional, Sequence

import numpy as np

from models.errors import InputError
from models.instance import Budget, Instance, Solution, solution_cost

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchParams:
    """
    Attributes:
        iterations: Iteration cap per run
        restarts: Independent runs; the best is returned
        seed: Seed for command-level runs (operators take an explicit rng)
        lmsa_temperature: Initial temperature T0
        lmsa_beta: Lundy-Mees cooling parameter β
    """

    iterations: int = 1000
    restarts: int = 1
    seed: int = 0
    lmsa_temperature: float = 0.3
    lmsa_beta: float = 1e-8

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InputError("iterations must be >= 1")
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if not self.lmsa_temperature > 0:
            raise InputError("lmsa_temperature must be > 0")
        if not self.lmsa_beta > 0:
            raise InputError("lmsa_beta must be > 0")


@dataclass(frozen=True)
class SearchResult:
    """
    Best feasible solution found by a run.

    Attributes:
        best: Feasible solution
        profit: solution_profit(best)
        cost: solution_cost(best)
        evaluations: Number of cost evaluations performed
        elapsed: Wall time in seconds
    """

    best: Solution
    profit: Real
    cost: int
    evaluations: int
    elapsed: float


Operator = Callable[[Instance, Budget, SearchParams, np.random.Generator], SearchResult]


class _Evaluator:
    """Counts cost evaluations against one budget."""

    def __init__(self, instance: Instance, budget: Budget) -> None:
        self.instance = instance
        self.bound = budget.bound
        self.evaluations = 0
        self.closures: List[List[int]] = [
            [rid - 1 for rid in sorted(closure)] for closure in instance.closures
        ]
        self.costs: List[int] = [int(c) for c in instance.costs]
        self.profits: List[Real] = list(instance.profits)
        # customers by decreasing profit, lowest id first among equals
        self.by_profit: List[int] = sorted(range(instance.n), key=lambda i: (-self.profits[i], i))

    def feasible(self, state: "_State") -> bool:
        self.evaluations += 1
        return state.cost <= self.bound

    def cost_with(self, state: "_State", j: int) -> int:
        """Cost of the current selection plus customer j."""
        self.evaluations += 1
        return state.cost + state.added_cost(j)


class _State:
    """
    Mutable assignment with incrementally maintained union cost: counts[r]
    is the number of selected customers whose closure contains r.
    """

    def __init__(self, ev: _Evaluator, bits: Optional[Sequence[bool]] = None) -> None:
        self.ev = ev
        n = len(ev.profits)
        self.counts = [0] * len(ev.costs)
        self.position = [-1] * n
        self.selected: List[int] = []
        self.cost = 0
        self.profit = 0
        if bits is not None:
            for j, bit in enumerate(bits):
                if bit:
                    self.add(j)

    def is_selected(self, j: int) -> bool:
        return self.position[j] >= 0

    def added_cost(self, j: int) -> int:
        counts, costs = self.counts, self.ev.costs
        return sum(costs[r] for r in self.ev.closures[j] if counts[r] == 0)

    def add(self, j: int) -> None:
        counts, costs = self.counts, self.ev.costs
        for r in self.ev.closures[j]:
            if counts[r] == 0:
                self.cost += costs[r]
            counts[r] += 1
        self.position[j] = len(self.selected)
        self.selected.append(j)
        self.profit += self.ev.profits[j]

    def remove(self, j: int) -> None:
        counts, costs = self.counts, self.ev.costs
        for r in self.ev.closures[j]:
            counts[r] -= 1
            if counts[r] == 0:
                self.cost -= costs[r]
        pos = self.position[j]
        last = self.selected.pop()
        if last != j:
            self.selected[pos] = last
            self.position[last] = pos
        self.position[j] = -1
        self.profit -= self.ev.profits[j]

    def solution(self) -> Solution:
        bits = np.zeros(len(self.position), dtype=bool)
        bits[self.selected] = True
        return Solution(bits)


@dataclass
class _Run:
    best: Solution
    profit: Real
    cost: int


def restart_streams(rng: np.random.Generator, restarts: int) -> List[np.random.Generator]:
    """One generator per restart; a single run uses `rng` itself."""
    if restarts == 1:
        return [rng]
    seeds = rng.integers(0, 2**63 - 1, size=restarts)
    return [np.random.Generator(np.random.PCG64(int(s))) for s in seeds]


def best_of(results: Sequence[SearchResult]) -> SearchResult:
    """Highest profit; ties go to the earliest result. Work is summed."""
    if not results:
        raise InputError("best_of needs at least one result")
    winner = results[0]
    for res in results[1:]:
        if res.profit > winner.profit:
            winner = res
    return SearchResult(
        best=winner.best,
        profit=winner.profit,
        cost=winner.cost,
        evaluations=sum(r.evaluations for r in results),
        elapsed=sum(r.elapsed for r in results),
    )


def _run_restarts(
    instance: Instance,
    budget: Budget,
    params: SearchParams,
    rng: np.random.Generator,
    single: Callable[[_Evaluator, SearchParams, np.random.Generator], _Run],
) -> SearchResult:
    results = []
    for stream in restart_streams(rng, params.restarts):
        started = time.perf_counter()
        ev = _Evaluator(instance, budget)
        run = single(ev, params, stream)
        results.append(
            SearchResult(
                best=run.best,
                profit=run.profit,
                cost=run.cost,
                evaluations=ev.evaluations,
                elapsed=time.perf_counter() - started,
            )
        )
    return best_of(results)


def _random_feasible_state(ev: _Evaluator, rng: np.random.Generator) -> _State:
    n = len(ev.profits)
    state = _State(ev, rng.integers(0, 2, size=n).astype(bool))
    while not ev.feasible(state):
        state.remove(state.selected[int(rng.integers(len(state.selected)))])
    return state


def random_feasible(instance: Instance, budget: Budget, rng: np.random.Generator) -> Solution:
    """
    Uniformly random total assignment, then random selected customers are
    dropped until the assignment fits the budget.
    """
    return _random_feasible_state(_Evaluator(instance, budget), rng).solution()


def _randomized_single(ev: _Evaluator, params: SearchParams, rng: np.random.Generator) -> _Run:
    best: Optional[_Run] = None
    for _ in range(params.iterations):
        state = _random_feasible_state(ev, rng)
        if best is None or state.profit > best.profit:
            best = _Run(state.solution(), state.profit, state.cost)
    assert best is not None
    return best


def randomized_search(
    instance: Instance, budget: Budget, params: SearchParams, rng: np.random.Generator
) -> SearchResult:
    """Best of `iterations` random_feasible draws."""
    return _run_restarts(instance, budget, params, rng, _randomized_single)


def _climb(ev: _Evaluator, state: _State, max_moves: int) -> _State:
    """
    Steepest ascent over feasible 1-flip neighbours. Dropping a customer
    never raises profit, so the best improving neighbour is the most
    profitable customer whose addition still fits.
    """
    for _ in range(max_moves):
        move = None
        for j in ev.by_profit:
            if state.is_selected(j):
                continue
            if ev.cost_with(state, j) <= ev.bound:
                move = j
                break
        if move is None:
            break
        state.add(move)
    return state


def hill_climb(
    instance: Instance,
    budget: Budget,
    params: SearchParams,
    rng: np.random.Generator,
    start: Optional[Solution] = None,
) -> SearchResult:
    """
    Steepest-ascent hill climbing from a random_feasible start (or `start`,
    which must be feasible), at most `iterations` moves per run.
    """

    def single(ev: _Evaluator, p: SearchParams, stream: np.random.Generator) -> _Run:
        if start is not None:
            state = _State(ev, start.bits)
            if not ev.feasible(state):
                raise InputError("hill_climb start solution is infeasible")
        else:
            state = _random_feasible_state(ev, stream)
        state = _climb(ev, state, p.iterations)
        return _Run(state.solution(), state.profit, state.cost)

    return _run_restarts(instance, budget, params, rng, single)


def gcs(
    instance: Instance,
    budget: Budget,
    params: SearchParams,
    rng: np.random.Generator,
    start: Optional[Solution] = None,
) -> SearchResult:
    """
    Greedy climbing search.

    Each iteration evaluates the current assignment once. A
    feasible assignment is offered to the best-so-far (strict improvement
    only) and then gains the unselected customer of maximum profit, lowest
    id on ties; an infeasible one loses a uniformly random selected
    customer. The search starts from a random total assignment, which may
    be infeasible; the all-zero solution stands in as best-so-far until a
    feasible state is seen.
    """

    def single(ev: _Evaluator, p: SearchParams, stream: np.random.Generator) -> _Run:
        n = len(ev.profits)
        bits = start.bits if start is not None else stream.integers(0, 2, size=n).astype(bool)
        state = _State(ev, bits)
        best = _Run(Solution.zeros(n), 0, 0)
        for _ in range(p.iterations):
            if ev.feasible(state):
                if state.profit > best.profit:
                    best = _Run(state.solution(), state.profit, state.cost)
                for j in ev.by_profit:
                    if not state.is_selected(j):
                        state.add(j)
                        break
            else:
                state.remove(state.selected[int(stream.integers(len(state.selected)))])
        return best

    return _run_restarts(instance, budget, params, rng, single)


def lundy_mees_schedule(t0: float, beta: float) -> Iterator[float]:
    """Temperatures T0, T1, ... with T <- T / (1 + βT)."""
    t = t0
    while True:
        yield t
        t = t / (1.0 + beta * t)


def accepts_worsening(delta: Real, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis test for a move changing profit by `delta` <= 0; draws one uniform."""
    return bool(rng.random() < math.exp(delta / temperature))


def lmsa(
    instance: Instance, budget: Budget, params: SearchParams, rng: np.random.Generator
) -> SearchResult:
    """
    Simulated annealing over 1-bit flips with the Lundy-Mees schedule.
    Infeasible proposals are rejected; a worsening move of size d is
    accepted with probability exp(-d / T). The temperature cools once per
    step whether or not the proposal was accepted.
    """

    def single(ev: _Evaluator, p: SearchParams, stream: np.random.Generator) -> _Run:
        state = _random_feasible_state(ev, stream)
        best = _Run(state.solution(), state.profit, state.cost)
        n = len(ev.profits)
        if n == 0:
            return best
        temperatures = lundy_mees_schedule(p.lmsa_temperature, p.lmsa_beta)
        for _ in range(p.iterations):
            t = next(temperatures)
            j = int(stream.integers(n))
            if state.is_selected(j):
                ev.evaluations += 1
                delta = -ev.profits[j]
                if accepts_worsening(delta, t, stream):
                    state.remove(j)
            else:
                if ev.cost_with(state, j) > ev.bound:
                    continue
                state.add(j)
                if state.profit > best.profit:
                    best = _Run(state.solution(), state.profit, state.cost)
        return best

    return _run_restarts(instance, budget, params, rng, single)


OPERATORS: Dict[str, Operator] = {
    "random": randomized_search,
    "hillclimb": hill_climb,
    "hill_climb": hill_climb,
    "gcs": gcs,
    "lmsa": lmsa,
}


def get_operator(name: str) -> Operator:
    try:
        return OPERATORS[name]
    except KeyError:
        raise InputError(
            f"unknown algorithm {name!r}; expected one of {sorted(OPERATORS)}"
        ) from None


def verify_result(instance: Instance, budget: Budget, result: SearchResult) -> None:
    """Re-score a result from scratch; raise InputError if it disagrees."""
    cost = solution_cost(instance, result.best)
    if cost != result.cost or cost > budget.bound:
        raise InputError(f"result cost {result.cost} does not re-evaluate (got {cost}, bound {budget.bound})")
