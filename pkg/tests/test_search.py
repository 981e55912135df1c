"""
Tests for the local-search operators.
"""

import math

import numpy as np
import pytest

from models.errors import InputError
from models.instance import Budget, Customer, Instance, Requirement, Solution, is_feasible
from models.search import (
    SearchParams,
    accepts_worsening,
    gcs,
    get_operator,
    hill_climb,
    lmsa,
    lundy_mees_schedule,
    random_feasible,
    randomized_search,
    verify_result,
)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def test_random_feasible_on_comm3(comm3, comm3_budget):
    for seed in range(50):
        sol = random_feasible(comm3, comm3_budget, _rng(seed))
        assert is_feasible(comm3, sol, comm3_budget), f"seed {seed} produced an infeasible start"


def test_random_feasible_zero_budget(comm3):
    assert random_feasible(comm3, Budget(0), _rng(3)) == Solution.zeros(3)


def test_random_feasible_unconstrained_reaches_all_ones(comm3):
    draws = {random_feasible(comm3, Budget(51), _rng(seed)) for seed in range(64)}
    assert Solution.ones(3) in draws


def test_randomized_search_single_iteration_equals_one_draw(comm3, comm3_budget):
    result = randomized_search(comm3, comm3_budget, SearchParams(iterations=1), _rng(5))
    assert result.best == random_feasible(comm3, comm3_budget, _rng(5))


def test_randomized_search_bounded_by_optimum(comm3, comm3_budget):
    result = randomized_search(comm3, comm3_budget, SearchParams(iterations=1000), _rng(1))
    assert result.profit <= 45
    verify_result(comm3, comm3_budget, result)


def test_randomized_search_monotone_in_iterations(comm3, comm3_budget):
    profits = [
        randomized_search(comm3, comm3_budget, SearchParams(iterations=k), _rng(9)).profit
        for k in (1, 5, 25, 125)
    ]
    assert profits == sorted(profits)


def test_hill_climb_from_all_zero_comm3(comm3, comm3_budget):
    """Steepest ascent takes customer 1 first; {1} is a 1-flip local optimum."""
    result = hill_climb(comm3, comm3_budget, SearchParams(), _rng(0), start=Solution.zeros(3))
    assert result.best == Solution.from_selected(3, [1])
    assert result.profit == 30


def test_hill_climb_fixed_point(comm3, comm3_budget, x2):
    result = hill_climb(comm3, comm3_budget, SearchParams(), _rng(0), start=x2)
    assert result.best == x2
    assert result.profit == 45


def test_hill_climb_rejects_infeasible_start(comm3, comm3_budget, x3):
    with pytest.raises(InputError):
        hill_climb(comm3, comm3_budget, SearchParams(), _rng(0), start=x3)


def test_gcs_first_move_selects_most_profitable(comm3, comm3_budget):
    result = gcs(comm3, comm3_budget, SearchParams(iterations=2), _rng(0), start=Solution.zeros(3))
    assert result.best == Solution.from_selected(3, [1])
    assert result.profit == 30


def test_gcs_saturated_assignment_is_noop(comm3):
    result = gcs(comm3, Budget(51), SearchParams(iterations=5), _rng(0), start=Solution.ones(3))
    assert result.best == Solution.ones(3)
    assert result.evaluations == 5


@pytest.mark.parametrize("iterations", [1, 7, 100, 1000])
def test_gcs_evaluates_exactly_gamma_times(comm3, comm3_budget, iterations):
    result = gcs(comm3, comm3_budget, SearchParams(iterations=iterations), _rng(4))
    assert result.evaluations == iterations, "one cost evaluation per GCS iteration"


def test_gcs_evaluations_scale_with_restarts(five_customer):
    result = gcs(five_customer, Budget(25), SearchParams(iterations=50, restarts=4), _rng(4))
    assert result.evaluations == 200


def test_gcs_comm3_many_seeds(comm3, comm3_budget):
    for seed in range(100):
        result = gcs(comm3, comm3_budget, SearchParams(iterations=1000), _rng(seed))
        assert result.profit <= 45
        verify_result(comm3, comm3_budget, result)


def test_lundy_mees_schedule_decreasing():
    temps = lundy_mees_schedule(0.3, 1e-2)
    values = [next(temps) for _ in range(100)]
    assert values[0] == 0.3
    assert all(0 < b < a for a, b in zip(values, values[1:]))
    assert math.isclose(values[1], 0.3 / (1 + 1e-2 * 0.3))


def test_lmsa_accepts_worsening_move_when_hot():
    for seed in range(20):
        assert accepts_worsening(-10, 1e9, _rng(seed)), f"seed {seed}: hot move rejected"


def test_lmsa_rejects_worsening_move_when_cold():
    for seed in range(20):
        assert not accepts_worsening(-10, 1e-9, _rng(seed))


def test_acceptance_draws_one_uniform():
    rng, replay = _rng(4), _rng(4)
    accepts_worsening(-3, 0.3, rng)
    replay.random()
    assert rng.random() == replay.random()


def test_lmsa_comm3(comm3, comm3_budget):
    params = SearchParams(iterations=10_000, lmsa_temperature=0.3, lmsa_beta=1e-8)
    result = lmsa(comm3, comm3_budget, params, _rng(2))
    assert result.profit <= 45
    verify_result(comm3, comm3_budget, result)


def test_lmsa_zero_temperature_limit_never_loses_profit(five_customer):
    """With a huge β the temperature collapses, so no removal is accepted."""
    budget = Budget(25)
    params = SearchParams(iterations=200, lmsa_temperature=1e-9, lmsa_beta=1e12)
    start = random_feasible(five_customer, budget, _rng(8))
    result = lmsa(five_customer, budget, params, _rng(8))
    assert result.profit >= sum(five_customer.profits[c - 1] for c in start.selected)


@pytest.mark.parametrize("name", ["random", "hillclimb", "gcs", "lmsa"])
def test_operators_are_deterministic(five_customer, name):
    op = get_operator(name)
    params = SearchParams(iterations=300, restarts=3)
    a = op(five_customer, Budget(25), params, _rng(77))
    b = op(five_customer, Budget(25), params, _rng(77))
    assert (a.best, a.profit, a.evaluations) == (b.best, b.profit, b.evaluations)


def test_unknown_operator():
    with pytest.raises(InputError):
        get_operator("tabu")


def test_invalid_params():
    with pytest.raises(InputError):
        SearchParams(iterations=0)
    with pytest.raises(InputError):
        SearchParams(lmsa_beta=0)


def test_empty_instance():
    empty = Instance([Requirement(1, 3)], [], [])
    for name in ("random", "hillclimb", "gcs", "lmsa"):
        result = get_operator(name)(empty, Budget(0), SearchParams(iterations=10), _rng(0))
        assert result.profit == 0 and result.best.n == 0


def test_customers_tie_on_profit_lowest_id_first():
    inst = Instance(
        [Requirement(1, 5), Requirement(2, 5)],
        [],
        [Customer(1, 10, {1}), Customer(2, 10, {2})],
    )
    result = gcs(inst, Budget(5), SearchParams(iterations=2), _rng(0), start=Solution.zeros(2))
    assert result.best == Solution.from_selected(2, [1])
