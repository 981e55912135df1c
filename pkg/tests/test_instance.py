"""
Tests for the data model: closures, union cost, feasibility, distances.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factories import random_instance
from models.errors import InputError
from models.instance import (
    Budget,
    Customer,
    DependencyGraph,
    Instance,
    Requirement,
    Solution,
    customer_closure,
    hamming_distance,
    is_feasible,
    solution_cost,
    solution_profit,
    transitive_parents,
)


def test_comm3_golden_values(comm3, comm3_budget, x1, x2, x3):
    print("\n\n" + "=" * 60)
    print("TEST 1: COMM3 profit/cost of X1, X2, X3")
    print("=" * 60)

    assert comm3.total_cost() == 51, "COMM3 costs should sum to 51"
    assert (solution_profit(comm3, x1), solution_cost(comm3, x1)) == (30, 26)
    assert (solution_profit(comm3, x2), solution_cost(comm3, x2)) == (45, 35)
    assert solution_cost(comm3, x3) == 51
    assert is_feasible(comm3, x2, comm3_budget), "X2 costs 35 <= 36"
    assert not is_feasible(comm3, x3, comm3_budget), "X3 costs 51 > 36"
    print("✓ X1=(30, 26), X2=(45, 35), X3 cost 51")


def test_comm3_closures(comm3):
    assert customer_closure(comm3, 1) == {1, 3, 4}
    assert customer_closure(comm3, 2) == {1, 2, 4, 5, 6, 7, 8}
    # r7 is requested by customer 3, so it belongs to the closure
    assert customer_closure(comm3, 3) == {2, 6, 7, 8}
    assert transitive_parents(comm3, {5}) == {1, 2, 4, 6, 7, 8}
    assert transitive_parents(comm3, {1, 2}) == frozenset()


def test_customer_closure_rejects_unknown_id(comm3):
    with pytest.raises(InputError):
        customer_closure(comm3, 4)
    with pytest.raises(InputError):
        customer_closure(comm3, 0)


def test_solution_size_mismatch(comm3):
    with pytest.raises(InputError):
        solution_cost(comm3, Solution.zeros(4))


def test_hamming_examples(comm3, x1, x2):
    assert hamming_distance(x1, x1) == 0
    assert hamming_distance(x1, x2) == 3, "X1 and X2 share no ordered pair"
    assert hamming_distance(Solution.ones(3), Solution.zeros(3)) == 3
    with pytest.raises(InputError):
        hamming_distance(Solution.zeros(2), Solution.zeros(3))


def test_all_zero_is_feasible_at_zero_budget(comm3):
    assert is_feasible(comm3, Solution.zeros(comm3.n), Budget(0))


def test_cyclic_dependencies_rejected():
    with pytest.raises(InputError, match="cycle"):
        DependencyGraph([(1, 2), (2, 3), (3, 1)], 3)
    with pytest.raises(InputError):
        DependencyGraph([(1, 1)], 1)


def test_dense_ids_required():
    with pytest.raises(InputError):
        Instance([Requirement(2, 1)], [], [])
    with pytest.raises(InputError):
        Instance([Requirement(1, 1)], [], [Customer(1, 5, {2})])


def test_degenerate_instances():
    empty = Instance([], [], [])
    assert empty.n == 0 and empty.m == 0
    assert solution_cost(empty, Solution.zeros(0)) == 0

    no_requests = Instance([Requirement(1, 4)], [], [Customer(1, 7, frozenset())])
    assert solution_cost(no_requests, Solution.ones(1)) == 0
    assert solution_profit(no_requests, Solution.ones(1)) == 7


def test_solution_pairs_round_trip(x2):
    assert x2.pairs() == {(1, 0), (2, 1), (3, 1)}
    assert x2.selected == {2, 3}
    assert x2.flipped(1) == Solution.ones(3)
    assert repr(x2) == "Solution(011)"
    with pytest.raises(InputError):
        Solution.from_pairs({(1, 1), (3, 0)})


def test_scale_counts_nonzero_costs(comm3):
    assert comm3.scale() == (3, 8)
    reduced = comm3.with_customers([1, 2], zero_cost={1, 3, 4})
    assert reduced.scale() == (2, 5)


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


@st.composite
def instance_and_bits(draw, count=2):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    instance = random_instance(np.random.Generator(np.random.PCG64(seed)), max_customers=10, max_requirements=15)
    solutions = [
        Solution(draw(st.lists(st.booleans(), min_size=instance.n, max_size=instance.n)))
        for _ in range(count)
    ]
    return instance, solutions


@settings(max_examples=60, deadline=None)
@given(instance_and_bits(count=3))
def test_hamming_is_a_metric(case):
    _, (x, y, z) = case
    assert hamming_distance(x, y) == hamming_distance(y, x)
    assert (hamming_distance(x, y) == 0) == (x == y)
    assert hamming_distance(x, z) <= hamming_distance(x, y) + hamming_distance(y, z)


@settings(max_examples=60, deadline=None)
@given(instance_and_bits(count=2))
def test_union_cost_subadditive(case):
    instance, (a, b) = case
    union = Solution(a.bits | b.bits)
    cost_a, cost_b = solution_cost(instance, a), solution_cost(instance, b)
    cost_union = solution_cost(instance, union)
    assert cost_union <= cost_a + cost_b

    covered_a = instance.closure_matrix[a.bits].any(axis=0)
    covered_b = instance.closure_matrix[b.bits].any(axis=0)
    shared_cost = int(instance.costs[covered_a & covered_b].sum())
    assert (cost_union == cost_a + cost_b) == (shared_cost == 0)


@settings(max_examples=60, deadline=None)
@given(instance_and_bits(count=1), st.integers(min_value=0))
def test_adding_a_customer_is_monotone(case, pick):
    instance, (x,) = case
    unselected = [cid for cid in range(1, instance.n + 1) if not x.bit(cid)]
    if not unselected:
        return
    y = x.flipped(unselected[pick % len(unselected)])
    assert solution_cost(instance, y) >= solution_cost(instance, x)
    assert solution_profit(instance, y) >= solution_profit(instance, x)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_closure_is_idempotent(seed):
    instance = random_instance(np.random.Generator(np.random.PCG64(seed)))
    for closure in instance.closures:
        assert closure | transitive_parents(instance, closure) == closure
