"""
NRP data model: requirements, dependency graph, customers, solutions and
budgets, plus the union-cost semantics every algorithm is scored with.

A customer is satisfied only when its whole closure (requested requirements
plus every transitive prerequisite) is implemented. The cost of a set of
customers is the cost of the union of their closures, so shared requirements
are paid once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Real
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from models.errors import InputError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Requirement:
    id: int
    cost: int

    def __post_init__(self) -> None:
        if not isinstance(self.cost, Integral) or self.cost < 0:
            raise InputError(f"requirement {self.id}: cost must be a non-negative integer")


@dataclass(frozen=True)
class Customer:
    """A customer pays `profit` once every requirement in `requested` ships."""

    id: int
    profit: Real
    requested: FrozenSet[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "requested", frozenset(self.requested))
        if not self.profit > 0:
            raise InputError(f"customer {self.id}: profit must be positive")


@dataclass(frozen=True)
class Budget:
    """Development budget bound, optionally with the cost ratio it came from."""

    bound: int
    ratio: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if not isinstance(self.bound, Integral) or self.bound < 0:
            raise InputError(f"budget bound must be a non-negative integer, got {self.bound!r}")
        object.__setattr__(self, "bound", int(self.bound))


class DependencyGraph:
    """
    Requirement dependency DAG. An arc (parent, child) means child depends on
    parent. Ancestor sets are memoized; instances derived by reduction share
    the same graph object.
    """

    def __init__(self, arcs: Iterable[Pair], requirement_count: int) -> None:
        arc_set = frozenset((int(p), int(c)) for p, c in arcs)
        for parent, child in arc_set:
            for rid in (parent, child):
                if not 1 <= rid <= requirement_count:
                    raise InputError(f"arc ({parent}, {child}) references unknown requirement {rid}")
            if parent == child:
                raise InputError(f"requirement {parent} cannot depend on itself")

        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, requirement_count + 1))
        graph.add_edges_from(arc_set)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise InputError(f"dependency graph has a cycle: {cycle}")

        self.arcs = arc_set
        self.requirement_count = requirement_count
        self._graph = graph
        self._ancestors: Dict[int, FrozenSet[int]] = {}

    def parents(self, requirement_id: int) -> FrozenSet[int]:
        """All requirements that can reach `requirement_id`."""
        cached = self._ancestors.get(requirement_id)
        if cached is None:
            if not 1 <= requirement_id <= self.requirement_count:
                raise InputError(f"unknown requirement id {requirement_id}")
            cached = frozenset(nx.ancestors(self._graph, requirement_id))
            self._ancestors[requirement_id] = cached
        return cached

    def sorted_arcs(self) -> List[Pair]:
        return sorted(self.arcs)


class Solution:
    """
    Total assignment of one bit per customer (customer ids are 1-based, bit
    i-1 belongs to customer i). Immutable and hashable.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int]) -> None:
        arr = np.array(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=bool)
        if arr.ndim != 1:
            raise InputError("solution bits must be one-dimensional")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def zeros(cls, n: int) -> "Solution":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def ones(cls, n: int) -> "Solution":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def from_selected(cls, n: int, selected: Iterable[int]) -> "Solution":
        bits = np.zeros(n, dtype=bool)
        for cid in selected:
            if not 1 <= cid <= n:
                raise InputError(f"customer id {cid} outside 1..{n}")
            bits[cid - 1] = True
        return cls(bits)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Pair]) -> "Solution":
        """Build from ordered-pair form; the ids must cover exactly 1..n."""
        mapping: Dict[int, int] = {}
        for cid, bit in pairs:
            if cid in mapping:
                raise InputError(f"customer {cid} assigned twice")
            if bit not in (0, 1):
                raise InputError(f"customer {cid}: bit must be 0 or 1")
            mapping[cid] = bit
        n = len(mapping)
        if set(mapping) != set(range(1, n + 1)):
            raise InputError("ordered pairs must assign every customer 1..n exactly once")
        return cls([mapping[cid] for cid in range(1, n + 1)])

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n(self) -> int:
        return int(self._bits.shape[0])

    @property
    def selected(self) -> FrozenSet[int]:
        return frozenset(int(i) + 1 for i in np.flatnonzero(self._bits))

    def pairs(self) -> FrozenSet[Pair]:
        return frozenset((i + 1, int(b)) for i, b in enumerate(self._bits))

    def bit(self, customer_id: int) -> int:
        return int(self._bits[customer_id - 1])

    def flipped(self, customer_id: int) -> "Solution":
        bits = self._bits.copy()
        bits[customer_id - 1] = not bits[customer_id - 1]
        return Solution(bits)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Solution):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.n, self._bits.tobytes()))

    def __repr__(self) -> str:
        return "Solution(" + "".join("1" if b else "0" for b in self._bits) + ")"


class Instance:
    """
    An NRP instance NRP(S, R, W).

    Attributes:
        name: Label used in reports (file stem, preset name, ...)
        requirements: Requirements with ids 1..m in order
        graph: Dependency DAG over requirement ids
        customers: Customers with ids 1..n in order
        declared_budget: Budget stated by the instance file, if any
        costs: int64 vector of requirement costs (index id-1)
        closure_matrix: (n, m) bool matrix, row i-1 = closure of customer i
    """

    def __init__(
        self,
        requirements: Sequence[Requirement],
        graph: DependencyGraph | Iterable[Pair],
        customers: Sequence[Customer],
        name: str = "instance",
        declared_budget: Optional[Budget] = None,
    ) -> None:
        self.name = name
        self.requirements: Tuple[Requirement, ...] = tuple(requirements)
        self.customers: Tuple[Customer, ...] = tuple(customers)
        self.declared_budget = declared_budget

        for expected, req in enumerate(self.requirements, start=1):
            if req.id != expected:
                raise InputError(f"requirement ids must be dense 1..m, found {req.id} at position {expected}")
        for expected, cust in enumerate(self.customers, start=1):
            if cust.id != expected:
                raise InputError(f"customer ids must be dense 1..n, found {cust.id} at position {expected}")

        m = len(self.requirements)
        if isinstance(graph, DependencyGraph):
            if graph.requirement_count != m:
                raise InputError("dependency graph does not match the requirement count")
            self.graph = graph
        else:
            self.graph = DependencyGraph(graph, m)

        for cust in self.customers:
            for rid in cust.requested:
                if not 1 <= rid <= m:
                    raise InputError(f"customer {cust.id} requests unknown requirement {rid}")

        self.costs = np.array([req.cost for req in self.requirements], dtype=np.int64)
        self.closures: Tuple[FrozenSet[int], ...] = tuple(
            self._close(cust.requested) for cust in self.customers
        )
        self.closure_matrix = np.zeros((len(self.customers), m), dtype=bool)
        for row, closure in enumerate(self.closures):
            if closure:
                self.closure_matrix[row, [rid - 1 for rid in closure]] = True
        self.closure_matrix.setflags(write=False)
        self.costs.setflags(write=False)

        self.profits: Tuple[Real, ...] = tuple(cust.profit for cust in self.customers)
        self.integral_profits = all(isinstance(p, Integral) for p in self.profits)
        self._profit_ints = (
            np.array(self.profits, dtype=np.int64) if self.integral_profits else None
        )

    def _close(self, req_set: Iterable[int]) -> FrozenSet[int]:
        req_set = frozenset(req_set)
        closure = set(req_set)
        for rid in req_set:
            closure |= self.graph.parents(rid)
        return frozenset(closure)

    @property
    def n(self) -> int:
        return len(self.customers)

    @property
    def m(self) -> int:
        return len(self.requirements)

    @property
    def arcs(self) -> FrozenSet[Pair]:
        return self.graph.arcs

    def total_cost(self) -> int:
        return int(self.costs.sum())

    def scale(self) -> Tuple[int, int]:
        """(customers, requirements with nonzero cost)."""
        return self.n, int(np.count_nonzero(self.costs))

    def closure_cost(self, customer_ids: Iterable[int]) -> int:
        """Cost of the union of the closures of the given customers."""
        rows = [cid - 1 for cid in customer_ids]
        if not rows:
            return 0
        return int(self.costs[self.closure_matrix[rows].any(axis=0)].sum())

    def with_customers(
        self,
        customer_ids: Sequence[int],
        zero_cost: Iterable[int] = (),
        name: Optional[str] = None,
    ) -> "Instance":
        """
        Sub-instance keeping `customer_ids` (renumbered 1..k in the given
        order) with the requirements in `zero_cost` priced at 0. Requirement
        ids and the dependency graph are shared.
        """
        zeroed = frozenset(zero_cost)
        requirements = [
            Requirement(req.id, 0 if req.id in zeroed else req.cost) for req in self.requirements
        ]
        customers = [
            Customer(new_id, self.customers[old - 1].profit, self.customers[old - 1].requested)
            for new_id, old in enumerate(customer_ids, start=1)
        ]
        return Instance(requirements, self.graph, customers, name=name or self.name)

    def __repr__(self) -> str:
        return f"Instance(name={self.name!r}, n={self.n}, m={self.m}, arcs={len(self.arcs)})"


def _check_customer(instance: Instance, customer_id: int) -> None:
    if not 1 <= customer_id <= instance.n:
        raise InputError(f"unknown customer id {customer_id}")


def _check_solution(instance: Instance, solution: Solution) -> None:
    if solution.n != instance.n:
        raise InputError(
            f"solution assigns {solution.n} customers, instance has {instance.n}"
        )


def transitive_parents(instance: Instance, req_set: Iterable[int]) -> FrozenSet[int]:
    """Union of parents(r) over r in req_set."""
    result: set = set()
    for rid in req_set:
        result |= instance.graph.parents(rid)
    return frozenset(result)


def customer_closure(instance: Instance, customer_id: int) -> FrozenSet[int]:
    """R̂_i = R_i ∪ parents(R_i)."""
    _check_customer(instance, customer_id)
    return instance.closures[customer_id - 1]


def solution_cost(instance: Instance, solution: Solution) -> int:
    _check_solution(instance, solution)
    covered = instance.closure_matrix[solution.bits].any(axis=0)
    return int(instance.costs[covered].sum())


def solution_profit(instance: Instance, solution: Solution) -> Real:
    _check_solution(instance, solution)
    if instance._profit_ints is not None:
        return int(instance._profit_ints[solution.bits].sum())
    return sum(
        (instance.profits[i] for i in np.flatnonzero(solution.bits)),
        Fraction(0),
    )


def is_feasible(instance: Instance, solution: Solution, budget: Budget) -> bool:
    """Feasible iff cost <= bound."""
    return solution_cost(instance, solution) <= budget.bound


def hamming_distance(x: Solution, y: Solution) -> int:
    """Number of customers whose bits differ, n - |X ∩ Y| over ordered pairs."""
    if x.n != y.n:
        raise InputError(f"cannot compare solutions over {x.n} and {y.n} customers")
    return int(np.count_nonzero(x.bits != y.bits))
