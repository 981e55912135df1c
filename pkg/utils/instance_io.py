"""
Text formats: NRP instance files (.nrp) and generator config files (.cfg).

Instance file (`#` starts a comment line, blank lines are ignored):

    nrp-instance 1
    requirements <m>
    <id> <cost>                         m lines, ids 1..m in order
    dependencies <e>
    <parent-id> <child-id>              e lines
    customers <n>
    <id> <profit> <k> <req-id> ...      n lines, ids 1..n in order
    budget <B>                          optional

Generator config:

    name nrp-1
    customers 100
    requests 1 5
    profits 1 50
    seed 0                              optional
    levels 3
    <count> <cost-min> <cost-max> <max-parents>    one row per level
"""

from __future__ import annotations

import logging
import os
import re
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from models.errors import (
    ConfigError,
    CycleError,
    DanglingReferenceError,
    DuplicateIdError,
    InstanceFormatError,
    InstanceSyntaxError,
)
from models.generator import GeneratorConfig, LevelSpec
from models.instance import Budget, Customer, DependencyGraph, Instance, Requirement

logger = logging.getLogger(__name__)

FORMAT_HEADER = "nrp-instance 1"


class _Lines:
    """Cursor over significant lines, remembering 1-based line numbers."""

    def __init__(self, text: str) -> None:
        self._items: List[Tuple[int, List[str]]] = [
            (number, line.split())
            for number, line in enumerate(text.splitlines(), start=1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
        self._pos = 0

    def __iter__(self) -> Iterator[Tuple[int, List[str]]]:
        return self

    def __next__(self) -> Tuple[int, List[str]]:
        if self._pos >= len(self._items):
            raise StopIteration
        item = self._items[self._pos]
        self._pos += 1
        return item

    def take(self, what: str) -> Tuple[int, List[str]]:
        try:
            return next(self)
        except StopIteration:
            raise InstanceSyntaxError(f"unexpected end of input, expected {what}") from None

    def done(self) -> bool:
        return self._pos >= len(self._items)


_INTEGER = re.compile(r"-?[0-9]+")


def _is_integer(token: str) -> bool:
    """ASCII digits with an optional leading minus; no '+', '_' or other scripts."""
    return _INTEGER.fullmatch(token) is not None


def _int(token: str, line: int, what: str) -> int:
    if not _is_integer(token):
        raise InstanceSyntaxError(f"{what} must be an integer, got {token!r}", line)
    return int(token)


def _read_ascii(path: str) -> Tuple[str, Optional[int]]:
    """File text, or ("", line) of the first non-ASCII byte."""
    with open(path, "rb") as f:
        data = f.read()
    try:
        return data.decode("ascii"), None
    except UnicodeDecodeError as exc:
        return "", data.count(b"\n", 0, exc.start) + 1


def _header(lines: _Lines, keyword: str) -> int:
    number, tokens = lines.take(f"'{keyword} <count>'")
    if len(tokens) != 2 or tokens[0] != keyword:
        raise InstanceSyntaxError(f"expected '{keyword} <count>', got {' '.join(tokens)!r}", number)
    count = _int(tokens[1], number, f"{keyword} count")
    if count < 0:
        raise InstanceSyntaxError(f"{keyword} count must be non-negative", number)
    return count


def _check_id(value: int, expected: int, number: int, kind: str) -> None:
    if value < expected:
        raise DuplicateIdError(f"{kind} id {value} already defined", number)
    if value != expected:
        raise InstanceSyntaxError(f"{kind} ids must be 1..N in order; expected {expected}, got {value}", number)


def read_instance(text: str, name: str = "instance") -> Instance:
    """
    Parse instance text.

    Raises:
        InstanceSyntaxError: Malformed line or unknown header
        DuplicateIdError: Requirement or customer id repeated
        DanglingReferenceError: Arc or request naming an unknown requirement
        CycleError: Dependency arc closing a cycle
    """
    lines = _Lines(text)
    number, tokens = lines.take(f"'{FORMAT_HEADER}'")
    if " ".join(tokens) != FORMAT_HEADER:
        raise InstanceSyntaxError(f"expected '{FORMAT_HEADER}', got {' '.join(tokens)!r}", number)

    m = _header(lines, "requirements")
    requirements: List[Requirement] = []
    for expected in range(1, m + 1):
        number, tokens = lines.take("a requirement line")
        if len(tokens) != 2:
            raise InstanceSyntaxError("requirement line needs '<id> <cost>'", number)
        rid = _int(tokens[0], number, "requirement id")
        cost = _int(tokens[1], number, "requirement cost")
        _check_id(rid, expected, number, "requirement")
        if cost < 0:
            raise InstanceSyntaxError(f"requirement {rid} has negative cost", number)
        requirements.append(Requirement(rid, cost))

    e = _header(lines, "dependencies")
    dag = nx.DiGraph()
    dag.add_nodes_from(range(1, m + 1))
    for _ in range(e):
        number, tokens = lines.take("a dependency line")
        if len(tokens) != 2:
            raise InstanceSyntaxError("dependency line needs '<parent-id> <child-id>'", number)
        parent = _int(tokens[0], number, "parent id")
        child = _int(tokens[1], number, "child id")
        for rid in (parent, child):
            if not 1 <= rid <= m:
                raise DanglingReferenceError(f"dependency names unknown requirement {rid}", number)
        if dag.has_edge(parent, child):
            raise DuplicateIdError(f"dependency {parent} {child} listed twice", number)
        if parent == child or nx.has_path(dag, child, parent):
            raise CycleError(f"dependency {parent} -> {child} closes a cycle", number)
        dag.add_edge(parent, child)

    n = _header(lines, "customers")
    customers: List[Customer] = []
    for expected in range(1, n + 1):
        number, tokens = lines.take("a customer line")
        if len(tokens) < 3:
            raise InstanceSyntaxError("customer line needs '<id> <profit> <k> <req-id>...'", number)
        cid = _int(tokens[0], number, "customer id")
        profit = _int(tokens[1], number, "customer profit")
        k = _int(tokens[2], number, "request count")
        _check_id(cid, expected, number, "customer")
        if profit <= 0:
            raise InstanceSyntaxError(f"customer {cid} needs a positive profit", number)
        if k != len(tokens) - 3:
            raise InstanceSyntaxError(f"customer {cid} declares {k} requests but lists {len(tokens) - 3}", number)
        requested = [_int(t, number, "requested id") for t in tokens[3:]]
        for rid in requested:
            if not 1 <= rid <= m:
                raise DanglingReferenceError(f"customer {cid} requests unknown requirement {rid}", number)
        if len(set(requested)) != len(requested):
            raise DuplicateIdError(f"customer {cid} requests a requirement twice", number)
        customers.append(Customer(cid, profit, frozenset(requested)))

    budget: Optional[Budget] = None
    if not lines.done():
        number, tokens = lines.take("budget line")
        if len(tokens) != 2 or tokens[0] != "budget":
            raise InstanceSyntaxError(f"unexpected line {' '.join(tokens)!r}", number)
        bound = _int(tokens[1], number, "budget")
        if bound < 0:
            raise InstanceSyntaxError("budget must be non-negative", number)
        budget = Budget(bound)
    if not lines.done():
        number, tokens = lines.take("end of input")
        raise InstanceSyntaxError(f"trailing content {' '.join(tokens)!r}", number)

    graph = DependencyGraph(dag.edges(), m)
    return Instance(requirements, graph, customers, name=name, declared_budget=budget)


def write_instance(instance: Instance, budget: Optional[Budget] = None) -> str:
    """Canonical text: arcs sorted, requests sorted, budget line if given or declared."""
    budget = budget if budget is not None else instance.declared_budget
    out = [FORMAT_HEADER, f"requirements {instance.m}"]
    out.extend(f"{req.id} {req.cost}" for req in instance.requirements)
    arcs = instance.graph.sorted_arcs()
    out.append(f"dependencies {len(arcs)}")
    out.extend(f"{p} {c}" for p, c in arcs)
    out.append(f"customers {instance.n}")
    for cust in instance.customers:
        requested = sorted(cust.requested)
        fields = [str(cust.id), str(cust.profit), str(len(requested))] + [str(r) for r in requested]
        out.append(" ".join(fields))
    if budget is not None:
        out.append(f"budget {budget.bound}")
    return "\n".join(out) + "\n"


def load_instance_file(path: str) -> Instance:
    """Read an instance file; the instance is named after the file stem."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Instance file not found: {path}")
    text, bad_line = _read_ascii(path)
    if bad_line is not None:
        raise InstanceSyntaxError("non-ASCII byte; instance files are plain ASCII", bad_line)
    name = os.path.splitext(os.path.basename(path))[0]
    instance = read_instance(text, name=name)
    logger.debug("Loaded %r from %s", instance, path)
    return instance


def save_instance_file(instance: Instance, path: str, budget: Optional[Budget] = None) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(write_instance(instance, budget))


_CONFIG_SCALARS = ("name", "customers", "requests", "profits", "seed")


def read_generator_config(text: str) -> GeneratorConfig:
    """Parse a generator config; every problem is a ConfigError naming the line."""
    lines = _Lines(text)
    values: Dict[str, Tuple[int, List[str]]] = {}
    levels: List[LevelSpec] = []
    for number, tokens in lines:
        key, args = tokens[0], tokens[1:]
        if key == "levels":
            if len(args) != 1 or not _is_integer(args[0]) or args[0].startswith("-"):
                raise ConfigError(f"line {number}: expected 'levels <count>'")
            for _ in range(int(args[0])):
                try:
                    row_number, row = lines.take("a level row")
                except InstanceFormatError as exc:
                    raise ConfigError(str(exc)) from None
                if len(row) != 4:
                    raise ConfigError(f"line {row_number}: level row needs '<count> <cost-min> <cost-max> <max-parents>'")
                if not all(_is_integer(t) for t in row):
                    raise ConfigError(f"line {row_number}: level values must be integers")
                levels.append(LevelSpec(*(int(t) for t in row)))
            continue
        if key not in _CONFIG_SCALARS:
            raise ConfigError(f"line {number}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {number}: key {key!r} given twice")
        values[key] = (number, args)

    def ints(key: str, count: int) -> Tuple[int, ...]:
        if key not in values:
            raise ConfigError(f"missing key {key!r}")
        number, args = values[key]
        if len(args) != count:
            raise ConfigError(f"line {number}: {key!r} takes {count} value(s)")
        if not all(_is_integer(a) for a in args):
            raise ConfigError(f"line {number}: {key!r} values must be integers")
        return tuple(int(a) for a in args)

    name = " ".join(values["name"][1]) if "name" in values else "generated"
    config = GeneratorConfig(
        levels=tuple(levels),
        customer_count=ints("customers", 1)[0],
        requests_per_customer=ints("requests", 2),
        profit_range=ints("profits", 2),
        seed=ints("seed", 1)[0] if "seed" in values else 0,
        name=name,
    )
    config.validate()
    return config


def write_generator_config(config: GeneratorConfig) -> str:
    out = [
        f"name {config.name}",
        f"customers {config.customer_count}",
        "requests {} {}".format(*config.requests_per_customer),
        "profits {} {}".format(*config.profit_range),
        f"seed {config.seed}",
        f"levels {len(config.levels)}",
    ]
    out.extend(f"{lv.count} {lv.cost_min} {lv.cost_max} {lv.max_parents}" for lv in config.levels)
    return "\n".join(out) + "\n"


def load_generator_config(path: str) -> GeneratorConfig:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    text, bad_line = _read_ascii(path)
    if bad_line is not None:
        raise ConfigError(f"line {bad_line}: non-ASCII byte; config files are plain ASCII")
    return read_generator_config(text)
