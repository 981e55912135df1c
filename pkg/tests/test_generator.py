"""
Tests for instance generation, budgets and the text formats.
"""

from fractions import Fraction

import networkx as nx
import pytest

from models.errors import (
    ConfigError,
    CycleError,
    DanglingReferenceError,
    DuplicateIdError,
    InputError,
    InstanceSyntaxError,
)
from models.generator import GeneratorConfig, LevelSpec, budget_from_ratio, generate
from utils.data_helpers import load_preset
from utils.instance_io import (
    load_generator_config,
    load_instance_file,
    read_generator_config,
    read_instance,
    write_generator_config,
    write_instance,
)

PRESET_SCALES = {
    "nrp-1": (140, 100),
    "nrp-2": (620, 500),
    "nrp-3": (1500, 500),
    "nrp-4": (3250, 750),
    "nrp-5": (1500, 1000),
}


def _level_of(config):
    """Requirement id -> 0-based level index."""
    level_of = {}
    next_id = 1
    for k, level in enumerate(config.levels):
        for rid in range(next_id, next_id + level.count):
            level_of[rid] = k
        next_id += level.count
    return level_of


@pytest.mark.parametrize("preset", sorted(PRESET_SCALES))
def test_preset_conformance(preset):
    print(f"\n✓ Checking {preset}")
    config = load_preset(preset).with_seed(7)
    instance = generate(config)
    m, n = PRESET_SCALES[preset]
    assert (instance.m, instance.n) == (m, n), f"{preset}: wrong scale"

    level_of = _level_of(config)
    for req in instance.requirements:
        level = config.levels[level_of[req.id]]
        assert level.cost_min <= req.cost <= level.cost_max, f"{preset}: r{req.id} cost {req.cost}"

    parents = {rid: [] for rid in level_of}
    for parent, child in instance.arcs:
        assert level_of[parent] == level_of[child] + 1, f"{preset}: arc {parent}->{child} skips a level"
        parents[child].append(parent)
    for rid, ps in parents.items():
        assert len(ps) <= config.levels[level_of[rid]].max_parents

    low, high = config.requests_per_customer
    plow, phigh = config.profit_range
    for cust in instance.customers:
        assert low <= len(cust.requested) <= high
        assert plow <= cust.profit <= phigh

    dag = nx.DiGraph(list(instance.arcs))
    assert nx.is_directed_acyclic_graph(dag)


def test_nrp5_single_request():
    instance = generate(load_preset("nrp-5").with_seed(1))
    assert all(len(c.requested) == 1 for c in instance.customers)


def test_generation_is_deterministic():
    config = load_preset("nrp-1").with_seed(7)
    assert write_instance(generate(config)) == write_instance(generate(config))
    assert write_instance(generate(config)) != write_instance(generate(config.with_seed(8)))


def test_generated_name():
    assert generate(load_preset("nrp-1").with_seed(7)).name == "nrp-1-s7"


def _config(**overrides):
    base = dict(
        levels=(LevelSpec(3, 1, 5, 2), LevelSpec(2, 1, 5, 0)),
        customer_count=4,
        requests_per_customer=(1, 2),
        profit_range=(1, 10),
    )
    base.update(overrides)
    return GeneratorConfig(**base)


def test_config_validation():
    _config().validate()
    with pytest.raises(ConfigError):
        _config(requests_per_customer=(1, 6)).validate()
    with pytest.raises(ConfigError):
        _config(levels=(LevelSpec(3, 1, 5, 3), LevelSpec(2, 1, 5, 0))).validate()
    with pytest.raises(ConfigError):
        _config(levels=(LevelSpec(3, 1, 5, 0), LevelSpec(2, 1, 5, 1))).validate()
    with pytest.raises(ConfigError):
        _config(profit_range=(0, 10)).validate()
    with pytest.raises(ConfigError):
        generate(_config(levels=()))


def test_budget_from_ratio(comm3):
    assert budget_from_ratio(comm3, "0.7").bound == 36
    assert budget_from_ratio(comm3, 0.7).ratio == Fraction(7, 10)
    assert budget_from_ratio(comm3, 0).bound == 0
    assert budget_from_ratio(comm3, 1).bound == 51
    # 0.5 x 51 = 25.5 rounds up
    assert budget_from_ratio(comm3, "0.5").bound == 26
    with pytest.raises(InputError):
        budget_from_ratio(comm3, "1.2")
    with pytest.raises(InputError):
        budget_from_ratio(comm3, "abc")


def test_budget_monotone_in_ratio(comm3):
    bounds = [budget_from_ratio(comm3, Fraction(k, 20)).bound for k in range(21)]
    assert bounds == sorted(bounds)


# ---------------------------------------------------------------------------
# instance text
# ---------------------------------------------------------------------------

SMALL = """nrp-instance 1
requirements 3
1 2
2 3
3 4
dependencies 2
1 2
2 3
customers 2
1 10 1 3
2 5 2 1 2
"""


def test_read_comm3(comm3, comm3_budget):
    assert comm3.name == "comm3"
    assert comm3.declared_budget == comm3_budget
    assert comm3.arcs == {(1, 3), (1, 4), (4, 5), (7, 5), (8, 5), (6, 7), (2, 6)}
    assert [c.profit for c in comm3.customers] == [30, 25, 20]
    assert [r.cost for r in comm3.requirements] == [6, 10, 16, 4, 1, 7, 6, 1]


def test_write_then_read_is_identity():
    instance = read_instance(SMALL)
    assert write_instance(instance) == SMALL
    assert write_instance(read_instance(write_instance(instance))) == SMALL


def test_generated_round_trip():
    instance = generate(load_preset("nrp-1").with_seed(3))
    text = write_instance(instance)
    assert write_instance(read_instance(text)) == text


def test_comments_and_blank_lines_ignored():
    text = "# header comment\n\n" + SMALL.replace("customers 2", "# customers follow\ncustomers 2")
    assert write_instance(read_instance(text)) == SMALL


def test_cycle_error_names_line():
    text = SMALL.replace("dependencies 2\n1 2\n2 3\n", "dependencies 3\n1 2\n2 3\n3 1\n")
    with pytest.raises(CycleError) as info:
        read_instance(text)
    assert info.value.line == 9
    assert "line 9" in str(info.value)


@pytest.mark.parametrize(
    "old, new, error, line",
    [
        ("2 3\n3 4\n", "2 3\n2 4\n", DuplicateIdError, 5),
        ("1 2\n2 3\ncustomers", "1 2\n2 7\ncustomers", DanglingReferenceError, 8),
        ("2 5 2 1 2", "2 5 2 1 9", DanglingReferenceError, 11),
        ("2 5 2 1 2", "2 5 3 1 2", InstanceSyntaxError, 11),
        ("requirements 3", "requirement 3", InstanceSyntaxError, 2),
        ("nrp-instance 1", "nrp-instance 2", InstanceSyntaxError, 1),
        ("1 10 1 3", "1 ten 1 3", InstanceSyntaxError, 10),
        ("1 10 1 3", "1 +10 1 3", InstanceSyntaxError, 10),
        ("1 10 1 3", "1 1_0 1 3", InstanceSyntaxError, 10),
        ("1 10 1 3", "1 \u0661\u0660 1 3", InstanceSyntaxError, 10),
        ("3 4\ndependencies", "3 +4\ndependencies", InstanceSyntaxError, 5),
    ],
)
def test_format_errors(old, new, error, line):
    with pytest.raises(error) as info:
        read_instance(SMALL.replace(old, new, 1))
    assert info.value.line == line


def test_truncated_input():
    with pytest.raises(InstanceSyntaxError) as info:
        read_instance(SMALL.rsplit("2 5", 1)[0])
    assert info.value.line is None


def test_non_ascii_instance_file_names_line(tmp_path):
    path = tmp_path / "accented.nrp"
    path.write_text(SMALL.replace("customers 2\n", "# café owners\ncustomers 2\n"), encoding="utf-8")
    with pytest.raises(InstanceSyntaxError) as info:
        load_instance_file(str(path))
    assert info.value.line == 9


def test_budget_line_and_trailing_content():
    assert read_instance(SMALL + "budget 4\n").declared_budget.bound == 4
    with pytest.raises(InstanceSyntaxError):
        read_instance(SMALL + "budget 4\nbudget 5\n")


# ---------------------------------------------------------------------------
# config text
# ---------------------------------------------------------------------------


def test_config_round_trip():
    config = load_preset("nrp-2")
    assert read_generator_config(write_generator_config(config)) == config


def test_config_errors():
    with pytest.raises(ConfigError, match="unknown key"):
        read_generator_config("colour blue\n")
    with pytest.raises(ConfigError, match="missing key"):
        read_generator_config("name x\nlevels 1\n3 1 2 0\n")
    with pytest.raises(ConfigError):
        read_generator_config("customers 5\nrequests 1 9\nprofits 1 5\nlevels 1\n3 1 2 0\n")


def test_config_rejects_signed_and_non_ascii_numbers(tmp_path):
    base = "name x\ncustomers 5\nrequests 1 2\nprofits 1 5\nlevels 1\n3 1 2 0\n"
    with pytest.raises(ConfigError, match="line 2"):
        read_generator_config(base.replace("customers 5", "customers +5"))
    with pytest.raises(ConfigError, match="line 6"):
        read_generator_config(base.replace("3 1 2 0", "3 1_0 2 0"))
    path = tmp_path / "bad.cfg"
    path.write_bytes(base.replace("name x", "name café").encode("utf-8"))
    with pytest.raises(ConfigError, match="line 1"):
        load_generator_config(str(path))
