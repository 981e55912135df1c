"""
End-to-end checks: every operator against the oracle, ABMA against GCS on a
generated instance, and the landscape trend for longer searches.
"""

import pytest

from commands.analytics import landscape, landscape_reference, parse_manifest, run_experiment
from commands.solve_commands import solve_instance
from factories import random_instances
from models.backbone import optimal_profit
from models.generator import budget_from_ratio
from models.instance import is_feasible
from utils.data_helpers import validate_report

SMALL_OPTIONS = {
    "random": {"iters": 200, "restarts": 2},
    "hillclimb": {"iters": 200, "restarts": 2},
    "gcs": {"iters": 200, "restarts": 2},
    "lmsa": {"iters": 200, "restarts": 2},
    "abma": {"iters": 100, "restarts": 2, "local_optima": 3},
}


def test_no_algorithm_beats_the_oracle():
    print("\n\n" + "=" * 60)
    print("TEST 1: Algorithms vs. exhaustive optimum (200 instances)")
    print("=" * 60)

    ratios = ("0.3", "0.5", "0.7")
    instances = random_instances(seed=8, count=200, max_customers=15, max_requirements=30)
    for k, inst in enumerate(instances):
        budget = budget_from_ratio(inst, ratios[k % 3])
        best = optimal_profit(inst, budget)
        for algo, options in SMALL_OPTIONS.items():
            report = solve_instance(inst, budget, algo, k, options)
            assert report.profit <= best, f"{inst.name}/{algo}: {report.profit} > optimum {best}"
            validate_report(inst, report)
    print(f"✓ {len(instances)} instances x {len(SMALL_OPTIONS)} algorithms within the optimum")


def _desk_means(seed, repetitions, iters, restarts):
    manifest = parse_manifest(
        {
            "seed": seed,
            "instances": [{"preset": "nrp-1", "seed": 7}],
            "ratios": [0.5, 0.7],
            "algorithms": ["gcs", "abma"],
            "repetitions": repetitions,
            "params": {"iters": iters, "restarts": restarts},
        }
    )
    df, _ = run_experiment(manifest)
    return df.pivot(index="ratio", columns="algo", values="profit")


def test_abma_not_worse_than_gcs_desk_scale():
    print("\n\n" + "=" * 60)
    print("TEST 2: ABMA vs. GCS on nrp-1 (seed 7)")
    print("=" * 60)

    means = _desk_means(seed=100, repetitions=3, iters=300, restarts=3)
    print(means)
    for ratio, row in means.iterrows():
        assert row["abma"] >= row["gcs"], f"ratio {ratio}: ABMA {row['abma']} < GCS {row['gcs']}"
    print("✅ ABMA mean profit >= GCS at both ratios")


@pytest.mark.slow
def test_abma_not_worse_than_gcs_full_scale():
    wins = 0
    for batch in range(10):
        means = _desk_means(seed=100 + 1000 * batch, repetitions=10, iters=1000, restarts=10)
        wins += bool((means["abma"] >= means["gcs"]).all())
    assert wins >= 7, f"ABMA matched or beat GCS in only {wins}/10 batches"


def test_landscape_distance_shrinks_with_iterations():
    print("\n\n" + "=" * 60)
    print("TEST 3: Landscape trend, hill climbing 10^3 vs 10^4 iterations")
    print("=" * 60)

    inst = random_instances(seed=55, count=1, max_customers=15, max_requirements=30)[0]
    budget = budget_from_ratio(inst, "0.5")
    reference = landscape_reference(inst, budget, seed=0)
    assert reference.kind == "exact"

    short, _ = landscape(inst, budget, "hillclimb", 1000, 1_000, seed=3, reference=reference)
    long, _ = landscape(inst, budget, "hillclimb", 1000, 10_000, seed=3, reference=reference)
    for df in (short, long):
        assert len(df) == 1000
        assert df["normalized_distance"].between(0, 1).all()
        assert df["normalized_profit"].between(0, 1).all()
    assert long["normalized_distance"].mean() <= short["normalized_distance"].mean()
    print(
        f"✓ mean distance {short['normalized_distance'].mean():.3f} -> "
        f"{long['normalized_distance'].mean():.3f}"
    )


def test_landscape_rows_are_feasible_optima():
    inst = random_instances(seed=56, count=1, max_customers=10, max_requirements=20)[0]
    budget = budget_from_ratio(inst, "0.7")
    df, reference = landscape(inst, budget, "gcs", 50, 200, seed=1)
    assert reference.solutions
    assert all(is_feasible(inst, sol, budget) for sol in reference.solutions)
    assert (df["normalized_profit"] <= 1).all()


def test_landscape_reference_above_cap_is_best_known(comm3, comm3_budget):
    reference = landscape_reference(comm3, comm3_budget, seed=0, cap=2, iterations=200)
    assert reference.kind == "best-known"
    assert len(reference.solutions) == 1
    assert reference.profit <= optimal_profit(comm3, comm3_budget)
    assert is_feasible(comm3, reference.solutions[0], comm3_budget)
