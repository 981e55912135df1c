"""
Generate the preset NRP instances into data/instances/.

For every preset nrp-1 ... nrp-5 writes one instance per seed, e.g.
data/instances/nrp-1-s7.nrp, and a summary CSV with the instance scale and
the budget bounds at cost ratios 0.3 / 0.5 / 0.7.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import pandas as pd

from models.generator import budget_from_ratio, generate
from utils.data_helpers import get_data_dir, list_presets, load_preset
from utils.instance_io import save_instance_file


RANDOM_SEED = 7
RATIOS = ("0.3", "0.5", "0.7")


def main(argv: List[str] | None = None) -> None:
    """Generate preset instances."""
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--presets", nargs="*", help="Preset names (default: all)")
    parser.add_argument("--seeds", nargs="*", type=int, default=[RANDOM_SEED])
    args = parser.parse_args(argv)

    out_dir = os.path.join(get_data_dir(), "instances")
    os.makedirs(out_dir, exist_ok=True)

    print("\n" + "=" * 60)
    print("Generating NRP instances")
    print("=" * 60 + "\n")

    rows = []
    for preset in args.presets or list_presets():
        config = load_preset(preset)
        for seed in args.seeds:
            instance = generate(config.with_seed(seed))
            path = os.path.join(out_dir, f"{instance.name}.nrp")
            save_instance_file(instance, path)
            row = {
                "instance": instance.name,
                "requirements": instance.m,
                "dependencies": len(instance.arcs),
                "customers": instance.n,
                "total_cost": instance.total_cost(),
            }
            for ratio in RATIOS:
                row[f"bound_{ratio}"] = budget_from_ratio(instance, ratio).bound
            rows.append(row)
            print(f"✓ {instance.name}: m={instance.m}, n={instance.n} -> {path}")

    summary = os.path.join(out_dir, "summary.csv")
    pd.DataFrame(rows).to_csv(summary, index=False)
    print(f"\n✓ Saved summary: {summary}")

    print("\n" + "=" * 60)
    print("✅ Instance generation complete!")
    print("=" * 60 + "\n")


if __name__ == "__main__":
    main()
