"""
Batch comparison script - runs a desk-scale experiment manifest (default:
data/experiments/nrp-1-desk.json) and saves the results table.
"""

import json
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from app import configure_logging
from commands.analytics import experiment_csv, load_manifest, run_experiment
from utils.data_helpers import get_data_dir


def main() -> None:
    """Run the comparison manifest and save CSV + JSON under data/results/."""
    configure_logging()
    logging.getLogger("commands").setLevel(logging.WARNING)

    data_dir = get_data_dir()
    manifest_path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(data_dir, "experiments", "nrp-1-desk.json")
    stem = os.path.splitext(os.path.basename(manifest_path))[0]
    out_dir = os.path.join(data_dir, "results")
    os.makedirs(out_dir, exist_ok=True)
    out_json = os.path.join(out_dir, f"{stem}.json")
    out_csv = os.path.join(out_dir, f"{stem}.csv")

    print("\n" + "=" * 60)
    print("Batch Algorithm Comparison")
    print("=" * 60 + "\n")

    print(f"Loading manifest {manifest_path}...")
    manifest = load_manifest(manifest_path)
    cells = len(manifest.instances) * len(manifest.ratios) * len(manifest.algorithms)
    print(f"✓ {cells} cells x {manifest.repetitions} repetitions, baseline {manifest.baseline}\n")

    df, records = run_experiment(manifest)

    with open(out_json, "w", encoding="utf-8") as f:
        json.dump({"seed": manifest.seed, "baseline": manifest.baseline, "cells": records}, f, indent=2)
    print(f"\n✓ Saved JSON: {out_json}")

    with open(out_csv, "w", encoding="utf-8", newline="\n") as f:
        f.write(experiment_csv(df))
    print(f"✓ Saved CSV: {out_csv}\n")
    print(df.to_string(index=False))

    print("\n" + "=" * 60)
    print("✅ Batch comparison complete!")
    print("=" * 60 + "\n")


if __name__ == "__main__":
    main()
