"""Summarise a finished run directory: final reward average, episodes and the selected predicates.

    python3 scripts/summarize.py runs/rps
"""
import csv
import sys
from pathlib import Path

import numpy as np

from phiaixi.experiment import Runner


def main(root):
    root = Path(root)
    manifest = {}
    with open(root / "pool_manifest.tsv") as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            manifest[int(row["id"])] = f"{row['kind']} {row['params']}"
    finals = []
    for seed_dir in sorted(root.glob("seed_*")):
        runner = Runner.load(seed_dir / "checkpoint.pkl")
        n = runner.t
        final = runner.rewards[n - max(1, n // 5):n].mean()
        finals.append(final)
        eps = runner.episodes[-20:]
        ep = f", final-20 episode return {np.mean([e['return'] for e in eps]):.1f}" if eps else ""
        print(f"{seed_dir.name}: {n} steps, final-20% reward/cycle {final:.4f}{ep}")
        for j in runner.agent.selected:
            print(f"    {j:5d}  {manifest.get(j, '?')}")
    if finals:
        print(f"mean over seeds {np.mean(finals):.4f} +- {np.std(finals):.4f}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "runs/smoke")
