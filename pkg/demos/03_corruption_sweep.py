"""Kendall tau versus the fraction of corrupted comparisons, every ranker.

Writes corrupt_sweep.csv, corrupt_sweep_trials.csv and corrupt_sweep.svg
into the output directory (default: the current directory).

Run: python3 demos/03_corruption_sweep.py [outdir] [trials]
"""

import sys
from pathlib import Path

import serialrank as sr

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
trials = int(sys.argv[2]) if len(sys.argv) > 2 else 10
out.mkdir(parents=True, exist_ok=True)

cfg = sr.ExperimentConfig(
    n=100,
    trials=trials,
    methods=list(sr.METHODS),
    sweep_param="corrupt-fraction",
    grid=[0.0, 0.05, 0.1, 0.2, 0.3, 0.4],
    seed=1,
)
result = sr.run_sweep(cfg, progress=lambda k, total: print(f"\r{k}/{total}", end="", file=sys.stderr))
print(file=sys.stderr)

print(f"{'method':24s} " + " ".join(f"{v:>7.2f}" for v in cfg.grid))
for m in cfg.methods:
    taus = [result.row(m, v).mean_tau for v in cfg.grid]
    print(f"{m:24s} " + " ".join(f"{t:7.4f}" for t in taus))

result.write_trials_csv(out / "corrupt_sweep_trials.csv")
svg, table = sr.emit_plot(result, out / "corrupt_sweep.svg")
print("wrote", svg, "and", table)
