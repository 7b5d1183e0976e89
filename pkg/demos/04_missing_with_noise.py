"""Missing comparisons on top of 20% corruption, and local cardinal noise.

Run: python3 demos/04_missing_with_noise.py [trials]
"""

import sys

import serialrank as sr

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 10
methods = ["serialrank", "point-score", "rank-centrality", "btl"]

missing = sr.ExperimentConfig(
    n=100, trials=trials, methods=methods,
    sweep_param="missing-fraction", grid=[0.0, 0.2, 0.4, 0.6, 0.8],
    fixed_noise={"kind": "uniform-corrupt", "fraction": 0.2}, seed=2,
)
local = sr.ExperimentConfig(
    n=100, trials=trials, methods=methods,
    sweep_param="local-range", grid=[0, 5, 10, 20, 40], seed=3,
)

for cfg in (missing, local):
    res = sr.run_sweep(cfg)
    print(f"\nsweep over {cfg.sweep_param}" + (f" (+ {cfg.fixed_noise})" if cfg.fixed_noise else ""))
    print(f"{'method':18s} " + " ".join(f"{v:>7g}" for v in cfg.grid))
    for m in methods:
        print(f"{m:18s} " + " ".join(f"{res.row(m, v).mean_tau:7.3f}" for v in cfg.grid))
