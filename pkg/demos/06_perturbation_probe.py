"""How far the Fiedler vector and the ranking move under subsampling and noise.

Comparisons are observed with probability q and correct with probability p;
the debiased similarity and the normalized Laplacian are used.

Run: python3 demos/06_perturbation_probe.py [trials]
"""

import sys

import serialrank as sr

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 10
rows = sr.run_perturbation_probe(256, [0.1, 0.2, 0.4, 0.8, 1.0], p=0.9, trials=trials, seed=0)
sr.write_probe_csv(rows, sys.stdout)

# consistency: with q*n fixed, how does the l2 error move as n doubles?
# (it creeps up slightly: the guarantee needs q*n to grow like log^4 n)
for n in (128, 256, 512):
    r = sr.run_perturbation_probe(n, [32 / n], p=0.9, trials=max(3, trials // 2), seed=1)[0]
    print(f"n={n:4d} q={32 / n:.4f}: mean l2 error {r.mean_l2:.4f}, mean linf displacement {r.mean_linf:.1f}")
