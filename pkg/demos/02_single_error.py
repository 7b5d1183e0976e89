"""One corrupted comparison: point score ties, SerialRank does not.

Run: python3 demos/02_single_error.py
"""

import numpy as np

import serialrank as sr

n = 10
c = sr.flip_pairs(sr.full_consistent(n), [(2, 7)])   # item 7 now "beats" item 2

w = sr.point_score(c)
print("point scores:", w.scores)
print("tied pairs:", w.ties)              # (2, 3) and (6, 7): the point score cannot order them

r = sr.serialrank(c)
print("SerialRank ranks:", r.ranks)       # 1..10, exact
print("strict R?", sr.check_R(sr.sim_match(c)).is_strict_R)

# An edge case: flipping (0, n-2) leaves the two last items with identical
# similarity profiles. The ranking is still exact (the orientation/upset
# count breaks the tie) but the similarity is no longer strict-R.
edge = sr.flip_pairs(sr.full_consistent(n), [(0, n - 2)])
report = sr.check_R(sr.sim_match(edge))
print("edge case strict R?", report.is_strict_R, "reversible blocks:", report.blocks)
print("edge case ranks:", sr.serialrank(edge).ranks)

# Missing comparisons are gentler: the similarity stays strict-R
gap = sr.delete_pairs(sr.full_consistent(n), [(3, 5)])
print("missing (3,5): strict R?", sr.check_R(sr.sim_match(gap)).is_strict_R,
      "ranks:", sr.serialrank(gap).ranks)
