"""Spectrum of the noiseless similarity: Fiedler values and the asymptotic Fiedler vector.

Run: python3 demos/05_spectrum.py
"""

import numpy as np

import serialrank as sr

print(f"{'n':>6} {'lambda2/n^2':>12} {'norm lambda2':>13} {'norm lambda3':>13} {'cos(asym)':>10}")
for n in (10, 30, 100, 300, 1000):
    s = sr.sim_match(sr.full_consistent(n))
    un = sr.fiedler_vector(s)
    no = sr.fiedler_vector(s, "normalized")
    cos = abs(sr.asymptotic_fiedler(n) @ un.fiedler)
    print(f"{n:6d} {un.eigenvalues[1] / n**2:12.6f} {no.eigenvalues[1]:13.9f} {no.eigenvalues[2]:13.6f} {cos:10.7f}")

print("limit of lambda2/n^2:", sr.asymptotic_fiedler_value())

# the eigenvalue n(n+1)/2 has an eigenvector of the form [a, -b, ..., -b, a]
n = 10
vals, vecs = np.linalg.eigh(sr.laplacian(sr.sim_match(sr.full_consistent(n))))
k = int(np.argmin(np.abs(vals - n * (n + 1) / 2)))
print(f"eigenvalue {vals[k]:.6f} (n(n+1)/2 = {n * (n + 1) / 2}):", np.round(vecs[:, k], 4))
