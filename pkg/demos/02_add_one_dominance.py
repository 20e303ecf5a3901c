"""The add-one estimator dominates every i.i.d. source with coefficient 1/(n+1).

The estimator assigns P(a | history) = (count(a)+1)/(n+alphabet); its
marginal of any binary string is therefore at least 1/(n+1) times the
string's probability under ANY i.i.d. law, and that floor is attained by
the deterministic source.  Run: python demos/02_add_one_dominance.py
"""
import numpy as np

from seqpred import Alphabet, laplace, laplace_bound, make_bernoulli
from seqpred.dominance import dominance_profile_exact

binary = Alphabet(2)
pred = laplace(binary)
n = 12

print("=== exact dominance profiles c_n = min_x pred(x)/source(x) ===")
print("n:", " ".join(f"{t:>7d}" for t in range(1, n + 1)))
for p in (0.5, 0.9, 1.0):
    source = make_bernoulli(binary, [1 - p, p])
    prof = dominance_profile_exact(pred, source, n)
    print(f"p={p}:", " ".join(f"{c:7.4f}" for c in prof.c))

floor = np.array([laplace_bound(t, 2) for t in range(1, n + 1)])
print("floor:", " ".join(f"{c:7.4f}" for c in floor), "  <- 1/(n+1)")

print("\nThe p=1 row sits exactly on the floor; its witness strings are all-ones:")
prof1 = dominance_profile_exact(pred, make_bernoulli(binary, [0.0, 1.0]), 5)
for t, w in enumerate(prof1.witnesses, start=1):
    print(f"  n={t}: witness {''.join(map(str, w))}, c_n = {prof1.c[t - 1]:.6f}")

print("\n=== the floor over a fine grid of i.i.d. sources ===")
grid = np.linspace(0, 1, 101)
worst = np.full(n, np.inf)
for p in grid:
    prof = dominance_profile_exact(pred, make_bernoulli(binary, [1 - p, p]), n)
    worst = np.minimum(worst, prof.c)
gap = np.min(worst - floor)
print(f"min over the grid of (c_n - floor_n): {gap:.2e}  (never below the floor)")

print("\n=== ternary check: the same factorial floor, no longer tight ===")
ternary = Alphabet(3)
pred3 = laplace(ternary)
prof3 = dominance_profile_exact(pred3, make_bernoulli(ternary, [0, 0, 1]), 6)
floor3 = np.array([laplace_bound(t, 3) for t in range(1, 7)])
print("c_n / floor_n for the deterministic ternary source:", prof3.c / floor3)
