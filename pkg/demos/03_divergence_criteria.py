"""Divergence criteria between a source and a predictor, four ways.

Per-step KL and absolute distance, their running averages along a path,
exact expectations by tree enumeration, Monte Carlo estimates, and the
finite-horizon total-variation lower bound.
Run: python demos/03_divergence_criteria.py
"""
import math

import numpy as np

from seqpred import (
    Alphabet,
    expected_average_exact_series,
    expected_average_mc,
    expected_log_ratio_series,
    laplace,
    make_bernoulli,
    make_point_mass,
    path_series,
    pinsker_audit,
    sample_path,
    step_divergence,
    tv_finite_horizon,
)

binary = Alphabet(2)

print("=== one step: distributions (1,0) vs (1/2,1/2) ===")
for kind in ("kl", "abs", "sq", "hellinger"):
    print(f"  {kind:>9}: {step_divergence(kind, [1, 0], [0.5, 0.5]):.6f}")
print("  (KL = log 2; disjoint supports give KL = inf, abs = 2)")

print("\n=== a path: fair-coin source vs add-one predictor ===")
mu = make_bernoulli(binary, [0.5, 0.5])
pred = laplace(binary)
x = sample_path(mu, seed=3, n=2000)
d = path_series("kl", mu, pred, x)
a = path_series("abs", mu, pred, x)
for t in (1, 10, 100, 1000, 2000):
    print(f"  n={t:5d}: avg KL = {d.running_average[t - 1]:.5f}   avg abs = {a.running_average[t - 1]:.5f}")
verdict = pinsker_audit(d, a)
print("pinsker audit (abar^2 <= 2 dbar at every n):", "OK" if verdict.ok else verdict.first_violation)

print("\n=== exact expectation by enumeration, and its chain-rule twin ===")
n = 12
ed = expected_average_exact_series("kl", mu, pred, n)
lr = expected_log_ratio_series(mu, pred, n) / np.arange(1, n + 1)
print(f"E[avg KL] at n={n}: per-step route {ed[-1]:.8f}, log-ratio route {lr[-1]:.8f}")
print(f"bound log(n+1)/n = {math.log(n + 1) / n:.8f}")

print("\n=== Monte Carlo agrees with the exact value ===")
est = expected_average_mc("kl", mu, pred, n, paths=4000, seed=5)
print(f"MC estimate {est.estimate:.6f} +- {est.stderr:.6f} vs exact {ed[-1]:.6f}")

print("\n=== finite-horizon total variation ===")
ones = make_point_mass(binary, 1)
for depth in (1, 2, 4, 8):
    tv = tv_finite_horizon(ones, mu, [], depth)
    print(f"  depth {depth}: TV lower bound = {tv:.6f} (closed form 1 - 2^-h = {1 - 2.0 ** -depth:.6f})")
