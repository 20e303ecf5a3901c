"""Bayesian mixtures, the stationary-memory mixture, and decay classification.

A finite Bayesian mixture dominates each component with its weight as a
constant, and a mixture of per-context add-one estimators of memory
0..k_max predicts finite-memory sources with shrinking average KL.  The
decay classifier sorts dominance-coefficient profiles into qualitative
growth classes.  Run: python demos/05_mixtures_and_decay_classes.py
"""
import math

import numpy as np

from seqpred import (
    Alphabet,
    bayes_mixture,
    classify_decay,
    dominance_profile_exact,
    expected_average_mc,
    laplace,
    make_bernoulli,
    make_markov,
    marginal_log,
    memory_mixture,
)
from seqpred.dominance import DominanceProfile

binary = Alphabet(2)

print("=== mixtures dominate their components by their weights ===")
components = [make_bernoulli(binary, [0.5, 0.5]), laplace(binary)]
weights = [0.6, 0.4]
mix = bayes_mixture(components, weights)
prof = dominance_profile_exact(mix, components[0], 12)
print("c_n of mixture vs its weight-0.6 component:", np.round(prof.c, 4))
print("never below 0.6:", bool(np.all(prof.c >= 0.6 - 1e-12)))

print("\n=== posterior collapse ===")
two = bayes_mixture([make_bernoulli(binary, [0.95, 0.05]), make_bernoulli(binary, [0.05, 0.95])])
for hist in ([], [1], [1, 1, 1, 1]):
    print(f"  P(next=1 | {hist}): {two.conditional(hist)[1]:.4f}")

print("\n=== memory mixture vs an order-1 Markov source ===")
src = make_markov(binary, 1, {(0,): [0.85, 0.15], (1,): [0.3, 0.7]}, [0.5, 0.5])
pred = memory_mixture(binary, k_max=8)
for n in (10, 100, 1000):
    est = expected_average_mc("kl", src, pred, n, paths=300, seed=1)
    print(f"  E[avg KL] at n={n:4d}: {est.estimate:.5f} +- {est.stderr:.5f}")

print("\n=== decay classification of dominance profiles ===")
n = np.arange(1, 257, dtype=float)
cases = {
    "c_n = 1/(n+1)          ": 1.0 / (n + 1),
    "c_n = exp(-sqrt n/log n)": np.exp(-np.sqrt(n) / np.log(np.maximum(n, 2.0))),
    "c_n = 2^-n             ": 2.0**-n,
    "c_n -> 0.2 (bounded)   ": 0.2 + 0.3 / n,
    "c_n = exp(-n^0.8)      ": np.exp(-(n**0.8)),
}
for label, c in cases.items():
    result = classify_decay(DominanceProfile(c=c, source="exact"))
    alpha = result.diagnostics.get("alpha_hat")
    extra = f" (fitted growth exponent {alpha:.2f})" if alpha is not None else ""
    print(f"  {label} -> {result.label.value}{extra}")
