"""Build measures on infinite binary sequences and evaluate their marginals.

A measure is just a rule mapping each finite history to a next-symbol
distribution.  Marginals of finite strings are products of conditionals,
kept in log domain.  Run: python demos/01_measures_and_sampling.py
"""
import math

import numpy as np

from seqpred import (
    Alphabet,
    make_bernoulli,
    make_markov,
    make_point_mass,
    make_schedule_measure,
    marginal_log,
    sample_path,
)

binary = Alphabet(2)

print("=== i.i.d. measures ===")
coin = make_bernoulli(binary, [0.5, 0.5])
print("fair coin, P(111) =", math.exp(marginal_log(coin, [1, 1, 1])), "(expect 1/8)")

biased = make_bernoulli(binary, [2 / 3, 1 / 3])
print("P(symbol 1) = 1/3, P(11) =", math.exp(marginal_log(biased, [1, 1])), "(expect 1/9)")

print("\n=== point mass on the all-ones sequence ===")
ones = make_point_mass(binary, 1)
print("log P(1^20) =", marginal_log(ones, [1] * 20), "(certain)")
print("log P(101)  =", marginal_log(ones, [1, 0, 1]), "(impossible)")

print("\n=== order-1 Markov chain ===")
chain = make_markov(binary, 1, {(0,): [0.9, 0.1], (1,): [0.1, 0.9]}, [0.5, 0.5])
print("sticky chain, P(11) =", math.exp(marginal_log(chain, [1, 1])), "(expect 0.45)")
x = sample_path(chain, seed=1, n=40)
print("sampled path:", "".join(map(str, x)))

print("\n=== schedule measure: all-ones, except a coin flip on steps 2, 4, 8 ===")
spoiled = make_schedule_measure(binary, [0.0, 1.0], {s: [0.5, 0.5] for s in (2, 4, 8)})
for n in (1, 2, 4, 8, 16):
    print(f"  P(1^{n}) = {math.exp(marginal_log(spoiled, [1] * n)):.4f}")

print("\n=== sampling is deterministic in (seed, stream) ===")
a = sample_path(coin, seed=7, n=12)
b = sample_path(coin, seed=7, n=12)
c = sample_path(coin, seed=7, n=12, stream=1)
print("seed 7, stream 0:", a, "(twice:", np.array_equal(a, b), ")")
print("seed 7, stream 1:", c)
freq = sample_path(coin, seed=7, n=100_000).mean()
print(f"empirical frequency of 1 over 1e5 steps: {freq:.4f} (expect ~0.5)")
