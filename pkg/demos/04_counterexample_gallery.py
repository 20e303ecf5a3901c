"""Three constructions where per-step prediction fails while averages behave.

Gallery:
1. Slowly decaying dominance without per-step convergence: the predictor
   flips a coin on sparse scheduled steps and is perfect elsewhere.
2. A contaminant that kills per-step prediction: mixing in a measure that
   is better almost everywhere but grossly wrong on a doubly exponential
   schedule drags scheduled conditionals to zero.
3. A contaminant that kills even the average: once the predictor's
   marginal dies (almost surely), the mix locks onto the contaminant.

Run: python demos/04_counterexample_gallery.py
"""
import math

from seqpred import (
    SparseSchedule,
    contaminate,
    expected_average_mc,
    marginal_log,
    nodom_pair,
    nosumad_triple,
    nosumavad_triple,
    path_series,
    sample_path,
)
from seqpred.counterexamples import nosumad_contaminated_cond_ones

print("=== 1. spikes that never die, averages that do ===")
schedule = SparseSchedule.pow2(1024)
mu, rho = nodom_pair(schedule)
d = path_series("kl", mu, rho, [1] * 1024)
spikes = [t + 1 for t in range(1024) if d.per_step[t] > 0]
print("scheduled steps:", spikes)
print(f"every spike equals log 2 = {math.log(2):.6f}; max per-step value never shrinks")
print(f"yet the running average at n=1024 is only {d.running_average[-1]:.6f}")

print("\n=== 2. contamination vs the n/(n+1) predictor on the all-ones source ===")
mu, rho, chi = nosumad_triple(70000)
mixed = contaminate(rho, chi)
print("predictor alone: P(next=1 | 1^15) =", f"{math.exp(marginal_log(rho, [1] * 16) - marginal_log(rho, [1] * 15)):.4f}")
print("contaminated conditional of a 1 on the schedule (should be ~1, collapses):")
for n in (4, 16, 256, 65536):
    print(f"  n={n:6d}: {nosumad_contaminated_cond_ones(n):.6f}")

print("\n=== 3. contamination that ruins the average absolute distance ===")
schedule = SparseSchedule.cubic(10_000)
mu, rho, chi = nosumavad_triple(schedule)
mixed = contaminate(rho, chi)
est_rho = expected_average_mc("abs", mu, rho, 10_000, paths=100, seed=0)
est_mix = expected_average_mc("abs", mu, mixed, 10_000, paths=100, seed=0)
print(f"avg abs distance of rho alone:    {est_rho.estimate:.4f} (tiny: spikes are sparse)")
print(f"avg abs distance contaminated:    {est_mix.estimate:.4f} (locked near 1/3)")
x = sample_path(mu, seed=0, n=30)
death = next((s for s in schedule.steps if s <= 30 and x[s - 1] == 1), None)
print("first scheduled step where the sampled path kills rho:", death)
