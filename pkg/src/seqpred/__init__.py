"""seqpred: measures on infinite sequences, predictors, divergences, dominance.

The library splits into small layers:

* :mod:`seqpred.measures` -- alphabets, conditional-probability processes,
  log-domain marginals, deterministic sampling.
* :mod:`seqpred.predictors` -- add-one estimators, Bayesian mixtures,
  contamination.
* :mod:`seqpred.divergences` -- per-step/average/expected divergences,
  exact enumeration, Monte Carlo, finite-horizon total variation.
* :mod:`seqpred.dominance` -- dominance coefficient profiles and decay
  classification.
* :mod:`seqpred.counterexamples` -- ready-made measure tuples where
  per-step prediction fails.
* :mod:`seqpred.harness` -- reproducible experiment runner, verification
  suites, sweeps, and conjecture probes (CLI in :mod:`seqpred.cli`).
"""
from .measures import (
    NEG_INF,
    Alphabet,
    Measure,
    ZeroProbabilityHistoryError,
    make_bernoulli,
    make_markov,
    make_point_mass,
    make_schedule_measure,
    marginal_log,
    sample_path,
)
from .predictors import bayes_mixture, contaminate, laplace, markov_laplace, memory_mixture
from .divergences import (
    DivergenceKind,
    DivergenceSeries,
    BudgetExceededError,
    McEstimate,
    expected_average_exact,
    expected_average_exact_series,
    expected_average_mc,
    expected_average_mc_horizons,
    expected_log_ratio_series,
    path_series,
    pinsker_audit,
    step_divergence,
    tv_finite_horizon,
)
from .dominance import (
    DecayClass,
    DominanceProfile,
    NotDominatingError,
    classify_decay,
    dominance_profile_exact,
    dominance_profile_sampled,
    laplace_bound,
)
from .counterexamples import (
    SparseSchedule,
    nodom_pair,
    nosumad_triple,
    nosumavad_triple,
)

__version__ = "0.1.0"

__all__ = [
    "NEG_INF",
    "Alphabet",
    "Measure",
    "ZeroProbabilityHistoryError",
    "make_bernoulli",
    "make_markov",
    "make_point_mass",
    "make_schedule_measure",
    "marginal_log",
    "sample_path",
    "bayes_mixture",
    "contaminate",
    "laplace",
    "markov_laplace",
    "memory_mixture",
    "DivergenceKind",
    "DivergenceSeries",
    "BudgetExceededError",
    "McEstimate",
    "expected_average_exact",
    "expected_average_exact_series",
    "expected_average_mc",
    "expected_average_mc_horizons",
    "expected_log_ratio_series",
    "path_series",
    "pinsker_audit",
    "step_divergence",
    "tv_finite_horizon",
    "DecayClass",
    "DominanceProfile",
    "NotDominatingError",
    "classify_decay",
    "dominance_profile_exact",
    "dominance_profile_sampled",
    "laplace_bound",
    "SparseSchedule",
    "nodom_pair",
    "nosumad_triple",
    "nosumavad_triple",
    "__version__",
]
