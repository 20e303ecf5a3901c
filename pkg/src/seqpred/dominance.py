"""Dominance coefficients between a predictor and a true measure.

A predictor ``rho`` dominates ``mu`` with coefficients ``c_n > 0`` when
``rho(x_{1:n}) >= c_n * mu(x_{1:n})`` for every length-``n`` string.  The
exact profile takes ``c_n`` to be the minimum marginal ratio over all
mu-positive strings of length ``n``, which is always in (0, 1]; sampled
profiles minimize over sampled paths only and therefore merely upper-bound
the true coefficient.

Decay classification is a regression heuristic over ``log(1/c_n)``; the
underlying conditions are asymptotic and undecidable from finite data, so
UNKNOWN is an acceptable answer and diagnostics are always attached.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .divergences import DEFAULT_BUDGET_LEAVES, _check_budget
from .measures import Measure, sample_path

__all__ = [
    "DecayClass",
    "DominanceProfile",
    "DecayClassification",
    "NotDominatingError",
    "dominance_profile_exact",
    "dominance_profile_sampled",
    "laplace_bound",
    "laplace_bound_log",
    "classify_decay",
]

MIN_CLASSIFY_LENGTH = 16


class DecayClass(Enum):
    BOUNDED_BELOW = "bounded_below"
    SQUARE_SUMMABLE = "square_summable"
    SUBEXPONENTIAL = "subexponential"
    EXPONENTIAL_OR_WORSE = "exponential_or_worse"
    UNKNOWN = "unknown"


class NotDominatingError(ValueError):
    """``rho`` assigns probability zero to a ``mu``-positive string."""

    def __init__(self, witness: tuple[int, ...]):
        self.witness = witness
        super().__init__(
            f"predictor assigns zero probability to the mu-positive string {witness} "
            f"(length {len(witness)}); no positive dominance coefficient exists"
        )


@dataclass(frozen=True)
class DominanceProfile:
    """Coefficients ``c[n-1] = c_n`` for n = 1..len(c), with their provenance.

    ``source`` is ``"exact"`` (true minimum over all strings, a certificate)
    or ``"sampled"`` (minimum over sampled paths, an upper bound only).
    ``witnesses[n-1]`` is a string attaining ``c_n`` when tracked.
    """

    c: np.ndarray
    source: str
    decay_class: DecayClass = DecayClass.UNKNOWN
    witnesses: tuple[tuple[int, ...], ...] | None = None

    @property
    def horizon(self) -> int:
        return len(self.c)


def dominance_profile_exact(
    rho: Measure,
    mu: Measure,
    n_max: int,
    budget_leaves: int = DEFAULT_BUDGET_LEAVES,
) -> DominanceProfile:
    """Exact ``c_n = min over mu-positive x of rho(x)/mu(x)`` for n = 1..n_max.

    Enumerates the history tree once, pruning mu-null branches.  Raises
    :class:`NotDominatingError` (naming the witness string) as soon as some
    ratio is zero.
    """
    if mu.alphabet != rho.alphabet:
        raise ValueError("measures must share an alphabet")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    size = mu.alphabet.size
    _check_budget(size, n_max, budget_leaves)

    best = np.full(n_max, math.inf)
    witness: list[tuple[int, ...] | None] = [None] * n_max

    # Stack entries: (depth, log mu, log rho, path, mu cursor, rho cursor).
    stack = [(0, 0.0, 0.0, (), mu.cursor(), rho.cursor())]
    while stack:
        t, lmu, lrho, path, cmu, crho = stack.pop()
        mu_c = cmu.cond()
        rho_c = crho.cond()
        positive = [a for a in range(size) if mu_c[a] > 0.0]
        for j, a in enumerate(positive):
            q = float(rho_c[a])
            child_path = path + (a,)
            if q <= 0.0:
                raise NotDominatingError(child_path)
            lmu2 = lmu + math.log(float(mu_c[a]))
            lrho2 = lrho + math.log(q)
            ratio = lrho2 - lmu2
            if ratio < best[t]:
                best[t] = ratio
                witness[t] = child_path
            if t + 1 < n_max:
                if j + 1 < len(positive):
                    bmu, brho = cmu.branch(), crho.branch()
                else:
                    bmu, brho = cmu, crho
                bmu.advance(a)
                brho.advance(a)
                stack.append((t + 1, lmu2, lrho2, child_path, bmu, brho))

    return DominanceProfile(
        c=np.exp(best),
        source="exact",
        witnesses=tuple(w for w in witness),  # type: ignore[arg-type]
    )


def dominance_profile_sampled(
    rho: Measure,
    mu: Measure,
    n_max: int,
    paths: int,
    seed: int,
) -> DominanceProfile:
    """Path-sampled ratio minima: an upper bound on ``c_n``, not a certificate."""
    if mu.alphabet != rho.alphabet:
        raise ValueError("measures must share an alphabet")
    if n_max < 1 or paths < 1:
        raise ValueError("n_max and paths must be >= 1")
    best = np.full(n_max, math.inf)
    for i in range(paths):
        x = sample_path(mu, seed, n_max, stream=i)
        cmu = mu.cursor()
        crho = rho.cursor()
        lmu = 0.0
        lrho = 0.0
        for t in range(n_max):
            s = int(x[t])
            p = float(cmu.cond()[s])
            q = float(crho.cond()[s])
            if q <= 0.0:
                raise NotDominatingError(tuple(int(v) for v in x[: t + 1]))
            lmu += math.log(p)
            lrho += math.log(q)
            ratio = lrho - lmu
            if ratio < best[t]:
                best[t] = ratio
            cmu.advance(s)
            crho.advance(s)
    return DominanceProfile(c=np.exp(best), source="sampled")


def laplace_bound_log(n: int, alphabet_size: int) -> float:
    """log of n! / (n + size - 1)!, the add-one estimator's i.i.d. floor."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if alphabet_size < 2:
        raise ValueError(f"alphabet size must be >= 2, got {alphabet_size}")
    return -sum(math.log(n + j) for j in range(1, alphabet_size))


def laplace_bound(n: int, alphabet_size: int) -> float:
    """n! / (n + size - 1)! evaluated via log domain."""
    return math.exp(laplace_bound_log(n, alphabet_size))


# ---------------------------------------------------------------------------
# Decay classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayClassification:
    """Heuristic decay label for a dominance profile, with fit diagnostics."""

    label: DecayClass
    diagnostics: dict


def _least_squares_slope(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Slope and R^2 of the one-variable least squares fit."""
    xm = xs.mean()
    ym = ys.mean()
    sxx = float(((xs - xm) ** 2).sum())
    if sxx == 0.0:
        return 0.0, 0.0
    slope = float(((xs - xm) * (ys - ym)).sum()) / sxx
    resid = ys - (ym + slope * (xs - xm))
    syy = float(((ys - ym) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / syy if syy > 0 else 1.0
    return slope, r2


def classify_decay(profile: DominanceProfile) -> DecayClassification:
    """Classify the growth of ``log(1/c_n)`` by tail regressions.

    A flat tail means the coefficients are bounded below; a fitted power
    growth ``n^alpha`` with ``alpha`` clearly below 1/2 is sufficient for the
    square-summability condition; near-linear growth signals exponential or
    worse decay.  The call answers UNKNOWN when the fits are inconclusive.
    Only profiles of length >= 16 are accepted.
    """
    n_max = profile.horizon
    if n_max < MIN_CLASSIFY_LENGTH:
        raise ValueError(f"profile too short to classify: {n_max} < {MIN_CLASSIFY_LENGTH}")
    c = np.asarray(profile.c, dtype=float)
    if np.any(c <= 0.0):
        raise ValueError("profile contains non-positive coefficients")
    y = -np.log(np.minimum(c, 1.0))  # log c_n^{-1}, clipped below at 0
    n = np.arange(1, n_max + 1, dtype=float)

    tail = slice(n_max // 4, n_max)
    yt = y[tail]
    nt = n[tail]
    tail_growth = float(y[-1] - y[n_max // 2])
    diagnostics: dict = {
        "tail_start": int(n_max // 4 + 1),
        "tail_growth": tail_growth,
        "y_last": float(y[-1]),
    }

    # Plateau: negligible growth over the last half (shift-invariant test).
    if tail_growth <= 0.05 and float(y[-1] - y[n_max // 4]) <= 0.1:
        diagnostics["rule"] = "plateau"
        return DecayClassification(DecayClass.BOUNDED_BELOW, diagnostics)

    lin_slope, lin_r2 = _least_squares_slope(nt, yt)
    diagnostics["linear_slope"] = lin_slope
    diagnostics["linear_r2"] = lin_r2

    pos = yt > 1e-12
    if pos.sum() < 8:
        diagnostics["rule"] = "too_few_positive_points"
        return DecayClassification(DecayClass.UNKNOWN, diagnostics)
    alpha, pow_r2 = _least_squares_slope(np.log(nt[pos]), np.log(yt[pos]))
    diagnostics["alpha_hat"] = alpha
    diagnostics["power_r2"] = pow_r2

    if pow_r2 < 0.5:
        diagnostics["rule"] = "poor_fit"
        return DecayClassification(DecayClass.UNKNOWN, diagnostics)
    if alpha >= 0.97:
        diagnostics["rule"] = "alpha~1"
        return DecayClassification(DecayClass.EXPONENTIAL_OR_WORSE, diagnostics)
    if alpha < 0.47:
        diagnostics["rule"] = "alpha<1/2"
        return DecayClassification(DecayClass.SQUARE_SUMMABLE, diagnostics)
    if alpha <= 0.53:
        diagnostics["rule"] = "alpha~1/2"
        return DecayClassification(DecayClass.UNKNOWN, diagnostics)
    diagnostics["rule"] = "1/2<alpha<1"
    return DecayClassification(DecayClass.SUBEXPONENTIAL, diagnostics)
