"""Ready-made measure tuples showing where per-step prediction breaks down.

Three constructions, each a pair or triple of measures over the binary
alphabet with closed-form marginals exposed as oracle functions so tests
can cross-check the generic chain-rule evaluation against independent
arithmetic:

* ``nodom_pair``: a predictor that dominates a point mass with slowly
  decaying coefficients yet keeps missing by a fixed margin on a sparse
  step schedule.
* ``nosumad_triple``: a predictor that tracks the all-ones point mass
  beautifully, plus a contaminant that outpredicts it off-schedule and is
  grossly wrong on a doubly exponential schedule, dragging the mixed
  conditional to zero there.
* ``nosumavad_triple``: a fair-coin source, a predictor that is exact off
  a sparse schedule but bets everything on 0 at scheduled steps (so its
  marginal almost surely dies), and a Bernoulli(1/3) contaminant that the
  mixture collapses onto afterwards.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .measures import (
    Alphabet,
    Measure,
    ProductMeasure,
    make_bernoulli,
    make_point_mass,
    make_schedule_measure,
)

__all__ = [
    "ScheduleRule",
    "SparseSchedule",
    "DenseScheduleError",
    "nodom_pair",
    "nodom_rho_ones_marginal",
    "nosumad_triple",
    "nosumad_rho_ones_marginal",
    "nosumad_chi_ones_marginal",
    "nosumad_contaminated_cond_ones",
    "nosumavad_triple",
]

BINARY = Alphabet(2)


class ScheduleRule(Enum):
    POW2 = "pow2"
    DOUBLE_EXP = "double_exp"
    CUBIC = "cubic"
    CUSTOM = "custom"


class DenseScheduleError(ValueError):
    """The step schedule is too dense for the construction to work."""


@dataclass(frozen=True)
class SparseSchedule:
    """Strictly increasing step set materialized up to some horizon."""

    rule: ScheduleRule
    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("schedule has no steps; increase the horizon")
        prev = 1
        for s in self.steps:
            if s <= prev:
                raise ValueError(f"steps must be strictly increasing and >= 2, got {self.steps}")
            prev = s

    @classmethod
    def pow2(cls, horizon: int) -> "SparseSchedule":
        """Steps 2, 4, 8, ... up to ``horizon``."""
        steps = []
        s = 2
        while s <= horizon:
            steps.append(s)
            s *= 2
        return cls(ScheduleRule.POW2, tuple(steps))

    @classmethod
    def double_exp(cls, horizon: int) -> "SparseSchedule":
        """Steps 4, 16, 256, 65536, ...: each the square of the previous."""
        steps = []
        s = 4
        while s <= horizon:
            steps.append(s)
            s *= s
        return cls(ScheduleRule.DOUBLE_EXP, tuple(steps))

    @classmethod
    def cubic(cls, horizon: int) -> "SparseSchedule":
        """Steps k^3 for k >= 2 up to ``horizon`` (k=1 would fall below 2)."""
        steps = []
        k = 2
        while k**3 <= horizon:
            steps.append(k**3)
            k += 1
        return cls(ScheduleRule.CUBIC, tuple(steps))

    @classmethod
    def custom(cls, steps: Iterable[int]) -> "SparseSchedule":
        return cls(ScheduleRule.CUSTOM, tuple(int(s) for s in steps))

    def count_upto(self, n: int) -> int:
        """Number of scheduled steps <= n."""
        return bisect_right(self.steps, n)

    @property
    def horizon(self) -> int:
        return self.steps[-1]


def _require_vanishing_density(schedule: SparseSchedule) -> None:
    # Heuristic: the scheduled-step density over the materialized horizon
    # must drop from the first half to the whole range.
    steps = schedule.steps
    n = steps[-1]
    if len(steps) < 4:
        return  # too few steps to judge; any sane horizon makes them sparse
    d_full = len(steps) / n
    half = max(n // 2, 2)
    d_half = schedule.count_upto(half) / half
    if d_half <= 0.0 or d_full > 0.75 * d_half or d_full > 0.2:
        raise DenseScheduleError(
            f"schedule density does not vanish over the materialized horizon: "
            f"{d_full:.4g} at n={n} vs {d_half:.4g} at n={half}"
        )


# ---------------------------------------------------------------------------
# Dominance without per-step prediction
# ---------------------------------------------------------------------------

def nodom_pair(schedule: SparseSchedule) -> tuple[Measure, Measure]:
    """Point mass on all-ones vs. an all-ones predictor spoiled to a coin flip
    on the scheduled steps.

    The predictor's marginal of ``1^n`` is ``2**-count(steps <= n)``, so the
    dominance coefficients decay as slowly as the schedule is sparse, yet the
    per-step divergence at every scheduled step is log 2 (absolute distance 1).
    """
    mu = make_point_mass(BINARY, 1)
    rho = make_schedule_measure(
        BINARY,
        np.array([0.0, 1.0]),
        {s: np.array([0.5, 0.5]) for s in schedule.steps},
    )
    return mu, rho


def nodom_rho_ones_marginal(n: int, schedule: SparseSchedule) -> float:
    """Closed form: rho(1^n) = 2**-(number of scheduled steps <= n)."""
    return 0.5 ** schedule.count_upto(n)


# ---------------------------------------------------------------------------
# Contamination killing per-step prediction
# ---------------------------------------------------------------------------

DOUBLE_EXP_ANCHOR = 2  # n_0: each scheduled step is the square of its predecessor


def nosumad_triple(horizon: int = 100_000) -> tuple[Measure, Measure, Measure]:
    """All-ones point mass, the n/(n+1) predictor, and an adversarial contaminant.

    ``rho(x_n = 1) = n / (n + 1)`` independently per step, so
    ``rho(1^n) = 1/(n+1)``.  ``chi`` emits 1 surely except on the doubly
    exponential schedule 4, 16, 256, ... where ``chi(x_{n_k} = 1)`` equals
    ``n_{k-1} / n_k``, telescoping to ``chi(1^{n_k}) = 2 / n_k``.
    """
    schedule = SparseSchedule.double_exp(horizon)
    mu = make_point_mass(BINARY, 1)
    rho = ProductMeasure(BINARY, lambda t: np.array([1.0 / (t + 1.0), t / (t + 1.0)]))
    spoiled = {}
    prev = DOUBLE_EXP_ANCHOR
    for s in schedule.steps:
        p_one = prev / s
        spoiled[s] = np.array([1.0 - p_one, p_one])
        prev = s
    chi = make_schedule_measure(BINARY, np.array([0.0, 1.0]), spoiled)
    return mu, rho, chi


def nosumad_rho_ones_marginal(n: int) -> float:
    """Closed form: rho(1^n) = 1/(n+1)."""
    return 1.0 / (n + 1.0)


def nosumad_chi_ones_marginal(n: int) -> float:
    """Closed form: chi(1^n) = 2 / (largest scheduled step <= n), or 1 below 4."""
    last = None
    s = 4
    while s <= n:
        last = s
        s *= s
    return 1.0 if last is None else DOUBLE_EXP_ANCHOR / last


def nosumad_contaminated_cond_ones(n: int) -> float:
    """Closed form for (rho + chi)/2 conditional of a 1 at step n on all-ones.

    The halves cancel in the marginal ratio:
    ``(rho(1^n) + chi(1^n)) / (rho(1^{n-1}) + chi(1^{n-1}))``.
    """
    num = nosumad_rho_ones_marginal(n) + nosumad_chi_ones_marginal(n)
    den = nosumad_rho_ones_marginal(n - 1) + nosumad_chi_ones_marginal(n - 1)
    return num / den


# ---------------------------------------------------------------------------
# Contamination killing average absolute distance
# ---------------------------------------------------------------------------

def nosumavad_triple(schedule: SparseSchedule) -> tuple[Measure, Measure, Measure]:
    """Fair coin, a predictor that dies on the schedule, and a Bernoulli(1/3).

    Off schedule ``rho`` equals the source; at scheduled steps it puts all
    mass on 0, so after the source's first scheduled 1 (almost sure, and
    quickly) ``rho``'s marginal is zero and the mixture ``(rho + chi)/2``
    predicts with ``chi``'s conditionals, a fixed absolute distance of 1/3
    per step.  Rejects schedules whose step density does not vanish.
    """
    _require_vanishing_density(schedule)
    mu = make_bernoulli(BINARY, np.array([0.5, 0.5]))
    rho = make_schedule_measure(
        BINARY,
        np.array([0.5, 0.5]),
        {s: np.array([1.0, 0.0]) for s in schedule.steps},
    )
    chi = make_bernoulli(BINARY, np.array([2.0 / 3.0, 1.0 / 3.0]))
    return mu, rho, chi
