"""Predictor constructions: add-one estimators, Bayesian mixtures, contamination.

The add-one (Laplace) estimator and its per-context finite-memory variant
are the workhorses; Bayesian mixtures combine arbitrary finite component
lists, and contamination is the two-component special case that mixes a
predictor with an arbitrary other measure.

Mixture conditionals are always derived from marginal ratios in log domain
(equivalently, posterior-weighted component conditionals); averaging
component conditionals with the prior weights would be wrong.
"""
from __future__ import annotations

import math
from typing import Hashable, Sequence

import numpy as np

from .measures import (
    NEG_INF,
    Alphabet,
    Measure,
    MeasureCursor,
    ZeroProbabilityHistoryError,
)

__all__ = [
    "LaplaceMeasure",
    "MarkovLaplaceMeasure",
    "MixtureMeasure",
    "laplace",
    "markov_laplace",
    "bayes_mixture",
    "memory_mixture",
    "contaminate",
    "default_mixture_weights",
]

WEIGHT_ATOL = 1e-12


# ---------------------------------------------------------------------------
# Add-one estimators
# ---------------------------------------------------------------------------

class LaplaceMeasure(Measure):
    """Add-one estimator: P(a | x_{1:n}) = (count(a) + 1) / (n + size)."""

    __slots__ = ()

    def cursor(self) -> MeasureCursor:
        return _LaplaceCursor(self.alphabet.size)


class _LaplaceCursor(MeasureCursor):
    __slots__ = ("_counts", "_total", "_size")

    def __init__(self, size: int, counts: np.ndarray | None = None, total: int = 0):
        self._size = size
        self._counts = np.zeros(size, dtype=np.int64) if counts is None else counts
        self._total = total

    def cond(self) -> np.ndarray:
        return (self._counts + 1.0) / (self._total + self._size)

    def advance(self, symbol: int) -> None:
        self._counts[symbol] += 1
        self._total += 1

    def branch(self) -> "_LaplaceCursor":
        return _LaplaceCursor(self._size, self._counts.copy(), self._total)

    def key(self) -> Hashable:
        return self._counts.tobytes()


def laplace(alphabet: Alphabet) -> LaplaceMeasure:
    """The add-one predictor over ``alphabet``."""
    return LaplaceMeasure(alphabet)


class MarkovLaplaceMeasure(Measure):
    """Per-context add-one estimator with memory ``order``.

    Counts are kept separately for each length-``order`` context, and the
    add-one rule is applied within the context of the last ``order``
    symbols.  The first ``order`` positions, where no full context exists,
    fall back to the order-0 rule over the whole history so the measure is
    normalized from step 1.
    """

    __slots__ = ("_order",)

    def __init__(self, alphabet: Alphabet, order: int):
        super().__init__(alphabet)
        if order < 0:
            raise ValueError(f"order must be >= 0, got {order}")
        self._order = int(order)

    @property
    def order(self) -> int:
        return self._order

    def cursor(self) -> MeasureCursor:
        return _MarkovLaplaceCursor(self.alphabet.size, self._order)


class _MarkovLaplaceCursor(MeasureCursor):
    __slots__ = ("_size", "_order", "_pos", "_ctx", "_ctx_mod", "_head", "_counts", "_totals")

    def __init__(self, size: int, order: int):
        self._size = size
        self._order = order
        self._pos = 0
        self._ctx = 0
        self._ctx_mod = size ** max(order - 1, 0)
        self._head = np.zeros(size, dtype=np.int64)
        self._counts = np.zeros((size**order, size), dtype=np.int64)
        self._totals = np.zeros(size**order, dtype=np.int64)

    def cond(self) -> np.ndarray:
        if self._pos < self._order:
            return (self._head + 1.0) / (self._pos + self._size)
        c = self._counts[self._ctx]
        return (c + 1.0) / (self._totals[self._ctx] + self._size)

    def advance(self, symbol: int) -> None:
        if self._pos < self._order:
            self._head[symbol] += 1
            self._ctx = self._ctx * self._size + symbol
        else:
            self._counts[self._ctx, symbol] += 1
            self._totals[self._ctx] += 1
            if self._order:
                self._ctx = (self._ctx % self._ctx_mod) * self._size + symbol
        self._pos += 1

    def branch(self) -> "_MarkovLaplaceCursor":
        out = _MarkovLaplaceCursor.__new__(_MarkovLaplaceCursor)
        out._size = self._size
        out._order = self._order
        out._pos = self._pos
        out._ctx = self._ctx
        out._ctx_mod = self._ctx_mod
        out._head = self._head.copy()
        out._counts = self._counts.copy()
        out._totals = self._totals.copy()
        return out

    def key(self) -> Hashable:
        if self._pos < self._order:
            return ("head", self._head.tobytes())
        return (self._ctx, self._counts[self._ctx].tobytes())


def markov_laplace(alphabet: Alphabet, order: int) -> MarkovLaplaceMeasure:
    """Add-one estimator conditioned on the preceding ``order`` symbols."""
    return MarkovLaplaceMeasure(alphabet, order)


# ---------------------------------------------------------------------------
# Bayesian mixtures
# ---------------------------------------------------------------------------

class MixtureMeasure(Measure):
    """Finite Bayesian mixture: marginal is the weighted sum of component marginals.

    Conditionals are posterior-weighted averages of component conditionals,
    which is exactly the ratio of consecutive mixture marginals.  Components
    whose marginal hits zero drop out of the posterior for good.
    """

    __slots__ = ("_components", "_log_weights", "_weights")

    def __init__(self, components: Sequence[Measure], weights: Sequence[float], normalize: bool = True):
        if not components:
            raise ValueError("mixture needs at least one component")
        alphabet = components[0].alphabet
        for c in components[1:]:
            if c.alphabet != alphabet:
                raise ValueError("mixture components must share one alphabet")
        super().__init__(alphabet)
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(components),):
            raise ValueError(f"need {len(components)} weights, got shape {w.shape}")
        if np.any(w <= 0.0):
            raise ValueError("mixture weights must be strictly positive")
        total = float(w.sum())
        if normalize:
            w = w / total
        elif abs(total - 1.0) > WEIGHT_ATOL:
            raise ValueError(f"weights must sum to 1 when normalize=False, got {total!r}")
        self._components = tuple(components)
        self._weights = w
        self._log_weights = np.log(w)

    @property
    def components(self) -> tuple[Measure, ...]:
        return self._components

    @property
    def weights(self) -> np.ndarray:
        return self._weights.copy()

    def cursor(self) -> MeasureCursor:
        return _MixtureCursor(self)


class _MixtureCursor(MeasureCursor):
    __slots__ = ("_cursors", "_logpost", "_pending", "_size")

    def __init__(self, measure: MixtureMeasure):
        self._cursors = [c.cursor() for c in measure._components]
        self._logpost = measure._log_weights.copy()
        self._pending: list[np.ndarray | None] | None = None
        self._size = measure.alphabet.size

    def _component_conds(self) -> list[np.ndarray | None]:
        if self._pending is None:
            self._pending = [
                cur.cond() if self._logpost[i] > NEG_INF else None
                for i, cur in enumerate(self._cursors)
            ]
        return self._pending

    def cond(self) -> np.ndarray:
        m = float(np.max(self._logpost))
        if m == NEG_INF:
            raise ZeroProbabilityHistoryError("all mixture components have zero marginal here")
        conds = self._component_conds()
        w = np.exp(self._logpost - m)
        w /= w.sum()
        out = np.zeros(self._size)
        for i, c in enumerate(conds):
            if c is not None and w[i] > 0.0:
                out += w[i] * c
        return out

    def advance(self, symbol: int) -> None:
        conds = self._component_conds()
        for i, c in enumerate(conds):
            if c is None:
                continue
            p = float(c[symbol])
            if p > 0.0:
                self._logpost[i] += math.log(p)
                self._cursors[i].advance(symbol)
            else:
                self._logpost[i] = NEG_INF
        self._pending = None

    def branch(self) -> "_MixtureCursor":
        out = _MixtureCursor.__new__(_MixtureCursor)
        out._cursors = [
            cur.branch() if self._logpost[i] > NEG_INF else cur
            for i, cur in enumerate(self._cursors)
        ]
        out._logpost = self._logpost.copy()
        out._pending = None
        out._size = self._size
        return out

    def key(self) -> None:
        return None


def bayes_mixture(
    components: Sequence[Measure],
    weights: Sequence[float] | None = None,
    normalize: bool = True,
) -> MixtureMeasure:
    """Finite Bayesian mixture of ``components`` with positive weights.

    Weights default to uniform and are renormalized to sum to one unless
    ``normalize=False``, in which case they must already sum to one
    (defective mixtures are not supported).
    """
    if weights is None:
        weights = [1.0] * len(components) if components else []
    return MixtureMeasure(components, weights, normalize=normalize)


def default_mixture_weights(k_max: int) -> np.ndarray:
    """Geometric weights proportional to 2^-(k+1) for k = 0..k_max, renormalized."""
    w = np.array([2.0 ** -(k + 1) for k in range(k_max + 1)])
    return w / w.sum()


def memory_mixture(
    alphabet: Alphabet,
    k_max: int = 8,
    weights: Sequence[float] | None = None,
) -> MixtureMeasure:
    """Mixture of per-context add-one estimators of memory 0..k_max.

    The infinite sum over all memory lengths is truncated at ``k_max`` with
    the weights renormalized; any positive weight choice works, the default
    is geometric.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    components = [markov_laplace(alphabet, k) for k in range(k_max + 1)]
    if weights is None:
        weights = default_mixture_weights(k_max)
    w = np.asarray(weights, dtype=float)
    if w.shape != (k_max + 1,):
        raise ValueError(f"need {k_max + 1} weights, got shape {w.shape}")
    return MixtureMeasure(components, w, normalize=True)


def contaminate(rho: Measure, chi: Measure, eps: float = 0.5) -> MixtureMeasure:
    """Mix predictor ``rho`` with an arbitrary measure ``chi``.

    Marginals satisfy ``(1 - eps) * rho(x) + eps * chi(x)``; the default
    ``eps = 1/2`` is the even split.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly between 0 and 1, got {eps}")
    if rho.alphabet != chi.alphabet:
        raise ValueError("contamination requires a shared alphabet")
    return MixtureMeasure((rho, chi), (1.0 - eps, eps), normalize=False)
