"""Probability measures on one-way infinite sequences over a finite alphabet.

A measure here is determined by its next-symbol conditional distributions:
for every finite history ``x_{1:n}`` it supplies a probability vector over
the alphabet, and marginals of finite strings are products of those
conditionals.  All marginals are computed and stored in log domain with an
explicit ``NEG_INF`` element for probability zero, since plain products
underflow once histories reach a few thousand symbols.

Measures are immutable after construction and safe to share between
threads.  Sequential walks (sampling, marginal evaluation, divergence
series) go through a :class:`MeasureCursor`, a cheap stateful walker owned
by a single caller; branching a cursor supports exhaustive tree
enumeration.

Conventions
-----------
* Symbols are integers ``0 .. size-1``; histories are int sequences.
* Step indices are 1-based: step ``t`` emits ``x_t`` given ``x_{<t}``.
* ``0 * log 0 = 0``; a conditional of zero makes the whole marginal
  ``NEG_INF``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

__all__ = [
    "NEG_INF",
    "LogProb",
    "Alphabet",
    "History",
    "ZeroProbabilityHistoryError",
    "Measure",
    "MeasureCursor",
    "ProductMeasure",
    "MarkovMeasure",
    "make_bernoulli",
    "make_markov",
    "make_point_mass",
    "make_schedule_measure",
    "marginal_log",
    "sample_path",
    "log_sum_exp",
]

NEG_INF = float("-inf")

LogProb = float
"""Log-domain probability: a float <= 0, with ``NEG_INF`` for probability zero."""

History = Sequence[int]
"""A finite prefix of a sequence; every entry must be a valid symbol index."""

NORMALIZATION_ATOL = 1e-12


class ZeroProbabilityHistoryError(ValueError):
    """Raised when a conditional is requested given a zero-probability history."""


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol set ``{0, ..., size-1}``.

    Parameters
    ----------
    size : int
        Number of symbols; must be at least 2.
    """

    size: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 2:
            raise ValueError(f"alphabet size must be an integer >= 2, got {self.size!r}")

    def symbols(self) -> range:
        return range(self.size)


def log_sum_exp(values: np.ndarray) -> float:
    """log(sum(exp(values))) with ``NEG_INF`` entries handled exactly."""
    m = float(np.max(values))
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(float(np.sum(np.exp(values - m))))


def _check_prob_vector(probs, size: int, what: str) -> np.ndarray:
    vec = np.asarray(probs, dtype=float)
    if vec.shape != (size,):
        raise ValueError(f"{what} must have length {size}, got shape {vec.shape}")
    if np.any(vec < 0.0) or np.any(vec > 1.0):
        raise ValueError(f"{what} entries must lie in [0, 1]: {vec}")
    if abs(float(vec.sum()) - 1.0) > NORMALIZATION_ATOL:
        raise ValueError(f"{what} must sum to 1 within {NORMALIZATION_ATOL}: sum={vec.sum()!r}")
    vec = vec.copy()
    vec.setflags(write=False)
    return vec


def _check_history(history: History, alphabet: Alphabet) -> np.ndarray:
    arr = np.asarray(history, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError(f"history must be one-dimensional, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
        raise ValueError(f"history contains symbols outside 0..{alphabet.size - 1}")
    return arr


class MeasureCursor:
    """Stateful walker along one history.

    ``cond()`` returns the next-symbol distribution, ``advance(s)`` consumes
    one symbol.  Walkers are single-owner and mutable; ``branch()`` yields an
    independent copy for tree enumeration.  ``key()`` optionally returns a
    hashable token identifying ``cond()``'s value, letting enumerators
    memoize; ``None`` disables memoization.
    """

    __slots__ = ()

    def cond(self) -> np.ndarray:
        raise NotImplementedError

    def advance(self, symbol: int) -> None:
        raise NotImplementedError

    def branch(self) -> "MeasureCursor":
        raise NotImplementedError

    def key(self) -> Hashable | None:
        return None


class Measure:
    """Base class: an immutable process defined by next-symbol conditionals."""

    __slots__ = ("_alphabet",)

    def __init__(self, alphabet: Alphabet):
        if not isinstance(alphabet, Alphabet):
            raise TypeError("alphabet must be an Alphabet instance")
        self._alphabet = alphabet

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    def cursor(self) -> MeasureCursor:
        raise NotImplementedError

    def conditional(self, history: History) -> np.ndarray:
        """Next-symbol distribution after ``history``.

        Raises :class:`ZeroProbabilityHistoryError` if the measure assigns
        probability zero to the history and its conditionals past that point
        are undefined (mixtures with all components dead).
        """
        cur = self.cursor()
        for s in _check_history(history, self._alphabet):
            cur.advance(int(s))
        return np.array(cur.cond(), dtype=float)


# ---------------------------------------------------------------------------
# Product measures: per-step conditionals that ignore history content
# ---------------------------------------------------------------------------

class ProductMeasure(Measure):
    """Measure whose conditional at step ``t`` depends only on ``t``.

    Covers i.i.d. measures, deterministic point masses, and schedule
    measures that replace the base conditional on an explicit set of steps.

    Parameters
    ----------
    alphabet : Alphabet
    base : array_like or callable
        Either a fixed probability vector used at every step, or a callable
        ``t -> vector`` (1-based ``t``).  Callable output is validated at
        every evaluation.
    overrides : mapping, optional
        ``{step: probability vector}`` replacing the base conditional on
        those steps.  Steps are 1-based and must be >= 1.
    """

    __slots__ = ("_base_vec", "_base_fn", "_overrides", "_stationary")

    def __init__(
        self,
        alphabet: Alphabet,
        base,
        overrides: Mapping[int, Sequence[float]] | None = None,
    ):
        super().__init__(alphabet)
        if callable(base):
            self._base_vec = None
            self._base_fn = base
        else:
            self._base_vec = _check_prob_vector(base, alphabet.size, "base conditional")
            self._base_fn = None
        ov: dict[int, np.ndarray] = {}
        for step, vec in (overrides or {}).items():
            step = int(step)
            if step < 1:
                raise ValueError(f"override steps must be >= 1, got {step}")
            if step in ov:
                raise ValueError(f"duplicate override step {step}")
            ov[step] = _check_prob_vector(vec, alphabet.size, f"override at step {step}")
        self._overrides = ov
        self._stationary = self._base_fn is None and not ov

    def probs_at(self, t: int) -> np.ndarray:
        """Conditional distribution of ``x_t`` (1-based), for any history."""
        if t < 1:
            raise ValueError(f"step index must be >= 1, got {t}")
        hit = self._overrides.get(t)
        if hit is not None:
            return hit
        if self._base_vec is not None:
            return self._base_vec
        return _check_prob_vector(self._base_fn(t), self._alphabet.size, f"base conditional at step {t}")

    @property
    def override_steps(self) -> tuple[int, ...]:
        return tuple(sorted(self._overrides))

    def cursor(self) -> MeasureCursor:
        return _ProductCursor(self, 0)


class _ProductCursor(MeasureCursor):
    __slots__ = ("_m", "_pos")

    def __init__(self, measure: ProductMeasure, pos: int):
        self._m = measure
        self._pos = pos

    def cond(self) -> np.ndarray:
        return self._m.probs_at(self._pos + 1)

    def advance(self, symbol: int) -> None:
        self._pos += 1

    def branch(self) -> "_ProductCursor":
        return _ProductCursor(self._m, self._pos)

    def key(self) -> Hashable:
        # Stationary measures share one conditional; otherwise memoize per step.
        return 0 if self._m._stationary else self._pos + 1


def make_bernoulli(alphabet: Alphabet, probs) -> ProductMeasure:
    """I.i.d. measure emitting each symbol with fixed probability ``probs``."""
    return ProductMeasure(alphabet, probs)


def make_point_mass(alphabet: Alphabet, target) -> ProductMeasure:
    """Measure concentrated on a single infinite sequence.

    ``target`` is either a fixed symbol (the constant sequence) or a callable
    ``t -> symbol`` defining the sequence position by position.
    """
    size = alphabet.size

    def onehot(sym: int) -> np.ndarray:
        if not 0 <= sym < size:
            raise ValueError(f"target symbol {sym} outside alphabet of size {size}")
        vec = np.zeros(size)
        vec[sym] = 1.0
        return vec

    if callable(target):
        return ProductMeasure(alphabet, lambda t: onehot(int(target(t))))
    return ProductMeasure(alphabet, onehot(int(target)))


def make_schedule_measure(
    alphabet: Alphabet,
    base,
    spoiled: Mapping[int, Sequence[float]],
) -> ProductMeasure:
    """Base per-step rule overridden by ``spoiled`` conditionals on given steps.

    The step set is explicit; the conditional never depends on history
    content, so closed-form marginals are available to tests as products of
    the per-step vectors.
    """
    return ProductMeasure(alphabet, base, overrides=spoiled)


# ---------------------------------------------------------------------------
# Finite-memory (Markov) measures
# ---------------------------------------------------------------------------

class MarkovMeasure(Measure):
    """Order-``k`` Markov measure with an explicit initial prefix distribution.

    Parameters
    ----------
    alphabet : Alphabet
    order : int
        Memory length ``k >= 0``.
    transition : array_like or mapping
        Either an ``(size**k, size)`` row-stochastic array indexed by context
        (first context symbol most significant) or a mapping
        ``context tuple -> probability vector`` covering all contexts.
    initial : array_like
        Joint distribution of the first ``k`` symbols, flat ``(size**k,)``
        in the same index order.  For ``k == 0`` this is the scalar ``[1.0]``.
    """

    __slots__ = ("_order", "_table", "_prefix_marginals")

    def __init__(self, alphabet: Alphabet, order: int, transition, initial):
        super().__init__(alphabet)
        if order < 0:
            raise ValueError(f"order must be >= 0, got {order}")
        self._order = int(order)
        size = alphabet.size
        n_ctx = size**self._order

        if isinstance(transition, Mapping):
            table = np.zeros((n_ctx, size))
            seen = set()
            for ctx, row in transition.items():
                ctx = tuple(int(c) for c in ctx)
                if len(ctx) != self._order or any(not 0 <= c < size for c in ctx):
                    raise ValueError(f"invalid context {ctx}")
                idx = _context_index(ctx, size)
                table[idx] = np.asarray(row, dtype=float)
                seen.add(idx)
            if len(seen) != n_ctx:
                raise ValueError(f"transition table covers {len(seen)} of {n_ctx} contexts")
        else:
            table = np.asarray(transition, dtype=float)
            if table.shape != (n_ctx, size):
                raise ValueError(f"transition table must have shape ({n_ctx}, {size}), got {table.shape}")
        for idx in range(n_ctx):
            table[idx] = _check_prob_vector(table[idx], size, f"transition row {idx}")
        table = table.copy()
        table.setflags(write=False)
        self._table = table

        init = np.asarray(initial, dtype=float).reshape(-1)
        if init.shape != (n_ctx,):
            raise ValueError(f"initial distribution must have length {n_ctx}, got {init.shape}")
        if np.any(init < 0) or abs(float(init.sum()) - 1.0) > NORMALIZATION_ATOL:
            raise ValueError("initial distribution must be normalized and nonnegative")
        # prefix_marginals[t] has shape (size,)*t: joint law of the first t symbols.
        tensor = init.reshape((size,) * self._order) if self._order else init.reshape(())
        marginals = [None] * (self._order + 1)
        marginals[self._order] = tensor
        for t in range(self._order - 1, -1, -1):
            marginals[t] = marginals[t + 1].sum(axis=t)
        self._prefix_marginals = tuple(marginals)

    @property
    def order(self) -> int:
        return self._order

    def prefix_conditional(self, prefix: tuple[int, ...]) -> np.ndarray:
        """Conditional of ``x_{t}`` given a burn-in prefix of length ``t-1 < k``."""
        t = len(prefix) + 1
        joint = self._prefix_marginals[t][prefix]
        mass = float(self._prefix_marginals[t - 1][prefix]) if prefix else float(self._prefix_marginals[0])
        if mass <= 0.0:
            raise ZeroProbabilityHistoryError(f"prefix {prefix} has zero probability")
        return np.asarray(joint, dtype=float) / mass

    def transition_row(self, ctx_index: int) -> np.ndarray:
        return self._table[ctx_index]

    def cursor(self) -> MeasureCursor:
        return _MarkovCursor(self)


def _context_index(ctx: tuple[int, ...], size: int) -> int:
    idx = 0
    for c in ctx:
        idx = idx * size + c
    return idx


class _MarkovCursor(MeasureCursor):
    __slots__ = ("_m", "_pos", "_prefix", "_ctx", "_size", "_order", "_ctx_mod")

    def __init__(self, measure: MarkovMeasure):
        self._m = measure
        self._pos = 0
        self._prefix: tuple[int, ...] = ()
        self._ctx = 0
        self._size = measure.alphabet.size
        self._order = measure.order
        self._ctx_mod = self._size ** max(self._order - 1, 0)

    def cond(self) -> np.ndarray:
        if self._pos < self._order:
            return self._m.prefix_conditional(self._prefix)
        return self._m.transition_row(self._ctx)

    def advance(self, symbol: int) -> None:
        if self._pos < self._order:
            self._prefix = self._prefix + (symbol,)
            self._ctx = self._ctx * self._size + symbol
        elif self._order:
            self._ctx = (self._ctx % self._ctx_mod) * self._size + symbol
        self._pos += 1

    def branch(self) -> "_MarkovCursor":
        out = _MarkovCursor.__new__(_MarkovCursor)
        out._m = self._m
        out._pos = self._pos
        out._prefix = self._prefix
        out._ctx = self._ctx
        out._size = self._size
        out._order = self._order
        out._ctx_mod = self._ctx_mod
        return out

    def key(self) -> Hashable:
        if self._pos < self._order:
            return ("prefix", self._prefix)
        return ("ctx", self._ctx)


def make_markov(alphabet: Alphabet, order: int, transition, initial) -> MarkovMeasure:
    """Order-``k`` Markov measure; ``order=0`` reduces to an i.i.d. measure."""
    return MarkovMeasure(alphabet, order, transition, initial)


# ---------------------------------------------------------------------------
# Marginals and sampling
# ---------------------------------------------------------------------------

def marginal_log(measure: Measure, history: History) -> LogProb:
    """Log marginal probability of the finite string ``history``.

    Sum of log conditionals along the string; ``NEG_INF`` exactly when some
    conditional along the prefix vanishes.
    """
    arr = _check_history(history, measure.alphabet)
    cur = measure.cursor()
    total = 0.0
    for s in arr:
        p = float(cur.cond()[s])
        if p <= 0.0:
            return NEG_INF
        total += math.log(p)
        cur.advance(int(s))
    return total


def _philox_generator(seed: int, stream: int) -> np.random.Generator:
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative integers")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _pick_symbol(probs: np.ndarray, u: float) -> int:
    acc = 0.0
    last_positive = -1
    for a in range(len(probs)):
        p = float(probs[a])
        if p > 0.0:
            last_positive = a
            acc += p
            if u < acc:
                return a
    if last_positive < 0:
        raise ZeroProbabilityHistoryError("conditional distribution has no positive entry")
    return last_positive  # u fell into rounding slack at the top end


def sample_path(measure: Measure, seed: int, n: int, stream: int = 0) -> np.ndarray:
    """Sample ``x_{1:n}`` from the measure, deterministically in ``(seed, stream)``.

    Uses a counter-based Philox generator keyed by ``(seed, stream)`` so
    concurrent paths draw from independent streams; the sampled path always
    has positive marginal probability.
    """
    if n < 0:
        raise ValueError(f"path length must be >= 0, got {n}")
    u = _philox_generator(seed, stream).random(n)
    out = np.empty(n, dtype=np.int64)

    if isinstance(measure, ProductMeasure) and measure._base_vec is not None:
        # Fast path: i.i.d. base sampled vectorized, override steps re-picked
        # with the same uniforms the generic walk would use.
        base = measure._base_vec
        cum = np.cumsum(base)
        idx = np.searchsorted(cum, u, side="right")
        np.clip(idx, 0, measure.alphabet.size - 1, out=idx)
        out[:] = idx
        bad = np.nonzero(base[out] <= 0.0)[0]  # rounding at cumsum boundaries
        for t in bad:
            out[t] = _pick_symbol(base, u[t])
        for step in measure.override_steps:
            if step <= n:
                out[step - 1] = _pick_symbol(measure.probs_at(step), u[step - 1])
        return out

    cur = measure.cursor()
    for t in range(n):
        s = _pick_symbol(cur.cond(), u[t])
        out[t] = s
        cur.advance(s)
    return out
