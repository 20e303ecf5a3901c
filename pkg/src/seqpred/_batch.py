"""Internal lockstep walkers: all Monte Carlo paths advance together.

Scalar cursors cost microseconds per step in Python; for hundreds of paths
times thousands of steps that dominates everything.  Every built-in measure
class admits a batch cursor holding the states of P paths in numpy arrays,
so one step of P paths costs a handful of vectorized operations.

Semantics match the scalar cursors: symbols picked from the same per-path
uniform streams land on the same values, and conditionals agree up to float
rounding (mixtures keep a renormalized linear posterior here instead of log
weights).  Measures outside the built-in classes simply return ``None``
from :func:`make_batch_cursor` and callers fall back to cursor loops.
"""
from __future__ import annotations

import numpy as np

from .measures import (
    MarkovMeasure,
    Measure,
    ProductMeasure,
    ZeroProbabilityHistoryError,
    _pick_symbol,
)
from .predictors import LaplaceMeasure, MarkovLaplaceMeasure, MixtureMeasure

__all__ = ["make_batch_cursor", "pick_symbols", "BatchCursor"]


class BatchCursor:
    """Next-symbol distributions for P paths at once: ``cond()`` is (P, A)."""

    __slots__ = ()

    def cond(self) -> np.ndarray:
        raise NotImplementedError

    def advance(self, symbols: np.ndarray) -> None:
        raise NotImplementedError


class _ProductBatch(BatchCursor):
    __slots__ = ("_m", "_pos", "_paths")

    def __init__(self, measure: ProductMeasure, paths: int):
        self._m = measure
        self._pos = 0
        self._paths = paths

    def cond(self) -> np.ndarray:
        vec = self._m.probs_at(self._pos + 1)
        return np.broadcast_to(vec, (self._paths, len(vec)))

    def advance(self, symbols: np.ndarray) -> None:
        self._pos += 1


class _MarkovBatch(BatchCursor):
    __slots__ = ("_m", "_pos", "_ctx", "_size", "_order", "_ctx_mod", "_flat_marginals")

    def __init__(self, measure: MarkovMeasure, paths: int):
        self._m = measure
        self._pos = 0
        self._ctx = np.zeros(paths, dtype=np.int64)
        self._size = measure.alphabet.size
        self._order = measure.order
        self._ctx_mod = self._size ** max(self._order - 1, 0)
        self._flat_marginals = tuple(
            np.asarray(m, dtype=float).reshape(-1) for m in measure._prefix_marginals
        )

    def cond(self) -> np.ndarray:
        size = self._size
        if self._pos < self._order:
            joint = self._flat_marginals[self._pos + 1]
            mass = self._flat_marginals[self._pos][self._ctx]
            rows = joint[self._ctx[:, None] * size + np.arange(size)]
            # Zero-mass prefixes yield NaN rows: undefined conditionals are
            # masked by enclosing mixtures and trip the NaN check otherwise.
            with np.errstate(divide="ignore", invalid="ignore"):
                return rows / mass[:, None]
        return self._m._table[self._ctx]

    def advance(self, symbols: np.ndarray) -> None:
        if self._pos < self._order:
            self._ctx *= self._size
            self._ctx += symbols
        elif self._order:
            self._ctx %= self._ctx_mod
            self._ctx *= self._size
            self._ctx += symbols
        self._pos += 1


class _LaplaceBatch(BatchCursor):
    __slots__ = ("_counts", "_pos", "_size", "_rows")

    def __init__(self, measure: LaplaceMeasure, paths: int):
        self._size = measure.alphabet.size
        self._counts = np.zeros((paths, self._size), dtype=np.int64)
        self._pos = 0
        self._rows = np.arange(paths)

    def cond(self) -> np.ndarray:
        return (self._counts + 1.0) / (self._pos + self._size)

    def advance(self, symbols: np.ndarray) -> None:
        self._counts[self._rows, symbols] += 1
        self._pos += 1


class _MarkovLaplaceBatch(BatchCursor):
    __slots__ = ("_size", "_order", "_pos", "_ctx", "_ctx_mod", "_head", "_counts", "_rows")

    def __init__(self, measure: MarkovLaplaceMeasure, paths: int):
        size = measure.alphabet.size
        order = measure.order
        self._size = size
        self._order = order
        self._pos = 0
        self._ctx = np.zeros(paths, dtype=np.int64)
        self._ctx_mod = size ** max(order - 1, 0)
        self._head = np.zeros((paths, size), dtype=np.int64)
        self._counts = np.zeros((paths, size**order, size), dtype=np.int32)
        self._rows = np.arange(paths)

    def cond(self) -> np.ndarray:
        if self._pos < self._order:
            return (self._head + 1.0) / (self._pos + self._size)
        rows = self._counts[self._rows, self._ctx]
        return (rows + 1.0) / (rows.sum(axis=1) + self._size)[:, None]

    def advance(self, symbols: np.ndarray) -> None:
        if self._pos < self._order:
            self._head[self._rows, symbols] += 1
            self._ctx *= self._size
            self._ctx += symbols
        else:
            self._counts[self._rows, self._ctx, symbols] += 1
            if self._order:
                self._ctx %= self._ctx_mod
                self._ctx *= self._size
                self._ctx += symbols
        self._pos += 1


class _MixtureBatch(BatchCursor):
    __slots__ = ("_cursors", "_post", "_rows", "_size", "_pending")

    def __init__(self, measure: MixtureMeasure, paths: int, children: list[BatchCursor]):
        self._cursors = children
        self._post = np.tile(measure._weights, (paths, 1))
        self._rows = np.arange(paths)
        self._size = measure.alphabet.size
        self._pending: list[np.ndarray] | None = None

    def _component_conds(self) -> list[np.ndarray]:
        if self._pending is None:
            self._pending = [c.cond() for c in self._cursors]
        return self._pending

    def cond(self) -> np.ndarray:
        conds = self._component_conds()
        out = np.zeros((len(self._rows), self._size))
        for i, c in enumerate(conds):
            w = self._post[:, i : i + 1]
            # Guard against NaN conds on rows where this component is dead.
            out += np.where(w > 0.0, w * c, 0.0)
        return out

    def advance(self, symbols: np.ndarray) -> None:
        conds = self._component_conds()
        for i, c in enumerate(conds):
            p = c[self._rows, symbols]
            col = self._post[:, i]
            np.multiply(col, np.where(col > 0.0, p, 0.0), out=col)
        total = self._post.sum(axis=1)
        if np.any(total <= 0.0):
            raise ZeroProbabilityHistoryError("a path reached zero mixture probability")
        self._post /= total[:, None]
        for c in self._cursors:
            c.advance(symbols)
        self._pending = None


def make_batch_cursor(measure: Measure, paths: int) -> BatchCursor | None:
    """Batch cursor over ``paths`` lockstep paths, or None if unsupported."""
    if isinstance(measure, ProductMeasure):
        return _ProductBatch(measure, paths)
    if isinstance(measure, MarkovMeasure):
        return _MarkovBatch(measure, paths)
    if isinstance(measure, LaplaceMeasure):
        return _LaplaceBatch(measure, paths)
    if isinstance(measure, MarkovLaplaceMeasure):
        return _MarkovLaplaceBatch(measure, paths)
    if isinstance(measure, MixtureMeasure):
        children = [make_batch_cursor(c, paths) for c in measure.components]
        if any(c is None for c in children):
            return None
        return _MixtureBatch(measure, paths, children)  # type: ignore[arg-type]
    return None


def pick_symbols(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Vectorized inverse-CDF pick matching the scalar sampler exactly.

    Zero-probability symbols contribute flat cumsum steps and cannot be
    selected; top-end rounding slack falls back to the scalar picker.
    """
    paths, size = probs.shape
    cum = np.cumsum(probs, axis=1)
    sym = (u[:, None] >= cum).sum(axis=1)
    np.clip(sym, 0, size - 1, out=sym)
    chosen = probs[np.arange(paths), sym]
    if np.any(chosen <= 0.0):
        for i in np.nonzero(chosen <= 0.0)[0]:
            sym[i] = _pick_symbol(probs[i], float(u[i]))
    return sym


def batch_step_values(kind_value: str, mu_c: np.ndarray, rho_c: np.ndarray) -> np.ndarray:
    """Per-path step divergences, (P,), for stacked conditionals (P, A)."""
    if kind_value == "kl":
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = mu_c * np.log(mu_c / rho_c)
        terms = np.where(mu_c > 0.0, terms, 0.0)
        return np.maximum(terms.sum(axis=1), 0.0)
    if kind_value == "abs":
        return np.abs(mu_c - rho_c).sum(axis=1)
    if kind_value == "sq":
        d = mu_c - rho_c
        return (d * d).sum(axis=1)
    if kind_value == "hellinger":
        d = np.sqrt(mu_c) - np.sqrt(rho_c)
        return (d * d).sum(axis=1)
    raise ValueError(f"unknown divergence kind {kind_value!r}")
