"""Per-step, path-averaged, and expected divergences between measure pairs.

Four per-step divergences between next-symbol conditionals are supported:
KL (natural log), absolute (L1), squared, and Hellinger.  KL is the only
one that can be infinite, which happens exactly when the true conditional
puts mass where the predictor puts none; infinities are kept as genuine
float infinities and propagate into averages.

Expectations come in two flavors: exact enumeration of the history tree
(with a hard leaf budget, refusing rather than truncating) and Monte Carlo
over sampled paths with per-path seed streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .measures import (
    NEG_INF,
    History,
    Measure,
    ZeroProbabilityHistoryError,
    _check_history,
    _philox_generator,
    _pick_symbol,
)

__all__ = [
    "DivergenceKind",
    "DivergenceSeries",
    "BudgetExceededError",
    "DEFAULT_BUDGET_LEAVES",
    "step_divergence",
    "path_series",
    "expected_average_exact",
    "expected_average_exact_series",
    "expected_log_ratio_series",
    "expected_average_mc",
    "expected_average_mc_horizons",
    "McEstimate",
    "tv_finite_horizon",
    "pinsker_audit",
    "PinskerVerdict",
]

DEFAULT_BUDGET_LEAVES = 2**24


class BudgetExceededError(RuntimeError):
    """An exact enumeration would exceed the configured leaf budget."""


class DivergenceKind(Enum):
    KL = "kl"
    ABS = "abs"
    SQ = "sq"
    HELLINGER = "hellinger"


def _as_kind(kind) -> DivergenceKind:
    if isinstance(kind, DivergenceKind):
        return kind
    return DivergenceKind(str(kind).lower())


@dataclass(frozen=True)
class DivergenceSeries:
    """Per-step divergence values and their running averages along one path."""

    kind: DivergenceKind
    per_step: np.ndarray
    running_average: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.per_step)


def _step_value(kind: DivergenceKind, mu_cond: np.ndarray, rho_cond: np.ndarray) -> float:
    # Hot path: callers guarantee matching normalized vectors.
    if kind is DivergenceKind.KL:
        total = 0.0
        for a in range(len(mu_cond)):
            p = float(mu_cond[a])
            if p > 0.0:
                q = float(rho_cond[a])
                if q <= 0.0:
                    return math.inf
                total += p * math.log(p / q)
        # Nonnegative by Jensen; cancellation can leave float dust below zero.
        return total if total > 0.0 else 0.0
    if kind is DivergenceKind.ABS:
        return float(np.abs(mu_cond - rho_cond).sum())
    if kind is DivergenceKind.SQ:
        d = mu_cond - rho_cond
        return float((d * d).sum())
    d = np.sqrt(mu_cond) - np.sqrt(rho_cond)
    return float((d * d).sum())


def step_divergence(kind, mu_cond, rho_cond) -> float:
    """Divergence between two next-symbol distributions.

    KL: sum mu*log(mu/rho) with 0*log0 = 0, infinite iff mu puts mass on a
    rho-null symbol.  ABS: L1.  SQ: squared L2.  HELLINGER: squared
    Hellinger-style sum of root differences.
    """
    kind = _as_kind(kind)
    mu_c = np.asarray(mu_cond, dtype=float)
    rho_c = np.asarray(rho_cond, dtype=float)
    if mu_c.shape != rho_c.shape or mu_c.ndim != 1:
        raise ValueError(f"conditional shapes differ: {mu_c.shape} vs {rho_c.shape}")
    for name, vec in (("mu", mu_c), ("rho", rho_c)):
        if np.any(vec < 0) or abs(float(vec.sum()) - 1.0) > 1e-9:
            raise ValueError(f"{name} conditional is not a probability vector: {vec}")
    return _step_value(kind, mu_c, rho_c)


def _running_average(per_step: np.ndarray) -> np.ndarray:
    return np.cumsum(per_step) / np.arange(1, len(per_step) + 1)


def path_series(kind, mu: Measure, rho: Measure, x: History) -> DivergenceSeries:
    """Divergence series of ``rho`` against ``mu`` along the fixed path ``x``.

    ``per_step[t-1]`` is the step divergence of the conditionals given
    ``x_{<t}``; running averages divide the prefix sums by ``t``.
    """
    kind = _as_kind(kind)
    arr = _check_history(x, mu.alphabet)
    per = _walk_steps((kind,), mu, rho, arr)[kind]
    return DivergenceSeries(kind=kind, per_step=per, running_average=_running_average(per))


def _walk_steps(
    kinds: Sequence[DivergenceKind],
    mu: Measure,
    rho: Measure,
    x: np.ndarray,
) -> dict[DivergenceKind, np.ndarray]:
    if mu.alphabet != rho.alphabet:
        raise ValueError("measures must share an alphabet")
    n = len(x)
    out = {k: np.empty(n) for k in kinds}
    cmu = mu.cursor()
    crho = rho.cursor()
    for t in range(n):
        mu_c = cmu.cond()
        rho_c = crho.cond()
        for k in kinds:
            out[k][t] = _step_value(k, mu_c, rho_c)
        s = int(x[t])
        cmu.advance(s)
        crho.advance(s)
    return out


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------

def _check_budget(size: int, n: int, budget_leaves: int) -> None:
    leaves = size**n
    if leaves > budget_leaves:
        raise BudgetExceededError(
            f"exact enumeration at horizon {n} over alphabet size {size} needs "
            f"{leaves} leaf evaluations; budget is {budget_leaves}"
        )


def _exact_level_sums(
    kind: DivergenceKind,
    mu: Measure,
    rho: Measure,
    n: int,
    budget_leaves: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Tree sweep returning, per level t = 1..n, E[step divergence at t] and
    E[log mu(x_{1:t}) - log rho(x_{1:t})], both under mu.  Zero-probability
    branches under mu are pruned exactly."""
    if mu.alphabet != rho.alphabet:
        raise ValueError("measures must share an alphabet")
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    size = mu.alphabet.size
    _check_budget(size, n, budget_leaves)

    level_step = np.zeros(n + 1)
    level_logr = np.zeros(n + 1)
    mu_conds: dict = {}
    rho_conds: dict = {}
    step_cache: dict = {}
    symbols = range(size)

    # Stack entries: (depth, mu weight, log mu, log rho, mu cursor, rho cursor).
    stack = [(0, 1.0, 0.0, 0.0, mu.cursor(), rho.cursor())]
    while stack:
        t, w, lmu, lrho, cmu, crho = stack.pop()
        mk = cmu.key()
        mu_c = mu_conds.get(mk) if mk is not None else None
        if mu_c is None:
            mu_c = cmu.cond()
            if mk is not None:
                mu_conds[mk] = mu_c
        rk = crho.key()
        rho_c = rho_conds.get(rk) if rk is not None else None
        if rho_c is None:
            rho_c = crho.cond()
            if rk is not None:
                rho_conds[rk] = rho_c

        if mk is not None and rk is not None:
            ck = (mk, rk)
            d = step_cache.get(ck)
            if d is None:
                d = _step_value(kind, mu_c, rho_c)
                step_cache[ck] = d
        else:
            d = _step_value(kind, mu_c, rho_c)
        level_step[t + 1] += w * d

        positive = [a for a in symbols if mu_c[a] > 0.0]
        logr_level = level_logr
        for j, a in enumerate(positive):
            p = float(mu_c[a])
            q = float(rho_c[a])
            w2 = w * p
            lmu2 = lmu + math.log(p)
            lrho2 = lrho + math.log(q) if q > 0.0 else NEG_INF
            logr_level[t + 1] += w2 * (lmu2 - lrho2)
            if t + 1 < n:
                if j + 1 < len(positive):
                    bmu = cmu.branch()
                    brho = crho.branch()
                else:
                    bmu = cmu
                    brho = crho
                bmu.advance(a)
                brho.advance(a)
                stack.append((t + 1, w2, lmu2, lrho2, bmu, brho))
    return level_step[1:], level_logr[1:]


def expected_average_exact_series(
    kind,
    mu: Measure,
    rho: Measure,
    n: int,
    budget_leaves: int = DEFAULT_BUDGET_LEAVES,
) -> np.ndarray:
    """Exact E_mu[average divergence up to t] for every t = 1..n."""
    kind = _as_kind(kind)
    level_step, _ = _exact_level_sums(kind, mu, rho, n, budget_leaves)
    return np.cumsum(level_step) / np.arange(1, n + 1)


def expected_average_exact(
    kind,
    mu: Measure,
    rho: Measure,
    n: int,
    budget_leaves: int = DEFAULT_BUDGET_LEAVES,
) -> float:
    """Exact E_mu of the length-``n`` average divergence (enumeration, pruned)."""
    return float(expected_average_exact_series(kind, mu, rho, n, budget_leaves)[-1])


def expected_log_ratio_series(
    mu: Measure,
    rho: Measure,
    n: int,
    budget_leaves: int = DEFAULT_BUDGET_LEAVES,
) -> np.ndarray:
    """Exact E_mu[log mu(x_{1:t}) - log rho(x_{1:t})] for t = 1..n.

    Dividing entry t-1 by t gives the marginal-ratio route to the expected
    average KL divergence; the per-step route must agree with it.
    """
    _, level_logr = _exact_level_sums(DivergenceKind.KL, mu, rho, n, budget_leaves)
    return level_logr


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of an expected average divergence."""

    kind: DivergenceKind
    horizon: int
    paths: int
    estimate: float
    stderr: float
    inf_paths: int = 0
    per_path: np.ndarray | None = field(default=None, repr=False)


def _mc_scalar(
    kind: DivergenceKind,
    mu: Measure,
    rho: Measure,
    horizons: list[int],
    paths: int,
    seed: int,
) -> dict[int, np.ndarray]:
    n = horizons[-1]
    dbars = {h: np.empty(paths) for h in horizons}
    for i in range(paths):
        u = _philox_generator(seed, i).random(n)
        cmu = mu.cursor()
        crho = rho.cursor()
        total = 0.0
        hit = 0
        for t in range(n):
            mu_c = cmu.cond()
            rho_c = crho.cond()
            total += _step_value(kind, mu_c, rho_c)
            s = _pick_symbol(mu_c, u[t])
            cmu.advance(s)
            crho.advance(s)
            if t + 1 == horizons[hit]:
                dbars[horizons[hit]][i] = total / (t + 1)
                hit += 1
    return dbars


def _mc_batch(
    kind: DivergenceKind,
    mu: Measure,
    rho: Measure,
    horizons: list[int],
    paths: int,
    seed: int,
) -> dict[int, np.ndarray] | None:
    from ._batch import batch_step_values, make_batch_cursor, pick_symbols

    bmu = make_batch_cursor(mu, paths)
    brho = make_batch_cursor(rho, paths)
    if bmu is None or brho is None:
        return None
    n = horizons[-1]
    u = np.empty((paths, n))
    for i in range(paths):
        u[i] = _philox_generator(seed, i).random(n)
    totals = np.zeros(paths)
    dbars: dict[int, np.ndarray] = {}
    hit = 0
    for t in range(n):
        mu_c = bmu.cond()
        rho_c = brho.cond()
        totals += batch_step_values(kind.value, mu_c, rho_c)
        sym = pick_symbols(np.asarray(mu_c), u[:, t])
        bmu.advance(sym)
        brho.advance(sym)
        if t + 1 == horizons[hit]:
            dbars[horizons[hit]] = totals / (t + 1.0)
            hit += 1
    if np.isnan(totals).any():
        raise ZeroProbabilityHistoryError(
            "predictor conditionals are undefined along a sampled source path"
        )
    return dbars


def expected_average_mc_horizons(
    kind,
    mu: Measure,
    rho: Measure,
    horizons: Sequence[int],
    paths: int,
    seed: int,
) -> dict[int, McEstimate]:
    """One Monte Carlo run reporting the average divergence at several horizons.

    Paths are sampled from ``mu`` on independent streams keyed by
    ``(seed, path index)``; a path containing an infinite step makes the
    estimate infinite and is counted in ``inf_paths``.  Built-in measure
    classes are walked lockstep-vectorized; anything else falls back to the
    scalar cursor loop with identical sampling semantics.
    """
    kind = _as_kind(kind)
    if mu.alphabet != rho.alphabet:
        raise ValueError("measures must share an alphabet")
    horizons = sorted(set(int(h) for h in horizons))
    if not horizons or horizons[0] < 1:
        raise ValueError(f"horizons must be positive, got {horizons}")
    if paths < 2:
        raise ValueError(f"need at least 2 paths, got {paths}")
    dbars = _mc_batch(kind, mu, rho, horizons, paths, seed)
    if dbars is None:
        dbars = _mc_scalar(kind, mu, rho, horizons, paths, seed)
    out = {}
    for h in horizons:
        vals = dbars[h]
        infs = int(np.isinf(vals).sum())
        if infs:
            est, se = math.inf, math.nan
        else:
            est = float(vals.mean())
            se = float(vals.std(ddof=1) / math.sqrt(paths))
        out[h] = McEstimate(
            kind=kind, horizon=h, paths=paths, estimate=est, stderr=se,
            inf_paths=infs, per_path=vals,
        )
    return out


def expected_average_mc(
    kind,
    mu: Measure,
    rho: Measure,
    n: int,
    paths: int,
    seed: int,
) -> McEstimate:
    """Monte Carlo estimate of the expected average divergence at horizon ``n``."""
    return expected_average_mc_horizons(kind, mu, rho, [n], paths, seed)[int(n)]


# ---------------------------------------------------------------------------
# Finite-horizon total variation and the Pinsker audit
# ---------------------------------------------------------------------------

def tv_finite_horizon(
    mu: Measure,
    rho: Measure,
    x: History,
    depth: int,
    budget_leaves: int = DEFAULT_BUDGET_LEAVES,
) -> float:
    """Largest conditional-probability gap over events of the next ``depth`` steps.

    Equals half the L1 distance between the two conditional laws of the next
    ``depth`` symbols given ``x``.  Non-decreasing in ``depth`` and a lower
    bound on the supremum over the whole future.
    """
    if mu.alphabet != rho.alphabet:
        raise ValueError("measures must share an alphabet")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    size = mu.alphabet.size
    _check_budget(size, depth, budget_leaves)
    arr = _check_history(x, mu.alphabet)

    cmu = mu.cursor()
    crho = rho.cursor()
    for s in arr:
        s = int(s)
        if float(cmu.cond()[s]) <= 0.0:
            raise ValueError("history has zero probability under mu")
        cmu.advance(s)
        crho.advance(s)

    total = 0.0
    stack = [(0, 1.0, 1.0, cmu, crho)]
    while stack:
        t, pmu, prho, cm, cr = stack.pop()
        if t == depth:
            total += abs(pmu - prho)
            continue
        mu_c = cm.cond()
        rho_c = cr.cond()
        for a in range(size):
            if a + 1 < size:
                bm, br = cm.branch(), cr.branch()
            else:
                bm, br = cm, cr
            bm.advance(a)
            br.advance(a)
            stack.append((t + 1, pmu * float(mu_c[a]), prho * float(rho_c[a]), bm, br))
    return total / 2.0


@dataclass(frozen=True)
class PinskerVerdict:
    """Outcome of checking a^2 <= 2d per step and for running averages."""

    ok: bool
    steps_checked: int
    first_violation: dict | None = None


def pinsker_audit(
    d_series: DivergenceSeries,
    a_series: DivergenceSeries,
    slack: float = 0.0,
) -> PinskerVerdict:
    """Check ``a_t^2 <= 2 d_t`` and ``abar_n^2 <= 2 dbar_n`` along one path.

    Both series must come from the same path.  ``slack`` is an additive
    tolerance for callers probing near-equality regions with float noise.
    """
    if d_series.kind is not DivergenceKind.KL or a_series.kind is not DivergenceKind.ABS:
        raise ValueError("pinsker_audit expects a KL series and an ABS series")
    if d_series.horizon != a_series.horizon:
        raise ValueError("series lengths differ; were they computed on the same path?")
    for label, lhs, rhs in (
        ("per_step", a_series.per_step, d_series.per_step),
        ("running_average", a_series.running_average, d_series.running_average),
    ):
        gap = lhs * lhs - 2.0 * rhs
        bad = np.nonzero(gap > slack)[0]
        if bad.size:
            t = int(bad[0])
            return PinskerVerdict(
                ok=False,
                steps_checked=d_series.horizon,
                first_violation={
                    "where": label,
                    "step": t + 1,
                    "a": float(lhs[t]),
                    "d": float(rhs[t]),
                    "gap": float(gap[t]),
                },
            )
    return PinskerVerdict(ok=True, steps_checked=d_series.horizon)
