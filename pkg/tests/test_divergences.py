"""Step divergences, path series, exact and Monte Carlo expectations."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from seqpred.divergences import (
    BudgetExceededError,
    DivergenceKind,
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
from seqpred.divergences import _mc_scalar
from seqpred.measures import (
    Alphabet,
    make_bernoulli,
    make_markov,
    make_point_mass,
    make_schedule_measure,
    marginal_log,
)
from seqpred.predictors import contaminate, laplace, markov_laplace, memory_mixture

A2 = Alphabet(2)
KINDS = ("kl", "abs", "sq", "hellinger")


def dist_pairs(draw_size=st.integers(2, 8)):
    """Hypothesis strategy for a pair of conditionals over one alphabet."""

    @st.composite
    def pairs(draw):
        size = draw(draw_size)
        raw = draw(
            st.lists(st.floats(1e-3, 1.0), min_size=2 * size, max_size=2 * size)
        )
        p = np.array(raw[:size]) / np.sum(raw[:size])
        q = np.array(raw[size:]) / np.sum(raw[size:])
        return p, q

    return pairs()


class TestStepDivergence:
    def test_identity_is_zero(self):
        p = [0.3, 0.7]
        for kind in KINDS:
            assert step_divergence(kind, p, p) == 0.0

    def test_point_mass_vs_coin(self):
        assert step_divergence("abs", [1, 0], [0.5, 0.5]) == 1.0
        assert step_divergence("kl", [1, 0], [0.5, 0.5]) == math.log(2.0)

    def test_disjoint_supports(self):
        assert step_divergence("kl", [1, 0], [0, 1]) == math.inf
        assert step_divergence("abs", [1, 0], [0, 1]) == 2.0
        assert step_divergence("hellinger", [1, 0], [0, 1]) == 2.0
        assert step_divergence("sq", [1, 0], [0, 1]) == 2.0

    def test_zero_times_log_zero(self):
        # mu has a null symbol where rho does not: no infinity appears.
        assert math.isfinite(step_divergence("kl", [0, 1], [0.5, 0.5]))

    def test_mismatched_sizes_rejected(self):
        with pytest.raises(ValueError):
            step_divergence("kl", [0.5, 0.5], [0.3, 0.3, 0.4])
        with pytest.raises(ValueError):
            step_divergence("kl", [0.5, 0.6], [0.5, 0.5])

    @given(dist_pairs())
    def test_bounds(self, pq):
        p, q = pq
        d = step_divergence("kl", p, q)
        a = step_divergence("abs", p, q)
        s = step_divergence("sq", p, q)
        h = step_divergence("hellinger", p, q)
        assert d >= 0.0 and 0.0 <= a <= 2.0 and 0.0 <= s <= 2.0 and 0.0 <= h <= 2.0

    @given(dist_pairs())
    def test_inequality_chain(self, pq):
        p, q = pq
        d = step_divergence("kl", p, q)
        a = step_divergence("abs", p, q)
        s = step_divergence("sq", p, q)
        h = step_divergence("hellinger", p, q)
        slack = 1e-9
        assert a * a <= 2.0 * d + slack
        assert s <= d + slack
        assert h <= d + slack


class TestPathSeries:
    def test_identity_pair_is_zero(self):
        m = make_bernoulli(A2, [0.4, 0.6])
        ser = path_series("kl", m, m, [1, 0, 1, 1])
        assert np.all(ser.per_step == 0.0)
        assert np.all(ser.running_average == 0.0)

    def test_schedule_spikes(self):
        mu = make_point_mass(A2, 1)
        rho = make_schedule_measure(A2, [0.0, 1.0], {s: [0.5, 0.5] for s in (2, 4, 8)})
        ser = path_series("kl", mu, rho, [1] * 16)
        for t in range(16):
            expected = math.log(2.0) if t + 1 in (2, 4, 8) else 0.0
            assert ser.per_step[t] == expected
        assert ser.running_average[-1] == pytest.approx(3 * math.log(2) / 16, abs=1e-15)

    def test_infinity_propagates_into_averages(self):
        mu = make_bernoulli(A2, [0.5, 0.5])
        rho = make_point_mass(A2, 1)
        ser = path_series("kl", mu, rho, [1, 1, 1])
        assert np.all(np.isinf(ser.per_step))
        assert np.all(np.isinf(ser.running_average))


class TestExpectedAverageExact:
    def test_identity_pair(self):
        m = make_bernoulli(A2, [0.2, 0.8])
        assert expected_average_exact("kl", m, m, 6) == 0.0

    @pytest.mark.parametrize("kind", KINDS)
    def test_against_brute_force_enumeration(self, kind):
        # Independent oracle: weight every full-length string by its marginal
        # and average the running divergence from path_series.
        pairs = [
            (make_bernoulli(A2, [0.3, 0.7]), laplace(A2)),
            (make_markov(A2, 1, {(0,): [0.8, 0.2], (1,): [0.25, 0.75]}, [0.5, 0.5]),
             markov_laplace(A2, 1)),
            (make_bernoulli(A2, [0.0, 1.0]), laplace(A2)),
        ]
        n = 6
        for mu, rho in pairs:
            oracle = 0.0
            for x in itertools.product((0, 1), repeat=n):
                lw = marginal_log(mu, x)
                if lw == -math.inf:
                    continue
                ser = path_series(kind, mu, rho, x)
                oracle += math.exp(lw) * float(ser.running_average[-1])
            fast = expected_average_exact(kind, mu, rho, n)
            assert fast == pytest.approx(oracle, abs=1e-12)

    def test_chain_rule_identity(self):
        mu = make_bernoulli(A2, [0.3, 0.7])
        rho = laplace(A2)
        n = 12
        per_step = expected_average_exact_series("kl", mu, rho, n)
        log_ratio = expected_log_ratio_series(mu, rho, n) / np.arange(1, n + 1)
        assert np.max(np.abs(per_step - log_ratio)) < 1e-9

    def test_log_bound_instances(self):
        rho = laplace(A2)
        for p in (0.0, 0.25, 0.5, 1.0):
            mu = make_bernoulli(A2, [1 - p, p])
            ed = expected_average_exact_series("kl", mu, rho, 10)
            bounds = np.log(np.arange(2, 12)) / np.arange(1, 11)
            assert np.all(ed <= bounds + 1e-12)

    def test_budget_refusal_names_requirement(self):
        mu = make_bernoulli(A2, [0.5, 0.5])
        with pytest.raises(BudgetExceededError, match="67108864"):
            expected_average_exact("kl", mu, laplace(A2), 26)
        with pytest.raises(BudgetExceededError, match="budget is 1024"):
            expected_average_exact("kl", mu, laplace(A2), 11, budget_leaves=1024)

    def test_infinite_expectation(self):
        mu = make_bernoulli(A2, [0.5, 0.5])
        rho = make_point_mass(A2, 1)
        assert expected_average_exact("kl", mu, rho, 4) == math.inf

    def test_expected_avg_abs_squared_below_twice_kl(self):
        # Jensen chain at the expectation level, exact enumeration.
        pairs = [
            (make_bernoulli(A2, [0.3, 0.7]), laplace(A2)),
            (make_bernoulli(A2, [0.9, 0.1]), make_bernoulli(A2, [0.5, 0.5])),
        ]
        for mu, rho in pairs:
            for n in (3, 8, 12):
                ea = expected_average_exact("abs", mu, rho, n)
                ed = expected_average_exact("kl", mu, rho, n)
                assert ea * ea <= 2.0 * ed + 1e-12


class TestExpectedAverageMC:
    def test_identity_pair(self):
        m = make_bernoulli(A2, [0.4, 0.6])
        est = expected_average_mc("kl", m, m, 50, 16, seed=0)
        assert est.estimate == 0.0 and est.stderr == 0.0

    def test_matches_exact_within_three_stderr(self):
        mu = make_bernoulli(A2, [0.3, 0.7])
        rho = laplace(A2)
        exact = expected_average_exact("kl", mu, rho, 10)
        est = expected_average_mc("kl", mu, rho, 10, 10_000, seed=4)
        assert abs(est.estimate - exact) <= 3.0 * est.stderr

    def test_contaminated_collapse_hits_one_third(self):
        from seqpred.counterexamples import SparseSchedule, nosumavad_triple

        mu, rho, chi = nosumavad_triple(SparseSchedule.cubic(10_000))
        est = expected_average_mc("abs", mu, contaminate(rho, chi), 10_000, 200, seed=2)
        assert est.estimate == pytest.approx(1 / 3, abs=0.02)

    def test_infinite_paths_flagged(self):
        mu = make_bernoulli(A2, [0.5, 0.5])
        rho = make_point_mass(A2, 1)
        est = expected_average_mc("kl", mu, rho, 5, 8, seed=0)
        assert est.estimate == math.inf
        assert est.inf_paths == 8

    def test_batch_and_scalar_walks_agree(self):
        mu = make_markov(A2, 1, {(0,): [0.85, 0.15], (1,): [0.3, 0.7]}, [0.5, 0.5])
        rho = memory_mixture(A2, 3)
        batch = expected_average_mc_horizons("kl", mu, rho, [5, 40], 12, seed=11)
        scalar = _mc_scalar(DivergenceKind.KL, mu, rho, [5, 40], 12, seed=11)
        for h in (5, 40):
            assert batch[h].per_path == pytest.approx(scalar[h], abs=1e-12)

    def test_reproducible(self):
        mu = make_bernoulli(A2, [0.3, 0.7])
        a = expected_average_mc("abs", mu, laplace(A2), 64, 32, seed=9)
        b = expected_average_mc("abs", mu, laplace(A2), 64, 32, seed=9)
        assert a.estimate == b.estimate and a.stderr == b.stderr

    def test_undefined_predictor_conditionals_raise_in_both_engines(self):
        # Order-2 burn-in: a sampled 0 at step 1 has zero probability under
        # rho, so its step-2 conditional is undefined; a mixture with a live
        # component masks the dead one instead.
        import numpy as np

        from seqpred.measures import ZeroProbabilityHistoryError
        from seqpred.predictors import bayes_mixture

        mu = make_bernoulli(A2, [0.5, 0.5])
        rho = make_markov(A2, 2, np.full((4, 2), 0.5), [0.0, 0.0, 0.5, 0.5])
        with pytest.raises(ZeroProbabilityHistoryError):
            expected_average_mc("abs", mu, rho, 5, 8, seed=0)
        with pytest.raises(ZeroProbabilityHistoryError):
            _mc_scalar(DivergenceKind.ABS, mu, rho, [5], 8, seed=0)
        mix = bayes_mixture([rho, laplace(A2)], [0.5, 0.5])
        est = expected_average_mc("abs", mu, mix, 50, 16, seed=0)
        assert math.isfinite(est.estimate)

    def test_needs_two_paths(self):
        mu = make_bernoulli(A2, [0.3, 0.7])
        with pytest.raises(ValueError):
            expected_average_mc("kl", mu, laplace(A2), 8, 1, seed=0)


class TestTvFiniteHorizon:
    def test_identity_pair(self):
        m = make_bernoulli(A2, [0.4, 0.6])
        assert tv_finite_horizon(m, m, [1, 0], 4) == 0.0

    def test_depth_one_is_half_abs(self):
        mu = make_bernoulli(A2, [0.3, 0.7])
        rho = laplace(A2)
        x = [1, 1, 0]
        tv1 = tv_finite_horizon(mu, rho, x, 1)
        a = step_divergence("abs", mu.conditional(x), rho.conditional(x))
        assert tv1 == pytest.approx(a / 2.0, abs=1e-15)

    def test_point_mass_vs_coin_closed_form(self):
        mu = make_point_mass(A2, 1)
        rho = make_bernoulli(A2, [0.5, 0.5])
        for h in (1, 3, 6):
            assert tv_finite_horizon(mu, rho, [], h) == pytest.approx(1 - 2.0**-h, abs=1e-12)

    def test_monotone_in_depth(self):
        pairs = [
            (make_bernoulli(A2, [0.3, 0.7]), laplace(A2)),
            (make_point_mass(A2, 1), make_bernoulli(A2, [0.9, 0.1])),
            (make_markov(A2, 1, {(0,): [0.8, 0.2], (1,): [0.25, 0.75]}, [0.5, 0.5]),
             make_bernoulli(A2, [0.5, 0.5])),
        ]
        for mu, rho in pairs:
            values = [tv_finite_horizon(mu, rho, [1], h) for h in range(1, 7)]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_budget_and_history_validation(self):
        mu = make_bernoulli(A2, [0.5, 0.5])
        with pytest.raises(BudgetExceededError):
            tv_finite_horizon(mu, laplace(A2), [], 26)
        with pytest.raises(ValueError, match="zero probability"):
            tv_finite_horizon(make_point_mass(A2, 1), laplace(A2), [0], 2)


class TestPinskerAudit:
    def test_identity_pair_passes(self):
        m = make_bernoulli(A2, [0.4, 0.6])
        x = [1, 0, 1, 1, 0]
        verdict = pinsker_audit(path_series("kl", m, m, x), path_series("abs", m, m, x))
        assert verdict.ok and verdict.steps_checked == 5

    def test_real_pair_passes(self):
        mu = make_bernoulli(A2, [0.2, 0.8])
        rho = laplace(A2)
        from seqpred.measures import sample_path

        x = sample_path(mu, seed=3, n=500)
        verdict = pinsker_audit(
            path_series("kl", mu, rho, x), path_series("abs", mu, rho, x)
        )
        assert verdict.ok

    def test_spot_value_point_mass_vs_coin(self):
        # a = 1 while 2d = 2 log 2 ~ 1.386: the chain holds with room.
        a = step_divergence("abs", [1, 0], [0.5, 0.5])
        d = step_divergence("kl", [1, 0], [0.5, 0.5])
        assert a * a == pytest.approx(1.0, abs=1e-15)
        assert a * a <= 2.0 * d
        assert 2.0 * d == pytest.approx(2 * math.log(2), abs=1e-15)

    def test_violation_reported_with_location(self):
        from seqpred.divergences import DivergenceSeries

        d = DivergenceSeries(DivergenceKind.KL, np.array([0.0, 0.0]), np.array([0.0, 0.0]))
        a = DivergenceSeries(DivergenceKind.ABS, np.array([0.0, 2.0]), np.array([0.0, 1.0]))
        verdict = pinsker_audit(d, a)
        assert not verdict.ok
        assert verdict.first_violation["step"] == 2
        assert verdict.first_violation["where"] == "per_step"

    def test_kind_and_length_validation(self):
        m = make_bernoulli(A2, [0.4, 0.6])
        d = path_series("kl", m, m, [1, 0])
        a = path_series("abs", m, m, [1, 0, 1])
        with pytest.raises(ValueError, match="same path"):
            pinsker_audit(d, a)
        with pytest.raises(ValueError, match="expects"):
            pinsker_audit(a, a)
