"""The three counterexample constructions and their closed-form oracles."""
import math

import pytest

from seqpred.counterexamples import (
    DenseScheduleError,
    ScheduleRule,
    SparseSchedule,
    nodom_pair,
    nodom_rho_ones_marginal,
    nosumad_chi_ones_marginal,
    nosumad_contaminated_cond_ones,
    nosumad_rho_ones_marginal,
    nosumad_triple,
    nosumavad_triple,
)
from seqpred.divergences import path_series
from seqpred.measures import marginal_log, sample_path
from seqpred.predictors import contaminate


class TestSparseSchedule:
    def test_pow2(self):
        s = SparseSchedule.pow2(1024)
        assert s.steps == (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)
        assert s.count_upto(1024) == 10
        assert s.count_upto(3) == 1

    def test_double_exp(self):
        s = SparseSchedule.double_exp(100_000)
        assert s.steps == (4, 16, 256, 65536)
        assert all(b == a * a for a, b in zip(s.steps, s.steps[1:]))

    def test_cubic_starts_at_eight(self):
        s = SparseSchedule.cubic(1000)
        assert s.steps[0] == 8
        assert s.steps == tuple(k**3 for k in range(2, 11))

    def test_custom_validation(self):
        with pytest.raises(ValueError):
            SparseSchedule.custom([2, 2, 4])
        with pytest.raises(ValueError):
            SparseSchedule.custom([1, 4])
        with pytest.raises(ValueError):
            SparseSchedule.custom([])
        assert SparseSchedule.custom([2, 5, 9]).rule is ScheduleRule.CUSTOM


class TestNodomPair:
    def test_marginal_closed_form_both_routes(self):
        schedule = SparseSchedule.pow2(64)
        mu, rho = nodom_pair(schedule)
        for n in (1, 2, 3, 8, 33, 64):
            oracle = nodom_rho_ones_marginal(n, schedule)
            generic = math.exp(marginal_log(rho, [1] * n))
            assert generic == pytest.approx(oracle, rel=1e-12)
        assert math.exp(marginal_log(rho, [1] * 64)) == pytest.approx(2.0**-6, rel=1e-12)

    def test_divergence_spikes_and_flats(self):
        schedule = SparseSchedule.pow2(64)
        mu, rho = nodom_pair(schedule)
        d = path_series("kl", mu, rho, [1] * 64)
        a = path_series("abs", mu, rho, [1] * 64)
        for t in range(64):
            if t + 1 in schedule.steps:
                assert d.per_step[t] == math.log(2.0)
                assert a.per_step[t] == 1.0
            else:
                assert d.per_step[t] == 0.0
                assert a.per_step[t] == 0.0

    def test_average_vanishes_while_spikes_persist(self):
        schedule = SparseSchedule.pow2(4096)
        mu, rho = nodom_pair(schedule)
        a = path_series("abs", mu, rho, [1] * 4096)
        assert float(a.running_average[-1]) < 0.005
        assert max(a.per_step[s - 1] for s in schedule.steps) == 1.0

    def test_dominance_profile_equals_ones_marginal(self):
        # The source concentrates on all-ones, so the exact coefficient at
        # every n is just the predictor's marginal of 1^n.
        from seqpred.dominance import dominance_profile_exact

        schedule = SparseSchedule.pow2(64)
        mu, rho = nodom_pair(schedule)
        prof = dominance_profile_exact(rho, mu, 20)
        for n in range(1, 21):
            assert prof.c[n - 1] == pytest.approx(
                nodom_rho_ones_marginal(n, schedule), rel=1e-12
            )
        assert all(w == tuple([1] * (i + 1)) for i, w in enumerate(prof.witnesses))


class TestNosumadTriple:
    def test_chi_first_scheduled_value(self):
        _, _, chi = nosumad_triple(64)
        assert math.exp(marginal_log(chi, [1, 1, 1, 1])) == pytest.approx(0.5, rel=1e-12)
        assert nosumad_chi_ones_marginal(4) == 0.5

    def test_closed_forms_match_generic_route(self):
        mu, rho, chi = nosumad_triple(300)
        for n in (1, 3, 4, 15, 16, 200, 256):
            assert math.exp(marginal_log(rho, [1] * n)) == pytest.approx(
                nosumad_rho_ones_marginal(n), rel=1e-12
            )
            assert math.exp(marginal_log(chi, [1] * n)) == pytest.approx(
                nosumad_chi_ones_marginal(n), rel=1e-12
            )

    def test_rho_ones_is_inverse_n_plus_one(self):
        assert nosumad_rho_ones_marginal(16) == pytest.approx(1 / 17, abs=1e-16)
        assert nosumad_chi_ones_marginal(16) == pytest.approx(2 / 16, abs=1e-16)
        assert nosumad_chi_ones_marginal(255) == pytest.approx(2 / 16, abs=1e-16)
        assert nosumad_chi_ones_marginal(256) == pytest.approx(2 / 256, abs=1e-16)

    def test_contaminated_conditional_values(self):
        # (rho(1^n) + chi(1^n)) / (rho(1^{n-1}) + chi(1^{n-1})) at n = 4, 16, 256.
        assert nosumad_contaminated_cond_ones(4) == pytest.approx(
            (1 / 5 + 1 / 2) / (1 / 4 + 1.0), abs=1e-15
        )
        assert nosumad_contaminated_cond_ones(4) == pytest.approx(0.56, abs=1e-12)
        assert nosumad_contaminated_cond_ones(16) == pytest.approx(50 / 153, abs=1e-15)
        assert nosumad_contaminated_cond_ones(256) == pytest.approx(70 / 771, abs=1e-15)

    def test_value_below_display_bound_at_256(self):
        n = 256
        bound = (1 / (n + 1) + 2 / n) / (1 / n + 2 / math.sqrt(n))
        assert nosumad_contaminated_cond_ones(n) <= bound + 1e-15

    def test_generic_route_agrees_at_scheduled_steps(self):
        mu, rho, chi = nosumad_triple(300)
        mixed = contaminate(rho, chi)
        for n in (4, 16, 256):
            generic = math.exp(
                marginal_log(mixed, [1] * n) - marginal_log(mixed, [1] * (n - 1))
            )
            assert generic == pytest.approx(nosumad_contaminated_cond_ones(n), abs=1e-12)

    def test_rho_still_predicts_point_mass(self):
        mu, rho, _ = nosumad_triple(64)
        a = path_series("abs", mu, rho, [1] * 64)
        d = path_series("kl", mu, rho, [1] * 64)
        for t in range(64):
            assert a.per_step[t] == pytest.approx(2 / (t + 2), abs=1e-12)
            assert d.per_step[t] == pytest.approx(math.log((t + 2) / (t + 1)), abs=1e-12)


class TestNosumavadTriple:
    def test_dense_schedule_rejected(self):
        with pytest.raises(DenseScheduleError):
            nosumavad_triple(SparseSchedule.custom(range(2, 60)))

    def test_cubic_accepted_and_normalized(self):
        schedule = SparseSchedule.cubic(10_000)
        mu, rho, chi = nosumavad_triple(schedule)
        for m in (mu, rho, chi):
            for hist in ([], [1, 0, 1], list(sample_path(mu, 3, 20))):
                cond = m.conditional(hist)
                assert abs(float(cond.sum()) - 1.0) <= 1e-12

    def test_step_divergences_off_and_on_schedule(self):
        schedule = SparseSchedule.cubic(100)
        mu, rho, chi = nosumavad_triple(schedule)
        x = [0] * 100  # content does not matter for product measures
        a = path_series("abs", mu, rho, x)
        for t in range(100):
            assert a.per_step[t] == (1.0 if t + 1 in schedule.steps else 0.0)

    def test_mixture_collapses_to_contaminant_after_rho_dies(self):
        schedule = SparseSchedule.cubic(100)
        mu, rho, chi = nosumavad_triple(schedule)
        mixed = contaminate(rho, chi)
        x = [0] * 7 + [1] + [0] * 20  # symbol 1 at the first scheduled step (8)
        assert marginal_log(rho, x[:8]) == -math.inf
        cond = mixed.conditional(x[:12])
        assert cond == pytest.approx([2 / 3, 1 / 3], abs=1e-12)
        a = path_series("abs", mu, mixed, x)
        for t in range(8, len(x)):
            assert a.per_step[t] == pytest.approx(1 / 3, abs=1e-12)
