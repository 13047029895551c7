"""Simulation oracle tests.

The survival machinery is checked against hand-computed product-limit
fixtures and exact order statistics; the PPoS simulators are checked
against the closed forms they exist to validate, at a 3-standard-error
agreement bar with configurations whose higher-order approximation error
is far below the Monte Carlo resolution.
"""

import math

import numpy as np
import pytest

from succprob import _kernels
from succprob.betabinom import (
    ArmInterim,
    BetaPrior,
    SuccessIndicator,
    ppos_two_arm,
)
from succprob.endpoints import (
    BinaryOneArm,
    BinaryTwoArm,
    ContinuousOneArm,
    ContinuousTwoArm,
    SurvivalOneArm,
    SurvivalTwoArm,
    evaluate,
)
from succprob.errors import DomainError
from succprob.mcval import (
    SeResult,
    SimConfig,
    SurvivalDataset,
    empirical_se_log_median,
    km_estimate,
    mc_ppos,
    mc_ppos_betabinom,
    simulate_trial,
    variance_formulas,
)

LOG2 = math.log(2.0)


class TestVarianceFormulas:
    def test_exponential_mle(self):
        assert variance_formulas("exponential", "mle", 100) == 0.01

    def test_exponential_sample_median(self):
        got = variance_formulas("exponential", "sample_median", 100)
        assert got == pytest.approx((1 / LOG2) ** 2 / 100, rel=1e-15)

    def test_weibull_sample_median(self):
        got = variance_formulas("weibull", "sample_median", 100, beta=2.0)
        assert got == pytest.approx((1 / LOG2) ** 2 / 400, rel=1e-15)

    def test_mle_has_smaller_variance(self):
        assert (variance_formulas("exponential", "mle", 50)
                < variance_formulas("exponential", "sample_median", 50))

    def test_rejects_unknown_inputs(self):
        with pytest.raises(DomainError) as e:
            variance_formulas("gamma", "mle", 10)
        assert e.value.code == "bad_distribution"
        with pytest.raises(DomainError) as e:
            variance_formulas("exponential", "kaplan", 10)
        assert e.value.code == "bad_estimator"
        with pytest.raises(DomainError) as e:
            variance_formulas("weibull", "mle", 10, beta=1.0)
        assert e.value.code == "bad_estimator"
        with pytest.raises(DomainError) as e:
            variance_formulas("weibull", "sample_median", 10)
        assert e.value.code == "bad_weibull_shape"
        with pytest.raises(DomainError) as e:
            variance_formulas("exponential", "mle", 0)
        assert e.value.code == "bad_count"


class TestConfigValidation:
    def test_events_cannot_exceed_subjects(self):
        with pytest.raises(DomainError) as e:
            SimConfig(N=50, D=60, median=12.0)
        assert e.value.code == "count_order"

    def test_median_must_be_positive(self):
        with pytest.raises(DomainError) as e:
            SimConfig(N=50, D=40, median=0.0)
        assert e.value.code == "bad_scale"

    def test_full_loss_rate_rejected(self):
        with pytest.raises(DomainError) as e:
            SimConfig(N=50, D=40, median=12.0, ltfu_rate=1.0)
        assert e.value.code == "bad_ltfu_rate"

    def test_counts_must_be_positive_integers(self):
        with pytest.raises(DomainError):
            SimConfig(N=50, D=40, median=12.0, M=0)
        with pytest.raises(DomainError):
            SimConfig(N=True, D=1, median=12.0)

    def test_dataset_shape_and_sign(self):
        with pytest.raises(DomainError) as e:
            SurvivalDataset(fup=np.array([1.0, 2.0]), event=np.array([True]))
        assert e.value.code == "bad_dataset_shape"
        with pytest.raises(DomainError) as e:
            SurvivalDataset(fup=np.array([1.0, -2.0]),
                            event=np.array([True, True]))
        assert e.value.code == "bad_followup"


class TestSimulateTrial:
    CFG = SimConfig(N=60, D=45, median=12.0, ltfu_rate=0.05, seed=7)

    def test_replicates_are_reproducible(self):
        a = simulate_trial(self.CFG, rep=3)
        b = simulate_trial(self.CFG, rep=3)
        assert np.array_equal(a.fup, b.fup)
        assert np.array_equal(a.event, b.event)

    def test_replicates_differ(self):
        a = simulate_trial(self.CFG, rep=0)
        b = simulate_trial(self.CFG, rep=1)
        assert not np.array_equal(a.fup, b.fup)

    def test_cutoff_caps_events_at_target(self):
        data = simulate_trial(self.CFG, rep=2)
        assert int(data.event.sum()) == self.CFG.D
        # nobody is followed past the data cutoff
        tau = data.fup[data.event].max()
        assert np.all(data.fup <= tau)

    def test_no_loss_means_censoring_only_at_cutoff(self):
        cfg = SimConfig(N=40, D=25, median=10.0, ltfu_rate=0.0, seed=1)
        data = simulate_trial(cfg, rep=0)
        tau = data.fup[data.event].max()
        assert np.all(data.fup[~data.event] == tau)

    def test_rep_must_be_nonnegative_integer(self):
        with pytest.raises(DomainError) as e:
            simulate_trial(self.CFG, rep=-1)
        assert e.value.code == "bad_replicate"


class TestKmEstimate:
    def test_single_subject(self):
        curve = km_estimate(SurvivalDataset(np.array([5.0]), np.array([True])))
        assert curve.median == 5.0 and curve.defined

    def test_four_subject_fixture(self):
        # events at 1 and 2, censored at 1.5, event at 3:
        # S(1) = 3/4, S(2) = 3/4 * (1 - 1/2) = 3/8 crosses one half
        data = SurvivalDataset(np.array([1.0, 1.5, 2.0, 3.0]),
                               np.array([True, False, True, True]))
        curve = km_estimate(data)
        assert np.allclose(curve.surv[:2], [0.75, 0.375])
        assert curve.median == 2.0

    def test_tied_event_and_censor_time(self):
        # the subject censored at 2.0 still counts as at risk for the
        # death at 2.0 (standard product-limit tie convention)
        data = SurvivalDataset(np.array([2.0, 2.0, 4.0]),
                               np.array([True, False, True]))
        curve = km_estimate(data)
        assert curve.surv[0] == pytest.approx(2 / 3)

    def test_all_events_median_is_order_statistic(self):
        rng = np.random.default_rng(5)
        times = rng.exponential(17.0, 9)
        data = SurvivalDataset(times, np.ones(9, dtype=bool))
        curve = km_estimate(data)
        assert curve.median == np.sort(times)[4] == np.median(times)

    def test_curve_is_nonincreasing_and_bounded(self):
        data = simulate_trial(SimConfig(N=80, D=60, median=12.0,
                                        ltfu_rate=0.1, seed=2))
        curve = km_estimate(data)
        assert np.all(np.diff(curve.surv) < 0)
        assert curve.surv[0] < 1.0 and curve.surv[-1] >= 0.0

    def test_median_can_be_undefined(self):
        # truncated before half the risk set has events
        data = SurvivalDataset(np.array([1.0, 1.0, 1.0, 1.0]),
                               np.array([True, False, False, False]))
        curve = km_estimate(data)
        assert not curve.defined and math.isnan(curve.median)

    def test_needs_at_least_one_event(self):
        with pytest.raises(DomainError) as e:
            km_estimate(SurvivalDataset(np.array([1.0, 2.0]),
                                        np.array([False, False])))
        assert e.value.code == "no_events"


class TestKernels:
    def test_cutoff_truncates_and_recensors(self):
        fup = np.array([5.0, 3.0, 8.0, 10.0])
        event = np.array([True, True, False, True])
        f2, e2 = _kernels.apply_cutoff(fup, event, 2)
        # second event time is 5, so 8 and 10 fold back to censored at 5
        assert np.array_equal(f2, [5.0, 3.0, 5.0, 5.0])
        assert np.array_equal(e2, [True, True, False, False])

    def test_cutoff_with_fewer_events_than_target(self):
        fup = np.array([1.0, 9.0, 9.0])
        event = np.array([True, False, False])
        f2, e2 = _kernels.apply_cutoff(fup, event, 5)
        assert np.array_equal(f2, [1.0, 1.0, 1.0])
        assert np.array_equal(e2, [True, False, False])

    def test_batch_matches_per_replicate_path(self):
        cfg = SimConfig(N=50, D=35, median=9.0, ltfu_rate=0.08, seed=11, M=20)
        fup = np.empty((cfg.M, cfg.N))
        event = np.empty((cfg.M, cfg.N), dtype=bool)
        from succprob.mcval import _draw_raw
        for r in range(cfg.M):
            fup[r], event[r] = _draw_raw(cfg, r)
        batch = _kernels.batch_log_median(fup, event, cfg.D)
        for r in range(cfg.M):
            med = km_estimate(simulate_trial(cfg, r)).median
            assert batch[r] == math.log(med)

    def test_batch_propagates_undefined_medians(self):
        fup = np.array([[1.0, 2.0, 3.0, 4.0],
                        [1.0, 9.0, 9.0, 9.0]])
        event = np.array([[True, True, True, True],
                          [True, False, False, False]])
        got = _kernels.batch_log_median(fup, event, 4)
        assert got[0] == math.log(2.0)
        assert math.isnan(got[1])

    @pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")
    def test_compiled_and_numpy_paths_agree_bitwise(self):
        cfg = SimConfig(N=70, D=50, median=14.0, ltfu_rate=0.12, seed=17, M=25)
        fup = np.empty((cfg.M, cfg.N))
        event = np.empty((cfg.M, cfg.N), dtype=bool)
        from succprob.mcval import _draw_raw
        for r in range(cfg.M):
            fup[r], event[r] = _draw_raw(cfg, r)
        a = _kernels.batch_log_median_numpy(fup, event, cfg.D)
        b = _kernels.batch_log_median_numba(fup, event, cfg.D)
        assert np.array_equal(a, b, equal_nan=True)
        f_np, e_np = _kernels.cutoff_numpy(fup[0], event[0], cfg.D)
        f_nb, e_nb = _kernels.cutoff_numba(fup[0], event[0], cfg.D)
        assert np.array_equal(f_np, f_nb) and np.array_equal(e_np, e_nb)
        assert _kernels.km_median_numpy(f_np, e_np) == \
            _kernels.km_median_numba(f_nb, e_nb)


class TestEmpiricalSe:
    def test_needs_replicates(self):
        with pytest.raises(DomainError) as e:
            empirical_se_log_median(SimConfig(N=40, D=30, median=12.0, M=1))
        assert e.value.code == "too_few_replicates"

    def test_event_driven_spread_tracks_mle_column(self):
        # following everyone to their event reproduces the 1/(log2 sqrt(d))
        # spread, visibly above the naive 1/sqrt(d) column
        cfg = SimConfig(N=80, D=80, median=12.0, ltfu_rate=5e-6, M=600, seed=3)
        res = empirical_se_log_median(cfg)
        assert res.sd_obs > res.sd_1_over_sqrtd
        assert res.sd_obs == pytest.approx(res.sd_log2, rel=0.10)

    def test_extra_enrollment_shrinks_spread(self):
        wide = empirical_se_log_median(
            SimConfig(N=120, D=80, median=12.0, ltfu_rate=5e-6, M=600, seed=3))
        assert wide.sd_obs < (1 / LOG2) / math.sqrt(80)
        assert wide.sd_obs > 1 / math.sqrt(80)

    def test_heavy_censoring_is_flagged(self):
        cfg = SimConfig(N=12, D=12, median=10.0, ltfu_rate=0.65, M=80, seed=9)
        res = empirical_se_log_median(cfg)
        assert res.dropped > 0.1 * cfg.M and res.unreliable

    def test_csv_row_round_trips(self):
        res = empirical_se_log_median(
            SimConfig(N=30, D=20, median=8.0, ltfu_rate=0.1, M=40, seed=4))
        header = SeResult.CSV_HEADER.split(",")
        row = res.csv_row().split(",")
        assert len(row) == len(header) == 8
        assert row[0] == "30" and row[1] == "20"
        assert float(row[3]) == res.sd_obs  # repr round-trip, no rounding


class TestMcPpos:
    def test_continuous_one_arm_agrees(self):
        cell = ContinuousOneArm(xbar=0.21, s=1.0, n=400, N=800, null_value=0.1)
        b = evaluate(cell, "greater", "trial", 1.96)
        e = mc_ppos(cell, "greater", "trial", 1.96, sims=100_000, seed=0)
        assert abs(e.value - b.ppos_no_prior) < 3 * e.se

    def test_prior_posterior_draw_agrees(self):
        cell = ContinuousTwoArm(delta=-0.025, s=0.16, n=776, N=1552, a=1,
                                null_value=-0.05)
        b = evaluate(cell, "greater", "trial", 1.97,
                     prior_location=0.0, prior_sd=0.02)
        e = mc_ppos(cell, "greater", "trial", 1.97, prior_location=0.0,
                    prior_sd=0.02, sims=100_000, seed=0)
        assert abs(e.value - b.ppos_with_prior) < 3 * e.se

    def test_survival_two_arm_reverse_direction_agrees(self):
        cell = SurvivalTwoArm(hr=0.82, d=346, D=446, a=1)
        b = evaluate(cell, "less", "trial", 1.96)
        e = mc_ppos(cell, "less", "trial", 1.96, sims=100_000, seed=0)
        assert abs(e.value - b.ppos_no_prior) < 3 * e.se

    def test_cp_measure_agrees(self):
        cell = ContinuousTwoArm(delta=-0.025, s=0.16, n=776, N=1552, a=1,
                                null_value=-0.05)
        b = evaluate(cell, "greater", "trial", 1.97, expected=-0.030)
        e = mc_ppos(cell, "greater", "trial", 1.97, measure="cp",
                    expected=-0.030, sims=100_000, seed=0)
        assert abs(e.value - b.cp_specified) < 3 * e.se

    def test_point_prior_pins_the_effect(self):
        cell = ContinuousOneArm(xbar=0.21, s=1.0, n=400, N=800, null_value=0.1)
        b = evaluate(cell, "greater", "trial", 1.96,
                     prior_location=0.18, prior_sd=0.0)
        e = mc_ppos(cell, "greater", "trial", 1.96, prior_location=0.18,
                    prior_sd=0.0, sims=100_000, seed=0)
        assert abs(e.value - b.ppos_with_prior) < 3 * e.se

    def test_estimate_is_reproducible(self):
        cell = BinaryOneArm(p=0.5, n=1200, N=2400, null_value=0.48)
        a = mc_ppos(cell, "greater", "trial", 1.96, sims=10_000, seed=5)
        b = mc_ppos(cell, "greater", "trial", 1.96, sims=10_000, seed=5)
        assert a == b
        assert a.se == pytest.approx(
            math.sqrt(a.value * (1 - a.value) / 10_000), rel=1e-12)

    def test_rejects_bad_requests(self):
        cell = ContinuousOneArm(xbar=0.21, s=1.0, n=400, N=800, null_value=0.1)
        with pytest.raises(DomainError) as e:
            mc_ppos(cell, "greater", "trial", 1.96, sims=999)
        assert e.value.code == "too_few_sims"
        with pytest.raises(DomainError) as e:
            mc_ppos(cell, "greater", "trial", 1.96, measure="power")
        assert e.value.code == "bad_measure"
        with pytest.raises(DomainError) as e:
            mc_ppos(cell, "greater", "trial", 1.96, measure="cp")
        assert e.value.code == "missing_expected"

    def test_summary_level_binary_cannot_be_simulated(self):
        cell = BinaryTwoArm(N=210, a=2, delta=0.157, stderr=0.074, n=158)
        with pytest.raises(DomainError) as e:
            mc_ppos(cell, "greater", "trial", 1.96, sims=1000)
        assert e.value.code == "mc_needs_counts"

    def test_non_mle_survival_estimator_unsupported(self):
        cell = SurvivalOneArm(median=14.0, d=50, D=100, null_value=12.0,
                              xi=1.0 / LOG2)
        with pytest.raises(DomainError) as e:
            mc_ppos(cell, "greater", "trial", 1.96, sims=1000)
        assert e.value.code == "mc_estimator_unsupported"


class TestMcBetabinom:
    ARM_T = ArmInterim(n=155, x=13, N=325)
    ARM_C = ArmInterim(n=152, x=21, N=323)
    UNIFORM = BetaPrior(1.0, 1.0)

    def test_agrees_with_exact_sum(self):
        ind = SuccessIndicator.z_test(level=0.025, tail="less")
        exact = ppos_two_arm(self.UNIFORM, self.UNIFORM,
                             self.ARM_T, self.ARM_C, ind)
        e = mc_ppos_betabinom(self.UNIFORM, self.UNIFORM, self.ARM_T,
                              self.ARM_C, ind, sims=100_000, seed=0)
        assert abs(e.value - exact) < 3 * e.se

    def test_reproducible_and_validated(self):
        ind = SuccessIndicator.z_test(level=0.025, tail="less")
        a = mc_ppos_betabinom(self.UNIFORM, self.UNIFORM, self.ARM_T,
                              self.ARM_C, ind, sims=2_000, seed=1)
        b = mc_ppos_betabinom(self.UNIFORM, self.UNIFORM, self.ARM_T,
                              self.ARM_C, ind, sims=2_000, seed=1)
        assert a == b
        with pytest.raises(DomainError) as e:
            mc_ppos_betabinom(self.UNIFORM, self.UNIFORM, self.ARM_T,
                              self.ARM_C, ind, sims=10)
        assert e.value.code == "too_few_sims"
