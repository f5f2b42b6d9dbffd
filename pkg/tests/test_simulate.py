import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doorrmst.door import CONTROL, TREATMENT
from doorrmst.rng import make_generator
from doorrmst.simulate import (
    RATE_ORDER,
    SimConfig,
    TransitionRates,
    _SIM_DOOR,
    apply_uniform_censoring,
    simulate_arm,
    simulate_subject,
    simulate_trial,
    true_event_times,
)
from doorrmst.door import validate_cohort

PLACEBO = TransitionRates.from_sequence((0.5, 0.2, 0.1, 1.0, 0.4, 0.2, 0.6, 0.3, 0.3))
NULL = TransitionRates.from_sequence(
    (0.3, 0.15, 0.06, 0.6, 0.3, 0.12, 0.36, 0.24, 0.24)
)


class TestTransitionRates:
    def test_nine_rates_in_order(self):
        assert len(RATE_ORDER) == 9
        np.testing.assert_allclose(
            PLACEBO.as_array(), [0.5, 0.2, 0.1, 1.0, 0.4, 0.2, 0.6, 0.3, 0.3]
        )
        assert PLACEBO.exit_initial == pytest.approx(0.8)

    def test_immediate_death_only_is_valid(self):
        rates = TransitionRates.from_sequence((0, 0, 1.0, 0, 0, 0, 0, 0, 0))
        assert rates.exit_initial == 1.0

    def test_reachable_states_need_an_exit(self):
        with pytest.raises(ValueError):
            TransitionRates.from_sequence((0, 0, 0, 0, 0, 0, 0, 0, 0))
        with pytest.raises(ValueError):
            # one-event state reachable but absorbing
            TransitionRates.from_sequence((1.0, 0, 0, 0, 0, 0, 0, 0, 0))
        with pytest.raises(ValueError):
            # disability reachable but absorbing
            TransitionRates.from_sequence((0, 1.0, 0, 0, 0, 0, 0, 0, 0))
        with pytest.raises(ValueError):
            TransitionRates.from_sequence((1, 0, 0, -0.5, 0, 1, 0, 0, 0))

    def test_wrong_arity_rejected(self):
        with pytest.raises(ValueError):
            TransitionRates.from_sequence((1.0, 2.0))


class TestSimConfig:
    def test_field_validation(self):
        config = SimConfig(PLACEBO, NULL, 10, 4.0, (1.0, 2.0), seed=5, replicates=3)
        assert config.tau_list == (1.0, 2.0)
        with pytest.raises(ValueError):
            SimConfig(PLACEBO, NULL, 0, 4.0, (1.0,), seed=5)
        with pytest.raises(ValueError):
            SimConfig(PLACEBO, NULL, 10, 0.0, (1.0,), seed=5)
        with pytest.raises(ValueError):
            SimConfig(PLACEBO, NULL, 10, 4.0, (), seed=5)
        with pytest.raises(ValueError):
            SimConfig(PLACEBO, NULL, 10, 4.0, (-1.0,), seed=5)
        with pytest.raises(ValueError):
            SimConfig(PLACEBO, NULL, 10, 4.0, (1.0,), seed=5, replicates=-1)


class TestCensoring:
    def test_cut_and_indicator_rule(self):
        times = np.array([[1.0, 2.0], [3.0, 4.0], [0.5, 0.5]])
        censor = np.array([2.5, 0.5, 0.5])
        observed, indicators = apply_uniform_censoring(times, censor)
        np.testing.assert_array_equal(observed, [[1.0, 2.0], [0.5, 0.5], [0.5, 0.5]])
        np.testing.assert_array_equal(indicators, [[1, 1], [0, 0], [1, 1]])

    def test_censoring_tie_counts_as_event(self):
        observed, indicators = apply_uniform_censoring(
            np.array([[2.0]]), np.array([2.0])
        )
        assert observed[0, 0] == 2.0
        assert indicators[0, 0] == 1


class TestSimulateSubject:
    def test_immediate_death_collapses_all_tiers(self):
        rates = TransitionRates.from_sequence((0, 0, 1.0, 0, 0, 0, 0, 0, 0))
        rng = make_generator(4)
        records = [
            simulate_subject(rates, 4.0, rng, subject_id=f"s{i}") for i in range(50)
        ]
        for rec in records:
            assert rec.times[0] == rec.times[1] == rec.times[2] == rec.times[3]
        cohort = validate_cohort(records, _SIM_DOOR)
        assert cohort.n == 50

    def test_every_record_validates(self):
        rng = make_generator(11)
        records = [
            simulate_subject(PLACEBO, 4.0, rng, subject_id=f"s{i}") for i in range(300)
        ]
        cohort = validate_cohort(records, _SIM_DOOR)
        assert cohort.n == 300

    def test_bad_censor_bound_rejected(self):
        with pytest.raises(ValueError):
            simulate_subject(PLACEBO, 0.0, make_generator(1))


class TestSimulateArm:
    def test_same_seed_is_byte_identical(self):
        a = simulate_arm(PLACEBO, 100, 4.0, seed=77)
        b = simulate_arm(PLACEBO, 100, 4.0, seed=77)
        assert a.times.tobytes() == b.times.tobytes()
        assert a.indicators.tobytes() == b.indicators.tobytes()

    def test_adjacent_seeds_differ(self):
        a = simulate_arm(PLACEBO, 100, 4.0, seed=77)
        b = simulate_arm(PLACEBO, 100, 4.0, seed=78)
        assert a.times.tobytes() != b.times.tobytes()

    def test_prefix_property(self):
        big = simulate_arm(PLACEBO, 60, 4.0, seed=13)
        small = simulate_arm(PLACEBO, 25, 4.0, seed=13)
        np.testing.assert_array_equal(big.times[:25], small.times)
        np.testing.assert_array_equal(big.indicators[:25], small.indicators)

    def test_censored_times_stay_below_the_bound(self):
        cohort = simulate_arm(PLACEBO, 500, 4.0, seed=3)
        censored = cohort.indicators == 0
        assert np.all(cohort.times[censored] < 4.0)
        records = cohort.to_records()
        assert validate_cohort(records, _SIM_DOOR).n == 500

    def test_observed_event_counts_near_expectation(self):
        counts = np.zeros(2)
        reps = 60
        for r in range(reps):
            cohort = simulate_arm(PLACEBO, 400, 4.0, seed=1000 + r)
            counts += [
                cohort.observed_events(1.0)[0],
                cohort.observed_events(2.0)[0],
            ]
        counts /= reps
        assert counts[0] == pytest.approx(196.34, rel=0.03)
        assert counts[1] == pytest.approx(259.47, rel=0.03)


class TestDistributionalShape:
    def test_first_tier_time_is_exponential(self):
        n = 100_000
        times, _ = true_event_times(PLACEBO, n, make_generator(21))
        t1 = np.sort(times[:, 0])
        lam = PLACEBO.exit_initial
        cdf = 1.0 - np.exp(-lam * t1)
        upper = np.arange(1, n + 1) / n
        lower = np.arange(0, n) / n
        ks = max(np.abs(upper - cdf).max(), np.abs(cdf - lower).max())
        assert ks < 0.01

    def test_branching_frequencies_from_initial_state(self):
        n = 100_000
        times, _ = true_event_times(PLACEBO, n, make_generator(22))
        t1, t2, t3, t4 = times.T
        death = t4 == t1
        disability = (t3 == t1) & ~death
        event1 = t2 > t1
        assert np.all(death | disability | event1)
        lam = PLACEBO.exit_initial
        expected = np.array([0.5, 0.2, 0.1]) / lam
        observed = np.array(
            [event1.mean(), disability.mean(), death.mean()]
        )
        margin = 4.0 * np.sqrt(expected * (1 - expected) / n)
        assert np.all(np.abs(observed - expected) <= margin)

    def test_tier_times_never_decrease(self):
        times, _ = true_event_times(NULL, 20_000, make_generator(23))
        assert np.all(np.diff(times, axis=1) >= 0)


class TestSimulateTrial:
    def test_arms_use_disjoint_streams(self):
        config = SimConfig(PLACEBO, NULL, 40, 4.0, (1.0,), seed=9)
        control, treatment = simulate_trial(config)
        assert control.arm == CONTROL and treatment.arm == TREATMENT
        assert control.times.tobytes() != treatment.times.tobytes()
        again_c, again_t = simulate_trial(config)
        assert control.times.tobytes() == again_c.times.tobytes()
        assert treatment.times.tobytes() == again_t.times.tobytes()

    def test_replicates_are_distinct_but_reproducible(self):
        config = SimConfig(PLACEBO, NULL, 40, 4.0, (1.0,), seed=9)
        c0, _ = simulate_trial(config, replicate=0)
        c1, _ = simulate_trial(config, replicate=1)
        assert c0.times.tobytes() != c1.times.tobytes()


@st.composite
def rate_vectors(draw):
    values = draw(
        st.lists(
            st.floats(min_value=0.05, max_value=3.0, allow_nan=False),
            min_size=9,
            max_size=9,
        )
    )
    return TransitionRates.from_sequence(values)


@given(rate_vectors(), st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=40)
def test_simulated_records_always_validate(rates, seed):
    cohort = simulate_arm(rates, 25, 3.0, seed=seed)
    assert validate_cohort(cohort.to_records(), _SIM_DOOR).n == 25
    assert np.all(np.diff(cohort.times, axis=1) >= 0)
