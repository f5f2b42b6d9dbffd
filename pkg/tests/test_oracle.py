import inspect
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doorrmst.oracle import (
    TrueRmst,
    expected_observed_events_tier1,
    true_rmst1_closed_form,
    true_rmst_mc,
)
from doorrmst.simulate import TransitionRates

PLACEBO = TransitionRates.from_sequence((0.5, 0.2, 0.1, 1.0, 0.4, 0.2, 0.6, 0.3, 0.3))
NULL = TransitionRates.from_sequence(
    (0.3, 0.15, 0.06, 0.6, 0.3, 0.12, 0.36, 0.24, 0.24)
)


class TestClosedForm:
    def test_matches_the_exponential_identity(self):
        lam = PLACEBO.exit_initial
        assert lam == pytest.approx(0.8)
        value = true_rmst1_closed_form(PLACEBO, 2.0)
        assert value == pytest.approx((1 - math.exp(-1.6)) / 0.8, abs=1e-15)
        assert value == pytest.approx(0.998, abs=5e-4)

    def test_treatment_rates_value(self):
        value = true_rmst1_closed_form(NULL, 2.0)
        assert NULL.exit_initial == pytest.approx(0.51)
        assert value == pytest.approx((1 - math.exp(-1.02)) / 0.51, abs=1e-15)
        assert value == pytest.approx(1.25, abs=5e-3)

    def test_zero_horizon(self):
        assert true_rmst1_closed_form(PLACEBO, 0.0) == 0.0

    def test_grows_toward_the_mean(self):
        values = [true_rmst1_closed_form(PLACEBO, t) for t in (0.5, 1, 2, 4, 50)]
        assert values == sorted(values)
        assert values[-1] == pytest.approx(1 / 0.8, abs=1e-10)


class TestMonteCarloOracle:
    def test_structure_and_determinism(self):
        res = true_rmst_mc(PLACEBO, 2.0, reps=20_000, seed=5)
        assert isinstance(res, TrueRmst)
        assert res.mc_reps == 20_000
        assert res.values.shape == (4,)
        assert np.all(res.values >= 0) and np.all(res.values <= 2.0)
        assert np.all(np.diff(res.values) >= 0)
        assert np.all(res.mc_standard_error > 0)
        again = true_rmst_mc(PLACEBO, 2.0, reps=20_000, seed=5)
        np.testing.assert_array_equal(res.values, again.values)

    def test_zero_horizon_gives_zeros(self):
        res = true_rmst_mc(PLACEBO, 0.0, reps=100, seed=1)
        np.testing.assert_array_equal(res.values, np.zeros(4))

    def test_chunking_does_not_change_the_stream(self):
        a = true_rmst_mc(PLACEBO, 2.0, reps=5_000, seed=9, chunk_size=5_000)
        b = true_rmst_mc(PLACEBO, 2.0, reps=5_000, seed=9, chunk_size=57)
        np.testing.assert_allclose(b.values, a.values, rtol=1e-13)
        np.testing.assert_allclose(b.mc_standard_error, a.mc_standard_error, rtol=1e-10)

    def test_tier1_agrees_with_closed_form(self):
        res = true_rmst_mc(PLACEBO, 2.0, reps=100_000, seed=2)
        exact = true_rmst1_closed_form(PLACEBO, 2.0)
        assert abs(res.values[0] - exact) <= 4.0 * res.mc_standard_error[0]

    def test_takes_no_censoring_input(self):
        parameters = inspect.signature(true_rmst_mc).parameters
        assert not any("censor" in name for name in parameters)

    def test_rejects_nonpositive_reps(self):
        with pytest.raises(ValueError):
            true_rmst_mc(PLACEBO, 2.0, reps=0, seed=1)


class TestExpectedEvents:
    def test_zero_horizon(self):
        assert expected_observed_events_tier1(PLACEBO, 4.0, 0.0) == 0.0

    def test_matches_independent_integration(self):
        for lam_rates, cmax, tau in (
            (PLACEBO, 4.0, 1.0),
            (PLACEBO, 4.0, 2.0),
            (NULL, 4.0, 1.5),
            (PLACEBO, 1.5, 3.0),
        ):
            lam = lam_rates.exit_initial
            grid = np.linspace(0.0, cmax, 200_001)
            cut = np.minimum(grid, tau)
            prob = np.trapezoid(1.0 - np.exp(-lam * cut), grid) / cmax
            value = expected_observed_events_tier1(lam_rates, cmax, tau)
            assert value == pytest.approx(prob, abs=1e-8)

    def test_tier1_event_counts_from_summary_table(self):
        per_subject_1 = expected_observed_events_tier1(PLACEBO, 4.0, 1.0)
        per_subject_2 = expected_observed_events_tier1(PLACEBO, 4.0, 2.0)
        assert 400 * per_subject_1 == pytest.approx(196.34, rel=0.03)
        assert 400 * per_subject_2 == pytest.approx(259.47, rel=0.03)


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


@given(rate_vectors(), st.floats(min_value=0.25, max_value=5.0))
@settings(max_examples=25)
def test_true_values_are_ordered_and_bounded(rates, tau):
    res = true_rmst_mc(rates, tau, reps=2_000, seed=17)
    assert np.all(res.values >= 0.0)
    assert np.all(res.values <= tau + 1e-12)
    assert np.all(np.diff(res.values) >= -1e-12)
