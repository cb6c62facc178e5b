import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aoi_harq.errors import ParameterError
from aoi_harq.harq import HarqModel, ModelKind, TerminalChannel
from aoi_harq.moments import (
    Exactness,
    Moment,
    MomentMode,
    ek1_closed,
    ek1sq_closed,
    ek2_upper,
    ek2_upper_truncated,
    ek2sq_upper,
    moment_set,
    series_oracle,
)

M1 = HarqModel(ModelKind.RECIPROCAL_DECAY)
M2 = HarqModel(ModelKind.EXPONENTIAL_DECAY, 0.5)


def brute_series(p0, lam, which, terms=400):
    """Independent brute-force partial sum of the attempt-count series."""
    total = 0.0
    for r in range(terms):
        t = p0**r * lam ** (r * (r - 1) / 2)
        total += (2 * r + 1) * t if which is Moment.SECOND else t
    return total


class TestClosedForms:
    def test_ek1_values(self):
        assert ek1_closed(0.0) == 1.0
        assert ek1_closed(1.0) == pytest.approx(math.e, rel=1e-15)

    def test_ek1sq_values(self):
        assert ek1sq_closed(0.0) == 1.0
        assert ek1sq_closed(1.0) == pytest.approx(3 * math.e, rel=1e-15)

    def test_out_of_range_rejected(self):
        with pytest.raises(ParameterError):
            ek1_closed(1.01)
        with pytest.raises(ParameterError):
            ek1sq_closed(-0.2)


class TestSeriesOracle:
    def test_matches_closed_forms_on_grid(self):
        for i in range(101):
            p0 = i / 100
            first = series_oracle(M1, p0, Moment.FIRST)
            second = series_oracle(M1, p0, Moment.SECOND)
            assert abs(first - math.exp(p0)) <= 1e-10 * math.exp(p0)
            assert abs(second - ek1sq_closed(p0)) <= 1e-10 * ek1sq_closed(p0)

    def test_tight_agreement_at_default_tolerance(self):
        assert series_oracle(M1, 0.7, Moment.FIRST) == pytest.approx(
            math.exp(0.7), rel=1e-12
        )

    def test_first_moment_exponential_hardest_case(self):
        # p0 = 1, lam = 0.5: partial sums bracket the limit, and the first
        # five terms are 1, 1, 1/2, 1/8, 1/64 by hand
        value = series_oracle(M2, 1.0, Moment.FIRST)
        s5 = 1 + 1 + 0.5 + 0.125 + 0.015625
        assert s5 < value < s5 + 2 * 0.0009765625  # next term, doubled for tail
        assert value == pytest.approx(2.6416325606551254, abs=1e-12)

    def test_perfect_channel(self):
        for model in (M1, M2):
            for which in Moment:
                assert series_oracle(model, 0.0, which) == 1.0

    def test_against_brute_force(self):
        for p0 in (0.05, 0.4, 0.95, 1.0):
            for lam in (0.1, 0.5, 0.9):
                model = HarqModel(ModelKind.EXPONENTIAL_DECAY, lam)
                for which in Moment:
                    assert series_oracle(model, p0, which) == pytest.approx(
                        brute_series(p0, lam, which), rel=1e-11
                    )

    def test_tol_must_be_positive(self):
        with pytest.raises(ParameterError):
            series_oracle(M1, 0.5, Moment.FIRST, tol=0.0)

    @settings(max_examples=60)
    @given(p0=st.floats(0.0, 1.0), lam=st.floats(0.05, 0.95))
    def test_moment_inequalities(self, p0, lam):
        model = HarqModel(ModelKind.EXPONENTIAL_DECAY, lam)
        first = series_oracle(model, p0, Moment.FIRST)
        second = series_oracle(model, p0, Moment.SECOND)
        assert first >= 1.0
        assert second >= first * first * (1 - 1e-12)  # Jensen


class TestUpperBounds:
    def test_ek2_upper_values(self):
        assert ek2_upper(0.0, 0.5) == 1.0
        expected = 1 + (1 + math.sqrt(2 * math.pi / math.log(2)))
        assert ek2_upper(1.0, 0.5) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(5.0107674, abs=1e-6)

    def test_ek2_upper_dominates_series(self):
        for p0 in (0.1, 0.5, 0.9, 1.0):
            for lam in (0.2, 0.5, 0.8):
                model = HarqModel(ModelKind.EXPONENTIAL_DECAY, lam)
                assert ek2_upper(p0, lam) >= series_oracle(model, p0, Moment.FIRST)

    def test_truncated_r1_equals_plain_bound(self):
        for p0 in (0.0, 0.3, 1.0):
            for lam in (0.1, 0.5, 0.9):
                assert ek2_upper_truncated(p0, lam, 1) == ek2_upper(p0, lam)

    def test_truncated_r4_hand_value(self):
        # head 1 + 1 + 1/2 + 1/8, tail coefficient on p0^4 lam^6 = 1/64
        expected = 2.625 + (1 + math.sqrt(2 * math.pi / math.log(2))) * 0.015625
        assert ek2_upper_truncated(1.0, 0.5, 4) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(2.6877, abs=5e-5)

    def test_truncated_perfect_channel(self):
        for R in (1, 2, 4, 8):
            assert ek2_upper_truncated(0.0, 0.5, R) == 1.0

    def test_truncated_rejects_r0(self):
        with pytest.raises(ParameterError):
            ek2_upper_truncated(0.5, 0.5, 0)

    def test_lam_out_of_range(self):
        with pytest.raises(ParameterError):
            ek2_upper(0.5, 1.0)
        with pytest.raises(ParameterError):
            ek2_upper_truncated(0.5, 0.0, 2)


class TestEk2SqUpper:
    def test_rejects_perfect_channel(self):
        with pytest.raises(ParameterError):
            ek2sq_upper(0.0, 0.5, 1.0)

    def test_p0_one_reduces_to_affine_form(self):
        # log p0 = 0: bound is 2*ek2 + 2/log(1/lam) - 1
        ek2 = series_oracle(M2, 1.0, Moment.FIRST)
        expected = 2 * ek2 + 2 / math.log(2) - 1
        assert ek2sq_upper(1.0, 0.5, ek2) == pytest.approx(expected, rel=1e-14)

    def test_dominates_series_with_exact_feed_below_pivot(self):
        # p0 < lam: the ek2 coefficient is negative, exact feed is the
        # certified choice
        model = HarqModel(ModelKind.EXPONENTIAL_DECAY, 0.9)
        for p0 in (0.05, 0.3, 0.6):
            exact = series_oracle(model, p0, Moment.FIRST)
            assert ek2sq_upper(p0, 0.9, exact) >= series_oracle(
                model, p0, Moment.SECOND
            )

    def test_dominates_series_with_bound_feed_above_pivot(self):
        # p0 >= lam: positive coefficient, feed the E[K] upper bound
        for p0, lam in ((1.0, 0.5), (0.7, 0.3), (0.5, 0.5)):
            model = HarqModel(ModelKind.EXPONENTIAL_DECAY, lam)
            assert ek2sq_upper(p0, lam, ek2_upper(p0, lam)) >= series_oracle(
                model, p0, Moment.SECOND
            )


class TestMomentSet:
    def test_reciprocal_closed_forms(self):
        for mode in MomentMode:
            ms = moment_set(M1, TerminalChannel(1.0), mode)
            assert ms.ek == pytest.approx(math.e, rel=1e-15)
            assert ms.ek2 == pytest.approx(3 * math.e, rel=1e-15)
            assert ms.exactness is Exactness.EXACT

    def test_exponential_perfect_channel(self):
        for mode in MomentMode:
            ms = moment_set(M2, TerminalChannel(0.0), mode)
            assert (ms.ek, ms.ek2, ms.exactness) == (1.0, 1.0, Exactness.EXACT)

    def test_exponential_prefer_exact_uses_series(self):
        ms = moment_set(M2, TerminalChannel(1.0))
        assert ms.ek == pytest.approx(2.6416325606551254, abs=1e-12)
        assert ms.ek2 == pytest.approx(brute_series(1.0, 0.5, Moment.SECOND), rel=1e-11)
        assert ms.exactness is Exactness.EXACT
        assert ms.ek2 >= ms.ek**2  # Jensen for exact moments

    def test_exponential_prefer_bound(self):
        ms = moment_set(M2, TerminalChannel(1.0), MomentMode.PREFER_BOUND, r_trunc=4)
        assert ms.exactness is Exactness.UPPER_BOUND
        assert ms.ek == ek2_upper_truncated(1.0, 0.5, 4)
        # above the p0 >= lam pivot the second-moment bound is fed the
        # closed-form E[K] bound
        assert ms.ek2 == ek2sq_upper(1.0, 0.5, ek2_upper(1.0, 0.5))
        exact = moment_set(M2, TerminalChannel(1.0))
        assert ms.ek >= exact.ek
        assert ms.ek2 >= exact.ek2

    def test_bounds_dominate_exact_below_pivot_too(self):
        ch = TerminalChannel(0.2)  # p0 < lam
        model = HarqModel(ModelKind.EXPONENTIAL_DECAY, 0.8)
        bound = moment_set(model, ch, MomentMode.PREFER_BOUND)
        exact = moment_set(model, ch)
        assert bound.ek >= exact.ek
        assert bound.ek2 >= exact.ek2


def test_monte_carlo_moments_converge(mc_attempts):
    # sample mean / second moment vs the series oracle, 3 standard errors
    for key, model in (("m1", M1), ("m2", M2)):
        k = mc_attempts[key].astype(np.float64)
        for which, data in ((Moment.FIRST, k), (Moment.SECOND, k * k)):
            expected = series_oracle(model, 1.0, which)
            se = data.std(ddof=1) / math.sqrt(data.size)
            assert abs(data.mean() - expected) <= 3 * se
