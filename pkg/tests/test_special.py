import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdrloc.special import (
    chi2_upper_tail,
    nearest_rank_percentile,
    reg_gamma_p,
    reg_gamma_q,
)

from .oracles import brute_force_nearest_rank, chi2_tail_by_quadrature


class TestRegularizedGamma:
    def test_boundaries(self):
        assert reg_gamma_p(2.5, 0.0) == 0.0
        assert reg_gamma_q(2.5, 0.0) == 1.0

    def test_complement_identity(self):
        for a in (0.5, 1.0, 3.5, 10.0):
            for x in (0.1, 1.0, 5.0, 25.0):
                assert reg_gamma_p(a, x) + reg_gamma_q(a, x) == pytest.approx(1.0, abs=1e-12)

    def test_exponential_special_case(self):
        # a = 1 reduces to exp(-x)
        for x in (0.3, 1.0, 4.2):
            assert reg_gamma_q(1.0, x) == pytest.approx(np.exp(-x), abs=1e-12)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            reg_gamma_p(0.0, 1.0)
        with pytest.raises(ValueError):
            reg_gamma_q(1.0, -1.0)


class TestChiSquaredTail:
    def test_zero_statistic(self):
        assert chi2_upper_tail(0.0, 9) == 1.0

    def test_matches_quadrature_grid(self):
        for df in range(1, 13):
            for x in np.arange(0.5, 20.5, 0.5):
                assert chi2_upper_tail(float(x), df) == pytest.approx(
                    chi2_tail_by_quadrature(float(x), df), abs=1e-6
                )

    def test_monotone_decreasing_in_statistic(self):
        values = [chi2_upper_tail(x, 9) for x in np.linspace(0.0, 40.0, 81)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[0] == 1.0
        assert values[-1] < 1e-4

    def test_even_df_closed_form(self):
        # df = 2: survival function is exp(-x/2)
        for x in (0.5, 2.0, 7.7):
            assert chi2_upper_tail(x, 2) == pytest.approx(np.exp(-x / 2), abs=1e-12)


class TestNearestRankPercentile:
    def test_examples(self):
        data = list(range(1, 11))
        assert nearest_rank_percentile(data, 80) == 8
        assert nearest_rank_percentile(data, 100) == 10
        assert nearest_rank_percentile(data, 0) == 1
        assert nearest_rank_percentile([7.5], 80) == 7.5

    @given(
        st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=60),
        st.floats(min_value=0, max_value=100),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_brute_force(self, values, pct):
        assert nearest_rank_percentile(values, pct) == brute_force_nearest_rank(values, pct)
