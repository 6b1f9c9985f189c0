import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdrloc.exceptions import InvalidConfig, NoLabeledUsers, ZeroTotalWeight
from cdrloc.localize import (
    AnchorLocalizer,
    CellStats,
    ClusterWeightParams,
    anchor_hours_mask,
    calldays_anchor,
    calldays_anchor_estimate,
    cell_weights,
    dbscan_stay_clusters,
    fit_segment_params,
    holiday_day_indices,
    infer_anchor,
    minmax_scale,
    weighted_kmeanspp,
)
from cdrloc.core import UserSegment

from .conftest import make_registry, make_streams, simple_grid

MONDAY = 86400 * 4  # 1970-01-05


def night(day, hour=21):
    return MONDAY + day * 86400 + hour * 3600


def workhour(day, hour=10):
    return MONDAY + day * 86400 + hour * 3600


TOWERS = [
    ("H1", 0.50, 0.500, 100.0, "A"),
    ("H2", 0.50, 0.505, 100.0, "A"),  # ~556 m from H1
    ("H3", 0.505, 0.500, 100.0, "A"),  # ~556 m from H1
    ("F1", 0.50, 0.600, 100.0, "A"),  # ~11 km east
    ("W1", 0.50, 1.500, 50.0, "B"),
]


def _registry():
    return make_registry(TOWERS, simple_grid())


class TestDbscan:
    def test_three_close_towers_one_cluster(self):
        lat = np.array([0.500, 0.5010, 0.5005])
        lon = np.array([0.500, 0.5005, 0.5010])  # all within ~200 m
        labels = dbscan_stay_clusters(lat, lon, np.array([1.0, 1.0, 1.0]), 1000.0, 3)
        assert set(labels) == {0}

    def test_far_towers_two_clusters(self):
        lat = np.array([0.5, 0.5])
        lon = np.array([0.5, 0.95])  # ~50 km
        labels = dbscan_stay_clusters(lat, lon, np.array([5.0, 5.0]), 1000.0, 3)
        assert set(labels) == {0, 1}

    def test_single_sparse_point_is_noise(self):
        labels = dbscan_stay_clusters(
            np.array([0.5]), np.array([0.5]), np.array([1.0]), 1000.0, 3
        )
        assert list(labels) == [-1]

    def test_record_multiplicity_makes_core(self):
        labels = dbscan_stay_clusters(
            np.array([0.5]), np.array([0.5]), np.array([3.0]), 1000.0, 3
        )
        assert list(labels) == [0]

    def test_border_point_joins_cluster(self):
        # middle point is core; ends are borders reachable from it
        lat = np.array([0.5, 0.5, 0.5])
        lon = np.array([0.500, 0.508, 0.516])
        labels = dbscan_stay_clusters(lat, lon, np.array([1.0, 5.0, 1.0]), 1000.0, 3)
        assert list(labels) == [0, 0, 0]


class TestMinmaxScale:
    def test_examples(self):
        assert list(minmax_scale([0.0, 5.0, 10.0])) == [0.0, 0.5, 1.0]
        assert list(minmax_scale([7.0, 7.0, 7.0])) == [1.0, 1.0, 1.0]
        assert list(minmax_scale([3.25])) == [1.0]

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=30))
    @settings(max_examples=150, deadline=None)
    def test_range_and_extremes(self, values):
        scaled = minmax_scale(values)
        assert np.all(scaled >= 0.0) and np.all(scaled <= 1.0)
        assert scaled.max() == 1.0


class TestCellWeights:
    def test_unit_coefficients_sum_scaled_factors(self):
        stats = CellStats(
            load_share_count=np.array([0.0, 5.0, 10.0]),
            inv_power=np.array([0.0, 2.0, 10.0]),
            active_days=np.array([0.0, 3.0, 10.0]),
        )
        w = cell_weights(stats, ClusterWeightParams(1.0, 1.0, 1.0))
        assert w[1] == pytest.approx(0.5 + 0.2 + 0.3, abs=1e-12)

    def test_zero_coefficients_zero_weights(self):
        stats = CellStats(np.array([1.0, 2.0]), np.array([0.1, 0.2]), np.array([1.0, 2.0]))
        w = cell_weights(stats, ClusterWeightParams(0.0, 0.0, 0.0))
        assert np.all(w == 0.0)

    def test_single_cell_cluster(self):
        stats = CellStats(np.array([4.0]), np.array([0.01]), np.array([9.0]))
        w = cell_weights(stats, ClusterWeightParams(0.2, 0.3, 0.4))
        assert w[0] == pytest.approx(0.9, abs=1e-12)

    @given(
        st.lists(st.floats(min_value=0, max_value=100), min_size=2, max_size=10),
        st.floats(min_value=0.01, max_value=1000),
    )
    @settings(max_examples=100, deadline=None)
    def test_invariant_to_common_rescaling(self, raw, scale):
        raw = np.asarray(raw)
        base = CellStats(raw, np.ones_like(raw), np.ones_like(raw))
        scaled = CellStats(raw * scale, np.ones_like(raw), np.ones_like(raw))
        p = ClusterWeightParams(0.7, 0.2, 0.1)
        assert np.allclose(cell_weights(base, p), cell_weights(scaled, p), atol=1e-9)

    def test_box_validation(self):
        with pytest.raises(InvalidConfig):
            ClusterWeightParams(1.2, 0.0, 0.0)


class TestWeightedKMeans:
    def test_k1_two_equal_points_midpoint(self):
        res = weighted_kmeanspp(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([1.0, 1.0]), k=1)
        assert np.allclose(res.centroids[0], [0.5, 0.5], atol=1e-12)

    def test_k1_three_to_one_weights(self):
        a, b = np.array([0.0, 0.0]), np.array([1.0, 2.0])
        res = weighted_kmeanspp(np.vstack([a, b]), np.array([3.0, 1.0]), k=1)
        assert np.allclose(res.centroids[0], a + 0.25 * (b - a), atol=1e-12)

    def test_k2_two_points_zero_cost(self):
        res = weighted_kmeanspp(
            np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([1.0, 2.0]), k=2, seed=3
        )
        assert res.cost == 0.0
        assert {tuple(c) for c in res.centroids} == {(0.0, 0.0), (1.0, 1.0)}

    def test_zero_total_weight_raises(self):
        with pytest.raises(ZeroTotalWeight):
            weighted_kmeanspp(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.0, 0.0]), k=1)

    def test_k_exceeding_distinct_points_raises(self):
        with pytest.raises(InvalidConfig):
            weighted_kmeanspp(np.array([[0.0, 0.0], [0.0, 0.0]]), np.array([1.0, 1.0]), k=2)

    def test_k1_matches_analytic_weighted_mean(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = rng.integers(1, 12)
            pts = rng.uniform([6.7, 79.8], [7.3, 80.4], (n, 2))
            w = rng.uniform(0.0, 5.0, n)
            if w.sum() == 0:
                w[0] = 1.0
            res = weighted_kmeanspp(pts, w, k=1, seed=int(rng.integers(1 << 16)))
            assert np.allclose(res.centroids[0], np.average(pts, axis=0, weights=w), atol=1e-12)

    def test_cost_non_increasing(self):
        rng = np.random.default_rng(7)
        pts = rng.normal(0, 1, (60, 2))
        w = rng.uniform(0.1, 2.0, 60)
        res = weighted_kmeanspp(pts, w, k=4, seed=5)
        assert np.all(np.diff(res.cost_history) <= 1e-12)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(0, 1, (30, 2))
        w = rng.uniform(0.1, 2.0, 30)
        r1 = weighted_kmeanspp(pts, w, k=3, seed=9)
        r2 = weighted_kmeanspp(pts, w, k=3, seed=9)
        assert np.array_equal(r1.centroids, r2.centroids)


class TestAnchorHours:
    def test_home_wraps_midnight(self):
        ts = np.array(
            [MONDAY + 2 * 3600, MONDAY + 12 * 3600, MONDAY + 21 * 3600], dtype=np.int64
        )
        mask = anchor_hours_mask(ts, "home")
        assert list(mask) == [True, False, True]

    def test_work_hours_weekdays_only(self):
        monday_10 = MONDAY + 10 * 3600
        saturday_10 = MONDAY + 5 * 86400 + 10 * 3600
        monday_1230 = MONDAY + 12 * 3600 + 1800
        mask = anchor_hours_mask(
            np.array([monday_10, saturday_10, monday_1230], dtype=np.int64), "work"
        )
        assert list(mask) == [True, False, False]

    def test_holidays_excluded_from_work(self):
        ts = np.array([MONDAY + 10 * 3600], dtype=np.int64)
        holidays = holiday_day_indices(["1970-01-05"])
        assert not anchor_hours_mask(ts, "work", holidays=holidays).any()
        assert anchor_hours_mask(ts, "work").any()


PARAMS = ClusterWeightParams(0.0, 0.0, 1.0)


class TestInferAnchor:
    def test_all_night_records_single_tower(self):
        reg = _registry()
        streams = make_streams([("u1", night(d), "H1", 1) for d in range(5)], reg)
        s = streams.stream(0)
        anchor = infer_anchor(s, np.zeros(5, dtype=bool), "home", PARAMS)
        assert anchor == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_busier_cluster_wins(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(10)]
        records += [("u1", night(d, 22) + 60, "F1", 1) for d in range(2)]
        records += [("u1", night(d, 22) + 120, "F1", 1) for d in range(2)]
        streams = make_streams(records, reg)
        s = streams.stream(0)
        anchor = infer_anchor(s, np.zeros(len(s), dtype=bool), "home", PARAMS)
        assert anchor == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_work_without_daytime_records_is_none(self):
        reg = _registry()
        saturday = MONDAY + 5 * 86400
        streams = make_streams(
            [("u1", saturday + 10 * 3600 + i, "W1", 1) for i in range(4)], reg
        )
        s = streams.stream(0)
        assert infer_anchor(s, np.zeros(4, dtype=bool), "work", PARAMS) is None
        assert infer_anchor(s, np.zeros(4, dtype=bool), "home", PARAMS) is None

    def test_sparse_user_falls_back_to_single_stay(self):
        # one record each at two distant towers: nothing is dense enough,
        # so all restricted towers act as one stay
        reg = _registry()
        streams = make_streams(
            [("u1", night(0), "H1", 1), ("u1", night(1), "F1", 1)], reg
        )
        s = streams.stream(0)
        anchor = infer_anchor(s, np.zeros(2, dtype=bool), "home", PARAMS)
        assert anchor is not None
        assert 0.5 <= anchor[1] <= 0.6

    def test_weighted_centroid_interpolates_cluster(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(9)]
        records += [("u1", night(d) + 60, "H2", 1) for d in range(3)]
        streams = make_streams(records, reg)
        s = streams.stream(0)
        anchor = infer_anchor(s, np.zeros(len(s), dtype=bool), "home", PARAMS)
        # days scale to (1, 0): H2 drops out, anchor lands on H1 exactly
        assert anchor == pytest.approx((0.5, 0.5), abs=1e-12)
        uniform = infer_anchor(
            s, np.zeros(len(s), dtype=bool), "home", ClusterWeightParams(0, 0, 0)
        )
        assert uniform == pytest.approx((0.5, 0.5025), abs=1e-9)


class TestCalldaysAnchor:
    def test_single_tower(self):
        reg = _registry()
        streams = make_streams([("u1", night(0), "H1", 1)], reg)
        assert calldays_anchor(streams.stream(0), "home") == (0.5, 0.5)

    def test_more_days_wins(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(7)]
        records += [("u1", night(d) + 60, "H2", 1) for d in range(3)]
        streams = make_streams(records, reg)
        assert calldays_anchor(streams.stream(0), "home") == (0.5, 0.5)

    def test_day_tie_broken_by_records(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(5)]
        records += [("u1", night(d) + 60, "H2", 1) for d in range(5)]
        records += [("u1", night(d) + 120, "H2", 1) for d in range(5)]
        streams = make_streams(records, reg)
        est = calldays_anchor_estimate(streams.stream(0), "home")
        assert (est.lat, est.lon) == (0.5, 0.505)
        assert est.cluster_days == 5
        assert est.n_records == 10


class TestFitSegmentParams:
    def test_single_cell_tie_break(self):
        reg = _registry()
        streams = make_streams([("u1", night(d), "H1", 1) for d in range(5)], reg)
        s = streams.stream(0)
        result = fit_segment_params([(s, np.zeros(5, dtype=bool))], [(0.5, 0.5)])
        assert (result.params.alpha, result.params.beta, result.params.gamma) == (0.0, 0.0, 0.1)
        assert result.median_error_m == pytest.approx(0.0, abs=1e-9)

    def test_days_only_signal_recovers_gamma(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(9)]
        records += [("u1", night(d) + 60, "H2", 1) for d in range(3)]
        records += [("u1", night(d) + 120, "H3", 1) for d in range(6)]
        streams = make_streams(records, reg)
        s = streams.stream(0)
        flags = np.zeros(len(s), dtype=bool)
        # truth = the centroid a days-only weighting produces
        days_only = infer_anchor(s, flags, "home", ClusterWeightParams(0, 0, 1))
        result = fit_segment_params([(s, flags)], [days_only])
        assert result.params.gamma > 0
        # fitted params reproduce the days-only solution's error
        fitted = infer_anchor(s, flags, "home", result.params)
        import cdrloc.core as core

        err_fit = core.haversine_km(fitted[0], fitted[1], *days_only) * 1000
        assert err_fit == pytest.approx(result.median_error_m, abs=1e-9)
        assert result.median_error_m == pytest.approx(0.0, abs=1e-6)

    def test_deterministic(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(4)] + [
            ("u1", night(d) + 60, "H2", 1) for d in range(2)
        ]
        streams = make_streams(records, reg)
        s = streams.stream(0)
        r1 = fit_segment_params([(s, np.zeros(len(s), dtype=bool))], [(0.5, 0.501)])
        r2 = fit_segment_params([(s, np.zeros(len(s), dtype=bool))], [(0.5, 0.501)])
        assert r1.params == r2.params
        assert r1.median_error_m == r2.median_error_m

    def test_no_usable_users_raises(self):
        reg = _registry()
        streams = make_streams([("u1", MONDAY + 12 * 3600, "H1", 1)], reg)
        s = streams.stream(0)
        with pytest.raises(NoLabeledUsers):
            fit_segment_params([(s, np.zeros(1, dtype=bool))], [(0.5, 0.5)])

    def test_box_always_satisfied(self):
        reg = _registry()
        records = [("u1", night(d), "H1", 1) for d in range(4)] + [
            ("u1", night(d) + 60, "H2", 1) for d in range(2)
        ]
        streams = make_streams(records, reg)
        s = streams.stream(0)
        r = fit_segment_params([(s, np.zeros(len(s), dtype=bool))], [(0.51, 0.49)])
        for v in (r.params.alpha, r.params.beta, r.params.gamma):
            assert 0.0 <= v <= 1.0


class TestAnchorLocalizerEstimator:
    def test_fit_predict_shapes(self):
        reg = _registry()
        records = []
        for u in ("u1", "u2"):
            records += [(u, night(d), "H1", 1) for d in range(4)]
            records += [(u, workhour(d), "W1", 1) for d in range(4)]
        streams = make_streams(records, reg)
        X = []
        for i in range(streams.n_users):
            s = streams.stream(i)
            X.append((s, np.zeros(len(s), dtype=bool), UserSegment.FULL_TIME))
        y = np.array([[0.5, 0.5], [0.5, 0.5]])
        model = AnchorLocalizer(eps_m=1000.0).fit(X, y)
        assert UserSegment.FULL_TIME in model.segment_params_
        homes = model.predict(X, kind="home")
        works = model.predict(X, kind="work")
        assert homes.shape == (2, 2) and works.shape == (2, 2)
        assert np.allclose(homes[0], [0.5, 0.5], atol=1e-9)
        assert np.allclose(works[0], [0.5, 1.5], atol=1e-9)

    def test_get_params(self):
        model = AnchorLocalizer(eps_m=2500.0, min_pts=4)
        params = model.get_params()
        assert params["eps_m"] == 2500.0
        assert params["min_pts"] == 4
