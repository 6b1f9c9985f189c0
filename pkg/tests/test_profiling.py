import numpy as np
import pytest

from cdrloc.core import SEGMENTS, UserSegment
from cdrloc.exceptions import DimensionMismatch, EmptyStream, SingleClassData
from cdrloc.profiling import (
    FEATURE_DIM,
    SegmentClassifier,
    classification_report,
    extract_features,
    extract_features_all,
    majority_class,
)

from .conftest import make_registry, make_streams, simple_grid
from .oracles import spherical_law_of_cosines_km

# towers at the pair of coordinates whose separation the distance oracle pins
PAIR_KM = spherical_law_of_cosines_km(0.5, 0.5, 0.5, 0.51)


def _registry():
    return make_registry(
        [("T1", 0.5, 0.5, 100.0, "A"), ("T2", 0.5, 0.51, 100.0, "A")],
        simple_grid(),
    )


MONDAY = 86400 * 4  # 1970-01-05
SATURDAY = 86400 * 2  # 1970-01-03


class TestExtractFeatures:
    def test_single_cell_nine_oclock(self):
        reg = _registry()
        n = 6
        streams = make_streams(
            [("u1", MONDAY + 9 * 3600 + 60 * i, "T1", 1) for i in range(n)], reg
        )
        v = extract_features(streams.stream(0))
        assert v.shape == (FEATURE_DIM,)
        assert v[9] == 1.0
        assert v[:24].sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(v[24:48] == 0.0)
        assert v[48] == pytest.approx(1.0 / n)

    def test_alternating_cells_mean_hop_distance(self):
        reg = _registry()
        records = []
        for i, h in enumerate((10, 10, 11, 11, 12, 12)):
            minute = 0 if i % 2 == 0 else 30
            records.append(
                ("u1", MONDAY + h * 3600 + minute * 60, "T1" if i % 2 == 0 else "T2", 1)
            )
        streams = make_streams(records, reg)
        v = extract_features(streams.stream(0))
        # every consecutive hop alternates towers, so each anchor hour's
        # mean displacement is the tower separation itself
        for h in (10, 11):
            assert v[24 + h] == pytest.approx(PAIR_KM, abs=1e-3)

    def test_all_saturday_weekend_fraction(self):
        reg = _registry()
        streams = make_streams(
            [("u1", SATURDAY + 3600 * i, "T1", 1) for i in range(4)], reg
        )
        v = extract_features(streams.stream(0))
        assert v[49] == 1.0

    def test_empty_stream_raises(self):
        reg = _registry()
        streams = make_streams([("u1", MONDAY, "T1", 1)], reg)
        empty = streams.subset_users(np.zeros(1, dtype=bool))
        with pytest.raises(EmptyStream):
            extract_features_all_first(empty)

    def test_vectorized_matches_per_stream(self):
        reg = _registry()
        rng = np.random.default_rng(3)
        records = []
        for u in range(5):
            for _ in range(20):
                records.append(
                    (
                        f"u{u}",
                        MONDAY + int(rng.integers(0, 7 * 86400)),
                        "T1" if rng.random() < 0.5 else "T2",
                        1,
                    )
                )
        streams = make_streams(records, reg)
        X = extract_features_all(streams)
        for i in range(streams.n_users):
            assert np.allclose(X[i], extract_features(streams.stream(i)), atol=1e-12)


def extract_features_all_first(streams):
    if streams.n_users == 0:
        raise EmptyStream("no users")
    return extract_features_all(streams)


def _separable_set():
    rng = np.random.default_rng(5)
    a = rng.normal([-2, 0], 0.3, (20, 2))
    b = rng.normal([2, 0], 0.3, (20, 2))
    X = np.vstack([a, b])
    y = [UserSegment.FULL_TIME] * 20 + [UserSegment.STUDENT] * 20
    return X, y


class TestSegmentClassifier:
    def test_separable_training_accuracy(self):
        X, y = _separable_set()
        model = SegmentClassifier(seed=0).fit(X, y)
        assert list(model.predict(X)) == y

    def test_deterministic_given_seed(self):
        X, y = _separable_set()
        m1 = SegmentClassifier(seed=7).fit(X, y)
        m2 = SegmentClassifier(seed=7).fit(X, y)
        assert np.array_equal(m1.coef_, m2.coef_)

    def test_class_weighting_rescues_minority_recall(self):
        rng = np.random.default_rng(12)
        maj = np.concatenate([rng.uniform(-3.0, -0.5, 78), rng.uniform(0.2, 0.9, 12)])
        mino = rng.uniform(0.3, 1.2, 10)
        X = np.concatenate([maj, mino])[:, None]
        y = [UserSegment.FULL_TIME] * 90 + [UserSegment.RETIRED] * 10
        weighted = SegmentClassifier(seed=0, class_weighted=True).fit(X, y)
        unweighted = SegmentClassifier(seed=0, class_weighted=False).fit(X, y)
        rec_w = classification_report(y, weighted.predict(X)).per_class[UserSegment.RETIRED].recall
        rec_u = classification_report(y, unweighted.predict(X)).per_class[UserSegment.RETIRED].recall
        assert rec_w == 1.0
        assert rec_u < 1.0

    def test_all_zero_scores_tie_goes_to_first_segment(self):
        X, y = _separable_set()
        model = SegmentClassifier(seed=0).fit(X, y)
        model.coef_ = np.zeros_like(model.coef_)
        assert model.predict(np.zeros((1, 2)))[0] is UserSegment.FULL_TIME

    def test_dimension_mismatch(self):
        X, y = _separable_set()
        model = SegmentClassifier(seed=0).fit(X, y)
        with pytest.raises(DimensionMismatch):
            model.predict(np.zeros((1, 5)))

    def test_single_class_rejected(self):
        X = np.zeros((4, 2))
        with pytest.raises(SingleClassData):
            SegmentClassifier(seed=0).fit(X, [UserSegment.OTHER] * 4)

    def test_loss_window_means_non_increasing_on_average(self):
        X, y = _separable_set()
        model = SegmentClassifier(seed=0, epochs=200).fit(X, y)
        windows = model.loss_history_.reshape(20, 10).mean(axis=1)
        # SGD jitter allows tiny local bumps; they must be negligible against
        # the starting loss and the overall trend must fall hard
        assert np.all(np.diff(windows) <= 1e-3 * windows[0])
        assert windows[-1] <= 0.01 * windows[0]

    def test_save_load_round_trip(self, tmp_path):
        X, y = _separable_set()
        model = SegmentClassifier(seed=0).fit(X, y)
        path = str(tmp_path / "model.txt")
        model.save(path)
        loaded = SegmentClassifier.load(path)
        assert np.array_equal(loaded.coef_, model.coef_)
        assert np.array_equal(loaded.mean_, model.mean_)
        assert list(loaded.predict(X)) == list(model.predict(X))

    def test_sklearn_get_params(self):
        model = SegmentClassifier(epochs=50, lam=1e-3, seed=9)
        params = model.get_params()
        assert params["epochs"] == 50
        assert params["lam"] == 1e-3
        clone_like = SegmentClassifier(**params)
        assert clone_like.seed == 9


class TestClassificationReport:
    def test_perfect_predictions(self):
        y = [UserSegment.FULL_TIME, UserSegment.STUDENT, UserSegment.RETIRED] * 3
        rep = classification_report(y, y)
        for seg in (UserSegment.FULL_TIME, UserSegment.STUDENT, UserSegment.RETIRED):
            m = rep.per_class[seg]
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_complement_predictions_all_zero(self):
        t = [UserSegment.FULL_TIME, UserSegment.STUDENT] * 4
        p = [UserSegment.STUDENT, UserSegment.FULL_TIME] * 4
        rep = classification_report(t, p)
        assert rep.per_class[UserSegment.FULL_TIME].f1 == 0.0
        assert rep.per_class[UserSegment.STUDENT].f1 == 0.0
        assert rep.macro_f1 == 0.0

    def test_f1_of_published_precision_recall_pair(self):
        # counts chosen so precision = 0.71 and recall = 0.66 exactly
        tp, fp, fn = 4686, 1914, 2414
        t = [UserSegment.FULL_TIME] * (tp + fn) + [UserSegment.STUDENT] * fp
        p = (
            [UserSegment.FULL_TIME] * tp
            + [UserSegment.STUDENT] * fn
            + [UserSegment.FULL_TIME] * fp
        )
        rep = classification_report(t, p)
        m = rep.per_class[UserSegment.FULL_TIME]
        assert m.precision == pytest.approx(0.71, abs=1e-12)
        assert m.recall == pytest.approx(0.66, abs=1e-12)
        assert m.f1 == pytest.approx(0.684, abs=5e-4)

    def test_f1_is_harmonic_mean_identity(self):
        rng = np.random.default_rng(0)
        t = [SEGMENTS[i] for i in rng.integers(0, 6, 200)]
        p = [SEGMENTS[i] for i in rng.integers(0, 6, 200)]
        rep = classification_report(t, p)
        for m in rep.per_class.values():
            expect = (
                2 * m.precision * m.recall / (m.precision + m.recall)
                if m.precision + m.recall
                else 0.0
            )
            assert m.f1 == pytest.approx(expect, abs=1e-9)

    def test_majority_class(self):
        y = [UserSegment.STUDENT] * 5 + [UserSegment.RETIRED] * 2
        assert majority_class(y) is UserSegment.STUDENT
