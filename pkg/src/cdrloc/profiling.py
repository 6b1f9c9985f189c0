"""Behavioral features and socio-economic segment classification.

Features per user: 24 hourly call-frequency shares, 24 hourly mean
displacements (km) between consecutive records anchored at the earlier
record's hour, the distinct-cell ratio, and the weekend share - 50 values.

The classifier is a one-vs-rest linear max-margin model trained with
stochastic subgradient descent and per-class example weights to counter
class imbalance. Training is seeded and single-threaded; the sample order
is part of the reproducibility contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .core import SEGMENTS, UserSegment, distance_fn, local_hour, local_weekday
from .exceptions import DimensionMismatch, EmptyStream, SingleClassData
from .ingest import StreamSet, UserStream

N_CLASSES = len(SEGMENTS)
FEATURE_DIM = 50

_SEGMENT_POS = {seg: i for i, seg in enumerate(SEGMENTS)}


def _segment_codes(y) -> np.ndarray:
    codes = np.empty(len(y), dtype=np.int64)
    for i, v in enumerate(y):
        if isinstance(v, UserSegment):
            codes[i] = _SEGMENT_POS[v]
        else:
            codes[i] = _SEGMENT_POS[UserSegment.from_token(str(v))]
    return codes


def extract_features(
    stream: UserStream, tz_offset_min: int = 0, mode: str = "haversine"
) -> np.ndarray:
    if len(stream) == 0:
        raise EmptyStream(f"user {stream.user_id}: no records")
    reg = stream.registry
    ts = stream.timestamps
    cells = stream.cell_index
    n = len(ts)

    hours = np.asarray(local_hour(ts, tz_offset_min))
    freq = np.bincount(hours, minlength=24).astype(np.float64) / n

    dist_by_hour = np.zeros(24)
    if n > 1:
        d = distance_fn(mode)(
            reg.lat[cells[:-1]], reg.lon[cells[:-1]], reg.lat[cells[1:]], reg.lon[cells[1:]]
        )
        anchor = hours[:-1]
        sums = np.bincount(anchor, weights=d, minlength=24)
        cnts = np.bincount(anchor, minlength=24)
        dist_by_hour = np.divide(sums, cnts, out=np.zeros(24), where=cnts > 0)

    distinct_ratio = len(np.unique(cells)) / n
    weekend = float(np.mean(np.asarray(local_weekday(ts, tz_offset_min)) >= 5))
    return np.concatenate([freq, dist_by_hour, [distinct_ratio], [weekend]])


def extract_features_all(
    streams: StreamSet, tz_offset_min: int = 0, mode: str = "haversine"
) -> np.ndarray:
    """(n_users, 50) feature matrix, vectorized across the stream set."""
    reg = streams.registry
    n_users = streams.n_users
    ts = streams.timestamps
    cells = streams.cell_index
    owner = streams.record_user.astype(np.int64)
    counts = streams.counts().astype(np.float64)

    hours = np.asarray(local_hour(ts, tz_offset_min), dtype=np.int64)
    key = owner * 24 + hours
    freq = np.bincount(key, minlength=n_users * 24).reshape(n_users, 24)
    freq = freq / counts[:, None]

    # consecutive displacements within each user, anchored at the earlier hour
    dist_by_hour = np.zeros((n_users, 24))
    if streams.n_records > 1:
        pair_ok = owner[1:] == owner[:-1]
        d = distance_fn(mode)(
            reg.lat[cells[:-1]], reg.lon[cells[:-1]], reg.lat[cells[1:]], reg.lon[cells[1:]]
        )[pair_ok]
        akey = key[:-1][pair_ok]
        sums = np.bincount(akey, weights=d, minlength=n_users * 24).reshape(n_users, 24)
        cnts = np.bincount(akey, minlength=n_users * 24).reshape(n_users, 24)
        dist_by_hour = np.divide(sums, cnts, out=np.zeros((n_users, 24)), where=cnts > 0)

    pair_key = owner * (len(reg) + 1) + cells
    uniq_owner = (np.unique(pair_key) // (len(reg) + 1)).astype(np.int64)
    distinct = np.bincount(uniq_owner, minlength=n_users) / counts

    weekend_rec = (np.asarray(local_weekday(ts, tz_offset_min)) >= 5).astype(np.float64)
    weekend = np.bincount(owner, weights=weekend_rec, minlength=n_users) / counts

    return np.hstack([freq, dist_by_hour, distinct[:, None], weekend[:, None]])


class SegmentClassifier(BaseEstimator, ClassifierMixin):
    """One-vs-rest hinge-loss linear classifier with class-balanced weights.

    Per-class example weight is n_total / (n_classes * n_class); features are
    standardized with training statistics kept in the model. Learning rate
    is 1/(lam * t) with a fixed epoch budget. Prediction takes the argmax of
    the per-segment scores, ties resolving to the earlier segment in
    enumeration order.
    """

    def __init__(
        self,
        epochs: int = 200,
        lam: float = 1e-4,
        seed: int = 0,
        class_weighted: bool = True,
    ):
        self.epochs = epochs
        self.lam = lam
        self.seed = seed
        self.class_weighted = class_weighted

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionMismatch("X must be 2-d")
        codes = _segment_codes(y)
        if len(codes) != len(X):
            raise DimensionMismatch("X and y lengths differ")
        present = np.unique(codes)
        if len(present) < 2:
            raise SingleClassData("training data has fewer than two classes")

        n, d = X.shape
        self.n_features_ = d
        self.classes_ = SEGMENTS
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        Xs = np.hstack([(X - self.mean_) / self.scale_, np.ones((n, 1))])

        if self.class_weighted:
            class_n = np.bincount(codes, minlength=N_CLASSES)
            sw = np.array([n / (N_CLASSES * class_n[c]) for c in codes])
        else:
            sw = np.ones(n)

        ysign = -np.ones((n, N_CLASSES))
        ysign[np.arange(n), codes] = 1.0

        rng = np.random.default_rng(self.seed)
        W = np.zeros((N_CLASSES, d + 1))
        lam = self.lam
        t = 0
        losses = []
        for _ in range(self.epochs):
            for i in rng.permutation(n):
                t += 1
                lr = 1.0 / (lam * t)
                xi = Xs[i]
                margins = ysign[i] * (W @ xi)
                W *= 1.0 - 1.0 / t
                active = margins < 1.0
                if active.any():
                    W[active] += (lr * sw[i]) * np.outer(ysign[i][active], xi)
            scores = Xs @ W.T
            hinge = np.maximum(0.0, 1.0 - ysign * scores)
            data_term = float((sw[:, None] * hinge).sum(axis=0).sum() / n)
            reg_term = float(0.5 * lam * (W * W).sum())
            losses.append(data_term + reg_term)
        self.coef_ = W
        self.loss_history_ = np.asarray(losses)
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.n_features_:
            raise DimensionMismatch(
                f"expected {self.n_features_} features, got {X.shape[1]}"
            )
        Xs = np.hstack([(X - self.mean_) / self.scale_, np.ones((len(X), 1))])
        scores = Xs @ self.coef_.T
        return scores[0] if single else scores

    def predict(self, X):
        scores = self.decision_function(X)
        if scores.ndim == 1:
            return SEGMENTS[int(np.argmax(scores))]
        return np.array([SEGMENTS[i] for i in np.argmax(scores, axis=1)], dtype=object)

    # ------------------------------------------------------------------
    # Flat-text serialization
    # ------------------------------------------------------------------

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("cdrloc-segment-classifier v1\n")
            fh.write(f"n_features {self.n_features_}\n")
            fh.write(f"epochs {self.epochs}\n")
            fh.write(f"lam {self.lam!r}\n")
            fh.write(f"seed {self.seed}\n")
            fh.write(f"class_weighted {int(self.class_weighted)}\n")
            for row in self.coef_:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
            fh.write(" ".join(repr(float(v)) for v in self.mean_) + "\n")
            fh.write(" ".join(repr(float(v)) for v in self.scale_) + "\n")

    @classmethod
    def load(cls, path: str) -> "SegmentClassifier":
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines or lines[0] != "cdrloc-segment-classifier v1":
            raise ValueError(f"{path}: not a serialized segment classifier")
        meta = dict(line.split(maxsplit=1) for line in lines[1:6])
        model = cls(
            epochs=int(meta["epochs"]),
            lam=float(meta["lam"]),
            seed=int(meta["seed"]),
            class_weighted=bool(int(meta["class_weighted"])),
        )
        model.n_features_ = int(meta["n_features"])
        model.classes_ = SEGMENTS
        rows = [
            np.array([float(v) for v in line.split()])
            for line in lines[6 : 6 + N_CLASSES + 2]
        ]
        model.coef_ = np.vstack(rows[:N_CLASSES])
        model.mean_ = rows[N_CLASSES]
        model.scale_ = rows[N_CLASSES + 1]
        return model


@dataclass(frozen=True, slots=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(slots=True)
class ClassificationReport:
    per_class: dict[UserSegment, ClassMetrics]
    macro_f1: float

    def csv_rows(self):
        yield "class,precision,recall,f1,support"
        for seg in SEGMENTS:
            m = self.per_class[seg]
            yield f"{seg.value},{m.precision:.6f},{m.recall:.6f},{m.f1:.6f},{m.support}"
        yield f"macro_f1,{self.macro_f1:.6f},,,"


def classification_report(y_true, y_pred) -> ClassificationReport:
    """Per-class precision/recall/F1 over all six segments plus macro-F1.

    Classes with no true (or no predicted) examples report 0 for the
    undefined metric.
    """
    if len(y_true) != len(y_pred) or len(y_true) == 0:
        raise DimensionMismatch("y_true and y_pred must be equal-length, non-empty")
    t = _segment_codes(y_true)
    p = _segment_codes(y_pred)
    per = {}
    f1s = []
    for c, seg in enumerate(SEGMENTS):
        tp = int(((t == c) & (p == c)).sum())
        fp = int(((t != c) & (p == c)).sum())
        fn = int(((t == c) & (p != c)).sum())
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per[seg] = ClassMetrics(prec, rec, f1, int((t == c).sum()))
        f1s.append(f1)
    return ClassificationReport(per, float(np.mean(f1s)))


def majority_class(y) -> UserSegment:
    codes = _segment_codes(y)
    return SEGMENTS[int(np.bincount(codes, minlength=N_CLASSES).argmax())]
