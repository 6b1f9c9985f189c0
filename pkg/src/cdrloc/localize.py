"""Anchor (home/work) localization.

Records restricted to anchor hours are clustered into stay clusters with a
density scan over the serving towers (record counts act as multiplicities);
the busiest cluster's weighted centroid becomes the anchor. Cell weights
combine load-shared record counts, inverse transmit power and distinct
active days, each min-max scaled within the cluster and mixed by
per-segment coefficients fitted on labeled users. A call-days baseline
(most-distinct-days tower) is provided for comparison.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .core import (
    SEGMENTS,
    UserSegment,
    haversine_km,
    local_day_index,
    local_minute_of_day,
    local_weekday,
    minute_in_ranges,
)
from .exceptions import InvalidConfig, NoLabeledUsers, ZeroTotalWeight
from .ingest import UserStream
from .validation import as_float_array, check_aligned, check_in_range

#: Anchor-hour ranges, minutes of local day, half-open; home wraps midnight.
HOME_RANGES = ((1200, 300),)  # 20:00 - 05:00, any day
WORK_RANGES = ((600, 720), (780, 960))  # 10-12 and 13-16, working days only

ANCHOR_KINDS = ("home", "work")


def holiday_day_indices(dates) -> frozenset[int]:
    """ISO date strings to local day indices (days since 1970-01-01)."""
    epoch = _dt.date(1970, 1, 1).toordinal()
    return frozenset(_dt.date.fromisoformat(d).toordinal() - epoch for d in dates)


def anchor_hours_mask(
    ts: np.ndarray,
    kind: str,
    tz_offset_min: int = 0,
    holidays: frozenset[int] = frozenset(),
) -> np.ndarray:
    if kind not in ANCHOR_KINDS:
        raise ValueError(f"kind must be one of {ANCHOR_KINDS}")
    minute = np.asarray(local_minute_of_day(ts, tz_offset_min))
    if kind == "home":
        return minute_in_ranges(minute, HOME_RANGES)
    in_hours = minute_in_ranges(minute, WORK_RANGES)
    weekday = np.asarray(local_weekday(ts, tz_offset_min)) < 5
    day = np.asarray(local_day_index(ts, tz_offset_min))
    not_holiday = (
        ~np.isin(day, np.fromiter(holidays, dtype=np.int64))
        if holidays
        else np.ones(day.shape, dtype=bool)
    )
    return in_hours & weekday & not_holiday


# ---------------------------------------------------------------------------
# Clustering primitives
# ---------------------------------------------------------------------------

def dbscan_stay_clusters(
    lat: np.ndarray,
    lon: np.ndarray,
    weights: np.ndarray,
    eps_m: float = 1000.0,
    min_pts: float = 3.0,
) -> np.ndarray:
    """Density scan over weighted points with the haversine metric.

    A point's density is the summed weight of all points within eps_m
    (itself included); points reaching min_pts are core. Returns one label
    per point, -1 for noise. Deterministic in input order, so callers pass
    points pre-sorted by cell id.
    """
    lat = as_float_array(lat, "lat")
    lon = as_float_array(lon, "lon")
    weights = as_float_array(weights, "weights")
    check_aligned(lat, weights, "points", "weights")
    n = len(lat)
    labels = np.full(n, -1, dtype=np.int32)
    if n == 0:
        return labels

    dist_m = haversine_km(lat[:, None], lon[:, None], lat[None, :], lon[None, :]) * 1000.0
    adj = dist_m <= eps_m
    density = adj @ weights
    core = density >= min_pts

    cluster = 0
    for i in range(n):
        if labels[i] >= 0 or not core[i]:
            continue
        labels[i] = cluster
        queue = [i]
        while queue:
            j = queue.pop()
            for q in np.nonzero(adj[j])[0]:
                if labels[q] < 0:
                    labels[q] = cluster
                    if core[q]:
                        queue.append(int(q))
        cluster += 1
    return labels


def minmax_scale(values) -> np.ndarray:
    """Scale to [0, 1]; a constant vector (including a single value) maps to 1."""
    v = as_float_array(values, "values")
    if v.size == 0:
        raise InvalidConfig("minmax_scale of empty sequence")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.ones_like(v)
    return (v - lo) / (hi - lo)


@dataclass(frozen=True, slots=True)
class ClusterWeightParams:
    """Mixing coefficients for the three cell-weight factors, each in [0, 1]."""

    alpha: float  # load-shared record count
    beta: float  # inverse transmit power
    gamma: float  # distinct active days

    def __post_init__(self):
        check_in_range(self.alpha, 0.0, 1.0, "alpha")
        check_in_range(self.beta, 0.0, 1.0, "beta")
        check_in_range(self.gamma, 0.0, 1.0, "gamma")


@dataclass(slots=True)
class CellStats:
    """Per-cell factors within one stay cluster."""

    load_share_count: np.ndarray
    inv_power: np.ndarray
    active_days: np.ndarray


def cell_weights(stats: CellStats, params: ClusterWeightParams) -> np.ndarray:
    """Combine the min-max scaled factor vectors with the mixing coefficients."""
    return (
        params.alpha * minmax_scale(stats.load_share_count)
        + params.beta * minmax_scale(stats.inv_power)
        + params.gamma * minmax_scale(stats.active_days)
    )


@dataclass(slots=True)
class KMeansResult:
    centroids: np.ndarray  # (k, 2) lat/lon
    labels: np.ndarray  # (n,)
    cost_history: np.ndarray  # weighted squared-degree cost after each assignment

    @property
    def cost(self) -> float:
        return float(self.cost_history[-1])


def weighted_kmeanspp(
    points,
    weights,
    k: int = 1,
    seed: int = 0,
    tol_deg: float = 1e-7,
    max_iter: int = 100,
) -> KMeansResult:
    """Weighted k-means++ on lat/lon treated locally planar.

    Seeding draws the first centroid proportionally to the weights and the
    rest proportionally to weight times squared distance to the nearest
    chosen centroid; Lloyd iterations use weighted means and stop when no
    centroid moves more than tol_deg degrees.
    """
    pts = as_float_array(points, "points", ndim=2)
    w = as_float_array(weights, "weights")
    check_aligned(pts, w, "points", "weights")
    if (w < 0).any():
        raise InvalidConfig("negative weights")
    total = w.sum()
    if total <= 0:
        raise ZeroTotalWeight("weights sum to zero")
    distinct = len(np.unique(pts, axis=0))
    if not 1 <= k <= distinct:
        raise InvalidConfig(f"k={k} not in [1, {distinct} distinct points]")

    rng = np.random.default_rng(seed)
    n = len(pts)
    centroids = np.empty((k, 2))
    centroids[0] = pts[rng.choice(n, p=w / total)]
    d2 = ((pts - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        scores = w * d2
        s = scores.sum()
        if s > 0:
            p = scores / s
        else:  # all remaining weight sits on chosen points; spread by distance
            p = d2 / d2.sum()
        centroids[j] = pts[rng.choice(n, p=p)]
        d2 = np.minimum(d2, ((pts - centroids[j]) ** 2).sum(axis=1))

    history = []
    labels = np.zeros(n, dtype=np.int32)
    for _ in range(max_iter):
        dists = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dists, axis=1).astype(np.int32)
        history.append(float((w * dists[np.arange(n), labels]).sum()))
        new_centroids = centroids.copy()
        for j in range(k):
            m = labels == j
            wj = w[m].sum()
            if wj > 0:
                new_centroids[j] = np.average(pts[m], axis=0, weights=w[m])
        shift = np.abs(new_centroids - centroids).max()
        centroids = new_centroids
        if shift < tol_deg:
            break
    return KMeansResult(centroids, labels, np.asarray(history))


# ---------------------------------------------------------------------------
# Stay clusters and anchors
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class StayCluster:
    cell_indices: np.ndarray  # registry indices, ascending (= cell_id order)
    active_days: int  # distinct local dates across member cells
    n_records: int
    centroid: tuple[float, float]  # unweighted member-tower mean, tie-breaking only


@dataclass(slots=True)
class _RestrictedView:
    """Per-cell aggregates of the records surviving an anchor-hours mask."""

    cells: np.ndarray  # unique registry indices, ascending
    counts: np.ndarray
    flagged: np.ndarray
    days_per_cell: np.ndarray
    record_cell_pos: np.ndarray  # per record: index into cells
    record_day: np.ndarray


def _restricted_view(
    stream: UserStream, flags: np.ndarray, mask: np.ndarray, tz_offset_min: int
) -> _RestrictedView | None:
    if not mask.any():
        return None
    cells_sel = stream.cell_index[mask]
    days_sel = np.asarray(local_day_index(stream.timestamps[mask], tz_offset_min))
    flag_sel = np.asarray(flags, dtype=bool)[mask]
    cells, pos = np.unique(cells_sel, return_inverse=True)
    counts = np.bincount(pos, minlength=len(cells))
    flagged = np.bincount(pos, weights=flag_sel, minlength=len(cells))
    span = int(days_sel.max()) + 1 - int(days_sel.min())
    day_keys = np.unique(pos.astype(np.int64) * span + (days_sel - days_sel.min()))
    days_per_cell = np.bincount(day_keys // span, minlength=len(cells))
    return _RestrictedView(cells, counts, flagged, days_per_cell, pos, days_sel)


def _stay_clusters(
    view: _RestrictedView, registry, eps_m: float, min_pts: float
) -> list[StayCluster]:
    lat = registry.lat[view.cells]
    lon = registry.lon[view.cells]
    labels = dbscan_stay_clusters(lat, lon, view.counts.astype(float), eps_m, min_pts)
    if (labels >= 0).sum() == 0:
        # nothing dense enough: treat all restricted towers as one stay
        labels = np.zeros(len(view.cells), dtype=np.int32)
    clusters = []
    for cid in range(labels.max() + 1):
        member = labels == cid
        member_pos = np.nonzero(member)[0]
        rec_in = np.isin(view.record_cell_pos, member_pos)
        active = len(np.unique(view.record_day[rec_in]))
        clusters.append(
            StayCluster(
                cell_indices=view.cells[member],
                active_days=active,
                n_records=int(view.counts[member].sum()),
                centroid=(float(lat[member].mean()), float(lon[member].mean())),
            )
        )
    return clusters


def _select_cluster(clusters: list[StayCluster]) -> StayCluster:
    return min(
        clusters,
        key=lambda c: (-c.active_days, -c.n_records, c.centroid[0], c.centroid[1]),
    )


@dataclass(frozen=True, slots=True)
class AnchorEstimate:
    lat: float
    lon: float
    cluster_days: int
    n_records: int


def weighted_anchor(
    stream: UserStream,
    flags: np.ndarray,
    kind: str,
    params: ClusterWeightParams,
    eps_m: float = 1000.0,
    min_pts: float = 3.0,
    tz_offset_min: int = 0,
    holidays: frozenset[int] = frozenset(),
    seed: int = 0,
    k: int = 1,
) -> AnchorEstimate | None:
    """Weighted anchor estimate, or None when no record falls in the
    anchor hours.

    The stay cluster with the most distinct active days wins (ties: more
    records, then the southern- then western-most centroid); its cells are
    weighted by the scaled factor mix and averaged with weighted k-means++.
    """
    mask = anchor_hours_mask(stream.timestamps, kind, tz_offset_min, holidays)
    view = _restricted_view(stream, flags, mask, tz_offset_min)
    if view is None:
        return None
    reg = stream.registry
    best = _select_cluster(_stay_clusters(view, reg, eps_m, min_pts))

    member_pos = np.searchsorted(view.cells, best.cell_indices)
    stats = CellStats(
        load_share_count=view.flagged[member_pos],
        inv_power=1.0 / reg.power[best.cell_indices],
        active_days=view.days_per_cell[member_pos].astype(float),
    )
    w = cell_weights(stats, params)
    if w.sum() <= 0:
        w = np.ones(len(w))
    pts = np.column_stack([reg.lat[best.cell_indices], reg.lon[best.cell_indices]])
    k_eff = min(k, len(np.unique(pts, axis=0)))
    result = weighted_kmeanspp(pts, w, k=k_eff, seed=seed)
    if k_eff == 1:
        c = result.centroids[0]
    else:  # exploration mode: report the centroid carrying the most weight
        mass = np.bincount(result.labels, weights=w, minlength=k_eff)
        c = result.centroids[int(np.argmax(mass))]
    return AnchorEstimate(float(c[0]), float(c[1]), best.active_days, best.n_records)


def infer_anchor(
    stream: UserStream,
    flags: np.ndarray,
    kind: str,
    params: ClusterWeightParams,
    eps_m: float = 1000.0,
    min_pts: float = 3.0,
    tz_offset_min: int = 0,
    holidays: frozenset[int] = frozenset(),
    seed: int = 0,
    k: int = 1,
) -> tuple[float, float] | None:
    est = weighted_anchor(
        stream, flags, kind, params, eps_m, min_pts, tz_offset_min, holidays, seed, k
    )
    return None if est is None else (est.lat, est.lon)


def calldays_anchor_estimate(
    stream: UserStream,
    kind: str,
    tz_offset_min: int = 0,
    holidays: frozenset[int] = frozenset(),
) -> AnchorEstimate | None:
    """Baseline: the tower serving the most distinct days in anchor hours.

    Ties go to the tower with more records, then the lower cell id.
    """
    mask = anchor_hours_mask(stream.timestamps, kind, tz_offset_min, holidays)
    if not mask.any():
        return None
    cells_sel = stream.cell_index[mask]
    days_sel = np.asarray(local_day_index(stream.timestamps[mask], tz_offset_min))
    cells, pos = np.unique(cells_sel, return_inverse=True)
    counts = np.bincount(pos, minlength=len(cells))
    span = int(days_sel.max()) + 1 - int(days_sel.min())
    day_keys = np.unique(pos.astype(np.int64) * span + (days_sel - days_sel.min()))
    days = np.bincount(day_keys // span, minlength=len(cells))
    order = np.lexsort((np.arange(len(cells)), -counts, -days))
    best = int(order[0])
    reg = stream.registry
    return AnchorEstimate(
        float(reg.lat[cells[best]]),
        float(reg.lon[cells[best]]),
        int(days[best]),
        int(counts[best]),
    )


def calldays_anchor(
    stream: UserStream,
    kind: str,
    tz_offset_min: int = 0,
    holidays: frozenset[int] = frozenset(),
) -> tuple[float, float] | None:
    est = calldays_anchor_estimate(stream, kind, tz_offset_min, holidays)
    return None if est is None else (est.lat, est.lon)


# ---------------------------------------------------------------------------
# Per-segment parameter fitting
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class ParamFitResult:
    params: ClusterWeightParams
    median_error_m: float
    n_users: int


def _weight_grid(grid_step: float) -> tuple[np.ndarray, np.ndarray]:
    steps = int(round(1.0 / grid_step))
    combos = [
        (a, b, c)
        for a in range(steps + 1)
        for b in range(steps + 1)
        for c in range(steps + 1)
        if (a, b, c) != (0, 0, 0)
    ]
    arr = np.asarray(combos, dtype=np.float64) / steps
    return np.asarray(combos, dtype=np.int64), arr


def fit_segment_params(
    users: list[tuple[UserStream, np.ndarray]],
    truth_anchors,
    kind: str = "home",
    eps_m: float = 1000.0,
    min_pts: float = 3.0,
    tz_offset_min: int = 0,
    holidays: frozenset[int] = frozenset(),
    grid_step: float = 0.1,
) -> ParamFitResult:
    """Exhaustive grid search for the factor mix minimizing the median
    anchor error over one segment's labeled users.

    Ties prefer the smallest coefficient sum, then lexicographic
    (alpha, beta, gamma). Users with no records in the anchor hours are
    excluded.
    """
    truth = as_float_array(truth_anchors, "truth_anchors", ndim=2)
    check_aligned(users, truth, "users", "truth_anchors")
    combos_int, combos = _weight_grid(grid_step)

    moment_list = []
    truth_used = []
    for (stream, flags), anchor in zip(users, truth):
        mask = anchor_hours_mask(stream.timestamps, kind, tz_offset_min, holidays)
        view = _restricted_view(stream, flags, mask, tz_offset_min)
        if view is None:
            continue
        reg = stream.registry
        best = _select_cluster(_stay_clusters(view, reg, eps_m, min_pts))
        member_pos = np.searchsorted(view.cells, best.cell_indices)
        factors = np.vstack(
            [
                minmax_scale(view.flagged[member_pos]),
                minmax_scale(1.0 / reg.power[best.cell_indices]),
                minmax_scale(view.days_per_cell[member_pos].astype(float)),
            ]
        )  # (3, m)
        pts = np.column_stack([reg.lat[best.cell_indices], reg.lon[best.cell_indices]])
        moment_list.append((factors @ pts, factors.sum(axis=1)))  # (3,2), (3,)
        truth_used.append(anchor)
    if not moment_list:
        raise NoLabeledUsers(f"no user has records in {kind} hours")

    n_used = len(moment_list)
    errors = np.empty((n_used, len(combos)))
    for i, ((M, s), anchor) in enumerate(zip(moment_list, truth_used)):
        denom = combos @ s  # > 0: every scaled factor vector has max 1
        cent = (combos @ M) / denom[:, None]
        errors[i] = haversine_km(cent[:, 0], cent[:, 1], anchor[0], anchor[1]) * 1000.0

    medians = np.median(errors, axis=0)
    sums = combos_int.sum(axis=1)
    order = np.lexsort(
        (combos_int[:, 2], combos_int[:, 1], combos_int[:, 0], sums, medians)
    )
    best_idx = order[0]
    a, b, c = combos[best_idx]
    return ParamFitResult(
        ClusterWeightParams(float(a), float(b), float(c)),
        float(medians[best_idx]),
        n_used,
    )


DEFAULT_PARAMS = ClusterWeightParams(1.0, 1.0, 1.0)


class AnchorLocalizer(BaseEstimator):
    """fit() learns per-segment factor mixes from labeled users; predict()
    returns anchor coordinates (NaN rows where no anchor exists).

    X entries are (stream, flags, segment) triples; y holds the matching
    ground-truth home coordinates.
    """

    def __init__(
        self,
        eps_m: float = 1000.0,
        min_pts: float = 3.0,
        k: int = 1,
        seed: int = 0,
        tz_offset_min: int = 0,
        holidays: tuple[str, ...] = (),
        grid_step: float = 0.1,
    ):
        self.eps_m = eps_m
        self.min_pts = min_pts
        self.k = k
        self.seed = seed
        self.tz_offset_min = tz_offset_min
        self.holidays = holidays
        self.grid_step = grid_step

    def _holiday_days(self) -> frozenset[int]:
        return holiday_day_indices(self.holidays)

    def fit(self, X, y):
        truth = as_float_array(y, "y", ndim=2)
        check_aligned(X, truth, "X", "y")
        by_segment: dict[UserSegment, list[int]] = {}
        for i, (_, _, segment) in enumerate(X):
            if segment is not None:
                by_segment.setdefault(segment, []).append(i)
        self.segment_params_ = {}
        self.fit_report_ = {}
        for segment in SEGMENTS:
            idx = by_segment.get(segment, [])
            if not idx:
                self.segment_params_[segment] = DEFAULT_PARAMS
                continue
            result = fit_segment_params(
                [(X[i][0], X[i][1]) for i in idx],
                truth[idx],
                kind="home",
                eps_m=self.eps_m,
                min_pts=self.min_pts,
                tz_offset_min=self.tz_offset_min,
                holidays=self._holiday_days(),
                grid_step=self.grid_step,
            )
            self.segment_params_[segment] = result.params
            self.fit_report_[segment] = result
        return self

    def predict(self, X, kind: str = "home") -> np.ndarray:
        params_by_segment = getattr(self, "segment_params_", {})
        out = np.full((len(X), 2), np.nan)
        for i, (stream, flags, segment) in enumerate(X):
            params = params_by_segment.get(segment, DEFAULT_PARAMS)
            anchor = infer_anchor(
                stream,
                flags,
                kind,
                params,
                eps_m=self.eps_m,
                min_pts=self.min_pts,
                tz_offset_min=self.tz_offset_min,
                holidays=self._holiday_days(),
                seed=self.seed,
                k=self.k,
            )
            if anchor is not None:
                out[i] = anchor
        return out
