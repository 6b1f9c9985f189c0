"""Load-shared record identification.

A load-shared record is a serving-cell change with no matching user
movement. Detection compares the apparent speed of consecutive record
pairs against a threshold: a fixed global one, or one calibrated per
(region, time-window) key over a grid of candidate speeds against
GPS-derived ground truth.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .core import CdrRecord, RegionGrid, distance_fn, haversine_km, window_of, N_WINDOWS
from .exceptions import NoGps, NoLabeledData, UnknownCell
from .ingest import StreamSet, TowerRegistry, UserStream

#: Candidate speed thresholds (kmph) scanned during calibration.
THRESHOLD_GRID = tuple(range(0, 205, 5))

UNKNOWN = np.int8(-1)


@dataclass(slots=True)
class SpeedTable:
    """Per-(region, window) speed thresholds in kmph with a default fallback."""

    thresholds: dict[tuple[str, int], float] = field(default_factory=dict)
    default_threshold: float = 120.0

    def lookup(self, region_id: str | None, window_id: int) -> float:
        if region_id is None:
            return self.default_threshold
        return self.thresholds.get((region_id, window_id), self.default_threshold)

    def dense(self, grid: RegionGrid) -> np.ndarray:
        """(n_regions + 1, 7) array; the extra last row is the default for
        towers outside every region."""
        out = np.full((len(grid) + 1, N_WINDOWS), self.default_threshold)
        for (rid, w), theta in self.thresholds.items():
            if rid in grid.region_ids:
                out[grid.index_of(rid), w] = theta
        return out

    def rows(self):
        for (rid, w) in sorted(self.thresholds):
            yield rid, w, self.thresholds[(rid, w)]

    @classmethod
    def from_priors(
        cls,
        priors: dict[tuple[str, int], float],
        default_threshold: float = 120.0,
        grid=THRESHOLD_GRID,
    ) -> "SpeedTable":
        """Snap average-speed priors to the nearest grid value (half up)."""
        step = grid[1] - grid[0]
        lo, hi = grid[0], grid[-1]
        snapped = {
            key: float(min(hi, max(lo, math.floor(v / step + 0.5) * step)))
            for key, v in priors.items()
        }
        return cls(snapped, default_threshold)


def pairwise_speed(
    prev: CdrRecord, curr: CdrRecord, registry: TowerRegistry, mode: str = "haversine"
) -> float:
    """Apparent speed (kmph) between two consecutive records.

    Zero time difference yields 0 for the same cell and inf for different
    cells.
    """
    i = registry.resolve([prev.cell_id])[0]
    j = registry.resolve([curr.cell_id])[0]
    if i < 0 or j < 0:
        raise UnknownCell(f"unresolvable cell in pair ({prev.cell_id}, {curr.cell_id})")
    dt = curr.timestamp - prev.timestamp
    if dt == 0:
        return 0.0 if prev.cell_id == curr.cell_id else float("inf")
    dist = distance_fn(mode)(
        registry.lat[i], registry.lon[i], registry.lat[j], registry.lon[j]
    )
    return float(dist / (dt / 3600.0))


@dataclass(slots=True)
class SpeedPairs:
    """Per-record consecutive-pair data aligned to a StreamSet.

    Entry k describes the pair (record k-1, record k) of the same user;
    the first record of each stream has has_prev False and speed NaN.
    """

    speeds: np.ndarray  # float64, kmph (inf for zero-dt cell changes)
    has_prev: np.ndarray  # bool
    cell_changed: np.ndarray  # bool, False where has_prev is False
    key_region: np.ndarray  # int32 region index of the earlier tower, -1 outside
    key_window: np.ndarray  # int32 window of the earlier timestamp


def consecutive_speeds(
    streams: StreamSet, mode: str = "haversine", tz_offset_min: int = 0
) -> SpeedPairs:
    reg = streams.registry
    n = streams.n_records
    has_prev = np.ones(n, dtype=bool)
    has_prev[streams.starts[:-1][streams.counts() > 0]] = False
    prev_cell = np.empty(n, dtype=np.int32)
    prev_ts = np.empty(n, dtype=np.int64)
    if n:
        prev_cell[1:] = streams.cell_index[:-1]
        prev_ts[1:] = streams.timestamps[:-1]
        prev_cell[0] = streams.cell_index[0]
        prev_ts[0] = streams.timestamps[0]

    dist = distance_fn(mode)(
        reg.lat[prev_cell], reg.lon[prev_cell],
        reg.lat[streams.cell_index], reg.lon[streams.cell_index],
    )
    dt_h = (streams.timestamps - prev_ts) / 3600.0
    same_cell = prev_cell == streams.cell_index
    with np.errstate(divide="ignore", invalid="ignore"):
        speeds = np.where(dt_h > 0, dist / dt_h, np.where(same_cell, 0.0, np.inf))
    speeds = np.where(has_prev, speeds, np.nan)

    key_region = reg.region_index[prev_cell]
    key_window = np.asarray(window_of(prev_ts, tz_offset_min), dtype=np.int32)
    return SpeedPairs(
        speeds=speeds,
        has_prev=has_prev,
        cell_changed=has_prev & ~same_cell,
        key_region=key_region,
        key_window=key_window,
    )


def _ensure_set(streams) -> StreamSet:
    if isinstance(streams, StreamSet):
        return streams
    if isinstance(streams, UserStream):
        s = streams
        starts = np.asarray([0, len(s)], dtype=np.int64)
        out = StreamSet([s.user_id], starts, s.timestamps, s.cell_index, s.durations, s.registry)
        if s.gps is not None:
            out.gps_starts = np.asarray([0, len(s.gps)], dtype=np.int64)
            out.gps_timestamps = s.gps.timestamps
            out.gps_lat = s.gps.lat
            out.gps_lon = s.gps.lon
        return out
    raise TypeError(f"expected StreamSet or UserStream, got {type(streams)!r}")


def detect_fixed(streams, threshold: float = 120.0, mode: str = "haversine") -> np.ndarray:
    """Flag records whose pair speed strictly exceeds a global threshold.

    The later record of a fast pair carries the flag; the first record of
    every stream is never flagged.
    """
    streams = _ensure_set(streams)
    pairs = consecutive_speeds(streams, mode)
    with np.errstate(invalid="ignore"):
        return pairs.has_prev & (pairs.speeds > threshold)


def detect_adaptive(
    streams, table: SpeedTable, mode: str = "haversine", tz_offset_min: int = 0
) -> np.ndarray:
    """Like detect_fixed, with the threshold looked up per pair by the
    (region, window) of the earlier record; outside-region towers use the
    table default."""
    streams = _ensure_set(streams)
    grid = streams.registry.grid
    if grid is None:
        raise UnknownCell("registry has no regions attached")
    pairs = consecutive_speeds(streams, mode, tz_offset_min)
    dense = table.dense(grid)
    thr = dense[pairs.key_region, pairs.key_window]  # region -1 -> last row
    with np.errstate(invalid="ignore"):
        return pairs.has_prev & (pairs.speeds > thr)


def label_ground_truth(
    streams,
    max_fix_gap_s: int = 300,
    move_threshold_km: float = 0.1,
) -> np.ndarray:
    """Tri-state ground-truth labels from GPS: 1 load-shared, 0 not, -1 unknown.

    A record is load-shared when the serving cell changed and the GPS fixes
    nearest the two timestamps are within move_threshold_km of each other.
    Records lacking a fix within max_fix_gap_s of either timestamp, and the
    first record of every stream, are unknown.
    """
    streams = _ensure_set(streams)
    labels = np.full(streams.n_records, UNKNOWN, dtype=np.int8)
    if streams.gps_starts is None:
        raise NoGps("no GPS attached to streams")
    any_gps = False
    for i in range(streams.n_users):
        a, b = streams.starts[i], streams.starts[i + 1]
        ga, gb = streams.gps_starts[i], streams.gps_starts[i + 1]
        if gb == ga or b - a < 2:
            continue
        any_gps = True
        ts = streams.timestamps[a:b]
        cells = streams.cell_index[a:b]
        gts = streams.gps_timestamps[ga:gb]
        glat = streams.gps_lat[ga:gb]
        glon = streams.gps_lon[ga:gb]

        pos = np.searchsorted(gts, ts)
        left = np.clip(pos - 1, 0, len(gts) - 1)
        right = np.clip(pos, 0, len(gts) - 1)
        use_right = np.abs(gts[right] - ts) < np.abs(gts[left] - ts)
        nearest = np.where(use_right, right, left)
        gap = np.abs(gts[nearest] - ts)

        ok = (gap[1:] <= max_fix_gap_s) & (gap[:-1] <= max_fix_gap_s)
        disp = haversine_km(
            glat[nearest[:-1]], glon[nearest[:-1]], glat[nearest[1:]], glon[nearest[1:]]
        )
        changed = cells[1:] != cells[:-1]
        lab = np.where(changed & (disp <= move_threshold_km), 1, 0).astype(np.int8)
        lab = np.where(ok, lab, UNKNOWN)
        labels[a + 1 : b] = lab
    if not any_gps:
        raise NoGps("no stream has both GPS fixes and at least two records")
    return labels


@dataclass(slots=True)
class CalibrationKeyReport:
    region_id: str
    window_id: int
    threshold: float
    f1: float
    n_pairs: int
    n_positive: int


def _best_threshold(speeds: np.ndarray, truths: np.ndarray, grid) -> tuple[float, float]:
    """Max-F1 threshold over the grid; ties resolve to the smallest value.

    Keys with no positive labels take the largest grid value (flag nothing).
    """
    grid_arr = np.asarray(grid, dtype=np.float64)
    pos = np.sort(speeds[truths == 1])
    neg = np.sort(speeds[truths == 0])
    n_pos = len(pos)
    if n_pos == 0:
        return float(grid_arr[-1]), 0.0
    tp = n_pos - np.searchsorted(pos, grid_arr, side="right")
    fp = len(neg) - np.searchsorted(neg, grid_arr, side="right")
    fn = n_pos - tp
    denom = 2 * tp + fp + fn
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = np.where(denom > 0, 2 * tp / denom, 0.0)
    best = int(np.argmax(f1))  # first max = smallest theta
    return float(grid_arr[best]), float(f1[best])


def calibrate_speed_table(
    streams,
    labels: np.ndarray,
    default_threshold: float = 120.0,
    grid=THRESHOLD_GRID,
    mode: str = "haversine",
    tz_offset_min: int = 0,
) -> tuple[SpeedTable, list[CalibrationKeyReport]]:
    """Choose, for every (region, window) with labeled pairs, the grid
    threshold maximizing F1 of speed detection against the labels.

    Pairs are keyed by the earlier record's tower region and timestamp
    window. Unknown labels and outside-region pairs are ignored; keys with
    no labeled pairs fall back to default_threshold.
    """
    streams = _ensure_set(streams)
    region_grid = streams.registry.grid
    if region_grid is None:
        raise UnknownCell("registry has no regions attached")
    pairs = consecutive_speeds(streams, mode, tz_offset_min)
    usable = pairs.has_prev & (labels >= 0) & (pairs.key_region >= 0)
    if not usable.any():
        raise NoLabeledData("no labeled pairs fall inside any region")

    key = pairs.key_region[usable].astype(np.int64) * N_WINDOWS + pairs.key_window[usable]
    speeds = pairs.speeds[usable]
    truths = labels[usable]
    order = np.argsort(key, kind="stable")
    key, speeds, truths = key[order], speeds[order], truths[order]
    bounds = np.concatenate(
        ([0], np.nonzero(key[1:] != key[:-1])[0] + 1, [len(key)])
    )

    table = SpeedTable(default_threshold=float(default_threshold))
    report: list[CalibrationKeyReport] = []
    for s, e in zip(bounds[:-1], bounds[1:]):
        k = int(key[s])
        region_id = region_grid.region_ids[k // N_WINDOWS]
        window_id = k % N_WINDOWS
        theta, f1 = _best_threshold(speeds[s:e], truths[s:e], grid)
        table.thresholds[(region_id, window_id)] = theta
        report.append(
            CalibrationKeyReport(
                region_id, window_id, theta, f1, int(e - s), int((truths[s:e] == 1).sum())
            )
        )
    report.sort(key=lambda r: (r.region_id, r.window_id))
    return table, report


@dataclass(frozen=True, slots=True)
class DetectionMetrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def detection_metrics(flags: np.ndarray, truth: np.ndarray) -> DetectionMetrics:
    """Binary detection metrics on the load-shared class.

    truth may be boolean or tri-state (-1 entries are excluded).
    """
    flags = np.asarray(flags, dtype=bool)
    truth = np.asarray(truth)
    if truth.dtype == bool:
        known = np.ones(len(truth), dtype=bool)
        pos = truth
    else:
        known = truth >= 0
        pos = truth == 1
    tp = int((flags & pos & known).sum())
    fp = int((flags & ~pos & known).sum())
    fn = int((~flags & pos & known).sum())
    if (pos & known).sum() == 0:
        warnings.warn("no positive ground-truth records; recall reported as 0")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return DetectionMetrics(precision, recall, f1, tp, fp, fn)


class SpeedTableCalibrator(BaseEstimator):
    """fit() calibrates a per-(region, window) speed table from GPS-labeled
    streams; predict() flags load-shared records with it."""

    def __init__(
        self,
        default_threshold: float = 120.0,
        grid=THRESHOLD_GRID,
        distance_mode: str = "haversine",
        tz_offset_min: int = 0,
        max_fix_gap_s: int = 300,
        move_threshold_km: float = 0.1,
    ):
        self.default_threshold = default_threshold
        self.grid = grid
        self.distance_mode = distance_mode
        self.tz_offset_min = tz_offset_min
        self.max_fix_gap_s = max_fix_gap_s
        self.move_threshold_km = move_threshold_km

    def fit(self, streams, y: np.ndarray | None = None):
        streams = _ensure_set(streams)
        labels = y
        if labels is None:
            labels = label_ground_truth(
                streams, self.max_fix_gap_s, self.move_threshold_km
            )
        self.speed_table_, self.report_ = calibrate_speed_table(
            streams,
            labels,
            default_threshold=self.default_threshold,
            grid=self.grid,
            mode=self.distance_mode,
            tz_offset_min=self.tz_offset_min,
        )
        return self

    def predict(self, streams) -> np.ndarray:
        return detect_adaptive(
            streams, self.speed_table_, self.distance_mode, self.tz_offset_min
        )
