"""Loading, validation and canonicalization of the CSV inputs.

Files are parsed with pandas into flat numpy arrays; per-user streams are
views into those arrays so that ten-million-record inputs stay cheap to
slice. Row-level problems are collected in a :class:`LoadReport` with line
numbers instead of aborting the load.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .core import CdrRecord, CellTower, RegionGrid, Rect, UserSegment
from .exceptions import MalformedHeader, RegionGridError
from .validation import check_in_range

SCHEMAS = {
    "cdr": ["user_id", "timestamp_iso8601", "cell_id", "duration_s"],
    "towers": ["cell_id", "lat", "lon", "transmit_power_mw", "region_id"],
    "gps": ["user_id", "timestamp_iso8601", "lat", "lon"],
    "labels": ["user_id", "segment"],
    "regions": ["region_id", "lat_min", "lat_max", "lon_min", "lon_max", "is_study_area"],
    "speeds": ["region_id", "window_id", "avg_speed_kmph"],
}


@dataclass(frozen=True, slots=True)
class RejectedRow:
    line: int  # 1-based line number in the file (header is line 1)
    kind: str  # row_parse | duplicate_key | non_positive_power
    message: str


@dataclass(slots=True)
class LoadReport:
    path: str
    kind: str
    n_rows: int = 0
    n_loaded: int = 0
    rejected: list[RejectedRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.rejected

    def summary(self) -> str:
        return (
            f"{self.kind}: loaded {self.n_loaded}/{self.n_rows} rows from {self.path}"
            f" ({len(self.rejected)} rejected)"
        )


def _read_checked(path: str, kind: str) -> pd.DataFrame:
    expected = SCHEMAS[kind]
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\r\n")
    got = [c.strip() for c in header.split(",")]
    if got != expected:
        raise MalformedHeader(f"{path}: expected header {expected}, got {got}")
    return pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)


def _parse_timestamps(col: pd.Series) -> tuple[np.ndarray, np.ndarray]:
    """ISO-8601 text to UTC epoch seconds; second value is the valid mask."""
    dt = pd.to_datetime(col, format="ISO8601", errors="coerce", utc=True)
    ok = dt.notna().to_numpy()
    secs = np.zeros(len(col), dtype=np.int64)
    if ok.any():
        secs[ok] = dt[ok].astype("int64").to_numpy() // 1_000_000_000
    return secs, ok


def _reject_lines(report: LoadReport, bad_idx: np.ndarray, kind: str, message: str) -> None:
    for i in bad_idx:
        report.rejected.append(RejectedRow(int(i) + 2, kind, message))


# ---------------------------------------------------------------------------
# Tower registry
# ---------------------------------------------------------------------------

class TowerRegistry:
    """Cell towers indexed for vectorized lookups, sorted by cell_id.

    Region membership (``region_index``, ``in_study``) is populated by
    :meth:`attach_regions`; until then both default to "unknown".
    """

    def __init__(self, cell_ids, lat, lon, power, declared_region):
        order = np.argsort(np.asarray(cell_ids, dtype=object))
        self.cell_ids = np.asarray(cell_ids, dtype=object)[order]
        self.lat = np.asarray(lat, dtype=np.float64)[order]
        self.lon = np.asarray(lon, dtype=np.float64)[order]
        self.power = np.asarray(power, dtype=np.float64)[order]
        self.declared_region = np.asarray(declared_region, dtype=object)[order]
        self._id_index = pd.Index(self.cell_ids)
        self.region_index = np.full(len(self.cell_ids), -1, dtype=np.int32)
        self.in_study = np.zeros(len(self.cell_ids), dtype=bool)
        self.grid: RegionGrid | None = None

    def __len__(self) -> int:
        return len(self.cell_ids)

    def resolve(self, cell_ids) -> np.ndarray:
        """Map cell-id strings to registry indices; -1 where unknown."""
        return self._id_index.get_indexer(np.asarray(cell_ids, dtype=object)).astype(np.int32)

    def index_of(self, cell_id: str) -> int:
        idx = self._id_index.get_loc(cell_id)
        return int(idx)

    def tower(self, cell_id: str) -> CellTower:
        i = self.index_of(cell_id)
        return CellTower(
            cell_id=str(self.cell_ids[i]),
            latitude=float(self.lat[i]),
            longitude=float(self.lon[i]),
            transmit_power=float(self.power[i]),
            region_id=str(self.declared_region[i]),
        )

    def attach_regions(self, grid: RegionGrid) -> np.ndarray:
        """Resolve geometric region membership against ``grid``.

        Returns the indices of towers outside every region; they are kept
        (downstream lookups fall back to defaults) but callers should report
        them.
        """
        self.grid = grid
        self.region_index = grid.region_indices_of(self.lat, self.lon)
        self.in_study = grid.in_study_area(self.lat, self.lon)
        return np.nonzero(self.region_index < 0)[0]


# ---------------------------------------------------------------------------
# Streams
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class GpsTrack:
    timestamps: np.ndarray  # int64 epoch seconds, sorted
    lat: np.ndarray
    lon: np.ndarray

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass(slots=True)
class UserStream:
    """One user's time-sorted records (views into the owning StreamSet)."""

    user_id: str
    timestamps: np.ndarray
    cell_index: np.ndarray
    durations: np.ndarray
    registry: TowerRegistry
    gps: GpsTrack | None = None
    segment: UserSegment | None = None

    def __len__(self) -> int:
        return len(self.timestamps)

    def records(self):
        ids = self.registry.cell_ids
        for t, c, d in zip(self.timestamps, self.cell_index, self.durations):
            yield CdrRecord(str(self.user_id), int(t), str(ids[c]), int(d))


class StreamSet:
    """All users' canonical streams backed by contiguous arrays."""

    def __init__(self, user_ids, starts, timestamps, cell_index, durations, registry):
        self.user_ids = np.asarray(user_ids, dtype=object)
        self.starts = np.asarray(starts, dtype=np.int64)  # len n_users + 1
        self.timestamps = np.asarray(timestamps, dtype=np.int64)
        self.cell_index = np.asarray(cell_index, dtype=np.int32)
        self.durations = np.asarray(durations, dtype=np.int64)
        self.registry = registry
        counts = np.diff(self.starts)
        self.record_user = np.repeat(
            np.arange(len(self.user_ids), dtype=np.int32), counts
        )
        self._user_pos = {u: i for i, u in enumerate(self.user_ids)}
        # gps, aligned to the user list; empty slices where absent
        self.gps_starts: np.ndarray | None = None
        self.gps_timestamps: np.ndarray | None = None
        self.gps_lat: np.ndarray | None = None
        self.gps_lon: np.ndarray | None = None
        self.segments: list[UserSegment | None] = [None] * len(self.user_ids)

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_records(self) -> int:
        return len(self.timestamps)

    def counts(self) -> np.ndarray:
        return np.diff(self.starts)

    def user_index(self, user_id: str) -> int:
        return self._user_pos[user_id]

    def _gps_for(self, i: int) -> GpsTrack | None:
        if self.gps_starts is None:
            return None
        a, b = self.gps_starts[i], self.gps_starts[i + 1]
        if b == a:
            return None
        return GpsTrack(
            self.gps_timestamps[a:b], self.gps_lat[a:b], self.gps_lon[a:b]
        )

    def stream(self, i: int) -> UserStream:
        a, b = self.starts[i], self.starts[i + 1]
        return UserStream(
            user_id=str(self.user_ids[i]),
            timestamps=self.timestamps[a:b],
            cell_index=self.cell_index[a:b],
            durations=self.durations[a:b],
            registry=self.registry,
            gps=self._gps_for(i),
            segment=self.segments[i],
        )

    def by_user(self, user_id: str) -> UserStream:
        return self.stream(self.user_index(user_id))

    def __iter__(self):
        for i in range(self.n_users):
            yield self.stream(i)

    def attach_gps(self, gps_df: pd.DataFrame) -> int:
        """Attach GPS fixes (columns user_id, timestamp, lat, lon).

        Fixes for users absent from the set are ignored; returns how many
        fixes were attached.
        """
        codes = pd.Index(self.user_ids).get_indexer(gps_df["user_id"].to_numpy(dtype=object))
        keep = codes >= 0
        codes = codes[keep].astype(np.int64)
        ts = gps_df["timestamp"].to_numpy(dtype=np.int64)[keep]
        lat = gps_df["lat"].to_numpy(dtype=np.float64)[keep]
        lon = gps_df["lon"].to_numpy(dtype=np.float64)[keep]
        order = np.lexsort((ts, codes))
        codes, ts, lat, lon = codes[order], ts[order], lat[order], lon[order]
        counts = np.bincount(codes, minlength=self.n_users)
        self.gps_starts = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.gps_timestamps = ts
        self.gps_lat = lat
        self.gps_lon = lon
        return int(len(ts))

    def attach_labels(self, labels: dict[str, UserSegment]) -> int:
        n = 0
        for i, u in enumerate(self.user_ids):
            seg = labels.get(u)
            if seg is not None:
                self.segments[i] = seg
                n += 1
        return n

    def filter_records(self, record_mask: np.ndarray) -> "StreamSet":
        """New StreamSet keeping masked records; users left empty are dropped."""
        record_mask = np.asarray(record_mask, dtype=bool)
        kept_user = self.record_user[record_mask]
        counts = np.bincount(kept_user, minlength=self.n_users)
        kept_users = np.nonzero(counts > 0)[0]
        starts = np.concatenate(([0], np.cumsum(counts[kept_users]))).astype(np.int64)
        out = StreamSet(
            self.user_ids[kept_users],
            starts,
            self.timestamps[record_mask],
            self.cell_index[record_mask],
            self.durations[record_mask],
            self.registry,
        )
        out.segments = [self.segments[i] for i in kept_users]
        if self.gps_starts is not None:
            gcounts = np.diff(self.gps_starts)
            gmask = np.repeat(np.isin(np.arange(self.n_users), kept_users), gcounts)
            kept_g = gcounts[kept_users]
            out.gps_starts = np.concatenate(([0], np.cumsum(kept_g))).astype(np.int64)
            out.gps_timestamps = self.gps_timestamps[gmask]
            out.gps_lat = self.gps_lat[gmask]
            out.gps_lon = self.gps_lon[gmask]
        return out

    def subset_users(self, user_mask: np.ndarray) -> "StreamSet":
        user_mask = np.asarray(user_mask, dtype=bool)
        return self.filter_records(user_mask[self.record_user])


# ---------------------------------------------------------------------------
# Loaders
# ---------------------------------------------------------------------------

def load_dataset(path: str, kind: str):
    """Load and validate one input file.

    Returns ``(collection, LoadReport)`` where the collection type depends on
    ``kind``: cdr/gps -> normalized DataFrame, towers -> TowerRegistry,
    labels -> dict, regions -> RegionGrid, speeds -> dict keyed by
    (region_id, window_id).
    """
    if kind not in SCHEMAS:
        raise ValueError(f"unknown dataset kind {kind!r}")
    df = _read_checked(path, kind)
    report = LoadReport(path=str(path), kind=kind, n_rows=len(df))
    loader = {
        "cdr": _load_cdr,
        "towers": _load_towers,
        "gps": _load_gps,
        "labels": _load_labels,
        "regions": _load_regions,
        "speeds": _load_speeds,
    }[kind]
    out = loader(df, report)
    return out, report


def _load_cdr(df: pd.DataFrame, report: LoadReport) -> pd.DataFrame:
    secs, ts_ok = _parse_timestamps(df["timestamp_iso8601"])
    dur = pd.to_numeric(df["duration_s"], errors="coerce").to_numpy()
    dur_ok = np.isfinite(dur) & (dur >= 0)
    nonempty = (df["user_id"].to_numpy(dtype=object) != "") & (
        df["cell_id"].to_numpy(dtype=object) != ""
    )
    ok = ts_ok & dur_ok & nonempty
    _reject_lines(report, np.nonzero(~ok)[0], "row_parse", "bad cdr row")
    out = pd.DataFrame(
        {
            "user_id": df["user_id"].to_numpy(dtype=object)[ok],
            "timestamp": secs[ok],
            "cell_id": df["cell_id"].to_numpy(dtype=object)[ok],
            "duration": dur[ok].astype(np.int64),
        }
    )
    report.n_loaded = len(out)
    return out


def _load_towers(df: pd.DataFrame, report: LoadReport) -> TowerRegistry:
    lat = pd.to_numeric(df["lat"], errors="coerce").to_numpy()
    lon = pd.to_numeric(df["lon"], errors="coerce").to_numpy()
    power = pd.to_numeric(df["transmit_power_mw"], errors="coerce").to_numpy()
    ids = df["cell_id"].to_numpy(dtype=object)
    parse_ok = (
        np.isfinite(lat)
        & np.isfinite(lon)
        & (np.abs(lat) <= 90)
        & (np.abs(lon) <= 180)
        & np.isfinite(power)
        & (ids != "")
    )
    _reject_lines(report, np.nonzero(~parse_ok)[0], "row_parse", "bad tower row")
    power_ok = parse_ok & (power > 0)
    _reject_lines(
        report,
        np.nonzero(parse_ok & ~power_ok)[0],
        "non_positive_power",
        "transmit_power_mw must be > 0",
    )
    dup = pd.Series(ids).duplicated(keep="first").to_numpy() & power_ok
    _reject_lines(report, np.nonzero(dup)[0], "duplicate_key", "duplicate cell_id")
    ok = power_ok & ~dup
    report.n_loaded = int(ok.sum())
    return TowerRegistry(
        ids[ok], lat[ok], lon[ok], power[ok], df["region_id"].to_numpy(dtype=object)[ok]
    )


def _load_gps(df: pd.DataFrame, report: LoadReport) -> pd.DataFrame:
    secs, ts_ok = _parse_timestamps(df["timestamp_iso8601"])
    lat = pd.to_numeric(df["lat"], errors="coerce").to_numpy()
    lon = pd.to_numeric(df["lon"], errors="coerce").to_numpy()
    ok = (
        ts_ok
        & np.isfinite(lat)
        & np.isfinite(lon)
        & (np.abs(lat) <= 90)
        & (np.abs(lon) <= 180)
        & (df["user_id"].to_numpy(dtype=object) != "")
    )
    _reject_lines(report, np.nonzero(~ok)[0], "row_parse", "bad gps row")
    out = pd.DataFrame(
        {
            "user_id": df["user_id"].to_numpy(dtype=object)[ok],
            "timestamp": secs[ok],
            "lat": lat[ok],
            "lon": lon[ok],
        }
    )
    report.n_loaded = len(out)
    return out


def _load_labels(df: pd.DataFrame, report: LoadReport) -> dict[str, UserSegment]:
    valid_tokens = {s.value for s in UserSegment}
    out: dict[str, UserSegment] = {}
    for i, (user, token) in enumerate(zip(df["user_id"], df["segment"])):
        token = token.strip().lower()
        if not user or token not in valid_tokens:
            report.rejected.append(RejectedRow(i + 2, "row_parse", "bad label row"))
            continue
        if user in out:
            report.rejected.append(RejectedRow(i + 2, "duplicate_key", f"duplicate user {user}"))
            continue
        out[user] = UserSegment(token)
    report.n_loaded = len(out)
    return out


def _load_regions(df: pd.DataFrame, report: LoadReport) -> RegionGrid:
    rows = []
    study = []
    for i in range(len(df)):
        try:
            rect = Rect(
                float(df["lat_min"].iat[i]),
                float(df["lat_max"].iat[i]),
                float(df["lon_min"].iat[i]),
                float(df["lon_max"].iat[i]),
            )
            flag = int(df["is_study_area"].iat[i])
            rid = str(df["region_id"].iat[i])
            if rect.lat_min > rect.lat_max or rect.lon_min > rect.lon_max or flag not in (0, 1):
                raise ValueError
        except (TypeError, ValueError):
            report.rejected.append(RejectedRow(i + 2, "row_parse", "bad region row"))
            continue
        if flag == 1:
            study.append(rect)
        else:
            rows.append((rid, rect))
    if len(study) != 1:
        raise RegionGridError(
            f"{report.path}: expected exactly one is_study_area=1 row, got {len(study)}"
        )
    report.n_loaded = len(rows) + 1
    return RegionGrid(rows, study[0])


def _load_speeds(df: pd.DataFrame, report: LoadReport) -> dict[tuple[str, int], float]:
    out: dict[tuple[str, int], float] = {}
    for i in range(len(df)):
        try:
            rid = str(df["region_id"].iat[i])
            window = int(df["window_id"].iat[i])
            speed = float(df["avg_speed_kmph"].iat[i])
            check_in_range(window, 0, 6, "window_id")
            if not speed > 0:
                raise ValueError
        except Exception:
            report.rejected.append(RejectedRow(i + 2, "row_parse", "bad speed row"))
            continue
        if (rid, window) in out:
            report.rejected.append(RejectedRow(i + 2, "duplicate_key", "duplicate speed key"))
            continue
        out[(rid, window)] = speed
    report.n_loaded = len(out)
    return out


# ---------------------------------------------------------------------------
# Canonicalization and the study-area filter
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class CanonicalizeReport:
    duplicates_removed: int = 0
    unknown_cells: int = 0


def canonicalize_streams(
    cdr: pd.DataFrame, registry: TowerRegistry
) -> tuple[StreamSet, CanonicalizeReport]:
    """Sort per user by (timestamp, cell_id), drop duplicates and unknown cells.

    Duplicates share (user_id, timestamp, cell_id); the first occurrence wins.
    Applying the function twice equals applying it once.
    """
    rep = CanonicalizeReport()
    cell_idx = registry.resolve(cdr["cell_id"].to_numpy(dtype=object))
    known = cell_idx >= 0
    rep.unknown_cells = int((~known).sum())
    users = cdr["user_id"].to_numpy(dtype=object)[known]
    ts = cdr["timestamp"].to_numpy(dtype=np.int64)[known]
    cell_idx = cell_idx[known]
    dur = cdr["duration"].to_numpy(dtype=np.int64)[known]

    codes, unique_users = pd.factorize(users, sort=True)
    order = np.lexsort((cell_idx, ts, codes))
    codes, ts, cell_idx, dur = codes[order], ts[order], cell_idx[order], dur[order]

    if len(codes):
        same = (
            (codes[1:] == codes[:-1])
            & (ts[1:] == ts[:-1])
            & (cell_idx[1:] == cell_idx[:-1])
        )
        keep = np.concatenate(([True], ~same))
    else:
        keep = np.zeros(0, dtype=bool)
    rep.duplicates_removed = int((~keep).sum())
    codes, ts, cell_idx, dur = codes[keep], ts[keep], cell_idx[keep], dur[keep]

    counts = np.bincount(codes, minlength=len(unique_users))
    starts = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    streams = StreamSet(np.asarray(unique_users, dtype=object), starts, ts, cell_idx, dur, registry)
    return streams, rep


@dataclass(slots=True)
class StudyAreaReport:
    users_in: int = 0
    users_dropped: int = 0
    records_dropped: int = 0


def study_area_filter(
    streams: StreamSet, min_fraction: float = 0.8
) -> tuple[StreamSet, StudyAreaReport]:
    """Keep users whose in-study record share is >= min_fraction.

    Outside-area records are removed from the retained streams. Requires
    the registry to have regions attached.
    """
    check_in_range(min_fraction, 0.0, 1.0, "min_fraction")
    in_study = streams.registry.in_study[streams.cell_index]
    counts = streams.counts().astype(np.float64)
    inside = np.bincount(streams.record_user, weights=in_study, minlength=streams.n_users)
    frac = np.divide(inside, counts, out=np.zeros_like(inside), where=counts > 0)
    keep_user = frac >= min_fraction
    mask = in_study & keep_user[streams.record_user]
    out = streams.filter_records(mask)
    rep = StudyAreaReport(
        users_in=out.n_users,
        users_dropped=streams.n_users - out.n_users,
        records_dropped=streams.n_records - out.n_records,
    )
    return out, rep
