"""Shared domain types, geodesy, and local-time arithmetic.

Everything here is immutable after construction and free of I/O, so the
rest of the toolkit can use it from any thread or process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import RegionGridError
from .validation import check_lat_lon

EARTH_RADIUS_KM = 6371.0088

MINUTES_PER_DAY = 1440

#: Start minute (local time) of each intra-day window.  The windows are
#: half-open [start, end); the last one wraps past midnight, covering
#: 22:00-07:00.  Together they partition the 24-hour day:
#: 07-09, 09-12, 12-13, 13-16:30, 16:30-19, 19-22, 22-07.
WINDOW_STARTS_MIN = (420, 540, 720, 780, 990, 1140, 1320)
N_WINDOWS = 7


class UserSegment(Enum):
    """Socio-economic user segments. Enumeration order is the tie-break order."""

    FULL_TIME = "full_time"
    PART_TIME = "part_time"
    STUDENT = "student"
    HOUSEWIFE = "housewife"
    RETIRED = "retired"
    OTHER = "other"

    @classmethod
    def from_token(cls, token: str) -> "UserSegment":
        return cls(token.strip().lower())


SEGMENTS = tuple(UserSegment)


@dataclass(frozen=True, slots=True)
class CdrRecord:
    """One pseudonymized call event."""

    user_id: str
    timestamp: int  # UTC epoch seconds
    cell_id: str
    duration: int  # seconds, >= 0


@dataclass(frozen=True, slots=True)
class CellTower:
    """A cell site with location, transmit power (mW) and declared region."""

    cell_id: str
    latitude: float
    longitude: float
    transmit_power: float
    region_id: str


@dataclass(frozen=True, slots=True)
class TimeWindow:
    window_id: int
    start_min: int
    end_min: int  # exclusive; the wrapping window has end < start

    def duration_min(self) -> int:
        if self.end_min > self.start_min:
            return self.end_min - self.start_min
        return MINUTES_PER_DAY - self.start_min + self.end_min


TIME_WINDOWS = tuple(
    TimeWindow(i, WINDOW_STARTS_MIN[i], WINDOW_STARTS_MIN[i + 1] if i + 1 < N_WINDOWS else WINDOW_STARTS_MIN[0])
    for i in range(N_WINDOWS)
)


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned lat/lon rectangle, closed on all edges."""

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def contains(self, lat: float, lon: float) -> bool:
        return self.lat_min <= lat <= self.lat_max and self.lon_min <= lon <= self.lon_max

    def contains_arrays(self, lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
        return (
            (lat >= self.lat_min)
            & (lat <= self.lat_max)
            & (lon >= self.lon_min)
            & (lon <= self.lon_max)
        )

    def area_deg2(self) -> float:
        return max(0.0, self.lat_max - self.lat_min) * max(0.0, self.lon_max - self.lon_min)


def _open_overlap(a: Rect, b: Rect) -> bool:
    """True when two rectangles share interior area (touching edges allowed)."""
    return (
        a.lat_min < b.lat_max
        and b.lat_min < a.lat_max
        and a.lon_min < b.lon_max
        and b.lon_min < a.lon_max
    )


class RegionGrid:
    """Ordered set of non-overlapping rectangular regions plus one study area.

    Points on a shared edge resolve to the region with the lower list index.
    """

    def __init__(self, regions: list[tuple[str, Rect]], study_area: Rect):
        seen = set()
        for rid, _ in regions:
            if rid in seen:
                raise RegionGridError(f"duplicate region id {rid!r}")
            seen.add(rid)
        for i in range(len(regions)):
            for j in range(i + 1, len(regions)):
                if _open_overlap(regions[i][1], regions[j][1]):
                    raise RegionGridError(
                        f"regions {regions[i][0]!r} and {regions[j][0]!r} overlap"
                    )
        self.regions = tuple(regions)
        self.region_ids = tuple(rid for rid, _ in regions)
        self.study_area = study_area
        self._index = {rid: i for i, (rid, _) in enumerate(regions)}

    def __len__(self) -> int:
        return len(self.regions)

    def index_of(self, region_id: str) -> int:
        return self._index[region_id]

    def region_of(self, lat: float, lon: float) -> str | None:
        idx = self.region_index_of(lat, lon)
        return None if idx < 0 else self.region_ids[idx]

    def region_index_of(self, lat: float, lon: float) -> int:
        for i, (_, rect) in enumerate(self.regions):
            if rect.contains(lat, lon):
                return i
        return -1

    def region_indices_of(self, lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
        """Vectorized region lookup; -1 for points outside all regions."""
        lat = np.asarray(lat, dtype=np.float64)
        lon = np.asarray(lon, dtype=np.float64)
        out = np.full(lat.shape, -1, dtype=np.int32)
        unassigned = np.ones(lat.shape, dtype=bool)
        for i, (_, rect) in enumerate(self.regions):
            hit = unassigned & rect.contains_arrays(lat, lon)
            out[hit] = i
            unassigned &= ~hit
            if not unassigned.any():
                break
        return out

    def in_study_area(self, lat, lon):
        lat = np.asarray(lat, dtype=np.float64)
        lon = np.asarray(lon, dtype=np.float64)
        return self.study_area.contains_arrays(lat, lon)


def region_of(lat: float, lon: float, grid: RegionGrid) -> str | None:
    """The unique region containing the point, or None outside all regions."""
    return grid.region_of(lat, lon)


# ---------------------------------------------------------------------------
# Geodesy
# ---------------------------------------------------------------------------

def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance in km on a sphere of radius 6371.0088 km.

    Accepts scalars or numpy arrays (broadcasting applies).
    """
    lat1 = np.radians(np.asarray(lat1, dtype=np.float64))
    lon1 = np.radians(np.asarray(lon1, dtype=np.float64))
    lat2 = np.radians(np.asarray(lat2, dtype=np.float64))
    lon2 = np.radians(np.asarray(lon2, dtype=np.float64))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))
    if np.ndim(d) == 0:
        return float(d)
    return d


def planar_km(lat1, lon1, lat2, lon2):
    """Equirectangular (locally planar) distance in km.

    Chord lengths are scaled at the mean latitude; adequate for the short
    hops this toolkit measures, exposed as the alternative distance mode.
    """
    lat1 = np.asarray(lat1, dtype=np.float64)
    lon1 = np.asarray(lon1, dtype=np.float64)
    lat2 = np.asarray(lat2, dtype=np.float64)
    lon2 = np.asarray(lon2, dtype=np.float64)
    k = math.pi / 180.0 * EARTH_RADIUS_KM
    x = (lon2 - lon1) * np.cos(np.radians((lat1 + lat2) / 2.0))
    y = lat2 - lat1
    d = k * np.hypot(x, y)
    if np.ndim(d) == 0:
        return float(d)
    return d


DISTANCE_MODES = ("haversine", "planar")


def distance_fn(mode: str = "haversine"):
    if mode == "haversine":
        return haversine_km
    if mode == "planar":
        return planar_km
    raise ValueError(f"unknown distance mode {mode!r}; expected one of {DISTANCE_MODES}")


def validated_point(lat: float, lon: float) -> tuple[float, float]:
    return check_lat_lon(lat, lon)


# ---------------------------------------------------------------------------
# Local-time arithmetic (single fixed UTC offset per run)
# ---------------------------------------------------------------------------

def local_minute_of_day(ts, tz_offset_min: int = 0):
    """Minute-of-day in local time for UTC epoch seconds (scalar or array)."""
    ts = np.asarray(ts, dtype=np.int64)
    m = (ts // 60 + int(tz_offset_min)) % MINUTES_PER_DAY
    if np.ndim(m) == 0:
        return int(m)
    return m


def local_day_index(ts, tz_offset_min: int = 0):
    """Local calendar day as days since 1970-01-01 (scalar or array)."""
    ts = np.asarray(ts, dtype=np.int64)
    d = (ts + int(tz_offset_min) * 60) // 86400
    if np.ndim(d) == 0:
        return int(d)
    return d


def local_weekday(ts, tz_offset_min: int = 0):
    """Local weekday, Monday=0 ... Sunday=6 (scalar or array)."""
    d = np.asarray(local_day_index(ts, tz_offset_min), dtype=np.int64)
    w = (d + 3) % 7  # 1970-01-01 was a Thursday
    if np.ndim(w) == 0:
        return int(w)
    return w


def local_hour(ts, tz_offset_min: int = 0):
    m = local_minute_of_day(ts, tz_offset_min)
    h = np.asarray(m) // 60
    if np.ndim(h) == 0:
        return int(h)
    return h


_WINDOW_BOUNDS = np.asarray(WINDOW_STARTS_MIN, dtype=np.int64)


def window_of(ts, tz_offset_min: int = 0):
    """Map UTC epoch seconds to the containing intra-day window id (0..6).

    Minutes before 07:00 belong to the wrapping 22:00-07:00 window.
    """
    minute = np.asarray(local_minute_of_day(ts, tz_offset_min), dtype=np.int64)
    idx = np.searchsorted(_WINDOW_BOUNDS, minute, side="right") - 1
    idx = np.where(idx < 0, N_WINDOWS - 1, idx)
    if np.ndim(idx) == 0:
        return int(idx)
    return idx.astype(np.int32)


def minute_in_ranges(minute, ranges):
    """Membership of minute-of-day values in half-open [start, end) ranges.

    A range with end <= start wraps midnight. Scalar or array input.
    """
    minute = np.asarray(minute)
    out = np.zeros(minute.shape, dtype=bool)
    for start, end in ranges:
        if end > start:
            out |= (minute >= start) & (minute < end)
        else:
            out |= (minute >= start) | (minute < end)
    if np.ndim(out) == 0:
        return bool(out)
    return out
