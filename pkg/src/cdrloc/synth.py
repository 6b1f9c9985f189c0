"""Synthetic world and trace generator.

Produces a tower layout (dense, low-power urban core; sparse, high-power
suburbs), a rectangular region grid, users with segment-specific daily
schedules, GPS ground truth, and CDR events with an explicit load-sharing
mechanism: with probability p_ls a call is served by a random covering cell
other than the strongest one. A record's truth flag is set either by that
mechanism or whenever the serving cell changed while the user moved at most
100 m between the two calls, so the emitted truth agrees with the
GPS-labeling oracle by construction.

Everything is deterministic given the seed; per-user substreams derive
their own generators, so results do not depend on scheduling.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .core import (
    SEGMENTS,
    Rect,
    RegionGrid,
    UserSegment,
    haversine_km,
    window_of,
)
from .exceptions import InvalidConfig
from .ingest import TowerRegistry

_DEG_LAT_KM = 110.574
_EPOCH = _dt.date(1970, 1, 1).toordinal()


@dataclass(frozen=True, slots=True)
class SegmentSchedule:
    """Daily behavior template for one user segment."""

    work_start_min: int | None  # None: never leaves home on a schedule
    work_end_min: int | None
    workdays: tuple[int, ...]  # eligible local weekdays (Mon=0)
    work_prob: float  # chance of actually going on an eligible day
    near_home_workplace: bool  # errand point near home instead of a job
    irregular: bool  # redraw start/length every day ("other" segment)
    call_rates: tuple[float, ...]  # 24 hourly Poisson rates


DEFAULT_SCHEDULES: dict[UserSegment, SegmentSchedule] = {
    UserSegment.FULL_TIME: SegmentSchedule(
        510, 990, (0, 1, 2, 3, 4), 0.95, False, False,
        (0.2, 0.1, 0.1, 0.1, 0.2, 0.3, 0.6, 1.2, 1.5, 0.9, 0.8, 0.9,
         1.4, 0.9, 0.8, 0.9, 1.2, 1.8, 1.6, 1.2, 0.9, 0.7, 0.5, 0.3),
    ),
    UserSegment.PART_TIME: SegmentSchedule(
        570, 960, (0, 1, 2, 3, 4, 5), 0.6, False, False,
        (0.2, 0.1, 0.1, 0.1, 0.1, 0.2, 0.4, 0.6, 0.9, 1.3, 1.4, 1.3,
         1.0, 0.8, 0.7, 0.6, 0.7, 0.8, 0.9, 0.8, 0.7, 0.5, 0.4, 0.2),
    ),
    UserSegment.STUDENT: SegmentSchedule(
        450, 930, (0, 1, 2, 3, 4), 0.97, False, False,
        (0.1, 0.05, 0.05, 0.05, 0.1, 0.3, 0.8, 0.6, 0.3, 0.2, 0.2, 0.3,
         0.5, 1.2, 1.6, 1.4, 1.2, 1.0, 0.9, 1.1, 0.9, 0.6, 0.3, 0.1),
    ),
    UserSegment.HOUSEWIFE: SegmentSchedule(
        600, 690, (0, 1, 2, 3, 4, 5, 6), 0.5, True, False,
        (0.1, 0.05, 0.05, 0.05, 0.1, 0.3, 0.7, 1.0, 1.2, 1.3, 1.2, 1.1,
         1.0, 1.0, 1.0, 1.0, 1.1, 1.0, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1),
    ),
    UserSegment.RETIRED: SegmentSchedule(
        510, 600, (0, 1, 2, 3, 4, 5, 6), 0.4, True, False,
        (0.1, 0.05, 0.05, 0.05, 0.1, 0.4, 0.9, 1.3, 1.4, 1.2, 0.9, 0.7,
         0.6, 0.5, 0.5, 0.5, 0.5, 0.5, 0.4, 0.3, 0.2, 0.1, 0.1, 0.05),
    ),
    UserSegment.OTHER: SegmentSchedule(
        480, 900, (0, 1, 2, 3, 4, 5, 6), 0.5, False, True,
        (0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.3, 0.4, 0.4, 0.5, 0.5, 0.5,
         0.5, 0.5, 0.5, 0.6, 0.6, 0.7, 0.7, 0.8, 0.9, 1.0, 1.0, 0.9),
    ),
}


@dataclass(frozen=True, slots=True)
class WorldConfig:
    seed: int = 0
    n_users: int = 200
    days: int = 14
    start_date: str = "2026-01-05"  # a Monday
    area: Rect = Rect(6.70, 7.30, 79.80, 80.40)
    urban: Rect = Rect(6.95, 7.15, 80.02, 80.18)
    region_rows: int = 3
    region_cols: int = 3
    district_cols: int = 3
    urban_towers: int = 140
    suburban_towers: int = 160
    tower_jitter: float = 0.3
    urban_power_mw: tuple[float, ...] = (80.0, 120.0, 180.0)
    suburban_power_mw: tuple[float, ...] = (400.0, 1000.0, 2400.0)
    coverage_km_per_sqrt_mw: float = 0.20
    p_ls: float = 0.2
    work_urban_bias: float = 0.7
    gps_user_fraction: float = 1.0
    gps_interval_min: int = 10
    home_wander_m: float = 15.0
    gps_noise_m: float = 10.0
    call_rate_scale: float = 1.0
    moving_call_factor: float = 0.4  # thinning of the call rate during travel legs
    mean_call_duration_s: float = 60.0
    tz_offset_min: int = 0
    urban_window_speeds: tuple[float, ...] = (10.0, 16.0, 14.0, 16.0, 10.0, 24.0, 45.0)
    suburban_window_speeds: tuple[float, ...] = (42.0, 55.0, 60.0, 55.0, 45.0, 60.0, 70.0)
    segment_mix: tuple[float, ...] = (0.30, 0.12, 0.18, 0.16, 0.12, 0.12)
    schedules: dict[UserSegment, SegmentSchedule] = field(
        default_factory=lambda: dict(DEFAULT_SCHEDULES)
    )

    def validate(self) -> "WorldConfig":
        if not 0.0 <= self.p_ls <= 1.0:
            raise InvalidConfig(f"p_ls={self.p_ls} outside [0, 1]")
        if self.n_users < 1 or self.days < 1:
            raise InvalidConfig("n_users and days must be >= 1")
        if self.urban_towers < 1 or self.suburban_towers < 1:
            raise InvalidConfig("tower counts must be >= 1")
        if min(self.urban_window_speeds + self.suburban_window_speeds) <= 0:
            raise InvalidConfig("window speeds must be > 0")
        if abs(sum(self.segment_mix) - 1.0) > 1e-9 or min(self.segment_mix) < 0:
            raise InvalidConfig("segment_mix must be a probability vector")
        if not 0.0 <= self.gps_user_fraction <= 1.0:
            raise InvalidConfig("gps_user_fraction outside [0, 1]")
        return self

    def start_day_index(self) -> int:
        return _dt.date.fromisoformat(self.start_date).toordinal() - _EPOCH


@dataclass(slots=True)
class World:
    config: WorldConfig
    registry: TowerRegistry
    region_grid: RegionGrid
    district_grid: RegionGrid
    users: pd.DataFrame  # user_id, segment, home_lat/lon, work_lat/lon, has_gps
    region_speeds: np.ndarray  # (n_regions, 7) true travel speeds kmph
    coverage_radius_km: np.ndarray  # per tower


@dataclass(slots=True)
class Traces:
    """Simulated traces as flat arrays aligned across cdr fields."""

    user_index: np.ndarray
    timestamps: np.ndarray
    cell_index: np.ndarray  # registry index
    durations: np.ndarray
    truth_flags: np.ndarray  # bool
    mechanism_flags: np.ndarray  # bool, the forced load-share branch only
    gps_user_index: np.ndarray
    gps_timestamps: np.ndarray
    gps_lat: np.ndarray
    gps_lon: np.ndarray

    @property
    def n_records(self) -> int:
        return len(self.timestamps)


def _tile_grid(area: Rect, rows: int, cols: int, prefix: str) -> list[tuple[str, Rect]]:
    lat_edges = np.linspace(area.lat_min, area.lat_max, rows + 1)
    lon_edges = np.linspace(area.lon_min, area.lon_max, cols + 1)
    out = []
    for r in range(rows):
        for c in range(cols):
            out.append(
                (
                    f"{prefix}{r}{c}" if rows > 1 else f"{prefix}{c}",
                    Rect(lat_edges[r], lat_edges[r + 1], lon_edges[c], lon_edges[c + 1]),
                )
            )
    return out


def _jittered_grid(rng, rect: Rect, n: int, jitter: float) -> np.ndarray:
    """About n points on a jittered grid inside rect, row-major order."""
    h = rect.lat_max - rect.lat_min
    w = rect.lon_max - rect.lon_min
    rows = max(1, int(round(np.sqrt(n * h / max(w, 1e-9)))))
    cols = int(np.ceil(n / rows))
    lat_step = h / rows
    lon_step = w / cols
    lat0 = rect.lat_min + lat_step / 2
    lon0 = rect.lon_min + lon_step / 2
    pts = []
    for r in range(rows):
        for c in range(cols):
            pts.append((lat0 + r * lat_step, lon0 + c * lon_step))
    pts = np.asarray(pts)
    pts[:, 0] += rng.uniform(-jitter, jitter, len(pts)) * lat_step
    pts[:, 1] += rng.uniform(-jitter, jitter, len(pts)) * lon_step
    pts[:, 0] = np.clip(pts[:, 0], rect.lat_min, rect.lat_max)
    pts[:, 1] = np.clip(pts[:, 1], rect.lon_min, rect.lon_max)
    return pts


def generate_world(config: WorldConfig) -> World:
    config.validate()
    rng = np.random.default_rng([config.seed, 0])

    region_grid = RegionGrid(
        _tile_grid(config.area, config.region_rows, config.region_cols, "R"),
        config.area,
    )
    district_grid = RegionGrid(
        _tile_grid(config.area, 1, config.district_cols, "D"), config.area
    )

    urban_pts = _jittered_grid(rng, config.urban, config.urban_towers, config.tower_jitter)
    urban_pts = urban_pts[: config.urban_towers]
    area_total = config.area.area_deg2()
    urban_area = config.urban.area_deg2()
    oversample = area_total / max(area_total - urban_area, 1e-9)
    sub_pts = _jittered_grid(
        rng, config.area, int(np.ceil(config.suburban_towers * oversample)), config.tower_jitter
    )
    outside = ~config.urban.contains_arrays(sub_pts[:, 0], sub_pts[:, 1])
    sub_pts = sub_pts[outside][: config.suburban_towers]

    pts = np.vstack([urban_pts, sub_pts])
    powers = np.concatenate(
        [
            rng.choice(config.urban_power_mw, len(urban_pts)),
            rng.choice(config.suburban_power_mw, len(sub_pts)),
        ]
    )
    ids = [f"C{i:05d}" for i in range(len(pts))]
    declared = [region_grid.region_of(lat, lon) or "" for lat, lon in pts]
    registry = TowerRegistry(ids, pts[:, 0], pts[:, 1], powers, declared)
    registry.attach_regions(region_grid)
    coverage = config.coverage_km_per_sqrt_mw * np.sqrt(registry.power)

    # users
    n = config.n_users
    seg_codes = rng.choice(len(SEGMENTS), n, p=np.asarray(config.segment_mix))
    home_lat = rng.uniform(config.area.lat_min, config.area.lat_max, n)
    home_lon = rng.uniform(config.area.lon_min, config.area.lon_max, n)
    work_lat = np.empty(n)
    work_lon = np.empty(n)
    for i in range(n):
        sched = config.schedules[SEGMENTS[seg_codes[i]]]
        if sched.near_home_workplace:
            ang = rng.uniform(0, 2 * np.pi)
            r_km = rng.uniform(0.3, 2.0)
            work_lat[i] = home_lat[i] + r_km * np.cos(ang) / _DEG_LAT_KM
            work_lon[i] = home_lon[i] + r_km * np.sin(ang) / (
                _DEG_LAT_KM * np.cos(np.radians(home_lat[i]))
            )
        elif rng.random() < config.work_urban_bias:
            work_lat[i] = rng.uniform(config.urban.lat_min, config.urban.lat_max)
            work_lon[i] = rng.uniform(config.urban.lon_min, config.urban.lon_max)
        else:
            work_lat[i] = rng.uniform(config.area.lat_min, config.area.lat_max)
            work_lon[i] = rng.uniform(config.area.lon_min, config.area.lon_max)
    has_gps = rng.random(n) < config.gps_user_fraction

    users = pd.DataFrame(
        {
            "user_id": [f"U{i:05d}" for i in range(n)],
            "segment": [SEGMENTS[c] for c in seg_codes],
            "home_lat": home_lat,
            "home_lon": home_lon,
            "work_lat": work_lat,
            "work_lon": work_lon,
            "has_gps": has_gps,
        }
    )

    speeds = np.empty((len(region_grid), 7))
    for r, (_, rect) in enumerate(region_grid.regions):
        urbanish = (
            rect.lat_min < config.urban.lat_max
            and config.urban.lat_min < rect.lat_max
            and rect.lon_min < config.urban.lon_max
            and config.urban.lon_min < rect.lon_max
        )
        speeds[r] = config.urban_window_speeds if urbanish else config.suburban_window_speeds

    return World(config, registry, region_grid, district_grid, users, speeds, coverage)


# ---------------------------------------------------------------------------
# Trace simulation
# ---------------------------------------------------------------------------

def _speed_at(world: World, lat: float, lon: float, minute: int) -> float:
    region = world.region_grid.region_index_of(lat, lon)
    w = window_of(int(minute) * 60)
    if region < 0:
        return float(world.config.suburban_window_speeds[w])
    return float(world.region_speeds[region, w])


def _day_breakpoints(rng, world, sched, home, work, weekday) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-linear day plan: breakpoint minutes and positions."""
    go = (
        sched.work_start_min is not None
        and weekday in sched.workdays
        and rng.random() < sched.work_prob
    )
    if not go:
        return np.array([0.0, 1440.0]), np.array([home, home])
    if sched.irregular:
        start = rng.uniform(420, 600)
        end = start + rng.uniform(360, 540)
    else:
        start = sched.work_start_min + rng.uniform(-20, 20)
        end = sched.work_end_min + rng.uniform(-25, 25)
    end = min(end, 1435.0)
    d_km = float(haversine_km(home[0], home[1], work[0], work[1]))
    v_out = _speed_at(world, home[0], home[1], max(0, int(start - 30))) * rng.uniform(0.9, 1.1)
    v_back = _speed_at(world, work[0], work[1], int(end)) * rng.uniform(0.9, 1.1)
    t_out = 60.0 * d_km / v_out
    t_back = 60.0 * d_km / v_back
    depart = max(0.0, start - t_out)
    arrive_home = min(1440.0, end + t_back)
    minutes = np.array([0.0, depart, start, end, arrive_home, 1440.0])
    pos = np.array([home, home, work, work, home, home])
    return minutes, pos


def _positions_at(break_min: np.ndarray, break_pos: np.ndarray, minutes: np.ndarray) -> np.ndarray:
    lat = np.interp(minutes, break_min, break_pos[:, 0])
    lon = np.interp(minutes, break_min, break_pos[:, 1])
    return np.column_stack([lat, lon])


def _moving_mask(break_min: np.ndarray, break_pos: np.ndarray, minutes: np.ndarray) -> np.ndarray:
    """True where the plan is in a travel leg at the given minutes."""
    seg = np.clip(np.searchsorted(break_min, minutes, side="right") - 1, 0, len(break_min) - 2)
    seg_moves = np.any(break_pos[1:] != break_pos[:-1], axis=1)
    return seg_moves[seg]


def simulate_traces(world: World, days: int | None = None, seed: int | None = None) -> Traces:
    cfg = world.config
    days = cfg.days if days is None else days
    seed = cfg.seed if seed is None else seed
    reg = world.registry
    tz_s = cfg.tz_offset_min * 60
    day0 = world.config.start_day_index()
    wander_deg = cfg.home_wander_m / 1000.0 / _DEG_LAT_KM
    gps_deg = cfg.gps_noise_m / 1000.0 / _DEG_LAT_KM
    gps_minutes = np.arange(0, 1440, cfg.gps_interval_min, dtype=np.float64)

    rec_user, rec_ts, rec_cell, rec_dur = [], [], [], []
    rec_truth, rec_mech = [], []
    gps_user, gps_ts, gps_lat, gps_lon = [], [], [], []

    rates = {
        seg: np.asarray(cfg.schedules[seg].call_rates) * cfg.call_rate_scale
        for seg in SEGMENTS
    }

    for u in range(len(world.users)):
        rng = np.random.default_rng([seed, 1, u])
        row = world.users.iloc[u]
        sched = cfg.schedules[row["segment"]]
        home = np.array([row["home_lat"], row["home_lon"]])
        work = np.array([row["work_lat"], row["work_lon"]])
        rate = rates[row["segment"]]

        u_minutes, u_pos, u_day = [], [], []
        for d in range(days):
            weekday = (day0 + d + 3) % 7
            break_min, break_pos = _day_breakpoints(rng, world, sched, home, work, weekday)

            if row["has_gps"]:
                gpos = _positions_at(break_min, break_pos, gps_minutes)
                gpos += rng.normal(0.0, gps_deg, gpos.shape)
                gts = (day0 + d) * 86400 + (gps_minutes * 60).astype(np.int64) - tz_s
                gps_user.append(np.full(len(gts), u, dtype=np.int32))
                gps_ts.append(gts)
                gps_lat.append(gpos[:, 0])
                gps_lon.append(gpos[:, 1])

            counts = rng.poisson(rate)
            if counts.sum() == 0:
                continue
            minutes = np.sort(
                np.concatenate(
                    [rng.uniform(h * 60.0, (h + 1) * 60.0, c) for h, c in enumerate(counts) if c]
                )
            )
            pos = _positions_at(break_min, break_pos, minutes)
            moving = _moving_mask(break_min, break_pos, minutes)
            if cfg.moving_call_factor < 1.0:
                keep = ~moving | (rng.random(len(minutes)) < cfg.moving_call_factor)
                minutes, pos, moving = minutes[keep], pos[keep], moving[keep]
                if len(minutes) == 0:
                    continue
            pos[~moving] += rng.normal(0.0, wander_deg, (int((~moving).sum()), 2))
            u_minutes.append(minutes)
            u_pos.append(pos)
            u_day.append(np.full(len(minutes), d))

        if not u_minutes:
            continue
        minutes = np.concatenate(u_minutes)
        pos = np.vstack(u_pos)
        day_idx = np.concatenate(u_day)
        ts = (day0 + day_idx) * 86400 + np.round(minutes * 60).astype(np.int64) - tz_s
        # keep one record per second so (user, timestamp, cell) is unique
        keep = np.concatenate(([True], np.diff(ts) > 0))
        minutes, pos, day_idx, ts = minutes[keep], pos[keep], day_idx[keep], ts[keep]
        m = len(ts)

        dist = haversine_km(
            pos[:, 0:1], pos[:, 1:2], reg.lat[None, :], reg.lon[None, :]
        )
        received = reg.power[None, :] / np.maximum(dist, 0.001) ** 2
        covered = dist <= world.coverage_radius_km[None, :]
        strongest = np.argmax(received, axis=1)
        n_covered = covered.sum(axis=1)

        serving = strongest.copy()
        mech = np.zeros(m, dtype=bool)
        draw = rng.random(m)
        for i in np.nonzero((draw < cfg.p_ls) & (n_covered >= 2))[0]:
            others = np.nonzero(covered[i])[0]
            others = others[others != strongest[i]]
            if len(others):
                serving[i] = rng.choice(others)
                mech[i] = True

        moved = np.empty(m)
        moved[0] = np.inf
        if m > 1:
            moved[1:] = haversine_km(pos[:-1, 0], pos[:-1, 1], pos[1:, 0], pos[1:, 1])
        changed = np.empty(m, dtype=bool)
        changed[0] = False
        changed[1:] = serving[1:] != serving[:-1]
        truth = mech | (changed & (moved <= 0.1))
        truth[0] = False

        durations = np.minimum(
            3600, np.maximum(1, rng.exponential(cfg.mean_call_duration_s, m))
        ).astype(np.int64)
        rec_user.append(np.full(m, u, dtype=np.int32))
        rec_ts.append(ts)
        rec_cell.append(serving.astype(np.int32))
        rec_dur.append(durations)
        rec_truth.append(truth)
        rec_mech.append(mech)

    def _cat(parts, dtype):
        return np.concatenate(parts) if parts else np.zeros(0, dtype=dtype)

    return Traces(
        user_index=_cat(rec_user, np.int32),
        timestamps=_cat(rec_ts, np.int64),
        cell_index=_cat(rec_cell, np.int32),
        durations=_cat(rec_dur, np.int64),
        truth_flags=_cat(rec_truth, bool),
        mechanism_flags=_cat(rec_mech, bool),
        gps_user_index=_cat(gps_user, np.int32),
        gps_timestamps=_cat(gps_ts, np.int64),
        gps_lat=_cat(gps_lat, np.float64),
        gps_lon=_cat(gps_lon, np.float64),
    )


# ---------------------------------------------------------------------------
# File emission (ingest schemas plus truth files)
# ---------------------------------------------------------------------------

def _iso(ts: np.ndarray) -> np.ndarray:
    # np.datetime_as_string is the only formatter fast enough for 1e7 rows
    return np.datetime_as_string(np.asarray(ts, dtype=np.int64).astype("datetime64[s]"))


def world_frames(world: World, traces: Traces) -> dict[str, pd.DataFrame]:
    reg = world.registry
    users = world.users
    uid = users["user_id"].to_numpy(dtype=object)

    cdr = pd.DataFrame(
        {
            "user_id": uid[traces.user_index],
            "timestamp_iso8601": _iso(traces.timestamps),
            "cell_id": reg.cell_ids[traces.cell_index],
            "duration_s": traces.durations,
        }
    )
    towers = pd.DataFrame(
        {
            "cell_id": reg.cell_ids,
            "lat": reg.lat,
            "lon": reg.lon,
            "transmit_power_mw": reg.power,
            "region_id": reg.declared_region,
        }
    )
    gps = pd.DataFrame(
        {
            "user_id": uid[traces.gps_user_index],
            "timestamp_iso8601": _iso(traces.gps_timestamps),
            "lat": traces.gps_lat,
            "lon": traces.gps_lon,
        }
    )
    labels = pd.DataFrame(
        {"user_id": uid, "segment": [s.value for s in users["segment"]]}
    )

    def _region_rows(grid: RegionGrid) -> pd.DataFrame:
        rows = [
            (rid, r.lat_min, r.lat_max, r.lon_min, r.lon_max, 0)
            for rid, r in grid.regions
        ]
        s = grid.study_area
        rows.append(("STUDY", s.lat_min, s.lat_max, s.lon_min, s.lon_max, 1))
        return pd.DataFrame(
            rows,
            columns=["region_id", "lat_min", "lat_max", "lon_min", "lon_max", "is_study_area"],
        )

    speeds = pd.DataFrame(
        [
            (world.region_grid.region_ids[r], w, world.region_speeds[r, w])
            for r in range(len(world.region_grid))
            for w in range(7)
        ],
        columns=["region_id", "window_id", "avg_speed_kmph"],
    )
    truth_flags = pd.DataFrame(
        {
            "user_id": uid[traces.user_index],
            "timestamp_iso8601": cdr["timestamp_iso8601"],
            "cell_id": cdr["cell_id"],
            "flag": traces.truth_flags.astype(int),
        }
    )
    anchor_rows = []
    for _, row in users.iterrows():
        anchor_rows.append((row["user_id"], "home", row["home_lat"], row["home_lon"]))
        if not world.config.schedules[row["segment"]].near_home_workplace:
            anchor_rows.append((row["user_id"], "work", row["work_lat"], row["work_lon"]))
    truth_anchors = pd.DataFrame(anchor_rows, columns=["user_id", "kind", "lat", "lon"])

    return {
        "cdr": cdr,
        "towers": towers,
        "gps": gps,
        "labels": labels,
        "regions": _region_rows(world.region_grid),
        "districts": _region_rows(world.district_grid),
        "speeds": speeds,
        "truth_flags": truth_flags,
        "truth_anchors": truth_anchors,
    }


def write_world(world: World, traces: Traces, out_dir) -> dict[str, str]:
    """Write every emitted file into out_dir; returns name -> path."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    frames = world_frames(world, traces)
    paths = {}
    for name, frame in frames.items():
        path = os.path.join(out_dir, f"{name}.csv")
        frame.to_csv(path, index=False, float_format="%.8f")
        paths[name] = path
    return paths
