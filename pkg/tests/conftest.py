import numpy as np
import pandas as pd
import pytest

from cdrloc.core import Rect, RegionGrid
from cdrloc.ingest import StreamSet, TowerRegistry, canonicalize_streams


def make_registry(towers, grid=None):
    """towers: list of (cell_id, lat, lon, power_mw, region_id)."""
    ids, lats, lons, pows, regs = zip(*towers)
    registry = TowerRegistry(list(ids), list(lats), list(lons), list(pows), list(regs))
    if grid is not None:
        registry.attach_regions(grid)
    return registry


def make_streams(records, registry):
    """records: list of (user_id, timestamp_s, cell_id, duration_s)."""
    users, ts, cells, durs = zip(*records)
    cdr = pd.DataFrame(
        {
            "user_id": list(users),
            "timestamp": np.asarray(ts, dtype=np.int64),
            "cell_id": list(cells),
            "duration": np.asarray(durs, dtype=np.int64),
        }
    )
    streams, _ = canonicalize_streams(cdr, registry)
    return streams


def attach_gps(streams, fixes):
    """fixes: list of (user_id, timestamp_s, lat, lon)."""
    users, ts, lats, lons = zip(*fixes)
    streams.attach_gps(
        pd.DataFrame(
            {
                "user_id": list(users),
                "timestamp": np.asarray(ts, dtype=np.int64),
                "lat": np.asarray(lats, dtype=float),
                "lon": np.asarray(lons, dtype=float),
            }
        )
    )
    return streams


def simple_grid():
    """3x1 longitude bands over a 1x3-degree box, study area = whole box."""
    return RegionGrid(
        [
            ("A", Rect(0.0, 1.0, 0.0, 1.0)),
            ("B", Rect(0.0, 1.0, 1.0, 2.0)),
            ("C", Rect(0.0, 1.0, 2.0, 3.0)),
        ],
        Rect(0.0, 1.0, 0.0, 3.0),
    )


def streams_from_traces(world, traces):
    """Build an in-memory StreamSet straight from simulated traces.

    Returns (streams, truth_flags) with truth aligned to the canonical
    record order.
    """
    uid = world.users["user_id"].to_numpy(dtype=object)
    order = np.lexsort((traces.cell_index, traces.timestamps, traces.user_index))
    u = traces.user_index[order]
    counts = np.bincount(u, minlength=len(uid))
    keep_users = counts > 0
    starts = np.concatenate(([0], np.cumsum(counts[keep_users]))).astype(np.int64)
    streams = StreamSet(
        uid[keep_users],
        starts,
        traces.timestamps[order],
        traces.cell_index[order],
        traces.durations[order],
        world.registry,
    )
    truth = traces.truth_flags[order]
    if len(traces.gps_timestamps):
        gorder = np.lexsort((traces.gps_timestamps, traces.gps_user_index))
        gu = traces.gps_user_index[gorder]
        gcounts = np.bincount(gu, minlength=len(uid))[keep_users]
        streams.gps_starts = np.concatenate(([0], np.cumsum(gcounts))).astype(np.int64)
        streams.gps_timestamps = traces.gps_timestamps[gorder]
        streams.gps_lat = traces.gps_lat[gorder]
        streams.gps_lon = traces.gps_lon[gorder]
    return streams, truth


@pytest.fixture
def grid3():
    return simple_grid()
