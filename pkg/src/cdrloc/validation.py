"""Small input-validation helpers shared by the estimator-style classes."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch, InvalidConfig


def as_float_array(values, name="values", ndim=None):
    """Coerce to a float64 ndarray and require all entries finite."""
    arr = np.asarray(values, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise DimensionMismatch(f"{name}: expected {ndim}-d array, got {arr.ndim}-d")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{name}: non-finite entries")
    return arr


def check_lat_lon(lat, lon, name="point"):
    lat = float(lat)
    lon = float(lon)
    if not (-90.0 <= lat <= 90.0):
        raise InvalidConfig(f"{name}: latitude {lat} outside [-90, 90]")
    if not (-180.0 <= lon <= 180.0):
        raise InvalidConfig(f"{name}: longitude {lon} outside [-180, 180]")
    return lat, lon


def check_aligned(a, b, name_a="a", name_b="b"):
    if len(a) != len(b):
        raise DimensionMismatch(f"{name_a} has {len(a)} entries, {name_b} has {len(b)}")


def check_in_range(value, lo, hi, name):
    value = float(value)
    if not (lo <= value <= hi):
        raise InvalidConfig(f"{name}={value} outside [{lo}, {hi}]")
    return value


def check_positive(value, name):
    value = float(value)
    if not value > 0:
        raise InvalidConfig(f"{name}={value} must be > 0")
    return value
