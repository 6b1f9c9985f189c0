"""Exception types raised across the toolkit.

Row-level problems found while loading files are normally *reported*, not
raised (see :class:`cdrloc.ingest.LoadReport`); the classes here cover the
conditions that make an operation impossible.
"""

from __future__ import annotations


class CdrlocError(Exception):
    """Base class for all toolkit errors."""


class DataError(CdrlocError):
    """Input data cannot be used as requested (CLI exit code 2)."""


class UsageError(CdrlocError):
    """Bad invocation: unknown option, missing path, invalid value (CLI exit code 1)."""


class MalformedHeader(DataError):
    """A CSV file's header row does not match the expected schema."""


class RegionGridError(DataError):
    """Region definitions are unusable (overlaps, missing study area, ...)."""


class EmptyStream(DataError):
    """An operation requiring at least one record got an empty stream."""


class UnknownCell(DataError):
    """A record references a cell id absent from the tower registry."""


class NoGps(DataError):
    """Ground-truth labeling requested for a stream without GPS fixes."""


class NoLabeledData(DataError):
    """Speed-threshold calibration got no usable labeled pairs at all."""


class NoLabeledUsers(DataError):
    """Segment-parameter fitting got no users with a usable anchor."""


class NoUsers(DataError):
    """An O-D matrix was requested but no user has both anchors in mapped districts."""


class ZeroExpectedCell(DataError):
    """Chi-squared comparison against an expected matrix containing a non-positive cell."""


class SingleClassData(DataError):
    """Classifier training data contains fewer than two classes."""


class DimensionMismatch(DataError):
    """A feature vector's dimension does not match the model."""


class ZeroTotalWeight(DataError):
    """Weighted clustering got weights that sum to zero."""


class InvalidConfig(UsageError):
    """A configuration value is out of range or inconsistent."""
