"""Atypical-user removal by the entropy of spatial activity.

A user's records induce a probability distribution over the cells they
appear at; low entropy means concentrated, homogeneous behavior (residents),
high entropy means scattered appearances (visitors, tourists). The filter
keeps one side of a percentile cut of the per-user entropy distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import EmptyStream
from .ingest import StreamSet, UserStream
from .special import nearest_rank_percentile


@dataclass(frozen=True, slots=True)
class LocationDistribution:
    """Per-cell visit probabilities for one user; strictly positive, sums to 1."""

    cell_index: np.ndarray
    probabilities: np.ndarray

    @property
    def n_locations(self) -> int:
        return len(self.probabilities)


def location_distribution(stream: UserStream) -> LocationDistribution:
    if len(stream) == 0:
        raise EmptyStream(f"user {stream.user_id}: no records")
    cells, counts = np.unique(stream.cell_index, return_counts=True)
    return LocationDistribution(cells, counts / counts.sum())


def shannon_entropy(dist: LocationDistribution) -> float:
    """Entropy in bits: -sum(p_i * log2 p_i)."""
    p = dist.probabilities
    return float(-np.sum(p * np.log2(p)))


def stream_entropy(stream: UserStream) -> float:
    return shannon_entropy(location_distribution(stream))


def all_entropies(streams: StreamSet) -> np.ndarray:
    """Entropy per user, vectorized over the whole stream set."""
    # distinct (user, cell) pairs with multiplicities
    key = streams.record_user.astype(np.int64) * (len(streams.registry) + 1) + streams.cell_index
    uniq, counts = np.unique(key, return_counts=True)
    owner = (uniq // (len(streams.registry) + 1)).astype(np.int64)
    totals = np.bincount(owner, weights=counts, minlength=streams.n_users)
    p = counts / totals[owner]
    contrib = -p * np.log2(p)
    return np.bincount(owner, weights=contrib, minlength=streams.n_users)


@dataclass(slots=True)
class EntropyFilterReport:
    threshold: float
    retained: int
    dropped: int

    def summary(self) -> str:
        return (
            f"entropy filter: threshold={self.threshold:.6f} bits,"
            f" retained={self.retained}, dropped={self.dropped}"
        )


def filter_by_entropy(
    streams: StreamSet, keep_percentile: float = 80.0, side: str = "low"
) -> tuple[StreamSet, EntropyFilterReport, np.ndarray]:
    """Keep users on one side of the nearest-rank percentile of entropy.

    side="low" keeps users with entropy <= threshold (the homogeneous
    majority); side="high" keeps the complement plus the boundary.
    """
    if streams.n_users == 0:
        raise EmptyStream("no users to filter")
    if side not in ("low", "high"):
        raise ValueError("side must be 'low' or 'high'")
    h = all_entropies(streams)
    threshold = nearest_rank_percentile(h, keep_percentile)
    keep = h <= threshold if side == "low" else h >= threshold
    out = streams.subset_users(keep)
    rep = EntropyFilterReport(
        threshold=float(threshold),
        retained=int(keep.sum()),
        dropped=int((~keep).sum()),
    )
    return out, rep, h


class EntropyFilter(BaseEstimator):
    """Estimator-style wrapper: fit() learns the cut, transform() applies it.

    Parameters
    ----------
    keep_percentile : percentile of the entropy distribution used as the cut.
    side : which side to keep, "low" (default) or "high".
    """

    def __init__(self, keep_percentile: float = 80.0, side: str = "low"):
        self.keep_percentile = keep_percentile
        self.side = side

    def fit(self, streams: StreamSet, y=None):
        if streams.n_users == 0:
            raise EmptyStream("no users to filter")
        self.entropies_ = all_entropies(streams)
        self.threshold_ = nearest_rank_percentile(self.entropies_, self.keep_percentile)
        return self

    def transform(self, streams: StreamSet) -> StreamSet:
        h = all_entropies(streams)
        keep = h <= self.threshold_ if self.side == "low" else h >= self.threshold_
        return streams.subset_users(keep)

    def fit_transform(self, streams: StreamSet, y=None) -> StreamSet:
        return self.fit(streams).transform(streams)
