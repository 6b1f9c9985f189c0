"""District-level origin-destination matrices and their statistical comparison.

Matrices hold the share (percent) of users with home in district i and work
in district j. Candidate matrices are compared against a reference with
Pearson's cumulative statistic over all cells; following the published
validation convention, the shares themselves are compared and the degrees
of freedom default to the cell count (a contingency-style mode is
available behind a flag).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RegionGrid
from .exceptions import NoUsers, ZeroExpectedCell
from .special import chi2_upper_tail, nearest_rank_percentile
from .validation import as_float_array

DF_MODES = ("cells", "contingency")


@dataclass(slots=True)
class OdMatrix:
    districts: tuple[str, ...]
    counts: np.ndarray  # (n, n) int, home row -> work column
    n_users: int

    @property
    def shares(self) -> np.ndarray:
        """Percent shares; all cells sum to 100."""
        return self.counts * (100.0 / self.n_users)

    def csv_lines(self):
        yield "home_work," + ",".join(self.districts)
        shares = self.shares
        for i, d in enumerate(self.districts):
            yield d + "," + ",".join(f"{v:.6f}" for v in shares[i])


def build_od_matrix(home_points, work_points, districts: RegionGrid) -> OdMatrix:
    """Count users by (home district, work district).

    Rows with a missing anchor (NaN) or an anchor outside every district are
    excluded from the counts.
    """
    home = np.asarray(home_points, dtype=np.float64)
    work = np.asarray(work_points, dtype=np.float64)
    if home.ndim != 2 or work.ndim != 2 or len(home) != len(work):
        raise NoUsers("home and work anchors must be equal-length (n, 2) arrays")
    hi = districts.region_indices_of(home[:, 0], home[:, 1])
    wi = districts.region_indices_of(work[:, 0], work[:, 1])
    ok = (hi >= 0) & (wi >= 0)
    if not ok.any():
        raise NoUsers("no user has both anchors inside mapped districts")
    n = len(districts)
    flat = np.bincount(hi[ok] * n + wi[ok], minlength=n * n)
    return OdMatrix(
        districts=tuple(districts.region_ids),
        counts=flat.reshape(n, n).astype(np.int64),
        n_users=int(ok.sum()),
    )


@dataclass(slots=True)
class ChiSquaredResult:
    statistic: float
    df: int
    p: float
    contributions: np.ndarray


def chi_squared_statistic(observed, expected) -> tuple[float, np.ndarray]:
    """Sum over all cells of (O - E)^2 / E; every expected cell must be > 0."""
    O = as_float_array(observed, "observed")
    E = as_float_array(expected, "expected")
    if O.shape != E.shape:
        raise ZeroExpectedCell(f"shape mismatch {O.shape} vs {E.shape}")
    if (E <= 0).any():
        raise ZeroExpectedCell("expected matrix has a non-positive cell")
    contributions = (O - E) ** 2 / E
    return float(contributions.sum()), contributions


def chi_squared_df(shape: tuple[int, int], mode: str = "cells") -> int:
    if mode == "cells":
        return int(shape[0] * shape[1])
    if mode == "contingency":
        return int((shape[0] - 1) * (shape[1] - 1))
    raise ValueError(f"df mode must be one of {DF_MODES}")


def chi_squared_p(statistic: float, df: int) -> float:
    """Upper-tail probability of the chi-squared distribution."""
    return chi2_upper_tail(statistic, df)


def compare_matrices(observed, expected, df_mode: str = "cells") -> ChiSquaredResult:
    O = as_float_array(observed, "observed")
    stat, contributions = chi_squared_statistic(O, expected)
    df = chi_squared_df(O.shape, df_mode)
    return ChiSquaredResult(stat, df, chi_squared_p(stat, df), contributions)


def error_percentiles(errors_m, pcts=(70, 80, 90)) -> dict[int, float]:
    """Nearest-rank percentiles of a localization-error sample (meters)."""
    errors = as_float_array(errors_m, "errors")
    if errors.size == 0:
        raise NoUsers("no error values")
    return {int(p): nearest_rank_percentile(errors, p) for p in pcts}


def write_od_csv(matrix: OdMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in matrix.csv_lines():
            fh.write(line + "\n")


def read_od_csv(path: str) -> tuple[tuple[str, ...], np.ndarray]:
    """Read a district-headed share matrix; returns (districts, shares)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    header = lines[0].split(",")[1:]
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append([float(v) for v in parts[1:]])
    shares = np.asarray(rows, dtype=np.float64)
    if shares.shape != (len(header), len(header)):
        raise ZeroExpectedCell(f"{path}: matrix is not square against its header")
    return tuple(header), shares
