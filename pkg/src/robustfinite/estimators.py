"""Location and scale estimators: mean, median, Hodges-Lehmann variants,
MAD, the pairwise-difference (Shamos) scale estimator, and the sample
standard deviation.

All functions are pure: they accept any finite 1-d array-like, never mutate
it, and return a plain float.  Estimates are invariant under permutation of
the input (sums use ``math.fsum``; medians are order-statistic based).

The three Hodges-Lehmann variants differ only in which index pairs (i, j)
enter the pairwise-average multiset:

    hl1 : i < j            (distinct pairs)
    hl2 : i <= j           (Walsh averages, diagonal included once)
    hl3 : all ordered (i, j)

Scale estimators accept ``consistent=True`` (default) to apply the constant
that makes them consistent for sigma under a normal population.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable

import numpy as np

from ._normal import MAD_SCALE, PAIR_DIFF_SCALE

__all__ = [
    "Estimator",
    "mean",
    "median",
    "hodges_lehmann",
    "hl1",
    "hl2",
    "hl3",
    "mad",
    "shamos",
    "std_dev",
    "select_kth",
    "PAIR_LIMIT",
]

# Pairwise estimators materialize the O(n^2) pair multiset; beyond this the
# memory cost is unreasonable and callers get an explicit size-limit error.
PAIR_LIMIT = 10_000


class Estimator(str, enum.Enum):
    """Names of the estimators handled by the factor tables and simulator."""

    MEAN = "mean"
    MEDIAN = "median"
    HL1 = "hl1"
    HL2 = "hl2"
    HL3 = "hl3"
    STD = "std"
    MAD = "mad"
    SHAMOS = "shamos"

    def __str__(self) -> str:  # argparse-friendly
        return self.value

    @property
    def is_location(self) -> bool:
        return self in (Estimator.MEAN, Estimator.MEDIAN,
                        Estimator.HL1, Estimator.HL2, Estimator.HL3)

    @property
    def is_scale(self) -> bool:
        return not self.is_location

    @property
    def min_n(self) -> int:
        """Smallest sample size the estimator is defined for."""
        if self in (Estimator.HL1, Estimator.STD, Estimator.MAD, Estimator.SHAMOS):
            return 2
        return 1


def _as_sample(values: Iterable[float], min_n: int = 1) -> np.ndarray:
    """Validate and convert input to a finite 1-d float array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size < min_n:
        raise ValueError(f"sample of size {arr.size} given; need at least {min_n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains NaN or infinite values")
    return arr


def select_kth(values: Iterable[float], k: int) -> float:
    """Return the k-th smallest element (0-based), duplicates preserved.

    Backed by introselect (``np.partition``), average linear time.
    """
    arr = _as_sample(values)
    if not 0 <= k < arr.size:
        raise ValueError(f"k={k} out of range for sample of size {arr.size}")
    return float(np.partition(arr, k)[k])


def _median_of(arr: np.ndarray) -> float:
    """Median of an array that is already validated: midpoint rule for even sizes."""
    m = arr.size
    half = np.partition(arr, [(m - 1) // 2, m // 2])
    return float(0.5 * (half[(m - 1) // 2] + half[m // 2]))


def mean(values: Iterable[float]) -> float:
    """Arithmetic mean (exactly-rounded sum, so permutation invariant)."""
    arr = _as_sample(values)
    return math.fsum(arr) / arr.size


def median(values: Iterable[float]) -> float:
    """Sample median: middle order statistic, or the average of the two
    middle order statistics when the size is even."""
    return _median_of(_as_sample(values))


def _pair_averages(arr: np.ndarray, variant: str) -> np.ndarray:
    n = arr.size
    if n > PAIR_LIMIT:
        raise ValueError(
            f"size limit: pairwise estimators support n <= {PAIR_LIMIT}, got {n}"
        )
    sums = np.add.outer(arr, arr)
    if variant == "hl1":
        i, j = np.triu_indices(n, k=1)
    elif variant == "hl2":
        i, j = np.triu_indices(n, k=0)
    elif variant == "hl3":
        return 0.5 * sums.ravel()
    else:
        raise ValueError(f"unknown Hodges-Lehmann variant: {variant!r}")
    return 0.5 * sums[i, j]


def hodges_lehmann(values: Iterable[float], variant: str = "hl1") -> float:
    """Median of pairwise averages (X_i + X_j)/2.

    Parameters
    ----------
    values : array-like
        Sample observations.  ``hl1`` needs n >= 2 (no pairs otherwise);
        ``hl2``/``hl3`` are defined from n = 1.
    variant : {"hl1", "hl2", "hl3"}
        Which index pairs enter the multiset (see module docstring).
    """
    variant = str(variant).lower()
    arr = _as_sample(values, min_n=2 if variant == "hl1" else 1)
    return _median_of(_pair_averages(arr, variant))


def hl1(values: Iterable[float]) -> float:
    """Median of averages over distinct pairs i < j."""
    return hodges_lehmann(values, "hl1")


def hl2(values: Iterable[float]) -> float:
    """Median of Walsh averages (pairs i <= j)."""
    return hodges_lehmann(values, "hl2")


def hl3(values: Iterable[float]) -> float:
    """Median of averages over all ordered pairs (i, j)."""
    return hodges_lehmann(values, "hl3")


def mad(values: Iterable[float], consistent: bool = True) -> float:
    """Median absolute deviation from the sample median.

    With ``consistent=True`` the result is divided by the normal third
    quartile so it estimates sigma under a normal population.
    """
    arr = _as_sample(values, min_n=2)
    raw = _median_of(np.abs(arr - _median_of(arr)))
    return raw * MAD_SCALE if consistent else raw


def shamos(values: Iterable[float], consistent: bool = True) -> float:
    """Median of all pairwise absolute differences |X_i - X_j|, i < j.

    With ``consistent=True`` the result is scaled (by ~1.048358) to be
    consistent for sigma under a normal population.
    """
    arr = _as_sample(values, min_n=2)
    if arr.size > PAIR_LIMIT:
        raise ValueError(
            f"size limit: pairwise estimators support n <= {PAIR_LIMIT}, got {arr.size}"
        )
    i, j = np.triu_indices(arr.size, k=1)
    raw = _median_of(np.abs(arr[i] - arr[j]))
    return raw * PAIR_DIFF_SCALE if consistent else raw


def std_dev(values: Iterable[float], unbiased_c4: bool = False) -> float:
    """Sample standard deviation (n-1 denominator).

    With ``unbiased_c4=True`` the result is divided by c4(n) so its
    expectation is sigma under a normal population.
    """
    arr = _as_sample(values, min_n=2)
    mu = math.fsum(arr) / arr.size
    ss = math.fsum((x - mu) ** 2 for x in arr)
    s = math.sqrt(ss / (arr.size - 1))
    if unbiased_c4:
        from .factors import c4

        s /= c4(arr.size)
    return s
