"""Robust Shewhart-chart factors and limits.

An x-bar chart estimates mu +- 3*sigma/sqrt(n) from k subgroups of size n.
The half-width factor is 3/(c*sqrt(n)) where c unbiases the chosen scale
estimator: c4 for the subgroup standard deviation, c5 for the subgroup MAD,
c6 for the subgroup pairwise-difference scale.  The robust variants keep
working when the data used to set the limits is contaminated;
``contamination_experiment`` measures exactly that by corrupting one
observation and tracking bias/variance/MSE of the three-sigma estimate.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._normal import MAD_SCALE, PAIR_DIFF_SCALE, standard_normal
from .calibration import _block_rng, _block_sizes, resolve_worker_count
from .estimators import mad as _mad
from .estimators import shamos as _shamos
from .estimators import std_dev as _std
from .factors import c4, c5, c6

__all__ = [
    "a3",
    "a5",
    "a6",
    "SubgroupSeries",
    "ChartLimits",
    "chart_limits",
    "points_out_of_control",
    "read_subgroups",
    "contamination_experiment",
    "CHART_METHODS",
    "EXPERIMENT_METHODS",
]

CHART_METHODS = ("std-c4", "mad-c5", "shamos-c6")

# raw/unbiased pairs measured by the contamination experiment
EXPERIMENT_METHODS = ("std", "unbiased-std", "mad", "unbiased-mad",
                      "shamos", "unbiased-shamos")


def a3(n: int) -> float:
    """x-bar chart half-width factor from subgroup standard deviations."""
    return 3.0 / (c4(n) * math.sqrt(n))


def a5(n: int) -> float:
    """x-bar chart half-width factor from subgroup MADs."""
    return 3.0 / (c5(n) * math.sqrt(n))


def a6(n: int) -> float:
    """x-bar chart half-width factor from subgroup pairwise-difference scales."""
    return 3.0 / (c6(n) * math.sqrt(n))


@dataclass(frozen=True)
class SubgroupSeries:
    """k subgroups of constant size n, as a (k, n) matrix."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2:
            raise ValueError("subgroup data must be a k x n matrix")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ValueError("need k >= 1 subgroups of size n >= 2")
        if not np.all(np.isfinite(arr)):
            raise ValueError("subgroup data contains NaN or infinite values")
        object.__setattr__(self, "data", arr)

    @property
    def k(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @cached_property
    def means(self) -> np.ndarray:
        return self.data.mean(axis=1)

    @cached_property
    def stds(self) -> np.ndarray:
        return np.array([_std(row) for row in self.data])

    @cached_property
    def mads(self) -> np.ndarray:
        return np.array([_mad(row) for row in self.data])

    @cached_property
    def shamoses(self) -> np.ndarray:
        return np.array([_shamos(row) for row in self.data])


@dataclass(frozen=True)
class ChartLimits:
    """Center line and control limits of an x-bar chart."""

    center: float
    ucl: float
    lcl: float
    method: str
    three_sigma: float


def chart_limits(series: SubgroupSeries, method: str = "std-c4") -> ChartLimits:
    """Estimate x-bar chart limits center +- factor(n) * mean subgroup scale.

    ``three_sigma`` is the implied sigma-level estimate sqrt(n) * half-width.
    """
    if method not in CHART_METHODS:
        raise ValueError(f"method must be one of {CHART_METHODS}, got {method!r}")
    n = series.n
    if method == "std-c4":
        half = a3(n) * float(series.stds.mean())
    elif method == "mad-c5":
        half = a5(n) * float(series.mads.mean())
    else:
        half = a6(n) * float(series.shamoses.mean())
    center = float(series.means.mean())
    return ChartLimits(
        center=center,
        ucl=center + half,
        lcl=center - half,
        method=method,
        three_sigma=math.sqrt(n) * half,
    )


def points_out_of_control(limits: ChartLimits, series: SubgroupSeries) -> np.ndarray:
    """Phase-II screening: which subgroup means fall outside the limits."""
    means = series.means
    return (means > limits.ucl) | (means < limits.lcl)


def read_subgroups(path) -> SubgroupSeries:
    """Read subgroups from CSV: one row per subgroup, optional header,
    ``#`` comment lines ignored."""
    rows: list[list[float]] = []
    header_allowed = True
    with open(path, newline="") as f:
        for lineno, record in enumerate(csv.reader(f), start=1):
            if not record or record[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in record if c.strip() != ""]
            if not cells:
                continue
            try:
                values = [float(c) for c in cells]
            except ValueError:
                if header_allowed:
                    header_allowed = False
                    continue
                raise ValueError(f"line {lineno}: non-numeric subgroup entry") from None
            header_allowed = False
            rows.append(values)
    if not rows:
        raise ValueError("no subgroup rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"ragged subgroup rows: sizes {sorted(widths)}")
    return SubgroupSeries(np.array(rows))


# ---------------------------------------------------------------------------
# contamination experiment


def _three_sigma_estimates(data: np.ndarray) -> dict[str, np.ndarray]:
    """Per-replication three-sigma estimates for a (reps, k, n) array,
    one entry per method in EXPERIMENT_METHODS."""
    n = data.shape[2]
    s_bar = data.std(axis=2, ddof=1).mean(axis=1)
    mid = np.median(data, axis=2, keepdims=True)
    mad_bar = (np.median(np.abs(data - mid), axis=2) * MAD_SCALE).mean(axis=1)
    i, j = np.triu_indices(n, k=1)
    sh_bar = (np.median(np.abs(data[:, :, i] - data[:, :, j]), axis=2)
              * PAIR_DIFF_SCALE).mean(axis=1)
    return {
        "std": 3.0 * s_bar,
        "unbiased-std": 3.0 * s_bar / c4(n),
        "mad": 3.0 * mad_bar,
        "unbiased-mad": 3.0 * mad_bar / c5(n),
        "shamos": 3.0 * sh_bar,
        "unbiased-shamos": 3.0 * sh_bar / c6(n),
    }


def _experiment_block(args) -> tuple[int, dict[tuple[float, str], tuple]]:
    """Per-block (count, sum, sum of squares) of the three-sigma estimates
    for every (delta, method) cell."""
    k, n, mu, sigma, deltas, corrupt_count, master_seed, b, size = args
    rng = _block_rng(master_seed, k * n, b)
    base = mu + sigma * standard_normal(rng, (size, k, n))
    out: dict[tuple[float, str], tuple] = {}
    for d in deltas:
        data = base
        if d != 0.0 and corrupt_count:
            data = base.copy()
            data[:, 0, :corrupt_count] += d
        for method, est in _three_sigma_estimates(data).items():
            out[(d, method)] = (est.size, float(est.sum()), float((est * est).sum()))
    return b, out


def contamination_experiment(k: int = 10, n: int = 5, mu: float = 5.0,
                             sigma: float = 1.0,
                             delta_grid=(0, 10, 20, 30, 40, 50),
                             replications: int = 10_000,
                             master_seed: int = 0,
                             corrupt_count: int = 1,
                             worker_count: int | str = "auto") -> list[dict]:
    """Bias/variance/MSE of three-sigma estimates under one-cell corruption.

    Each replication draws k subgroups of size n from N(mu, sigma^2); for
    every delta in ``delta_grid`` the first ``corrupt_count`` observations of
    subgroup 1 are shifted by delta before any statistic is computed, and the
    six estimates of 3*sigma are recorded.  Returns one row per
    (delta, method) with empirical bias, variance, and MSE (bias^2 +
    variance) relative to 3*sigma.

    Deterministic for a fixed seed: replication blocks use the same
    substream layout as the simulation engine and partial sums are merged in
    block order, so the worker count never changes the result.
    """
    if replications < 100:
        raise ValueError("need at least 100 replications")
    if not 0 <= corrupt_count <= n:
        raise ValueError(f"corrupt_count must be in 0..{n}")
    deltas = tuple(float(d) for d in delta_grid)
    workers = resolve_worker_count(worker_count)

    tasks = [(k, n, mu, sigma, deltas, corrupt_count, master_seed, b, size)
             for b, size in enumerate(_block_sizes(replications))]
    partials: dict[int, dict] = {}
    if workers <= 1 or len(tasks) == 1:
        for t in tasks:
            b, out = _experiment_block(t)
            partials[b] = out
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for b, out in pool.map(_experiment_block, tasks):
                partials[b] = out

    acc = {(d, m): (0, 0.0, 0.0) for d in deltas for m in EXPERIMENT_METHODS}
    for b in range(len(tasks)):
        for key, (cnt, s1, s2) in partials[b].items():
            c0, a1, a2 = acc[key]
            acc[key] = (c0 + cnt, a1 + s1, a2 + s2)

    target = 3.0 * sigma
    rows = []
    for d in deltas:
        for method in EXPERIMENT_METHODS:
            count, s1, s2 = acc[(d, method)]
            mean = s1 / count
            var = (s2 - count * mean * mean) / (count - 1)
            bias = mean - target
            rows.append({
                "delta": d,
                "method": method,
                "bias": bias,
                "variance": var,
                "mse": bias * bias + var,
                "reps": count,
            })
    return rows
