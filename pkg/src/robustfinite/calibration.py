"""Seeded Monte Carlo engine for finite-sample biases, variances, and
relative efficiencies at N(0,1), plus least-squares fitters for the two
bias-model forms.

Reproducibility contract
------------------------
Replications are split into fixed-size blocks; block b of sample size n
draws from its own counter-based (Philox) substream keyed by
``(master_seed, n, b)``, and per-block moment summaries are merged in block
order.  Results are therefore a pure function of
(estimator, n_values, replications, master_seed): bit-identical for any
worker count, with workers mapped over blocks via a process pool.

Estimates per replication are computed with the same formulas as the scalar
estimators in :mod:`robustfinite.estimators`, vectorized across rows.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ._normal import MAD_SCALE, PAIR_DIFF_SCALE, standard_normal
from .estimators import Estimator
from .factors import BiasModel, normalized_variance

__all__ = [
    "SimulationConfig",
    "SimulationResult",
    "simulate",
    "simulate_bias",
    "simulate_variance",
    "FitInput",
    "fit_hayes",
    "fit_williams",
    "regenerate_table",
    "resolve_worker_count",
    "WORKERS_ENV_VAR",
    "BLOCK_SIZE",
]

# Replications per RNG substream.  Fixed, so the substream layout (and hence
# the output) never depends on worker count or machine.
BLOCK_SIZE = 4096

# Row chunks are capped at this many matrix elements when an estimator
# expands each row into O(n^2) pairs; chunking only batches row-wise work
# and cannot change any per-row result.
_CHUNK_ELEMENTS = 16_000_000

WORKERS_ENV_VAR = "ROBUST_FINITE_THREADS"


def resolve_worker_count(worker_count: int | str | None = "auto") -> int:
    """Resolve a worker-count setting; "auto" honors the environment
    override before falling back to the CPU count."""
    if worker_count in (None, "auto"):
        env = os.environ.get(WORKERS_ENV_VAR)
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1
    return max(1, int(worker_count))


# ---------------------------------------------------------------------------
# moment accumulation


@dataclass(frozen=True)
class _Moments:
    """Count, mean, and central moment sums M2..M4 of a stream of values."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @staticmethod
    def of(values: np.ndarray) -> "_Moments":
        n = values.size
        mu = float(values.mean())
        d = values - mu
        d2 = d * d
        return _Moments(n, mu, float(d2.sum()), float((d2 * d).sum()),
                        float((d2 * d2).sum()))

    def merge(self, other: "_Moments") -> "_Moments":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        na, nb = self.count, other.count
        n = na + nb
        d = other.mean - self.mean
        mean = self.mean + d * nb / n
        m2 = self.m2 + other.m2 + d * d * na * nb / n
        m3 = (self.m3 + other.m3
              + d ** 3 * na * nb * (na - nb) / n ** 2
              + 3.0 * d * (na * other.m2 - nb * self.m2) / n)
        m4 = (self.m4 + other.m4
              + d ** 4 * na * nb * (na * na - na * nb + nb * nb) / n ** 3
              + 6.0 * d * d * (na * na * other.m2 + nb * nb * self.m2) / n ** 2
              + 4.0 * d * (na * other.m3 - nb * self.m3) / n)
        return _Moments(n, mean, m2, m3, m4)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else math.nan

    @property
    def se_mean(self) -> float:
        return math.sqrt(self.variance / self.count)

    @property
    def se_variance(self) -> float:
        """Large-sample standard error of the variance estimate."""
        if self.count < 2:
            return math.nan
        m2 = self.m2 / self.count
        m4 = self.m4 / self.count
        return math.sqrt(max(m4 - m2 * m2, 0.0) / self.count)


# ---------------------------------------------------------------------------
# vectorized per-replication estimates


@lru_cache(maxsize=128)
def _pair_indices(n: int, strict: bool) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1 if strict else 0)


def _row_estimates(estimator: Estimator, block: np.ndarray) -> np.ndarray:
    """Estimator value for each row of a (rows, n) sample block."""
    n = block.shape[1]
    if estimator == Estimator.MEAN:
        return block.mean(axis=1)
    if estimator == Estimator.MEDIAN:
        return np.median(block, axis=1)
    if estimator == Estimator.STD:
        return block.std(axis=1, ddof=1)
    if estimator == Estimator.MAD:
        mid = np.median(block, axis=1, keepdims=True)
        return np.median(np.abs(block - mid), axis=1) * MAD_SCALE
    if estimator == Estimator.SHAMOS:
        i, j = _pair_indices(n, strict=True)
        return _chunked_pair_median(block, lambda m: np.abs(m[:, i] - m[:, j]),
                                    len(i)) * PAIR_DIFF_SCALE
    if estimator in (Estimator.HL1, Estimator.HL2):
        i, j = _pair_indices(n, strict=estimator == Estimator.HL1)
        return _chunked_pair_median(block, lambda m: 0.5 * (m[:, i] + m[:, j]),
                                    len(i))
    if estimator == Estimator.HL3:
        return _chunked_pair_median(
            block,
            lambda m: 0.5 * (m[:, :, None] + m[:, None, :]).reshape(m.shape[0], -1),
            n * n,
        )
    raise ValueError(f"unsupported estimator {estimator}")


def _chunked_pair_median(block: np.ndarray, expand, width: int) -> np.ndarray:
    rows = block.shape[0]
    step = max(1, _CHUNK_ELEMENTS // max(width, 1))
    if step >= rows:
        return np.median(expand(block), axis=1)
    out = np.empty(rows)
    for start in range(0, rows, step):
        part = block[start:start + step]
        out[start:start + step] = np.median(expand(part), axis=1)
    return out


def _validate_estimator_n(estimator: Estimator, n: int) -> None:
    if n < estimator.min_n:
        raise ValueError(f"{estimator.value} requires n >= {estimator.min_n}, got {n}")


# ---------------------------------------------------------------------------
# block execution


def _block_sizes(replications: int) -> list[int]:
    sizes = [BLOCK_SIZE] * (replications // BLOCK_SIZE)
    if replications % BLOCK_SIZE:
        sizes.append(replications % BLOCK_SIZE)
    return sizes


def _block_rng(master_seed: int, n: int, block_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(n, block_index))
    return np.random.Generator(np.random.Philox(ss))


def _run_block(estimators: tuple[str, ...], n: int, master_seed: int,
               block_index: int, block_size: int) -> tuple[int, int, list[_Moments]]:
    rng = _block_rng(master_seed, n, block_index)
    sample = standard_normal(rng, (block_size, n))
    moments = [_Moments.of(_row_estimates(Estimator(e), sample)) for e in estimators]
    return n, block_index, moments


def _run_blocks(estimators: Sequence[Estimator], n_values: Sequence[int],
                replications: int, master_seed: int,
                workers: int) -> dict[int, list[_Moments]]:
    """Per-n merged moments for each estimator, merge order fixed by block index."""
    names = tuple(e.value for e in estimators)
    sizes = _block_sizes(replications)
    tasks = [(names, n, master_seed, b, size)
             for n in n_values for b, size in enumerate(sizes)]

    results: dict[tuple[int, int], list[_Moments]] = {}
    if workers <= 1 or len(tasks) == 1:
        for t in tasks:
            n, b, moments = _run_block(*t)
            results[(n, b)] = moments
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for n, b, moments in pool.map(_run_block_star, tasks, chunksize=4):
                results[(n, b)] = moments

    merged: dict[int, list[_Moments]] = {}
    for n in n_values:
        acc = [_Moments() for _ in estimators]
        for b in range(len(sizes)):
            acc = [a.merge(m) for a, m in zip(acc, results[(n, b)])]
        merged[n] = acc
    return merged


def _run_block_star(args):
    return _run_block(*args)


# ---------------------------------------------------------------------------
# public simulation API


@dataclass(frozen=True)
class SimulationConfig:
    """Monte Carlo run description.

    Output depends only on (estimator, n_values, replications, master_seed);
    ``worker_count`` affects speed, never values.
    """

    estimator: Estimator | str
    n_values: tuple[int, ...]
    master_seed: int
    replications: int = 100_000
    worker_count: int | str = "auto"

    def __post_init__(self) -> None:
        object.__setattr__(self, "estimator", Estimator(self.estimator))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if self.replications < 100:
            raise ValueError("need at least 100 replications")
        for n in self.n_values:
            _validate_estimator_n(self.estimator, n)


@dataclass(frozen=True)
class SimulationResult:
    """Summary of one (estimator, n) cell of a Monte Carlo run."""

    estimator: Estimator
    n: int
    replications: int
    mean_estimate: float
    bias: float
    variance_estimate: float
    normalized_variance: float
    mc_standard_error: float      # of the mean estimate
    mc_se_variance: float         # of the variance estimate


def _truth(estimator: Estimator) -> float:
    # Location estimators target 0 at N(0,1); the scale estimators are
    # simulated in consistent form, so they target sigma = 1.
    return 0.0 if estimator.is_location else 1.0


def simulate(config: SimulationConfig) -> list[SimulationResult]:
    """Run the Monte Carlo experiment described by ``config``."""
    est = Estimator(config.estimator)
    workers = resolve_worker_count(config.worker_count)
    merged = _run_blocks([est], config.n_values, config.replications,
                         config.master_seed, workers)
    out = []
    for n in config.n_values:
        mom = merged[n][0]
        out.append(SimulationResult(
            estimator=est,
            n=n,
            replications=mom.count,
            mean_estimate=mom.mean,
            bias=mom.mean - _truth(est),
            variance_estimate=mom.variance,
            normalized_variance=normalized_variance(est, n, mom.variance),
            mc_standard_error=mom.se_mean,
            mc_se_variance=mom.se_variance,
        ))
    return out


def simulate_bias(config: SimulationConfig) -> list[SimulationResult]:
    """Empirical bias of an estimator per sample size (see ``simulate``)."""
    return simulate(config)


def simulate_variance(config: SimulationConfig) -> list[SimulationResult]:
    """Empirical variance per sample size, raw and normalized (n*Var for
    location, Var/(1 - c4^2) for scale)."""
    return simulate(config)


# ---------------------------------------------------------------------------
# least-squares fitting of the bias-model forms


@dataclass(frozen=True)
class FitInput:
    """Observations (n, value) to fit, with optional per-point weights."""

    points: tuple[tuple[float, float], ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        pts = tuple((float(n), float(y)) for n, y in self.points)
        object.__setattr__(self, "points", pts)
        ns = [n for n, _ in pts]
        if len(pts) < 2:
            raise ValueError("need at least 2 points to fit")
        if len(set(ns)) != len(ns):
            raise ValueError("n values must be distinct")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != len(pts):
                raise ValueError("weights length must match points")
            if any(v <= 0 for v in w):
                raise ValueError("weights must be positive")
            object.__setattr__(self, "weights", w)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = np.array([p[0] for p in self.points])
        y = np.array([p[1] for p in self.points])
        w = (np.ones_like(y) if self.weights is None else np.array(self.weights))
        return n, y, w


def _rss(y: np.ndarray, fitted: np.ndarray, w: np.ndarray) -> float:
    return float(math.fsum(w * (y - fitted) ** 2))


def fit_hayes(data: FitInput, target: str = "bias") -> BiasModel:
    """Least-squares fit of value = p/n + q/n^2 (no intercept).

    Solved through the 2x2 normal equations; exact (to rounding) on data
    generated from the model itself.
    """
    n, y, w = data.arrays()
    u = 1.0 / n
    s22 = math.fsum(w * u ** 2)
    s33 = math.fsum(w * u ** 3)
    s44 = math.fsum(w * u ** 4)
    b1 = math.fsum(w * u * y)
    b2 = math.fsum(w * u ** 2 * y)
    det = s22 * s44 - s33 * s33
    if det == 0.0 or not math.isfinite(det):
        raise ValueError("singular normal equations; n values too degenerate")
    p = (b1 * s44 - b2 * s33) / det
    q = (s22 * b2 - s33 * b1) / det
    model = BiasModel("hayes", target, (p, q))
    return BiasModel("hayes", target, (p, q),
                     rss=_rss(y, np.array([model.evaluate(v) for v in n]), w))


def fit_williams(data: FitInput, target: str = "bias") -> BiasModel:
    """Least-squares fit of value = amp * n**(-exponent).

    Linearized as log|value| on log n (all values must share one sign and be
    nonzero); the sign is reattached to the amplitude.
    """
    n, y, w = data.arrays()
    if np.any(y == 0.0):
        raise ValueError("power-law fit undefined for zero values")
    sign = math.copysign(1.0, y[0])
    if np.any(np.sign(y) != sign):
        raise ValueError("power-law fit needs values of a single sign")
    lx = np.log(n)
    ly = np.log(np.abs(y))
    sw = math.fsum(w)
    mx = math.fsum(w * lx) / sw
    my = math.fsum(w * ly) / sw
    sxx = math.fsum(w * (lx - mx) ** 2)
    if sxx == 0.0:
        raise ValueError("singular fit; n values too degenerate")
    slope = math.fsum(w * (lx - mx) * (ly - my)) / sxx
    intercept = my - slope * mx
    amp = sign * math.exp(intercept)
    exponent = -slope
    model = BiasModel("williams", target, (amp, exponent))
    return BiasModel("williams", target, (amp, exponent),
                     rss=_rss(y, np.array([model.evaluate(v) for v in n]), w))


# ---------------------------------------------------------------------------
# table regeneration


_TABLE_COLUMNS = {
    "bias": (Estimator.MAD, Estimator.SHAMOS),
    "nvar": (Estimator.MEDIAN, Estimator.HL1, Estimator.HL2, Estimator.HL3,
             Estimator.MAD, Estimator.SHAMOS),
    "re": (Estimator.MEDIAN, Estimator.HL1, Estimator.HL2, Estimator.HL3,
           Estimator.MAD, Estimator.SHAMOS),
}


def regenerate_table(table_id: str, n_values: Iterable[int], master_seed: int,
                     replications: int = 100_000,
                     worker_count: int | str = "auto") -> list[dict]:
    """Recompute one of the reference tables by simulation.

    Returns one dict per n with the table's column layout plus an
    ``<estimator>_se`` Monte Carlo standard error per estimate; cells where
    an estimator is undefined (n below its minimum) are NaN.  For "re" each
    estimator's variance is compared against its baseline (mean for
    location, standard deviation for scale) simulated on the same draws, so
    degenerate equalities (median = mean at n = 1, 2) are exact.
    """
    if table_id not in _TABLE_COLUMNS:
        raise ValueError(f"unknown table id {table_id!r}")
    columns = _TABLE_COLUMNS[table_id]
    n_values = [int(n) for n in n_values]
    workers = resolve_worker_count(worker_count)

    rows = []
    for n in n_values:
        active = [e for e in columns if n >= e.min_n]
        baselines = (Estimator.MEAN, Estimator.STD) if table_id == "re" else ()
        batch = list(active) + [b for b in baselines if n >= b.min_n]
        merged = _run_blocks(batch, [n], replications, master_seed, workers)[n]
        by_est = dict(zip(batch, merged))
        row: dict = {"n": n}
        for e in columns:
            if e not in by_est:
                row[e.value] = math.nan
                row[f"{e.value}_se"] = math.nan
                continue
            mom = by_est[e]
            if table_id == "bias":
                row[e.value] = mom.mean - _truth(e)
                row[f"{e.value}_se"] = mom.se_mean
            elif table_id == "nvar":
                row[e.value] = normalized_variance(e, n, mom.variance)
                row[f"{e.value}_se"] = normalized_variance(e, n, mom.se_variance)
            else:
                base = by_est[Estimator.MEAN if e.is_location else Estimator.STD]
                row[e.value] = base.variance / mom.variance
                # first-order SE of the variance ratio
                rel = math.hypot(
                    base.se_variance / base.variance,
                    mom.se_variance / mom.variance,
                )
                row[f"{e.value}_se"] = abs(row[e.value]) * rel
        rows.append(row)
    return rows
