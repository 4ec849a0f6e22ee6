"""Standard-normal quantile helpers shared across the package.

A single high-accuracy inverse CDF (scipy's ``ndtri``, accurate to full
double precision) backs both the Fisher-consistency constants and the
inverse-transform sampling used by the simulation engine, so every module
agrees on the same quantile values.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr, ndtri


def normal_quantile(p):
    """Inverse standard-normal CDF; accepts scalars or arrays in (0, 1)."""
    return ndtri(p)


def normal_cdf(x):
    """Standard-normal CDF; accepts scalars or arrays."""
    return ndtr(x)


# Third quartile of N(0,1); the scale constants below make the MAD and the
# median of pairwise absolute differences consistent for sigma at the normal.
NORMAL_Q3 = float(ndtri(0.75))

MAD_SCALE = 1.0 / NORMAL_Q3                    # ~1.4826
PAIR_DIFF_SCALE = 1.0 / (math.sqrt(2.0) * NORMAL_Q3)   # ~1.048358


def uniform_open01(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform draws strictly inside (0, 1), safe to feed to ``ndtri``."""
    ints = rng.integers(0, 1 << 53, size=shape, dtype=np.int64)
    return (ints.astype(np.float64) + 0.5) * 2.0**-53


def standard_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard-normal draws via inverse-CDF transform of uniforms.

    Inverse transform keeps the draw count per variate fixed (one uniform
    each), so substream layouts stay reproducible.
    """
    return ndtri(uniform_open01(rng, shape))
