import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustfinite.estimators import (
    PAIR_LIMIT,
    Estimator,
    hl1,
    hl2,
    hl3,
    hodges_lehmann,
    mad,
    mean,
    median,
    select_kth,
    shamos,
    std_dev,
)

from conftest import close_rel

# expected values below were derived by hand or from an independent
# high-precision quantile/gamma evaluation before the implementation existed
MAD_123_CONSISTENT = 1.482602218505602       # 1 / (normal third quartile)
SHAMOS_01_CONSISTENT = 1.0483580825075305    # 1 / (sqrt(2) * third quartile)
SQRT_PI = 1.7724538509055159

samples = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=30
)
scale_samples = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=2, max_size=30
)
shifts = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
scales = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False).filter(
    lambda a: abs(a) > 1e-3
)


class TestPointValues:
    def test_mean(self):
        assert mean([1, 2, 3]) == 2
        assert mean([5]) == 5
        assert mean([1, 2, 3, 4]) == 2.5

    def test_median(self):
        assert median([3, 1, 2]) == 2
        assert median([1, 2, 3, 100]) == 2.5
        assert median([7]) == 7

    def test_hl_variants(self):
        assert hl1([1, 2, 3]) == 2
        assert hl2([5]) == 5
        assert hl1([0, 1, 2, 9]) == 3  # any 4-point hl1 equals the mean
        assert hl2([1, 2, 3]) == 2  # multiset {1, 1.5, 2, 2, 2.5, 3}
        assert hl3([5]) == 5

    def test_mad(self):
        assert mad([1, 2, 3]) == pytest.approx(MAD_123_CONSISTENT, abs=1e-15)
        assert mad([1, 2, 3]) == pytest.approx(1.4826, abs=1e-4)  # rounded constant
        assert mad([3.5] * 7) == 0
        assert mad([1, 2, 3], consistent=False) == 1

    def test_shamos(self):
        assert shamos([0, 1]) == pytest.approx(SHAMOS_01_CONSISTENT, abs=1e-15)
        assert shamos([0, 1]) == pytest.approx(1.048358, abs=1e-4)
        assert shamos([2.5, 2.5, 2.5]) == 0
        assert shamos([0, 1, 3], consistent=False) == 2  # differences {1, 3, 2}

    def test_std_dev(self):
        assert std_dev([0, 2]) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert std_dev([4, 4, 4]) == 0
        assert std_dev([0, 2], unbiased_c4=True) == pytest.approx(SQRT_PI, rel=1e-12)

    def test_select_kth(self):
        assert select_kth([3, 1, 2], 1) == 2
        assert select_kth([5], 0) == 5
        assert select_kth([4, 4, 4, 1], 2) == 4


class TestValidation:
    def test_empty_sample_rejected(self):
        for fn in (mean, median, hl2, hl3):
            with pytest.raises(ValueError):
                fn([])

    def test_non_finite_rejected(self):
        for bad in ([1.0, math.nan, 2.0], [1.0, math.inf], [-math.inf]):
            with pytest.raises(ValueError):
                median(bad)

    def test_min_sizes(self):
        with pytest.raises(ValueError):
            hl1([1.0])  # empty pair set
        for fn in (mad, shamos, std_dev):
            with pytest.raises(ValueError):
                fn([1.0])

    def test_pair_size_limit(self):
        big = np.zeros(PAIR_LIMIT + 1)
        with pytest.raises(ValueError, match="size limit"):
            hl3(big)
        with pytest.raises(ValueError, match="size limit"):
            shamos(big)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            hodges_lehmann([1, 2], "hl4")

    def test_select_kth_range(self):
        with pytest.raises(ValueError):
            select_kth([1, 2], 2)
        with pytest.raises(ValueError):
            select_kth([1, 2], -1)


def test_select_kth_matches_sorting():
    rng = np.random.default_rng(20240811)
    for size in (1, 2, 3, 10, 137, 1000):
        x = rng.normal(size=size)
        x[rng.integers(0, size, size=size // 3 or 1)] = 0.25  # inject ties
        full = np.sort(x)
        for k in {0, size // 2, size - 1}:
            assert select_kth(x, k) == full[k]


_LOCATION_FNS = [mean, median, hl2, hl3]
_LOCATION_FNS_N2 = [hl1]


@given(samples, shifts)
@settings(max_examples=200)
def test_location_equivariance(values, b):
    for fn in _LOCATION_FNS + (_LOCATION_FNS_N2 if len(values) >= 2 else []):
        base = fn(values)
        shifted = fn([v + b for v in values])
        assert close_rel(shifted, base + b, rel=1e-12, scale=max(abs(b), abs(base)))


@given(scale_samples, scales, shifts)
@settings(max_examples=200)
def test_scale_equivariance(values, a, b):
    transformed_values = [a * v + b for v in values]
    # shifting by b rounds away structure below ulp(b), so closeness is
    # judged relative to the magnitudes actually involved
    magnitude = max(abs(v) for v in transformed_values + [b])
    for fn in (mad, shamos, std_dev):
        base = fn(values)
        transformed = fn(transformed_values)
        assert close_rel(transformed, abs(a) * base, rel=1e-12, scale=magnitude)


@given(samples, st.randoms(use_true_random=False))
@settings(max_examples=150)
def test_permutation_invariance_exact(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    fns = [mean, median, hl2, hl3]
    if len(values) >= 2:
        fns += [hl1, mad, shamos, std_dev]
    for fn in fns:
        assert fn(values) == fn(shuffled)


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=4))
@settings(max_examples=300)
def test_hl1_equals_mean_for_size_four(values):
    assert close_rel(hl1(values), mean(values), rel=1e-12)


@given(samples)
@settings(max_examples=200)
def test_location_estimates_within_range(values):
    lo, hi = min(values), max(values)
    for fn in [median, hl2, hl3] + ([hl1] if len(values) >= 2 else []):
        v = fn(values)
        assert lo - 1e-9 * max(1, abs(lo)) <= v <= hi + 1e-9 * max(1, abs(hi))


@given(
    st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=25),
    st.integers(min_value=0),
)
@settings(max_examples=150)
def test_mad_resists_heavy_corruption(values, seed):
    """Replacing up to floor((n-1)/2) points with 1e12 cannot push the MAD
    beyond what the clean order statistics allow."""
    n = len(values)
    k = (n - 1) // 2
    rng = np.random.default_rng(seed)
    corrupt_at = rng.choice(n, size=k, replace=False)
    corrupted = np.array(values, dtype=float)
    corrupted[corrupt_at] = 1e12
    bound = (max(values) - min(values)) * 1.482602218505602
    assert mad(corrupted) <= bound * (1 + 1e-9) + 1e-9


def test_estimator_enum_properties():
    assert Estimator("mad").is_scale and not Estimator("mad").is_location
    assert Estimator.HL1.min_n == 2 and Estimator.HL3.min_n == 1
    assert {e.value for e in Estimator} == {
        "mean", "median", "hl1", "hl2", "hl3", "std", "mad", "shamos"
    }
