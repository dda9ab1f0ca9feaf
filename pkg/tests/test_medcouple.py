import numpy as np
import pytest

from fixedpivot.medcouple import medcouple_fast, medcouple_kernel, medcouple_naive


def test_kernel_examples():
    assert medcouple_kernel(3.0, 7.0, 3.0) == 1.0
    assert medcouple_kernel(1.0, 10.0, 3.0) == pytest.approx(5 / 9)
    assert medcouple_kernel(3.0, 3.0, 3.0, 2, 2) == 0.0
    assert medcouple_kernel(3.0, 3.0, 3.0, 3, 1) == 1.0
    with pytest.raises(ValueError):
        medcouple_kernel(4.0, 5.0, 3.0)


@pytest.mark.parametrize("fn", [medcouple_naive, medcouple_fast])
def test_symmetric_and_small(fn):
    assert fn([1, 2, 3, 4, 5]) == 0.0
    # eight kernel values; the lower middle one is 0
    assert fn([1, 2, 3, 4, 10]) == 0.0
    assert fn([5, 5, 5, 5]) == 0.0


@pytest.mark.parametrize("fn", [medcouple_naive, medcouple_fast])
def test_errors(fn):
    with pytest.raises(ValueError):
        fn([1.0, 2.0])
    with pytest.raises(ValueError):
        fn([1.0, np.nan, 2.0])


def test_fast_equals_naive_with_ties(rng):
    for _ in range(300):
        n = int(rng.integers(3, 80))
        x = rng.integers(0, 7, n).astype(float) if rng.random() < 0.5 else rng.standard_normal(n)
        assert abs(medcouple_fast(x) - medcouple_naive(x)) <= 1e-12


def test_lognormal_is_right_skewed(rng):
    x = rng.lognormal(size=301)
    assert medcouple_naive(x) > 0
    assert medcouple_fast(x) > 0


def test_negation_and_affine(rng):
    x = rng.standard_normal(57) ** 3
    mc = medcouple_fast(x)
    assert medcouple_fast(-x) == -mc
    assert medcouple_fast(4.0 + 2.0 * x) == pytest.approx(mc, abs=1e-14)
    assert -1.0 <= mc <= 1.0


def test_agrees_with_statsmodels_when_conventions_coincide(rng):
    stattools = pytest.importorskip("statsmodels.stats.stattools")
    # n = 4j + 1 distinct values: an odd number of kernel values and no ties
    for n in (5, 9, 21, 41):
        x = rng.standard_normal(n)
        assert medcouple_naive(x) == pytest.approx(float(stattools.medcouple(x)), abs=1e-12)


def test_fast_rounds_grow_slowly():
    x = np.random.default_rng(0).lognormal(size=5000)
    _, rounds = medcouple_fast(x, return_iterations=True)
    assert rounds < 60
