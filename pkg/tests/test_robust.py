import itertools

import numpy as np
import pytest

from fixedpivot.mt import MT19937
from fixedpivot.robust import (
    SingularCovarianceError,
    UpdateBackend,
    contaminated_sample,
    cstep,
    default_h,
    fit_ellipsoid,
    fs_progression,
    mahalanobis_sq,
    mcd_approx,
    smallest_subset,
)

BACKENDS = ["sort", "select", "select_oracle"]


def test_mahalanobis_identity_and_center():
    X = np.array([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0], [2.0, 2.0]])
    est = fit_ellipsoid(X, [0, 1, 2, 3])
    est.sigma = np.eye(2)
    est._chol = None
    d = mahalanobis_sq(X, est)
    assert d == pytest.approx(((X - est.mu) ** 2).sum(axis=1))
    assert mahalanobis_sq(est.mu[None, :], est)[0] == pytest.approx(0.0, abs=1e-15)


def test_mahalanobis_univariate(rng):
    x = rng.standard_normal((30, 1))
    est = fit_ellipsoid(x, np.arange(30))
    assert mahalanobis_sq(x, est) == pytest.approx(((x[:, 0] - x.mean()) / x.std(ddof=1)) ** 2)


def test_singular_covariance():
    X = np.column_stack([np.arange(6.0), 2 * np.arange(6.0)])
    with pytest.raises(SingularCovarianceError):
        fit_ellipsoid(X, range(6))
    ridged = fit_ellipsoid(X, range(6), ridge=True)
    assert np.isfinite(ridged.log_det)


def test_backend_parse():
    assert UpdateBackend.parse("select-oracle") is UpdateBackend.SELECT_ORACLE
    with pytest.raises(ValueError):
        UpdateBackend.parse("heap")


def test_smallest_subset_ties_take_lowest_index():
    d = np.array([3.0, 1.0, 2.0, 2.0, 2.0, 0.5])
    for b in BACKENDS:
        subset, _ = smallest_subset(d, 4, b, hint=0)
        assert subset.tolist() == [1, 2, 3, 5]


def test_cstep_fixed_point(rng):
    X = rng.standard_normal((40, 2))
    h = default_h(40, 2)
    est = cstep(X, fit_ellipsoid(X, range(40)), h)
    again = cstep(X, cstep(X, est, h), h)
    stable = cstep(X, again, h)
    if np.array_equal(stable.subset, again.subset):
        assert stable.log_det == again.log_det


def test_clean_start_stays_clean(rng):
    clean = rng.standard_normal((30, 2)) * 0.5
    outliers = rng.standard_normal((10, 2)) + 20
    X = np.vstack([clean, outliers])
    est = fit_ellipsoid(X, range(30))
    for b in BACKENDS:
        new = cstep(X, est, 25, b, hint_rng=MT19937(1))
        assert new.subset.max() < 30


def test_cstep_determinant_never_increases(rng):
    for _ in range(30):
        X = contaminated_sample(60, 2, 0.3, rng)
        h = default_h(60, 2)
        est = cstep(X, fit_ellipsoid(X, rng.choice(60, 3, replace=False)), h)
        for _ in range(20):
            new = cstep(X, est, h)
            assert new.log_det <= est.log_det + 1e-12 * max(1, abs(est.log_det))
            est = new


def test_exhaustive_small_case(rng):
    x = rng.standard_normal((8, 1))
    h = 5
    global_min = min(fit_ellipsoid(x, s).log_det for s in itertools.combinations(range(8), h))
    reached = []
    for start in itertools.combinations(range(8), 2):
        est = fit_ellipsoid(x, start)
        for _ in range(20):
            est = cstep(x, est, h)
        reached.append(est.log_det)
    assert min(reached) >= global_min - 1e-12
    assert min(reached) == pytest.approx(global_min, abs=1e-12)


def test_mcd_finds_tight_cluster():
    g = np.random.default_rng(2)
    cluster = g.standard_normal((30, 2)) * 0.01
    X = np.vstack([cluster, g.standard_normal((25, 2)) * 5])
    est = mcd_approx(X, h=30, n_starts=30, rng=MT19937(3))
    assert set(est.subset.tolist()) == set(range(30))


def test_mcd_backend_invariance():
    X = contaminated_sample(80, 2, 0.3, MT19937(4))
    results = [mcd_approx(X, n_starts=10, rng=MT19937(5), backend=b, hint_rng=MT19937(6)) for b in BACKENDS]
    assert len({r.log_det for r in results}) == 1
    assert all(np.array_equal(r.subset, results[0].subset) for r in results)


def test_mcd_centres_on_clean_group():
    hits = 0
    runs = 40
    for rep in range(runs):
        X = contaminated_sample(100, 2, 0.4, MT19937(100 + rep))
        est = mcd_approx(X, n_starts=20, rng=MT19937(rep))
        h = default_h(100, 2)
        hits += np.all(np.abs(est.mu) < 3 / np.sqrt(h))
    assert hits >= 0.95 * runs


def test_mcd_errors():
    X = np.zeros((10, 2))
    with pytest.raises(SingularCovarianceError):
        mcd_approx(X, n_starts=3, rng=MT19937(1))
    with pytest.raises(ValueError):
        mcd_approx(np.ones((10, 2)), n_starts=0, rng=MT19937(1))
    X = np.random.default_rng(0).standard_normal((10, 2))
    with pytest.raises(ValueError):
        cstep(X, fit_ellipsoid(X, range(10)), h=2)


def test_fs_progression_shape(rng):
    X = contaminated_sample(40, 2, 0.2, rng)
    states = fs_progression(X, 3, "select")
    assert [s.m for s in states] == list(range(3, 41))
    assert all(s.subset.size == s.m for s in states)
    assert states[-1].subset.tolist() == list(range(40))
    assert states[-1].min_out_index == -1
    assert all(np.unique(s.subset).size == s.m for s in states)


def test_fs_backends_agree():
    for seed in range(25):
        X = contaminated_sample(50, 2, 0.3, MT19937(seed))
        seqs = [[s.subset.tolist() for s in fs_progression(X, 3, b)] for b in BACKENDS]
        assert seqs[0] == seqs[1] == seqs[2]


def test_fs_oracle_saves_comparisons():
    saved = 0
    for seed in range(20):
        X = contaminated_sample(80, 2, 0.2, MT19937(seed))
        plain = sum(s.comparisons.total for s in fs_progression(X, 3, "select") if s.comparisons)
        hinted = sum(s.comparisons.total for s in fs_progression(X, 3, "select_oracle") if s.comparisons)
        saved += hinted < plain
    assert saved >= 18


def test_mcd_random_hint_gives_no_real_gain():
    plain, hinted = [], []
    for seed in range(30):
        X = contaminated_sample(100, 2, 0.2, MT19937(seed))
        for backend, sink in (("select", plain), ("select_oracle", hinted)):
            costs = []
            mcd_approx(X, n_starts=5, rng=MT19937(seed + 1), backend=backend, hint_rng=MT19937(seed + 2), costs=costs)
            sink.append(np.mean([c.total for c in costs]))
    reduction = 1 - np.mean(hinted) / np.mean(plain)
    assert reduction <= 0.05


def test_fs_ridge_on_degenerate_start():
    X = np.vstack([np.zeros((5, 2)), np.random.default_rng(1).standard_normal((10, 2))])
    states = fs_progression(X, 3)
    assert states[0].ridge
    assert states[-1].m == 15


def test_contaminated_sample_validation():
    with pytest.raises(ValueError):
        contaminated_sample(10, 2, 0.6, MT19937(1))
