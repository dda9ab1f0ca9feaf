"""Robust multivariate fits that rank Mahalanobis distances by selection.

Two consumers of order statistics live here:

* the MCD concentration step (:func:`cstep`, :func:`mcd_approx`), which
  keeps the ``h`` units closest to the current ellipsoid, and
* the Forward Search (:func:`fs_progression`), which grows a fitted subset
  one unit at a time.

Both need "the ``h`` smallest distances".  The ranking is delegated to an
:class:`UpdateBackend`: a full sort, fixed-pivot selection, or fixed-pivot
selection with a hinted pivot.  Units with equal distances are taken in index
order, so every backend returns the same subset and only the cost differs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .select import ComparisonBreakdown, select_kth_instrumented

log = logging.getLogger(__name__)

MAX_CONDITION = 1e12
RIDGE = 1e-8


class SingularCovarianceError(ValueError):
    """Raised when a covariance matrix is singular or too ill-conditioned."""


class UpdateBackend(str, Enum):
    SORT = "sort"
    SELECT = "select"
    SELECT_ORACLE = "select_oracle"

    @classmethod
    def parse(cls, value) -> "UpdateBackend":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown backend {value!r}; use sort, select or select_oracle") from None


@dataclass
class EllipsoidEstimate:
    """Location, scatter and the subset they were computed from."""

    mu: np.ndarray
    sigma: np.ndarray
    log_det: float
    subset: np.ndarray
    _chol: tuple = field(default=None, repr=False, compare=False)

    @property
    def det(self) -> float:
        return float(np.exp(self.log_det))

    @property
    def h(self) -> int:
        return int(self.subset.size)


@dataclass
class FSState:
    """One Forward Search step.

    ``subset`` has ``m`` units and ``min_out_index`` is the excluded unit
    closest to the fit on that subset (-1 once nothing is excluded).
    ``comparisons`` holds the selection cost of moving to ``m + 1``, or None
    for the sort backend and for the last step.
    """

    m: int
    subset: np.ndarray
    min_out_index: int
    comparisons: ComparisonBreakdown | None = None
    interchange: bool = False
    ridge: bool = False


def _factor(sigma: np.ndarray):
    cond = np.linalg.cond(sigma)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularCovarianceError(f"covariance condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    try:
        return cho_factor(sigma, lower=True)
    except LinAlgError as exc:
        raise SingularCovarianceError("covariance is not positive definite") from exc


def fit_ellipsoid(X, subset, ridge: bool = False) -> EllipsoidEstimate:
    """Mean and covariance (divisor ``h - 1``) of the rows in ``subset``.

    With ``ridge=True`` a singular covariance gets ``1e-8 * trace`` added to
    its diagonal instead of raising :class:`SingularCovarianceError`.
    """
    X = np.asarray(X, dtype=np.float64)
    subset = np.sort(np.asarray(subset, dtype=np.int64))
    if np.unique(subset).size != subset.size:
        raise ValueError("subset indices must be distinct")
    Y = X[subset]
    mu = Y.mean(axis=0)
    sigma = np.atleast_2d(np.cov(Y, rowvar=False))
    try:
        chol = _factor(sigma)
    except SingularCovarianceError:
        if not ridge:
            raise
        sigma = sigma + RIDGE * max(np.trace(sigma), 1.0) * np.eye(sigma.shape[0])
        chol = _factor(sigma)
    log_det = 2.0 * float(np.log(np.diag(chol[0])).sum())
    return EllipsoidEstimate(mu, sigma, log_det, subset, chol)


def mahalanobis_sq(X, est: EllipsoidEstimate) -> np.ndarray:
    """Squared Mahalanobis distance of every row of ``X`` from ``est``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    chol = est._chol if est._chol is not None else _factor(est.sigma)
    diff = X - est.mu
    d = np.einsum("ij,ij->i", diff, cho_solve(chol, diff.T).T)
    return np.maximum(d, 0.0)


def smallest_subset(d: np.ndarray, size: int, backend, hint: int | None = None):
    """Indices of the ``size`` smallest entries of ``d``, ties by lowest index.

    ``hint`` (0-based) is the pivot suggestion for ``select_oracle``.
    Returns the sorted indices and the selection cost (None for ``sort``).
    """
    backend = UpdateBackend.parse(backend)
    d = np.asarray(d, dtype=np.float64)
    if backend is UpdateBackend.SORT:
        return np.sort(np.argsort(d, kind="stable")[:size]), None
    oracle = hint + 1 if backend is UpdateBackend.SELECT_ORACLE and hint is not None else None
    threshold, counts = select_kth_instrumented(d.copy(), size, oracle=oracle)
    below = np.flatnonzero(d < threshold)
    tied = np.flatnonzero(d == threshold)[: size - below.size]
    return np.sort(np.concatenate([below, tied])), counts


def _random_index(rng, upper: int) -> int:
    return min(int(float(rng.random(1)[0]) * upper), upper - 1)


def _sample_without_replacement(rng, n: int, size: int) -> np.ndarray:
    pool = np.arange(n)
    u = np.asarray(rng.random(size), dtype=np.float64)
    for i in range(size):
        j = i + min(int(u[i] * (n - i)), n - i - 1)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:size]


def cstep(X, est: EllipsoidEstimate, h: int, backend="sort", hint_rng=None, costs: list | None = None):
    """One concentration step: refit on the ``h`` units closest to ``est``.

    For ``select_oracle`` the pivot hint is a unit drawn uniformly from those
    outside ``est.subset``, using ``hint_rng``.  Selection costs are appended
    to ``costs`` when given.
    """
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    if not p + 1 <= h <= n:
        raise ValueError(f"h={h} must lie in [p+1, n] = [{p + 1}, {n}]")
    backend = UpdateBackend.parse(backend)
    d = mahalanobis_sq(X, est)
    hint = None
    if backend is UpdateBackend.SELECT_ORACLE:
        if hint_rng is None:
            raise ValueError("select_oracle needs a hint_rng")
        outside = np.setdiff1d(np.arange(n), est.subset)
        if outside.size:
            hint = int(outside[_random_index(hint_rng, outside.size)])
    subset, counts = smallest_subset(d, h, backend, hint)
    if costs is not None and counts is not None:
        costs.append(counts)
    return fit_ellipsoid(X, subset)


def default_h(n: int, p: int) -> int:
    return (n + p + 1) // 2


def _concentrate(X, start, h, backend, hint_rng, costs, max_iter, tol):
    est = cstep(X, start, h, backend, hint_rng, costs)
    for _ in range(max_iter - 1):
        new = cstep(X, est, h, backend, hint_rng, costs)
        if new.log_det > est.log_det + tol * max(1.0, abs(est.log_det)):
            raise RuntimeError(f"determinant increased in a C-step: {est.log_det!r} -> {new.log_det!r}")
        done = np.array_equal(new.subset, est.subset) or abs(new.log_det - est.log_det) < tol
        est = new
        if done:
            break
    return est


def mcd_approx(
    X,
    h: int | None = None,
    n_starts: int = 50,
    rng=None,
    backend="sort",
    hint_rng=None,
    costs: list | None = None,
    max_iter: int = 100,
    tol: float = 1e-12,
) -> EllipsoidEstimate:
    """Approximate Minimum Covariance Determinant estimate.

    Draws ``n_starts`` random subsets of ``p + 1`` units from ``rng`` and
    iterates C-steps on each until the log-determinant changes by less than
    ``tol``, the subset stops changing, or ``max_iter`` steps.  Returns the
    estimate with the smallest determinant.  Singular starts are skipped.

    ``hint_rng`` feeds the pivot hints of ``select_oracle`` so that ``rng``
    produces the same starts whatever the backend.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be an n x p matrix")
    n, p = X.shape
    h = default_h(n, p) if h is None else h
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    if rng is None:
        raise ValueError("mcd_approx needs an rng for the random starts")
    backend = UpdateBackend.parse(backend)
    if backend is UpdateBackend.SELECT_ORACLE and hint_rng is None:
        hint_rng = np.random.default_rng(0)

    best = None
    for _ in range(n_starts):
        start = _sample_without_replacement(rng, n, p + 1)
        try:
            est = _concentrate(X, fit_ellipsoid(X, start), h, backend, hint_rng, costs, max_iter, tol)
        except SingularCovarianceError:
            continue
        if best is None or est.log_det < best.log_det:
            best = est
    if best is None:
        raise SingularCovarianceError("every random start gave a singular covariance")
    return best


def _robust_start(X: np.ndarray, m0: int) -> tuple[np.ndarray, int]:
    d = ((X - np.median(X, axis=0)) ** 2).sum(axis=1)
    order = np.argsort(d, kind="stable")
    return np.sort(order[:m0]), int(order[m0]) if m0 < d.size else -1


def fs_progression(X, m0: int, backend="sort", rng=None) -> list[FSState]:
    """Forward Search from ``m0`` units up to all ``n``.

    The start is the ``m0`` units nearest the coordinate-wise median in
    Euclidean distance.  Each step fits the current subset, ranks all ``n``
    distances and keeps the ``m + 1`` smallest.  ``select_oracle`` passes the
    previous step's ``min_out_index`` as the pivot hint.

    ``rng`` is accepted for interface symmetry with :func:`mcd_approx`; the
    progression itself is deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be an n x p matrix")
    n, p = X.shape
    if not p + 1 <= m0 <= n:
        raise ValueError(f"m0={m0} must lie in [p+1, n] = [{p + 1}, {n}]")
    backend = UpdateBackend.parse(backend)

    subset, hint = _robust_start(X, m0)
    states: list[FSState] = []
    for m in range(m0, n + 1):
        try:
            est = fit_ellipsoid(X, subset)
            ridged = False
        except SingularCovarianceError:
            log.warning("singular covariance at m=%d; refitting with a ridge", m)
            est = fit_ellipsoid(X, subset, ridge=True)
            ridged = True
        d = mahalanobis_sq(X, est)
        outside = np.setdiff1d(np.arange(n), subset)
        min_out = int(outside[np.argmin(d[outside])]) if outside.size else -1
        state = FSState(m, subset, min_out, ridge=ridged)
        states.append(state)
        if m == n:
            break
        grown, state.comparisons = smallest_subset(d, m + 1, backend, hint)
        if np.setdiff1d(subset, grown).size:
            states[-1].interchange = True
            log.debug("interchange at m=%d: %d units left the subset", m, np.setdiff1d(subset, grown).size)
        subset, hint = grown, min_out
    return states


def contaminated_sample(n: int, p: int, contamination: float, rng, shift: float = 5.0) -> np.ndarray:
    """Standard normal ``n x p`` data whose first ``floor(contamination * n)`` rows are shifted.

    Every coordinate of a contaminated row is moved by ``shift``.
    """
    if not 0.0 <= contamination < 0.5:
        raise ValueError(f"contamination must lie in [0, 0.5), got {contamination}")
    if n < p + 1 or p < 1:
        raise ValueError(f"need p >= 1 and n >= p + 1, got n={n}, p={p}")
    X = np.asarray(rng.standard_normal(n * p), dtype=np.float64).reshape(n, p)
    X[: int(contamination * n)] += shift
    return X
