"""Weighted percentiles by iterated fixed-pivot selection.

The kernel first selects rank ``ceil(n p)`` by value, carrying each weight
along with its value.  It then checks whether the weight to the left of the
target slot is at most ``p`` while the weight up to and including the slot
reaches ``p``.  If not, it moves the slot one rank up (selecting the minimum
of the right part) or one rank down (selecting the maximum of the left part)
and checks again.

Ties in the balance condition resolve to the lower rank, so ``p = 0.5``
gives the lower weighted median.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit


@dataclass
class WeightedResult:
    """Outcome of :func:`weighted_percentile`.

    ``kstar`` is the 1-based slot of the answer in the permuted rows and
    ``weight_at_k`` its normalized weight.
    """

    value: float
    weight_at_k: float
    kstar: int


@njit(cache=True)
def _select_pairs(v, w, k, left, right):
    # fixed-pivot selection on (value, weight) rows; values swap before weights
    while True:
        pv = v[k]
        pw = w[k]
        v[k] = v[right]
        w[k] = w[right]
        v[right] = pv
        w[right] = pw
        position = left
        for i in range(left, right + 1):
            if v[i] < pv:
                buf = v[i]
                v[i] = v[position]
                v[position] = buf
                buf = w[i]
                w[i] = w[position]
                w[position] = buf
                position += 1
        v[right] = v[position]
        w[right] = w[position]
        v[position] = pv
        w[position] = pw
        if position < k:
            left = position + 1
        else:
            right = position - 1
        if position == k:
            return


@njit(cache=True)
def _excess(w, k, extra, target):
    # sign-accurate w[0] + ... + w[k-1] + extra - target (Neumaier summation);
    # folding target in keeps an exact balance from rounding onto either side
    s = extra
    c = 0.0
    for i in range(k + 1):
        x = -target if i == k else w[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


@njit(cache=True)
def _weighted_select(v, w, target, k):
    """Return the 0-based slot holding the weighted ``target`` point, or -1.

    ``target`` is ``p`` times the total weight; weights are not rescaled.
    """
    n = v.shape[0]
    left = 0
    right = n - 1
    for _ in range(n + 1):
        _select_pairs(v, w, k, left, right)
        below = _excess(w, k, 0.0, target)
        above = _excess(w, k, w[k], target)
        if below <= 0.0 and (above >= 0.0 or k == n - 1):
            if above < 0.0:
                # rounded target beyond the exact total: cap it at the total
                while k > 0 and w[k] == 0.0:
                    k -= 1
                    _select_pairs(v, w, k, 0, k)
                return k
            # a left sum landing exactly on target means k-1 balances too
            while k > 0 and below == 0.0:
                k -= 1
                _select_pairs(v, w, k, 0, k)
                below = _excess(w, k, 0.0, target)
            return k
        if below + above < 0.0:
            k += 1
            left = k
            right = n - 1
        else:
            k -= 1
            left = 0
            right = k
    return -1


def _validate(values, weights, p):
    if values.ndim != 1 or values.shape != weights.shape:
        raise ValueError("values and weights must be 1-d arrays of equal length")
    if values.size == 0:
        raise ValueError("cannot select from an empty sample")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if np.isnan(values).any() or np.isnan(weights).any():
        raise ValueError("values and weights must not contain NaN")
    if (weights < 0).any():
        raise ValueError("weights must be non-negative")
    total = math.fsum(weights)
    if not total > 0.0:
        raise ValueError("total weight must be positive")
    return total


def _start_rank(n: int, p: float) -> int:
    return min(max(math.ceil(n * p), 1), n)


def weighted_percentile(values, weights, p: float) -> WeightedResult:
    """Lower weighted ``100 p`` percentile in expected linear time.

    ``values`` and ``weights`` are permuted together in place when they are
    float64 arrays; other inputs are copied first.  The result is the value
    at the smallest rank whose running weight reaches ``p`` of the total.

    >>> weighted_percentile([1., 2, 3, 4, 5], [.15, .10, .20, .30, .25], 0.5).value
    4.0
    """
    v = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    total = _validate(v, w, p)
    n = v.size
    k = _weighted_select(v, w, p * total, _start_rank(n, p) - 1)
    if k < 0:
        raise RuntimeError(f"weighted selection did not settle within {n + 1} rank moves")
    return WeightedResult(float(v[k]), float(w[k]) / total, k + 1)


def weighted_median(values, weights) -> float:
    """Lower weighted median: the minimizer of ``sum(w * |values - a|)``."""
    return weighted_percentile(values, weights, 0.5).value


def weighted_percentile_oracle(values, weights, p: float) -> float:
    """Sort-based reference for :func:`weighted_percentile`.

    Sorts rows by value and returns the first value whose running weight
    reaches ``p`` of the total.  Running sums within rounding distance of
    the target are compared in exact rational arithmetic.  Does not modify
    its inputs.
    """
    v = np.array(values, dtype=np.float64)
    w = np.array(weights, dtype=np.float64)
    total = _validate(v, w, p)
    target = p * total
    order = np.argsort(v, kind="stable")
    ws = w[order]
    cum = np.cumsum(ws)
    if np.any(np.abs(cum - target) <= 1e-9 * total):
        # the rounded target can exceed the exact total; cap it there
        exact_target = min(Fraction(target), sum((Fraction(float(x)) for x in ws), Fraction(0)))
        running = Fraction(0)
        for i, wi in enumerate(ws):
            running += Fraction(float(wi))
            if running >= exact_target:
                return float(v[order[i]])
        return float(v[order[-1]])
    idx = int(np.searchsorted(cum, target, side="left"))
    return float(v[order[min(idx, v.size - 1)]])
