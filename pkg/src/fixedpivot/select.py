"""In-place k-th order statistic selection with a fixed pivot position.

The pivot always sits at the target slot ``k``: each pass swaps the value at
``k`` to the right end of the active window, moves every smaller element to
the front of the window, drops the pivot into place, and narrows the window
towards ``k``.  When the pivot lands exactly on ``k`` it is the answer.

Ranks in the public API are 1-based, as are ``left``/``right``/``position``
in :func:`partition_step`.

>>> import numpy as np
>>> a = np.array([2., 3, 4, 5, 6, 7, 8, 9, 1])
>>> value, counts = select_kth_instrumented(a, 9)
>>> value, counts.total
(9.0, 63)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

# counter slots shared with the compiled kernels
_EXIT, _DATA, _BRANCH, _INCR, _FIRST = range(5)


@dataclass
class ComparisonBreakdown:
    """Comparison counts of one selection, split by where they happen.

    ``exit_tests``
        Loop-exit tests on ``position`` (one per pass).
    ``data_comparisons``
        Element-versus-pivot comparisons.  Each pass compares the pivot
        against every slot of its window, including the slot holding the
        pivot itself, so a window of ``m`` elements costs ``m``.
    ``branch_tests``
        ``position < k`` tests choosing which side to keep (one per pass).
    ``position_increments``
        Number of elements found smaller than the pivot, over all passes.
    ``first_pass_increments``
        The same, restricted to the first pass.
    """

    exit_tests: int = 0
    data_comparisons: int = 0
    branch_tests: int = 0
    position_increments: int = 0
    first_pass_increments: int = 0

    @property
    def total(self) -> int:
        return self.exit_tests + self.data_comparisons + self.branch_tests

    @classmethod
    def _from_counts(cls, counts):
        return cls(*(int(c) for c in counts))


@njit(cache=True)
def _fixed_pivot_select(a, k, left, right, counts):
    # 0-based, inclusive window; self-contained so py_func runs on lists too
    first = True
    while True:
        pivot = a[k]
        a[k] = a[right]
        a[right] = pivot
        position = left
        for i in range(left, right + 1):
            if a[i] < pivot:
                buf = a[i]
                a[i] = a[position]
                a[position] = buf
                position += 1
        counts[1] += right - left + 1
        counts[3] += position - left
        if first:
            counts[4] = position - left
            first = False
        a[right] = a[position]
        a[position] = pivot
        counts[2] += 1
        if position < k:
            left = position + 1
        else:
            right = position - 1
        counts[0] += 1
        if position == k:
            return a[k]


@njit(cache=True)
def _partition_pass(a, left, right, k):
    pivot = a[k]
    a[k] = a[right]
    a[right] = pivot
    position = left
    for i in range(left, right + 1):
        if a[i] < pivot:
            buf = a[i]
            a[i] = a[position]
            a[position] = buf
            position += 1
    a[right] = a[position]
    a[position] = pivot
    return position


def _is_numeric_array(data) -> bool:
    return isinstance(data, np.ndarray) and data.dtype.kind in "biuf"


def _kernel(data, fn):
    return fn if _is_numeric_array(data) else fn.py_func


def _check_rank(n: int, k: int) -> None:
    if n < 1:
        raise ValueError("cannot select from an empty buffer")
    if not 1 <= k <= n:
        raise ValueError(f"rank k={k} outside [1, {n}]")


def _check_finite(data) -> None:
    if isinstance(data, np.ndarray) and data.dtype.kind == "f" and np.isnan(data).any():
        raise ValueError("data contains NaN, which has no rank")


def _as_index(rng_value: float, upper: int) -> int:
    return min(int(rng_value * upper), upper - 1)


def backward_shuffle(data, rng):
    """Fisher-Yates shuffle running from the last slot down, in place.

    Draws ``len(data) - 1`` uniforms from ``rng`` (anything with a
    ``random(size)`` method, e.g. :class:`~fixedpivot.mt.MT19937` or a
    numpy ``Generator``) and returns ``data``.
    """
    n = len(data)
    if n < 2:
        return data
    u = np.asarray(rng.random(n - 1), dtype=np.float64)
    for step, i in enumerate(range(n - 1, 0, -1)):
        j = _as_index(u[step], i + 1)
        data[i], data[j] = data[j], data[i]
    return data


def _prepare(data, k, oracle, shuffle, rng):
    n = len(data)
    _check_rank(n, k)
    _check_finite(data)
    if oracle is not None and not 1 <= oracle <= n:
        raise ValueError(f"oracle index {oracle} outside [1, {n}]")
    if shuffle:
        if rng is None:
            raise ValueError("shuffle=True needs an rng")
        if oracle is None:
            backward_shuffle(data, rng)
        else:
            # follow the hinted element through the shuffle
            perm = backward_shuffle(np.arange(n), rng)
            snapshot = list(data) if not isinstance(data, np.ndarray) else data.copy()
            for i, src in enumerate(perm):
                data[i] = snapshot[src]
            oracle = int(np.flatnonzero(perm == oracle - 1)[0]) + 1
    if oracle is not None and oracle != k:
        data[oracle - 1], data[k - 1] = data[k - 1], data[oracle - 1]


def select_kth(data, k: int, oracle: int | None = None, shuffle: bool = False, rng=None):
    """Return the k-th smallest element of ``data``, permuting it in place.

    Parameters
    ----------
    data : numpy array or list
        Values to select from.  Numeric arrays run through a compiled kernel;
        lists and object arrays run the same code interpreted.
    k : int
        1-based rank.
    oracle : int, optional
        1-based index of an element believed to be close to the answer.  It
        is swapped into slot ``k`` before the first pass.  Changes the cost,
        never the result.
    shuffle : bool
        Shuffle ``data`` once (see :func:`backward_shuffle`) before selecting.
    rng
        Generator used by ``shuffle``.

    After return ``data[k-1]`` holds the answer, nothing before it is
    larger and nothing after it is smaller.
    """
    _prepare(data, k, oracle, shuffle, rng)
    counts = np.zeros(5, dtype=np.int64)
    return _kernel(data, _fixed_pivot_select)(data, k - 1, 0, len(data) - 1, counts)


def select_kth_instrumented(data, k: int, oracle: int | None = None, shuffle: bool = False, rng=None):
    """As :func:`select_kth`, also returning a :class:`ComparisonBreakdown`."""
    _prepare(data, k, oracle, shuffle, rng)
    counts = np.zeros(5, dtype=np.int64)
    value = _kernel(data, _fixed_pivot_select)(data, k - 1, 0, len(data) - 1, counts)
    return value, ComparisonBreakdown._from_counts(counts)


def partition_step(data, left: int, right: int, k: int) -> int:
    """Run one partition pass around the element at ``k``; return its new slot.

    All indices are 1-based.  Afterwards ``data[left-1 : pos-1]`` holds the
    elements strictly smaller than the pivot and the pivot sits at ``pos``.
    """
    n = len(data)
    if not (1 <= left <= k <= right <= n):
        raise ValueError(f"need 1 <= left <= k <= right <= n, got left={left}, k={k}, right={right}, n={n}")
    return _kernel(data, _partition_pass)(data, left - 1, right - 1, k - 1) + 1
