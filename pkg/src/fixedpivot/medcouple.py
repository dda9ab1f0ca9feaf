"""Medcouple, a robust measure of skewness in [-1, 1].

For a sample with median ``m`` the medcouple is the median of the kernel

    h(xi, xj) = ((xj - m) - (m - xi)) / (xj - xi),    xi <= m <= xj,

over all such pairs.  Points equal to ``m`` belong to both sides; pairs of
them use a sign kernel so that the tie block is antisymmetric.  An even
number of kernel values resolves to the lower median.

Two routes are provided: :func:`medcouple_naive` enumerates all kernel
values (quadratic), :func:`medcouple_fast` searches the sorted kernel matrix
with weighted medians (n log n).
"""

from __future__ import annotations

import numpy as np

from .select import select_kth
from .weighted import weighted_percentile


def medcouple_kernel(xi: float, xj: float, m: float, pi: int = 0, qj: int = 0) -> float:
    """Kernel value for a lower point ``xi`` and an upper point ``xj``.

    When both equal ``m`` the value is ``sign(pi - qj)``, where ``pi`` and
    ``qj`` are the tie ranks of the two points among the values equal to the
    median (see :func:`medcouple_naive` for the ranking).
    """
    if not xi <= m <= xj:
        raise ValueError(f"kernel needs xi <= m <= xj, got {xi}, {m}, {xj}")
    if xi == xj:
        return float(np.sign(pi - qj))
    return ((xj - m) - (m - xi)) / (xj - xi)


def _prepare(values):
    x = np.array(values, dtype=np.float64).ravel()
    if x.size < 3:
        raise ValueError("medcouple needs at least 3 observations")
    if np.isnan(x).any():
        raise ValueError("medcouple is undefined with NaN values")
    return x


def _split(x, m):
    # both halves sorted decreasing; median ties end the upper half and start the lower one
    xs = np.sort(x)[::-1]
    upper = xs[xs >= m]
    lower = xs[xs <= m]
    ties = int(np.count_nonzero(xs == m))
    return upper, lower, ties


def medcouple_naive(values) -> float:
    """Medcouple by enumerating every kernel value.

    Rows of the kernel matrix run over the upper points in decreasing order,
    columns over the lower points in decreasing order.  With ``t`` points
    tied at the median, tie row ``a`` and tie column ``b`` (both counted from
    0) get ``sign(t - 1 - a - b)``: +1 above the anti-diagonal, 0 on it, -1
    below.
    """
    x = _prepare(values)
    xs = np.sort(x)
    n = xs.size
    m = xs[(n - 1) // 2] if n % 2 else (xs[n // 2 - 1] + xs[n // 2]) / 2
    upper, lower, t = _split(x, m)
    xj = upper[:, None]
    xi = lower[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        h = ((xj - m) - (m - xi)) / (xj - xi)
    if t:
        a = np.arange(t)
        h[-t:, :t] = np.sign(t - 1 - a[:, None] - a[None, :])
    flat = np.sort(h.ravel())
    return float(flat[(flat.size - 1) // 2])


def _median(x):
    work = x.copy()
    n = work.size
    half = n // 2
    if n % 2:
        return float(select_kth(work, half + 1))
    lo = select_kth(work, half)
    return float((lo + work[half:].min()) / 2)


class _KernelMatrix:
    """Lazy view of the kernel matrix; entries decrease along rows and columns."""

    def __init__(self, upper, lower, m, ties):
        self.upper = upper
        self.lower = lower
        self.m = m
        self.ties = ties
        self.p = upper.size
        self.q = lower.size

    def __call__(self, i, j):
        xj = self.upper[i]
        xi = self.lower[j]
        if xi == xj:
            a = i - (self.p - self.ties)
            return float(np.sign(self.ties - 1 - a - j))
        return ((xj - self.m) - (self.m - xi)) / (xj - xi)


def medcouple_fast(values, return_iterations: bool = False):
    """Medcouple in O(n log n) by a weighted-median search of the kernel matrix.

    Each round takes the middle entry of every row's active column range,
    weights it by the range length, and uses the weighted median of those as
    a trial value.  Counting entries above and below the trial discards a
    fixed fraction of the candidates; the last few are selected directly.

    With ``return_iterations=True`` also returns the number of rounds, which
    is the number of weighted medians computed.
    """
    x = _prepare(values)
    m = _median(x)
    upper, lower, ties = _split(x, m)
    h = _KernelMatrix(upper, lower, m, ties)
    p, q = h.p, h.q

    left = np.zeros(p, dtype=np.int64)
    right = np.full(p, q - 1, dtype=np.int64)
    ltot, rtot = 0, p * q
    target = p * q // 2 + 1  # rank counted from the largest
    rounds = 0
    found = None
    while rtot - ltot > p and rounds < 64 * (p + q):
        rows = np.flatnonzero(left <= right)
        mids = (left[rows] + right[rows]) // 2
        cand = np.array([h(i, j) for i, j in zip(rows, mids)])
        trial = weighted_percentile(cand, (right[rows] - left[rows] + 1).astype(np.float64), 0.5).value
        rounds += 1

        above = np.empty(p, dtype=np.int64)
        j = 0
        for i in range(p - 1, -1, -1):
            while j < q and h(i, j) > trial:
                j += 1
            above[i] = j
        at_least = np.empty(p, dtype=np.int64)
        j = q
        for i in range(p):
            while j > 0 and h(i, j - 1) < trial:
                j -= 1
            at_least[i] = j

        n_above = int(above.sum())
        n_at_least = int(at_least.sum())
        if target <= n_above:
            right = above - 1
            rtot = n_above
        elif target > n_at_least:
            left = at_least
            ltot = n_at_least
        else:
            found = trial
            break

    if found is None:
        rest = np.array([h(i, j) for i in range(p) for j in range(left[i], right[i] + 1)])
        # (target - ltot)-th largest of the survivors
        found = float(select_kth(rest, rest.size - (target - ltot) + 1))
    return (found, rounds) if return_iterations else found
