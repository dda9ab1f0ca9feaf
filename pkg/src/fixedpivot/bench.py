"""Comparison-count benchmark harness.

For every size ``n`` and replicate a fresh sample is drawn from a generator
seeded with ``base_seed + offset`` (``offset = i_n * replicates + rep``, so
the stream of a replicate does not depend on the other sizes), and every
requested rank is selected on its own copy of that sample.  Rows come out in
``(n, k, rep)`` order and the CSV is byte-identical for a fixed config.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.stats import ks_1samp

from .mt import MT19937
from .select import select_kth_instrumented
from .vervaat import dickman_cdf

CSV_FIELDS = ("n", "k", "rep", "exit", "data", "branch", "incr", "total")
VARIANTS = ("select", "select_oracle", "sort_baseline")


@dataclass(frozen=True)
class Distribution:
    """Sampling law: ``uniform``, ``birnbaum_saunders`` or ``lognormal``.

    ``params`` holds (shape, scale) for Birnbaum-Saunders and (mu, sigma)
    for the lognormal.
    """

    name: str = "uniform"
    params: tuple = ()

    _ALIASES = {"uniform": "uniform", "unif": "uniform", "bs": "birnbaum_saunders",
                "birnbaum_saunders": "birnbaum_saunders", "lognormal": "lognormal", "lognorm": "lognormal"}
    _DEFAULTS = {"uniform": (), "birnbaum_saunders": (0.5, 1.0), "lognormal": (0.0, 1.0)}

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """Parse ``name[:p1,p2]``, e.g. ``bs:0.5`` or ``lognormal:0,1``."""
        name, _, rest = text.partition(":")
        key = cls._ALIASES.get(name.strip().lower())
        if key is None:
            raise ValueError(f"unknown distribution {name!r}")
        given = tuple(float(v) for v in rest.split(",")) if rest else ()
        defaults = cls._DEFAULTS[key]
        if len(given) > len(defaults):
            raise ValueError(f"{key} takes at most {len(defaults)} parameters")
        return cls(key, given + defaults[len(given):])

    def __post_init__(self):
        if self.name not in self._DEFAULTS:
            raise ValueError(f"unknown distribution {self.name!r}")
        if not self.params:
            object.__setattr__(self, "params", self._DEFAULTS[self.name])
        if self.name == "birnbaum_saunders" and not (self.params[0] > 0 and self.params[1] > 0):
            raise ValueError("Birnbaum-Saunders shape and scale must be positive")
        if self.name == "lognormal" and not self.params[1] > 0:
            raise ValueError("lognormal sigma must be positive")


def sample(dist, n: int, rng) -> np.ndarray:
    """Draw ``n`` i.i.d. values; ``rng`` needs ``random`` and ``standard_normal``."""
    if isinstance(dist, str):
        dist = Distribution.parse(dist)
    if n < 0:
        raise ValueError("n must be >= 0")
    if dist.name == "uniform":
        return np.asarray(rng.random(n), dtype=np.float64)
    z = np.asarray(rng.standard_normal(n), dtype=np.float64)
    if dist.name == "lognormal":
        mu, sigma = dist.params
        return np.exp(mu + sigma * z)
    shape, scale = dist.params
    half = shape * z / 2
    return scale * (half + np.sqrt(half * half + 1)) ** 2


@dataclass
class BenchConfig:
    dist: Distribution = field(default_factory=Distribution)
    n_set: list = field(default_factory=lambda: [1000])
    k_set: list = field(default_factory=lambda: ["max"])
    replicates: int = 100
    seed: int = 0
    variant: str = "select"

    def __post_init__(self):
        if isinstance(self.dist, str):
            self.dist = Distribution.parse(self.dist)
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.replicates < 0:
            raise ValueError("replicates must be >= 0")
        for n in self.n_set:
            if int(n) < 1:
                raise ValueError(f"sizes must be >= 1, got {n}")
            for k in self.k_set:
                resolve_rank(k, int(n))


@dataclass(frozen=True)
class BenchRow:
    n: int
    k: int
    replicate: int
    exit_tests: int
    data_comparisons: int
    branch_tests: int
    position_increments: int
    total: int
    seconds: float | None = None

    def csv_values(self):
        return (self.n, self.k, self.replicate, self.exit_tests, self.data_comparisons,
                self.branch_tests, self.position_increments, self.total)


@dataclass(frozen=True)
class GroupSummary:
    n: int
    k: int
    count: int
    min: int
    mean: float
    median: float
    max: int


def resolve_rank(k, n: int) -> int:
    """Map ``median``/``max``/``min`` or an integer to a 1-based rank."""
    symbolic = {"median": math.ceil(n / 2), "max": n, "min": 1}
    if isinstance(k, str) and k.strip().lower() in symbolic:
        rank = symbolic[k.strip().lower()]
    else:
        try:
            rank = int(k)
        except (TypeError, ValueError):
            raise ValueError(f"rank must be an integer or median/max/min, got {k!r}") from None
    if not 1 <= rank <= n:
        raise ValueError(f"rank {rank} outside [1, {n}]")
    return rank


@njit(cache=True)
def _merge_sort_comparisons(a):
    # bottom-up merge sort; returns the number of element comparisons
    n = a.shape[0]
    src = a.copy()
    dst = np.empty_like(src)
    count = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, t = lo, mid, lo
            while i < mid and j < hi:
                count += 1
                if src[j] < src[i]:
                    dst[t] = src[j]
                    j += 1
                else:
                    dst[t] = src[i]
                    i += 1
                t += 1
            while i < mid:
                dst[t] = src[i]
                i += 1
                t += 1
            while j < hi:
                dst[t] = src[j]
                j += 1
                t += 1
        src, dst = dst, src
        width *= 2
    return count


def _measure(x: np.ndarray, k: int, variant: str) -> tuple:
    if variant == "sort_baseline":
        c = int(_merge_sort_comparisons(x))
        return 0, c, 0, 0, c
    oracle = None
    if variant == "select_oracle":
        oracle = int(np.argsort(x, kind="stable")[k - 1]) + 1
    _, b = select_kth_instrumented(x.copy(), k, oracle=oracle)
    return b.exit_tests, b.data_comparisons, b.branch_tests, b.position_increments, b.total


def bench_run(config: BenchConfig, timing: bool = False) -> list[BenchRow]:
    """Run every (n, k, replicate) of ``config`` and return the rows in order."""
    rows = []
    r = config.replicates
    for i_n, n in enumerate(int(v) for v in config.n_set):
        ranks = [resolve_rank(k, n) for k in config.k_set]
        per_k: list[list[BenchRow]] = [[] for _ in ranks]
        for rep in range(r):
            rng = MT19937((config.seed + i_n * r + rep) % 2**32)
            x = sample(config.dist, n, rng)
            for slot, k in enumerate(ranks):
                t0 = time.perf_counter()
                counts = _measure(x, k, config.variant)
                elapsed = time.perf_counter() - t0 if timing else None
                per_k[slot].append(BenchRow(n, k, rep, *counts, seconds=elapsed))
        for block in per_k:
            rows.extend(block)
    return rows


def summarize(rows) -> list[GroupSummary]:
    """min/mean/median/max of ``total`` for each (n, k), in first-seen order."""
    groups: dict[tuple, list[int]] = {}
    for row in rows:
        groups.setdefault((row.n, row.k), []).append(row.total)
    return [
        GroupSummary(n, k, len(t), min(t), statistics.fmean(t), statistics.median(t), max(t))
        for (n, k), t in groups.items()
    ]


def rows_to_csv(rows, timing: bool = False) -> str:
    """CSV text with LF line endings; adds a ``seconds`` column when ``timing``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS + (("seconds",) if timing else ()))
    for row in rows:
        values = row.csv_values()
        if timing:
            values += (repr(row.seconds),)
        writer.writerow(values)
    return buf.getvalue()


def _translated_dickman_cdf(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = dickman_cdf(x[pos])
    return out


def dickman_fit(totals, n: int) -> float:
    """KS distance between ``totals / n - 1`` and the Dickman law."""
    t = np.asarray(totals, dtype=np.float64)
    if t.size == 0:
        raise ValueError("need at least one total")
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(ks_1samp(t / n - 1.0, _translated_dickman_cdf).statistic)
