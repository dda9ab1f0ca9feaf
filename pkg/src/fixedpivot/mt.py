"""Mersenne Twister (MT19937) streams that replay across environments.

Two seedings are supported:

* ``classic`` -- the reference ``init_genrand`` of mt19937ar, with 53-bit
  uniforms (``genrand_res53``).  This is what MATLAB's ``'twister'`` and
  numpy's legacy ``RandomState(int)`` produce.
* ``r`` -- the state base R builds in ``set.seed`` (a 69069 LCG scramble),
  with R's 32-bit ``unif_rand`` output and its inversion normal generator.

Example
-------
>>> rng = mt_from_seed(12345)
>>> [round(float(u), 4) for u in rng.random(5)]
[0.9296, 0.3164, 0.1839, 0.2046, 0.5677]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

N = 624
M = 397
MATRIX_A = np.uint32(0x9908B0DF)
UPPER_MASK = np.uint32(0x80000000)
LOWER_MASK = np.uint32(0x7FFFFFFF)

R_KIND_MERSENNE = 403
_TWO_POW_32_INV = 2.3283064365386963e-10  # 2**-32, as hard-coded in R
_I2_32M1 = 2.328306437080797e-10  # 1/(2**32 - 1)
_BIG = 134217728  # 2**27


@njit(cache=True)
def _init_genrand(seed):
    mt = np.empty(N, dtype=np.uint32)
    prev = np.uint64(seed) & np.uint64(0xFFFFFFFF)
    mt[0] = prev
    for i in range(1, N):
        prev = (np.uint64(1812433253) * (prev ^ (prev >> np.uint64(30))) + np.uint64(i)) & np.uint64(
            0xFFFFFFFF
        )
        mt[i] = prev
    return mt


def _mix(cur, nxt, far):
    y = (cur & UPPER_MASK) | (nxt & LOWER_MASK)
    return far ^ (y >> np.uint32(1)) ^ ((y & np.uint32(1)) * MATRIX_A)


def _twist(mt):
    # three slices so every read sees exactly the words the scalar loop would
    mt[:227] = _mix(mt[:227], mt[1:228], mt[397:624])
    mt[227:454] = _mix(mt[227:454], mt[228:455], mt[0:227])
    mt[454:623] = _mix(mt[454:623], mt[455:624], mt[227:396])
    mt[623] = _mix(mt[623:624], mt[0:1], mt[396:397])[0]


def _temper(y):
    y = y ^ (y >> np.uint32(11))
    y = y ^ ((y << np.uint32(7)) & np.uint32(0x9D2C5680))
    y = y ^ ((y << np.uint32(15)) & np.uint32(0xEFC60000))
    return y ^ (y >> np.uint32(18))


# Wichura's AS 241 (PPND16), in the operation order used by R's qnorm.
def _ppnd16_central(q):
    r = 0.180625 - q * q
    return (
        q
        * (
            ((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r
                + 45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r
             + 133.14166789178437745) * r
            + 3.387132872796366608
        )
        / (
            ((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r
                + 21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r
             + 42.313330701600911252) * r
            + 1.0
        )
    )


def _ppnd16_tail(r):
    near = r <= 5.0
    out = np.empty_like(r)
    t = r[near] - 1.6
    out[near] = (
        ((((((t * 7.7454501427834140764e-4 + 0.0227238449892691845833) * t + 0.24178072517745061177) * t
             + 1.27045825245236838258) * t + 3.64784832476320460504) * t + 5.7694972214606914055) * t
          + 4.6303378461565452959) * t
        + 1.42343711074968357734
    ) / (
        ((((((t * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * t + 0.0151986665636164571966) * t
             + 0.14810397642748007459) * t + 0.68976733498510000455) * t + 1.6763848301838038494) * t
          + 2.05319162663775882187) * t
        + 1.0
    )
    t = r[~near] - 5.0
    out[~near] = (
        ((((((t * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * t + 0.0012426609473880784386) * t
             + 0.026532189526576123093) * t + 0.29656057182850489123) * t + 1.7848265399172913358) * t
          + 5.4637849111641143699) * t
        + 6.6579046435011037772
    ) / (
        ((((((t * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * t + 1.8463183175100546818e-5) * t
             + 7.868691311456132591e-4) * t + 0.0148753612908506148525) * t + 0.13692988092273580531) * t
          + 0.59983220655588793769) * t
        + 1.0
    )
    return out


def norm_ppf(p):
    """Standard normal quantile function, Wichura's AS 241 algorithm.

    Accurate to about 1e-16 relative error on (0, 1).  Returns ``-inf`` and
    ``inf`` at 0 and 1, and NaN outside [0, 1].
    """
    p = np.asarray(p, dtype=np.float64)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    q = p - 0.5
    out = np.empty_like(p)
    central = np.abs(q) <= 0.425
    out[central] = _ppnd16_central(q[central])
    tail = ~central & (p > 0.0) & (p < 1.0)
    if tail.any():
        qt = q[tail]
        r = np.where(qt < 0.0, p[tail], 1.0 - p[tail])
        val = _ppnd16_tail(np.sqrt(-np.log(r)))
        out[tail] = np.where(qt < 0.0, -val, val)
    out[p == 0.0] = -np.inf
    out[p == 1.0] = np.inf
    out[(p < 0.0) | (p > 1.0) | np.isnan(p)] = np.nan
    return out[0] if scalar else out


@dataclass
class MTState:
    """Snapshot of a generator: 624 state words and the read cursor."""

    words: np.ndarray
    cursor: int

    def __post_init__(self):
        self.words = np.asarray(self.words, dtype=np.uint32).copy()
        if self.words.shape != (N,):
            raise ValueError(f"MT state needs {N} words, got shape {self.words.shape}")
        if not 0 <= self.cursor <= N:
            raise ValueError(f"cursor must lie in [0, {N}], got {self.cursor}")


@dataclass
class RSeedState:
    """The 626 signed integers of R's ``.Random.seed`` for Mersenne-Twister.

    ``codes[0]`` is the RNG kind code, ``codes[1]`` the position ``mti`` and
    ``codes[2:]`` the 624 state words reinterpreted as int32.
    """

    codes: np.ndarray

    def __post_init__(self):
        self.codes = np.asarray(self.codes, dtype=np.int64)
        if self.codes.shape != (N + 2,):
            raise ValueError(f"R seed state needs {N + 2} codes, got shape {self.codes.shape}")
        if self.codes.min() < -(2**31) or self.codes.max() >= 2**31:
            raise ValueError("R seed codes must be signed 32-bit integers")
        self.codes = self.codes.astype(np.int32)

    @property
    def kind(self) -> int:
        return int(self.codes[0])

    @property
    def position(self) -> int:
        return int(self.codes[1])


class MT19937:
    """MT19937 generator with a numpy-style ``random``/``standard_normal`` API.

    ``flavor`` selects the output transform: ``"classic"`` gives 53-bit
    uniforms and inversion normals on them; ``"r"`` gives base R's
    ``runif``/``rnorm`` (Mersenne-Twister, Inversion).  Either flavor can be
    passed anywhere this package accepts an ``rng``.
    """

    def __init__(self, seed: int = 5489, flavor: str = "classic"):
        if flavor not in ("classic", "r"):
            raise ValueError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self._mt = _init_genrand(int(seed) & 0xFFFFFFFF)
        self._pos = N

    @classmethod
    def from_state(cls, state: MTState, flavor: str = "classic") -> "MT19937":
        rng = cls.__new__(cls)
        if flavor not in ("classic", "r"):
            raise ValueError(f"unknown flavor {flavor!r}")
        rng.flavor = flavor
        rng.setstate(state)
        return rng

    def getstate(self) -> MTState:
        return MTState(self._mt, self._pos)

    def setstate(self, state: MTState) -> None:
        self._mt = state.words.copy()
        self._pos = int(state.cursor)

    def words(self, size: int) -> np.ndarray:
        """Next ``size`` tempered 32-bit outputs (``genrand_int32``)."""
        out = np.empty(size, dtype=np.uint32)
        filled = 0
        while filled < size:
            if self._pos >= N:
                _twist(self._mt)
                self._pos = 0
            take = min(N - self._pos, size - filled)
            out[filled : filled + take] = _temper(self._mt[self._pos : self._pos + take])
            self._pos += take
            filled += take
        return out

    def res53(self, size=None):
        """Uniforms on [0, 1) with 53-bit resolution (``genrand_res53``)."""
        count = 1 if size is None else int(np.prod(size))
        w = self.words(2 * count).astype(np.float64)
        a = np.floor(w[0::2] / 32.0)
        b = np.floor(w[1::2] / 64.0)
        u = (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)
        return float(u[0]) if size is None else u.reshape(size)

    def r_unif(self, size=None):
        """Base R's ``unif_rand`` for Mersenne-Twister: 32-bit, never 0 or 1."""
        count = 1 if size is None else int(np.prod(size))
        u = self.words(count).astype(np.float64) * _TWO_POW_32_INV
        u[u <= 0.0] = 0.5 * _I2_32M1
        u[1.0 - u <= 0.0] = 1.0 - 0.5 * _I2_32M1
        return float(u[0]) if size is None else u.reshape(size)

    def random(self, size=None):
        """Uniform variates in the generator's flavor."""
        return self.res53(size) if self.flavor == "classic" else self.r_unif(size)

    def standard_normal(self, size=None):
        """Normal variates by inverting the cdf.

        Classic flavor applies the quantile function to one 53-bit uniform,
        discarding exact zeros.  R flavor combines two uniforms as base R's
        ``norm_rand`` does before inverting.
        """
        count = 1 if size is None else int(np.prod(size))
        if self.flavor == "classic":
            parts = []
            need = count
            while need:
                u = self.res53(need)
                u = u[u > 0.0]
                parts.append(u)
                need -= u.size
            z = norm_ppf(np.concatenate(parts))
        else:
            u = self.r_unif(2 * count)
            z = norm_ppf((np.trunc(_BIG * u[0::2]) + u[1::2]) / _BIG)
        return float(z[0]) if size is None else z.reshape(size)

    def uniform_int(self, upper: int, size=None):
        """Integers in 1..upper as ``ceil(u * upper)``."""
        if upper < 1:
            raise ValueError(f"upper bound must be >= 1, got {upper}")
        u = self.random(1 if size is None else size)
        k = np.ceil(np.asarray(u) * upper).astype(np.int64)
        k = np.maximum(k, 1)
        return int(k.ravel()[0]) if size is None else k


def mt_from_seed(seed: int) -> MT19937:
    """Classic ``init_genrand`` seeding."""
    return MT19937(seed, flavor="classic")


def _lcg(n: int) -> int:
    n = 69069 * n + 1
    if n >= 2**31 or n < -(2**31):
        n = (n + 2**31) % 2**32 - 2**31
    return n


def r_state_from_seed(seed: int) -> RSeedState:
    """Build the ``.Random.seed`` vector that ``set.seed(seed)`` produces in R."""
    n = int(seed)
    for _ in range(50):
        n = _lcg(n)
    codes = np.zeros(N + 2, dtype=np.int64)
    for i in range(1, N + 2):
        n = _lcg(n)
        codes[i] = n
    codes[0] = R_KIND_MERSENNE
    codes[1] = N
    return RSeedState(codes)


def mt_from_r_state(r: RSeedState, flavor: str = "r") -> MT19937:
    """Generator whose stream continues R's from the given seed state."""
    words = r.codes[2:].astype(np.int32).view(np.uint32)
    return MT19937.from_state(MTState(words, int(r.codes[1])), flavor=flavor)


def r_seed(seed: int) -> MT19937:
    """Shorthand for ``mt_from_r_state(r_state_from_seed(seed))``."""
    return mt_from_r_state(r_state_from_seed(seed))

