"""Weighted-median denoising of 8-bit rasters, with PNM input and output.

Rasters are held channel-planar: ``samples[c, row, col]``.  The filter slides
a 3x3 window over the interior and replaces each sample by the lower
weighted median of its neighbourhood; the one-pixel border is copied.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from numba import njit

from .weighted import _start_rank, _weighted_select

WIENER_MASK = (10.0, 12.0, 9.0, 12.0, 19.0, 12.0, 9.0, 12.0, 10.0)


class PNMError(ValueError):
    """Malformed or unsupported PNM data."""


@dataclass
class Raster:
    width: int
    height: int
    channels: int
    samples: np.ndarray  # uint8, shape (channels, height, width)

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        s = np.asarray(self.samples)
        if s.shape != (self.channels, self.height, self.width):
            raise ValueError(f"samples shape {s.shape} does not match {self.channels}x{self.height}x{self.width}")
        if s.dtype != np.uint8:
            if s.size and (s.min() < 0 or s.max() > 255):
                raise ValueError("samples must lie in [0, 255]")
            s = s.astype(np.uint8)
        self.samples = s

    @classmethod
    def from_array(cls, arr) -> "Raster":
        """Build from ``(height, width)`` gray or ``(height, width, 3)`` color data."""
        a = np.asarray(arr)
        if a.ndim == 2:
            return cls(a.shape[1], a.shape[0], 1, a[None, :, :])
        if a.ndim == 3 and a.shape[2] == 3:
            return cls(a.shape[1], a.shape[0], 3, np.moveaxis(a, 2, 0))
        raise ValueError(f"expected (h, w) or (h, w, 3), got shape {a.shape}")

    def to_array(self) -> np.ndarray:
        return self.samples[0] if self.channels == 1 else np.moveaxis(self.samples, 0, 2)

    def __eq__(self, other):
        if not isinstance(other, Raster):
            return NotImplemented
        return (self.width, self.height, self.channels) == (other.width, other.height, other.channels) and bool(
            np.array_equal(self.samples, other.samples)
        )


@dataclass
class Mask3:
    """Non-negative 3x3 weights, given row by row.

    ``raw`` keeps the weights as given; ``weights`` is the normalized copy.
    The filter works on ``raw`` so integer masks give exact running sums.
    """

    raw: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.raw, dtype=np.float64).ravel()
        if r.size != 9:
            raise ValueError(f"a 3x3 mask needs 9 weights, got {r.size}")
        if np.isnan(r).any() or (r < 0).any():
            raise ValueError("mask weights must be non-negative numbers")
        if not r.sum() > 0:
            raise ValueError("mask weights must not all be zero")
        self.raw = r

    @property
    def weights(self) -> np.ndarray:
        return self.raw / math.fsum(self.raw)


_TOKEN = re.compile(rb"#[^\n\r]*|(\S+)")


def _tokens(data: bytes, count: int, pos: int = 0):
    out = []
    for m in _TOKEN.finditer(data, pos):
        if m.group(1) is not None:
            out.append(m.group(1))
            if len(out) == count:
                return out, m.end()
    raise PNMError("truncated PNM header")


def _int(token: bytes, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise PNMError(f"bad {what}: {token!r}") from None


def read_pnm(data: bytes) -> Raster:
    """Decode P2, P3, P5 or P6 data with maxval 255."""
    if data[:1] != b"P" or data[1:2] not in (b"2", b"3", b"5", b"6"):
        raise PNMError("not a P2/P3/P5/P6 file")
    kind = data[1:2]
    (width, height, maxval), end = _tokens(data, 3, 2)
    width, height, maxval = _int(width, "width"), _int(height, "height"), _int(maxval, "maxval")
    if width < 1 or height < 1:
        raise PNMError(f"bad size {width}x{height}")
    if maxval != 255:
        raise PNMError(f"only maxval 255 is supported, got {maxval}")
    channels = 3 if kind in (b"3", b"6") else 1
    count = width * height * channels
    if kind in (b"5", b"6"):
        if end >= len(data) or not data[end : end + 1].isspace():
            raise PNMError("missing whitespace after header")
        payload = data[end + 1 : end + 1 + count]
        if len(payload) < count:
            raise PNMError(f"truncated payload: {len(payload)} of {count} bytes")
        flat = np.frombuffer(payload, dtype=np.uint8)
    else:
        values, _ = _tokens(data, count, end) if count else ([], end)
        flat = np.array([_int(v, "sample") for v in values], dtype=np.int64)
        if flat.size and (flat.min() < 0 or flat.max() > 255):
            raise PNMError("sample outside [0, 255]")
    pixels = flat.reshape(height, width, channels)
    return Raster(width, height, channels, np.ascontiguousarray(np.moveaxis(pixels, 2, 0)).astype(np.uint8))


def write_pnm(raster: Raster, binary: bool = True) -> bytes:
    """Encode as P5/P6 (``binary``) or P2/P3, without comments."""
    magic = {(1, True): b"P5", (3, True): b"P6", (1, False): b"P2", (3, False): b"P3"}[(raster.channels, binary)]
    header = b"%s\n%d %d\n255\n" % (magic, raster.width, raster.height)
    interleaved = np.moveaxis(raster.samples, 0, 2).reshape(raster.height, -1)
    if binary:
        return header + interleaved.tobytes()
    lines = []
    for row in interleaved:
        for start in range(0, row.size, 12):
            lines.append(" ".join(str(int(v)) for v in row[start : start + 12]))
    return header + ("\n".join(lines) + "\n").encode("ascii")


def add_salt_pepper(raster: Raster, pnoise: float, rng) -> Raster:
    """Set each sample to 0 with probability ``pnoise/2`` and to 255 likewise.

    One uniform is drawn per sample, in channel, row, column order.
    """
    if not 0.0 <= pnoise <= 1.0:
        raise ValueError(f"pnoise must lie in [0, 1], got {pnoise}")
    u = np.asarray(rng.random(raster.samples.size), dtype=np.float64).reshape(raster.samples.shape)
    out = raster.samples.copy()
    out[u < pnoise / 2] = 0
    out[u > 1 - pnoise / 2] = 255
    return Raster(raster.width, raster.height, raster.channels, out)


@njit(cache=True)
def _filter_kernel(src, raw, target, k0, out):
    v = np.empty(9)
    w = np.empty(9)
    channels, height, width = src.shape
    for c in range(channels):
        for r in range(1, height - 1):
            for q in range(1, width - 1):
                t = 0
                for dr in range(-1, 2):
                    for dq in range(-1, 2):
                        v[t] = src[c, r + dr, q + dq]
                        w[t] = raw[t]
                        t += 1
                k = _weighted_select(v, w, target, k0)
                if k < 0:
                    return False
                out[c, r, q] = np.uint8(v[k])
    return True


def _check_filter_args(raster: Raster, mask, p: float) -> Mask3:
    if raster.width < 3 or raster.height < 3:
        raise ValueError(f"the 3x3 filter needs at least 3x3 pixels, got {raster.width}x{raster.height}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if mask is None:
        return Mask3(WIENER_MASK)
    return mask if isinstance(mask, Mask3) else Mask3(mask)


def weighted_median_filter(raster: Raster, mask: Mask3 | None = None, p: float = 0.5) -> Raster:
    """Replace each interior sample by the weighted ``p`` percentile of its 3x3 window.

    The default mask is ``[10 12 9; 12 19 12; 9 12 10]``.  Channels are
    filtered independently and the border is copied unchanged.
    """
    mask = _check_filter_args(raster, mask, p)
    src = raster.samples
    out = src.copy()
    target = p * math.fsum(mask.raw)
    if not _filter_kernel(src, mask.raw, target, _start_rank(9, p) - 1, out):
        raise RuntimeError("weighted selection did not settle")
    return Raster(raster.width, raster.height, raster.channels, out)


def weighted_median_filter_oracle(raster: Raster, mask: Mask3 | None = None, p: float = 0.5) -> Raster:
    """Sort-based reference for :func:`weighted_median_filter`."""
    mask = _check_filter_args(raster, mask, p)
    src = raster.samples
    c, h, w = src.shape
    windows = np.stack(
        [src[:, 1 + dr : h - 1 + dr, 1 + dq : w - 1 + dq] for dr in (-1, 0, 1) for dq in (-1, 0, 1)], axis=-1
    ).astype(np.float64)
    order = np.argsort(windows, axis=-1, kind="stable")
    cum = np.cumsum(mask.raw[order], axis=-1)
    first = np.minimum((cum < p * math.fsum(mask.raw)).sum(axis=-1), 8)
    out = src.copy()
    out[:, 1:-1, 1:-1] = np.take_along_axis(windows, np.take_along_axis(order, first[..., None], -1), -1)[..., 0]
    return Raster(raster.width, raster.height, raster.channels, out)
