import numpy as np
import pytest

from fixedpivot.mt import MT19937
from fixedpivot.raster import (
    Mask3,
    PNMError,
    Raster,
    add_salt_pepper,
    read_pnm,
    weighted_median_filter,
    weighted_median_filter_oracle,
    write_pnm,
)


def noisy_fixture(channels=1, size=64, seed=7):
    g = np.random.default_rng(seed)
    shape = (size, size) if channels == 1 else (size, size, 3)
    base = Raster.from_array(g.integers(40, 200, shape))
    return add_salt_pepper(base, 0.2, MT19937(seed))


def test_read_plain_gray():
    r = read_pnm(b"P2\n# a comment\n1 1\n255\n128\n")
    assert (r.width, r.height, r.channels) == (1, 1, 1)
    assert r.samples.ravel().tolist() == [128]


def test_round_trip_p6():
    r = Raster.from_array(np.random.default_rng(1).integers(0, 256, (4, 4, 3)))
    data = write_pnm(r)
    assert data.startswith(b"P6\n4 4\n255\n")
    assert read_pnm(data) == r
    assert read_pnm(write_pnm(r, binary=False)) == r


def test_plain_and_binary_decode_equal():
    r = Raster.from_array(np.random.default_rng(2).integers(0, 256, (5, 7)))
    assert read_pnm(write_pnm(r, binary=True)) == read_pnm(write_pnm(r, binary=False))


def test_binary_payload_may_contain_comment_bytes():
    arr = np.full((2, 2), ord("#"), dtype=np.uint8)
    assert read_pnm(write_pnm(Raster.from_array(arr))).samples.ravel().tolist() == [35] * 4


@pytest.mark.parametrize(
    "data",
    [b"P7\n1 1\n255\n\x00", b"P5\n2 2\n65535\n" + bytes(8), b"P5\n2 2\n255\n\x00", b"P2\n2 2\n255\n1 2 3", b"P5\n2", b"P2\n1 1\n255\n300\n"],
)
def test_malformed(data):
    with pytest.raises(PNMError):
        read_pnm(data)


def test_raster_validation():
    with pytest.raises(ValueError):
        Raster(2, 2, 2, np.zeros((2, 2, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        Raster(2, 2, 1, np.zeros((1, 3, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        Raster(1, 1, 1, np.array([[[300]]]))


def test_mask():
    m = Mask3([10, 12, 9, 12, 19, 12, 9, 12, 10])
    assert m.weights.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Mask3([1, 2, 3])
    with pytest.raises(ValueError):
        Mask3([-1] + [1] * 8)
    with pytest.raises(ValueError):
        Mask3([0] * 9)


def test_salt_pepper_extremes():
    r = Raster.from_array(np.full((20, 20), 77, dtype=np.uint8))
    assert add_salt_pepper(r, 0.0, MT19937(1)) == r
    full = add_salt_pepper(r, 1.0, MT19937(1)).samples
    assert set(np.unique(full).tolist()) <= {0, 255}
    with pytest.raises(ValueError):
        add_salt_pepper(r, 1.5, MT19937(1))


def test_salt_pepper_rate():
    r = Raster.from_array(np.full((400, 500), 77, dtype=np.uint8))
    hit = (add_salt_pepper(r, 0.2, MT19937(3)).samples != 77).mean()
    assert abs(hit - 0.2) < 0.01


def test_constant_image_unchanged():
    r = Raster.from_array(np.full((9, 11, 3), 42, dtype=np.uint8))
    assert weighted_median_filter(r) == r


def test_isolated_spike_removed():
    a = np.zeros((5, 5), dtype=np.uint8)
    a[2, 2] = 255
    assert weighted_median_filter(Raster.from_array(a)).samples.max() == 0


def test_border_copied_and_values_from_window():
    noisy = noisy_fixture()
    out = weighted_median_filter(noisy).samples[0]
    src = noisy.samples[0]
    assert np.array_equal(out[0], src[0]) and np.array_equal(out[:, -1], src[:, -1])
    for r in range(1, 63, 7):
        for c in range(1, 63, 5):
            assert out[r, c] in src[r - 1 : r + 2, c - 1 : c + 2]


@pytest.mark.parametrize("channels", [1, 3])
@pytest.mark.parametrize("mask", [None, [1, 1, 1, 1, 1, 1, 1, 1, 1], [0, 1, 0, 1, 4, 1, 0, 1, 0], [0.3, 0.1, 0.7, 0.2, 0.9, 0.4, 0.05, 0.6, 0.2]])
def test_equals_sort_oracle(channels, mask):
    noisy = noisy_fixture(channels)
    assert weighted_median_filter(noisy, mask) == weighted_median_filter_oracle(noisy, mask)


@pytest.mark.parametrize("p", [0.0, 0.25, 1.0])
def test_other_percentiles_match_oracle(p):
    noisy = noisy_fixture(size=20)
    assert weighted_median_filter(noisy, p=p) == weighted_median_filter_oracle(noisy, p=p)


def test_undersized():
    with pytest.raises(ValueError):
        weighted_median_filter(Raster.from_array(np.zeros((2, 5), dtype=np.uint8)))
