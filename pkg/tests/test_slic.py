import math

import numpy as np
import pytest

from superlime.segmenters import SlicSegmenter, seed_grid, slic_distance
from superlime.synth import generate_blob_image
from support import assert_connected, assert_partition, random_image


def test_distance_kernel_formula():
    # D(dc=10, ds=5, S=10, m=10) = sqrt(100 + 0.25 * 100) = sqrt(125)
    assert slic_distance(10.0, 5.0, 10.0, 10.0) == pytest.approx(math.sqrt(125.0), abs=1e-12)


def test_distance_kernel_elementwise():
    dc = np.array([0.0, 10.0])
    ds = np.array([5.0, 0.0])
    out = slic_distance(dc, ds, 10.0, 10.0)
    assert out == pytest.approx([5.0, 10.0], abs=1e-12)


def test_seed_grid_matches_definition():
    # N=10000, k=100 -> S=10: centers every 10 pixels starting at 5.
    seeds = seed_grid(100, 100, 100)
    assert len(seeds) == 100
    expected = [5 + 10 * i for i in range(10)]
    assert sorted(set(seeds[:, 0])) == expected
    assert sorted(set(seeds[:, 1])) == expected


def test_seed_grid_exact_count_and_distinct():
    rng = np.random.default_rng(0)
    for _ in range(50):
        h, w = int(rng.integers(4, 40)), int(rng.integers(4, 40))
        n = int(rng.integers(1, h * w + 1))
        seeds = seed_grid(h, w, n)
        assert len(seeds) == n
        assert len({(y, x) for y, x in seeds}) == n
        assert seeds[:, 0].min() >= 0 and seeds[:, 0].max() < h
        assert seeds[:, 1].min() >= 0 and seeds[:, 1].max() < w


def test_constant_20x20_k4_gives_four_equal_quadrants():
    img = np.full((20, 20, 3), 77, dtype=np.uint8)
    lm = SlicSegmenter(k=4).segment(img)
    assert lm.n_segments == 4
    assert lm.segment_sizes().tolist() == [100, 100, 100, 100]
    expected = np.zeros((20, 20), dtype=int)
    expected[:10, 10:] = 1
    expected[10:, :10] = 2
    expected[10:, 10:] = 3
    assert np.array_equal(lm.labels, expected)


@pytest.mark.parametrize("k", [16, 50, 100])
def test_count_contract_on_structured_images(k):
    rng = np.random.default_rng(k)
    img, _ = generate_blob_image(rng, 64)
    lm = SlicSegmenter(k=k).segment(img)
    assert 0.5 * k <= lm.n_segments <= 2 * k


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_partition_and_4_connectivity(seed):
    rng = np.random.default_rng(seed)
    img = random_image(rng, 24, 31)
    lm = SlicSegmenter(k=12).segment(img)
    assert_partition(lm)
    assert_connected(lm, connectivity=4)


def test_residuals_finite_and_loop_bounded():
    rng = np.random.default_rng(11)
    img = random_image(rng, 40, 40)
    seg = SlicSegmenter(k=9, max_iters=5, threshold=0.0)
    seg.segment(img)
    assert 1 <= len(seg.residuals_) <= 5
    assert all(np.isfinite(r) for r in seg.residuals_)


def test_deterministic():
    rng = np.random.default_rng(12)
    img = random_image(rng, 30, 22)
    a = SlicSegmenter(k=8).segment(img)
    b = SlicSegmenter(k=8).segment(img)
    assert np.array_equal(a.labels, b.labels)


def test_invalid_params_rejected():
    img = np.zeros((4, 4, 3), dtype=np.uint8)
    for bad in (dict(k=0), dict(k=17), dict(m=0.0), dict(max_iters=0), dict(threshold=-1.0)):
        with pytest.raises(ValueError):
            SlicSegmenter(**bad).fit(img)
