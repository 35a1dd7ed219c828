"""Shared helpers for the test suite: invariant checks and image builders."""

import math

import numpy as np
from scipy import ndimage

from superlime.imaging import rgb_to_lab

FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def assert_partition(label_map):
    """Labels cover every pixel and are exactly {0..n_segments-1}."""
    label_map.validate()
    assert label_map.n_segments >= 1
    assert label_map.labels.shape == label_map.shape


def assert_connected(label_map, connectivity=4):
    structure = FOUR_CONNECTED if connectivity == 4 else EIGHT_CONNECTED
    for seg in range(label_map.n_segments):
        _, n = ndimage.label(label_map.labels == seg, structure=structure)
        assert n == 1, f"segment {seg} splits into {n} components"


def random_image(rng, h, w):
    return rng.integers(0, 256, (h, w, 3), dtype=np.uint8)


def two_tone_image(h, w, left, right, split):
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:, :split] = left
    img[:, split:] = right
    return img


def brute_force_quickshift(img, kernel_size, max_dist, spatial_weight):
    """Plain-loop oracle for Quick-Shift: all pairwise densities and links.

    Implements the stated formulas pair by pair: density over the Chebyshev
    ceil(3 sigma) window with row-major accumulation, parent = the
    feature-nearest strictly-denser pixel within max_dist (squared distances
    compared; scanning j in row-major order keeps the smaller index on ties).
    Returns (density, parents) with parents flat-indexed, -1 for roots.
    """
    lab = rgb_to_lab(img)
    h, w = lab.shape[:2]
    r = math.ceil(3 * kernel_size)
    lam2 = spatial_weight * spatial_weight
    denom = 2.0 * kernel_size * kernel_size
    density = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for jy in range(h):
                for jx in range(w):
                    if max(abs(jy - y), abs(jx - x)) > r:
                        continue
                    diff = lab[jy, jx] - lab[y, x]
                    sq = lam2 * ((jy - y) * (jy - y) + (jx - x) * (jx - x)) + np.sum(diff * diff)
                    acc += np.exp(-sq / denom)
            density[y, x] = acc

    max_sq = max_dist * max_dist
    parents = np.full(h * w, -1, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            best = np.inf
            best_j = -1
            for jy in range(h):
                for jx in range(w):
                    if jy == y and jx == x:
                        continue
                    if (jy - y) * (jy - y) + (jx - x) * (jx - x) > max_sq:
                        continue
                    if density[jy, jx] > density[y, x]:
                        diff = lab[jy, jx] - lab[y, x]
                        sq = lam2 * ((jy - y) * (jy - y) + (jx - x) * (jx - x)) + np.sum(diff * diff)
                        if sq < best:
                            best = sq
                            best_j = jy * w + jx
            parents[y * w + x] = best_j
    return density, parents
