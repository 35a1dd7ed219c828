"""Quick-Shift: mode seeking in joint (space, Lab) feature space."""

import math

import numpy as np

from .._validation import check_positive
from ..imaging import rgb_to_lab
from ._base import SuperpixelSegmenter

__all__ = ["QuickShiftSegmenter"]


def _shift_slices(h, w, dy, dx):
    """Index slices so that, per pixel i in the first view, j = i + (dy, dx)."""
    iy = slice(max(0, -dy), h - max(0, dy))
    ix = slice(max(0, -dx), w - max(0, dx))
    jy = slice(max(0, dy), h - max(0, -dy))
    jx = slice(max(0, dx), w - max(0, -dx))
    return (iy, ix), (jy, jx)


def _color_sq_dist(lab, iyx, jyx):
    """Sum over Lab channels of (lab_j - lab_i)^2, channel by channel."""
    (iy, ix), (jy, jx) = iyx, jyx
    sq = lab[jy, jx, 0] - lab[iy, ix, 0]
    np.multiply(sq, sq, out=sq)
    for c in (1, 2):
        d = lab[jy, jx, c] - lab[iy, ix, c]
        np.multiply(d, d, out=d)
        sq += d
    return sq


def quickshift_density(lab, kernel_size, spatial_weight):
    """Parzen density over features [lam*x, lam*y, L, a, b].

    P(i) sums exp(-||F_i - F_j||^2 / (2 sigma^2)) over all j (including i)
    within Chebyshev spatial distance ceil(3 sigma). Accumulation runs in
    row-major j order per pixel.
    """
    h, w = lab.shape[:2]
    r = math.ceil(3 * kernel_size)
    lam2 = spatial_weight * spatial_weight
    denom = 2.0 * kernel_size * kernel_size
    density = np.zeros((h, w), dtype=np.float64)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if abs(dy) >= h or abs(dx) >= w:
                continue
            iyx, jyx = _shift_slices(h, w, dy, dx)
            sq = _color_sq_dist(lab, iyx, jyx)
            sq += lam2 * (dy * dy + dx * dx)
            np.negative(sq, out=sq)
            sq /= denom
            np.exp(sq, out=sq)
            density[iyx] += sq
    return density


def quickshift_parents(lab, density, max_dist, spatial_weight):
    """Flat parent index per pixel, -1 for roots.

    The parent is the feature-space-nearest pixel of strictly higher density
    within Euclidean spatial distance max_dist (squared distances compared,
    which selects the same argmin); distance ties keep the smaller row-major
    index, guaranteed by the ascending scan order.
    """
    h, w = lab.shape[:2]
    r = math.floor(max_dist)
    lam2 = spatial_weight * spatial_weight
    max_sq = max_dist * max_dist
    best_sq = np.full((h, w), np.inf)
    parent = np.full((h, w), -1, dtype=np.int64)
    flat = np.arange(h * w, dtype=np.int64).reshape(h, w)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if (dy == 0 and dx == 0) or dy * dy + dx * dx > max_sq:
                continue
            if abs(dy) >= h or abs(dx) >= w:
                continue
            iyx, jyx = _shift_slices(h, w, dy, dx)
            sq = _color_sq_dist(lab, iyx, jyx)
            sq += lam2 * (dy * dy + dx * dx)
            closer = density[jyx] > density[iyx]
            closer &= sq < best_sq[iyx]
            bd = best_sq[iyx]
            bp = parent[iyx]
            bd[closer] = sq[closer]
            bp[closer] = flat[jyx][closer]
    return parent.ravel()


def resolve_tree_roots(parent):
    """Root index for every node of a parent forest (roots marked -1)."""
    par = parent.copy()
    own = np.arange(par.size, dtype=np.int64)
    par[par < 0] = own[par < 0]
    while True:
        nxt = par[par]
        if np.array_equal(nxt, par):
            return par
        par = nxt


class QuickShiftSegmenter(SuperpixelSegmenter):
    """Quick-Shift superpixels: each pixel links to its nearest neighbor of
    strictly higher density; every link tree becomes one segment.

    Neither the number nor the size of segments can be requested; both are
    outputs. Constant regions make all of a plateau's pixels roots, which can
    degenerate into per-pixel segments (the evaluation harness flags this).

    Parameters
    ----------
    kernel_size : bandwidth sigma of the Gaussian density estimate.
    max_dist : largest spatial length of a parent link, in pixels.
    spatial_weight : scale of the (x, y) components in the feature vector
        [lam*x, lam*y, L, a, b].
    random_state : reserved for optional density jitter; the default
        (jitter disabled) ignores it and the output is deterministic.
    """

    method = "quickshift"

    def __init__(self, kernel_size=2.0, max_dist=10.0, spatial_weight=1.0, random_state=0):
        self.kernel_size = kernel_size
        self.max_dist = max_dist
        self.spatial_weight = spatial_weight
        self.random_state = random_state

    def _check_params(self, image):
        check_positive(self.kernel_size, "kernel_size")
        check_positive(self.max_dist, "max_dist")
        check_positive(self.spatial_weight, "spatial_weight")

    def _segment(self, image):
        lab = rgb_to_lab(image)
        h, w = lab.shape[:2]
        self.density_ = quickshift_density(lab, float(self.kernel_size), float(self.spatial_weight))
        self.parents_ = quickshift_parents(
            lab, self.density_, float(self.max_dist), float(self.spatial_weight)
        )
        return resolve_tree_roots(self.parents_).reshape(h, w)
