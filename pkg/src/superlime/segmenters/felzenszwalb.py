"""Graph-based segmentation after Felzenszwalb & Huttenlocher."""

import numpy as np
from numba import njit
from scipy import ndimage

from .._validation import check_count, check_positive
from ._base import SuperpixelSegmenter

__all__ = ["FelzenszwalbSegmenter"]


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _merge(edge_a, edge_b, weights, order, scale, min_size, n_nodes):
    parent = np.arange(n_nodes, dtype=np.int64)
    size = np.ones(n_nodes, dtype=np.int64)
    # Int(C): largest internal edge weight of each component, at its root.
    internal = np.zeros(n_nodes, dtype=np.float64)

    for t in range(order.size):
        e = order[t]
        ra = _find(parent, edge_a[e])
        rb = _find(parent, edge_b[e])
        if ra == rb:
            continue
        w = weights[e]
        if w <= internal[ra] + scale / size[ra] and w <= internal[rb] + scale / size[rb]:
            parent[rb] = ra
            size[ra] += size[rb]
            internal[ra] = w  # edges ascend, so w >= both previous internals

    # Fuse undersized components across their cheapest boundary edges.
    for t in range(order.size):
        e = order[t]
        ra = _find(parent, edge_a[e])
        rb = _find(parent, edge_b[e])
        if ra != rb and (size[ra] < min_size or size[rb] < min_size):
            parent[rb] = ra
            size[ra] += size[rb]

    roots = np.empty(n_nodes, dtype=np.int64)
    for i in range(n_nodes):
        roots[i] = _find(parent, i)
    return roots


def _grid_edges_8(img):
    """8-connected grid edges with Euclidean RGB weights, in fixed scan order."""
    h, w = img.shape[:2]
    idx = np.arange(h * w, dtype=np.int64).reshape(h, w)

    def block(sl_a, sl_b):
        diff = img[sl_a] - img[sl_b]
        return (
            idx[sl_a].ravel(),
            idx[sl_b].ravel(),
            np.sqrt(np.sum(diff * diff, axis=-1)).ravel(),
        )

    right = block(np.s_[:, :-1], np.s_[:, 1:])
    down = block(np.s_[:-1, :], np.s_[1:, :])
    down_right = block(np.s_[:-1, :-1], np.s_[1:, 1:])
    down_left = block(np.s_[:-1, 1:], np.s_[1:, :-1])
    ea = np.concatenate([right[0], down[0], down_right[0], down_left[0]])
    eb = np.concatenate([right[1], down[1], down_right[1], down_left[1]])
    ws = np.concatenate([right[2], down[2], down_right[2], down_left[2]])
    return ea, eb, ws


class FelzenszwalbSegmenter(SuperpixelSegmenter):
    """Felzenszwalb-Huttenlocher segmentation on an 8-connected RGB grid graph.

    Edges are processed in ascending weight order; two components merge when
    the joining edge is no heavier than min(Int(C) + scale/|C|) of either
    side. Components below min_size are then fused into their cheapest
    neighbor. The method offers no direct control over segment count or size.

    Parameters
    ----------
    scale : merge threshold strength (k); higher gives larger segments.
    sigma : std of the Gaussian pre-smoothing, in pixels.
    min_size : smallest allowed segment, enforced by the fusing post-pass.
    """

    method = "felzenszwalb"

    def __init__(self, scale=100.0, sigma=0.8, min_size=20):
        self.scale = scale
        self.sigma = sigma
        self.min_size = min_size

    def _check_params(self, image):
        check_positive(self.scale, "scale")
        check_positive(self.sigma, "sigma", strict=False)
        n = image.shape[0] * image.shape[1]
        if check_count(self.min_size, "min_size") > n:
            raise ValueError(f"min_size {self.min_size} exceeds pixel count {n}")

    def _segment(self, image):
        img = image.astype(np.float64)
        if self.sigma > 0:
            img = ndimage.gaussian_filter(img, sigma=(self.sigma, self.sigma, 0), mode="nearest")
        ea, eb, ws = _grid_edges_8(img)
        order = np.argsort(ws, kind="stable")
        h, w = image.shape[:2]
        roots = _merge(ea, eb, ws, order, float(self.scale), int(self.min_size), h * w)
        return roots.reshape(h, w)
