"""Shared machinery for the superpixel estimators."""

import math

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from sklearn.base import BaseEstimator

from .._validation import check_rgb_image
from ..labelmap import LabelMap, densify_labels

__all__ = ["SuperpixelSegmenter", "seed_grid", "connected_components_4"]


def seed_grid(height, width, n_seeds):
    """Place exactly n_seeds on a regular grid with spacing ~ sqrt(H*W / n).

    Rows and columns are spread evenly; when n_seeds does not factor into a
    full rectangle the last row is truncated. Returns an (n, 2) int array of
    (row, col) pixel positions, in row-major order, all distinct.
    """
    n = int(n_seeds)
    if n < 1 or n > height * width:
        raise ValueError(f"n_seeds must be in [1, {height * width}], got {n_seeds}")
    step = math.sqrt(height * width / n)
    ny = max(1, round(height / step))
    ny = max(ny, math.ceil(n / width))
    ny = min(ny, height, n)
    nx = math.ceil(n / ny)
    rows = ((np.arange(ny) + 0.5) * height / ny).astype(np.int64)
    cols = ((np.arange(nx) + 0.5) * width / nx).astype(np.int64)
    grid = np.stack(np.meshgrid(rows, cols, indexing="ij"), axis=-1).reshape(-1, 2)
    return grid[:n]


def connected_components_4(labels):
    """4-connected components of a label image, numbered by first appearance.

    Returns (component_map, n_components); pixels are in the same component
    iff they are 4-connected through pixels of equal label.
    """
    h, w = labels.shape
    n = h * w
    idx = np.arange(n, dtype=np.int64).reshape(h, w)
    same_h = labels[:, :-1] == labels[:, 1:]
    same_v = labels[:-1, :] == labels[1:, :]
    rows = np.concatenate([idx[:, :-1][same_h], idx[:-1, :][same_v]])
    cols = np.concatenate([idx[:, 1:][same_h], idx[1:, :][same_v]])
    graph = sparse.coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, comp = csgraph.connected_components(graph, directed=False)
    comp_map, n_comp = densify_labels(comp.reshape(h, w))
    return comp_map, n_comp


class SuperpixelSegmenter(BaseEstimator):
    """Base class for the four superpixel backends.

    Subclasses implement _segment(image) returning an integer label image;
    fit() densifies it and stores labels_ / n_segments_. Parameters follow the
    scikit-learn convention: stored verbatim in __init__, validated at fit
    time, discoverable through get_params for sweeps and config files.
    """

    method = None

    def _segment(self, image):
        raise NotImplementedError

    def _check_params(self, image):
        """Subclass hook: raise ValueError on invalid parameters."""

    def fit(self, image, y=None):
        image = check_rgb_image(image)
        self._check_params(image)
        raw = self._segment(image)
        labels, n = densify_labels(raw)
        self.labels_ = labels
        self.n_segments_ = n
        return self

    def fit_predict(self, image, y=None):
        return self.fit(image).labels_

    def segment(self, image):
        """Segment an image and return the resulting LabelMap."""
        self.fit(image)
        return LabelMap(labels=self.labels_, n_segments=self.n_segments_)
