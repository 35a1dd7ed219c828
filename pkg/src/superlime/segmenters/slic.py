"""SLIC: k-means-style clustering in [l, a, b, x, y] with windowed search."""

import math

import numpy as np

from .._validation import check_count, check_positive
from ..imaging import gradient_magnitude, rgb_to_lab
from ._base import SuperpixelSegmenter, connected_components_4, seed_grid

__all__ = ["SlicSegmenter", "slic_distance"]


def slic_distance(dc, ds, step, m):
    """Combined color/spatial distance D = sqrt(dc^2 + (ds/step)^2 * m^2)."""
    return np.sqrt(dc**2 + (ds / step) ** 2 * m**2)


def _perturb_to_lowest_gradient(seeds, grad):
    """Move each seed to the lowest-gradient pixel in its 3x3 neighborhood.

    The seed keeps its place on ties, so constant images leave the grid
    untouched; among strictly lower neighbors the row-major first wins.
    """
    h, w = grad.shape
    out = seeds.copy()
    for i, (sy, sx) in enumerate(seeds):
        best = grad[sy, sx]
        for ny in range(max(0, sy - 1), min(h, sy + 2)):
            for nx in range(max(0, sx - 1), min(w, sx + 2)):
                if grad[ny, nx] < best:
                    best = grad[ny, nx]
                    out[i] = (ny, nx)
    return out


class SlicSegmenter(SuperpixelSegmenter):
    """Simple Linear Iterative Clustering.

    k cluster centers start on a regular grid with spacing S = sqrt(N/k),
    nudged off edges to the lowest-gradient spot in a 3x3 range. Pixels are
    assigned to the nearest center (distance D, see slic_distance) among
    centers whose 2S x 2S window covers them; centers move to the mean
    [l a b x y] of their pixels until the residual center movement E drops to
    the threshold or max_iters is reached. A final pass reattaches every
    4-connected fragment that lost its center to the dominant adjacent
    segment, so segments end up 4-connected.

    Parameters
    ----------
    k : requested number of superpixels (final count may differ moderately).
    m : compactness; larger emphasizes spatial over color proximity.
    max_iters : assignment/update iteration cap.
    threshold : residual total center movement (pixels) that stops iterating.
    """

    method = "slic"

    def __init__(self, k=50, m=10.0, max_iters=10, threshold=1.0):
        self.k = k
        self.m = m
        self.max_iters = max_iters
        self.threshold = threshold

    def _check_params(self, image):
        n = image.shape[0] * image.shape[1]
        if check_count(self.k, "k") > n:
            raise ValueError(f"k {self.k} exceeds pixel count {n}")
        check_positive(self.m, "m")
        check_count(self.max_iters, "max_iters")
        check_positive(self.threshold, "threshold", strict=False)

    def _segment(self, image):
        lab = rgb_to_lab(image)
        h, w = lab.shape[:2]
        k = int(self.k)
        m = float(self.m)
        step = math.sqrt(h * w / k)

        seeds = _perturb_to_lowest_gradient(seed_grid(h, w, k), gradient_magnitude(lab))
        centers_lab = lab[seeds[:, 0], seeds[:, 1]].astype(np.float64)
        centers_yx = seeds.astype(np.float64)

        ys, xs = np.mgrid[0:h, 0:w]
        labels = np.full((h, w), -1, dtype=np.int64)
        self.residuals_ = []
        for _ in range(int(self.max_iters)):
            dist = np.full((h, w), np.inf)
            labels.fill(-1)
            for c in range(k):
                cy, cx = centers_yx[c]
                y0, y1 = max(0, math.ceil(cy - step)), min(h, math.floor(cy + step) + 1)
                x0, x1 = max(0, math.ceil(cx - step)), min(w, math.floor(cx + step) + 1)
                if y0 >= y1 or x0 >= x1:
                    continue
                diff = lab[y0:y1, x0:x1] - centers_lab[c]
                dc = np.sqrt(np.sum(diff * diff, axis=-1))
                ds = np.hypot(ys[y0:y1, x0:x1] - cy, xs[y0:y1, x0:x1] - cx)
                d = slic_distance(dc, ds, step, m)
                # <= so exact-distance ties go to the later center; this keeps
                # symmetric grids symmetric (equal quadrants on constant input).
                better = d <= dist[y0:y1, x0:x1]
                dist[y0:y1, x0:x1][better] = d[better]
                labels[y0:y1, x0:x1][better] = c

            unassigned = labels < 0
            if np.any(unassigned):
                self._assign_nearest(lab, ys, xs, centers_lab, centers_yx, step, m, labels, unassigned)

            counts = np.bincount(labels.ravel(), minlength=k).astype(np.float64)
            new_lab = np.empty_like(centers_lab)
            for ch in range(3):
                new_lab[:, ch] = np.bincount(labels.ravel(), weights=lab[..., ch].ravel(), minlength=k)
            new_yx = np.stack(
                [
                    np.bincount(labels.ravel(), weights=ys.ravel().astype(np.float64), minlength=k),
                    np.bincount(labels.ravel(), weights=xs.ravel().astype(np.float64), minlength=k),
                ],
                axis=1,
            )
            occupied = counts > 0
            new_lab[occupied] /= counts[occupied, None]
            new_yx[occupied] /= counts[occupied, None]
            new_lab[~occupied] = centers_lab[~occupied]
            new_yx[~occupied] = centers_yx[~occupied]

            residual = float(np.sum(np.hypot(*(new_yx - centers_yx).T)))
            self.residuals_.append(residual)
            centers_lab, centers_yx = new_lab, new_yx
            if residual <= float(self.threshold):
                break

        return self._enforce_connectivity(labels, centers_yx)

    @staticmethod
    def _assign_nearest(lab, ys, xs, centers_lab, centers_yx, step, m, labels, where):
        """Fallback for pixels outside every search window: nearest center overall."""
        py, px = ys[where], xs[where]
        best = np.full(py.shape, np.inf)
        choice = np.zeros(py.shape, dtype=np.int64)
        for c in range(len(centers_lab)):
            diff = lab[py, px] - centers_lab[c]
            dc = np.sqrt(np.sum(diff * diff, axis=-1))
            ds = np.hypot(py - centers_yx[c, 0], px - centers_yx[c, 1])
            d = slic_distance(dc, ds, step, m)
            better = d <= best
            best[better] = d[better]
            choice[better] = c
        labels[where] = choice

    @staticmethod
    def _enforce_connectivity(labels, centers_yx):
        """Reattach every 4-connected fragment not holding its center.

        Works in rounds: every fragment touching already-finalized territory
        is absorbed into the neighboring segment with the longest shared
        boundary (ties to the smallest label), until nothing is pending.
        Fragments only ever attach to finalized regions, so segments stay
        4-connected.
        """
        h, w = labels.shape
        k = len(centers_yx)
        comp, n_comp = connected_components_4(labels)
        keeper = np.zeros(n_comp, dtype=bool)
        for c, (cy, cx) in enumerate(centers_yx):
            py = min(h - 1, max(0, int(round(cy))))
            px = min(w - 1, max(0, int(round(cx))))
            if labels[py, px] == c:
                keeper[comp[py, px]] = True
        if keeper.all():
            return labels
        if not keeper.any():
            keeper[comp[0, 0]] = True  # pathological fallback: anchor one region

        out = labels.copy()
        finalized = keeper[comp]
        while not finalized.all():
            votes = np.zeros(n_comp * k, dtype=np.int64)
            for src, dst in (
                (np.s_[1:, :], np.s_[:-1, :]),
                (np.s_[:-1, :], np.s_[1:, :]),
                (np.s_[:, 1:], np.s_[:, :-1]),
                (np.s_[:, :-1], np.s_[:, 1:]),
            ):
                pair = ~finalized[src] & finalized[dst]
                keys = comp[src][pair] * k + out[dst][pair]
                votes += np.bincount(keys, minlength=n_comp * k)
            votes = votes.reshape(n_comp, k)
            touched = votes.any(axis=1)  # only pending fragments can collect votes
            if not touched.any():
                raise RuntimeError("connectivity enforcement stalled")  # unreachable on connected grids
            new_label = votes.argmax(axis=1)  # ties resolve to the smallest label
            absorb = touched[comp] & ~finalized
            out[absorb] = new_label[comp[absorb]]
            finalized |= absorb
        return out
