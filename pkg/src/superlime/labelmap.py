"""Superpixel label maps: the dense per-pixel partition all segmenters produce."""

import json
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ._validation import check_rgb_image

__all__ = ["LabelMap", "boundary_overlay", "densify_labels", "load_label_map", "save_label_map"]


def densify_labels(labels):
    """Relabel an integer map to the dense range {0..n-1}.

    Labels are assigned in order of first appearance in row-major scan, so the
    result is deterministic for a given input.
    """
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError(f"label map must be 2-D, got shape {labels.shape}")
    flat = labels.ravel()
    uniq, first_pos, inverse = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first_pos, kind="stable")
    remap = np.empty(len(uniq), dtype=np.int32)
    remap[order] = np.arange(len(uniq), dtype=np.int32)
    return remap[inverse].reshape(labels.shape), len(uniq)


@dataclass(frozen=True)
class LabelMap:
    """A dense partition of an image into superpixels.

    labels is (H, W) int32 with values exactly {0..n_segments-1}; every pixel
    carries one label.
    """

    labels: np.ndarray
    n_segments: int

    @classmethod
    def from_labels(cls, labels):
        dense, n = densify_labels(labels)
        return cls(labels=dense, n_segments=n)

    @property
    def shape(self):
        return self.labels.shape

    def validate(self):
        """Check the dense-partition invariant; raises ValueError on violation."""
        if self.labels.ndim != 2:
            raise ValueError("labels must be 2-D")
        seen = np.unique(self.labels)
        expected = np.arange(self.n_segments)
        if len(seen) != self.n_segments or not np.array_equal(seen, expected):
            raise ValueError(
                f"labels are not dense: expected {{0..{self.n_segments - 1}}}, got {len(seen)} distinct values"
            )
        return self

    def segment_mask(self, segment):
        if not 0 <= segment < self.n_segments:
            raise ValueError(f"segment {segment} out of range [0, {self.n_segments})")
        return self.labels == segment

    def segment_sizes(self):
        return np.bincount(self.labels.ravel(), minlength=self.n_segments)


def boundary_overlay(img, label_map, color=(255, 255, 0)):
    """Copy of img with every pixel that has a 4-neighbor of another label recolored."""
    img = check_rgb_image(img)
    labels = label_map.labels if isinstance(label_map, LabelMap) else np.asarray(label_map)
    if labels.shape != img.shape[:2]:
        raise ValueError(f"label map shape {labels.shape} does not match image {img.shape[:2]}")
    boundary = np.zeros(labels.shape, dtype=bool)
    boundary[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    boundary[:, 1:] |= labels[:, 1:] != labels[:, :-1]
    boundary[:-1, :] |= labels[:-1, :] != labels[1:, :]
    boundary[1:, :] |= labels[1:, :] != labels[:-1, :]
    out = img.copy()
    out[boundary] = np.asarray(color, dtype=np.uint8)
    return out


def save_label_map(label_map, png_path, json_path, method=None, params=None):
    """Persist a LabelMap as 16-bit grayscale PNG plus a JSON sidecar.

    Labels must fit 16 bits; maps with 65536+ segments are rejected.
    """
    label_map.validate()
    if label_map.n_segments > 65536:
        raise ValueError(f"cannot serialize {label_map.n_segments} segments in 16-bit PNG (max 65536)")
    Image.fromarray(label_map.labels.astype(np.uint16)).save(os.fspath(png_path), format="PNG")
    sidecar = {
        "n_segments": int(label_map.n_segments),
        "method": method,
        "params": params if params is not None else {},
    }
    with open(os.fspath(json_path), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_label_map(png_path, json_path):
    """Load a LabelMap written by save_label_map; returns (LabelMap, sidecar dict)."""
    with Image.open(os.fspath(png_path)) as im:
        arr = np.asarray(im).astype(np.int32)
    with open(os.fspath(json_path)) as fh:
        sidecar = json.load(fh)
    lm = LabelMap(labels=arr, n_segments=int(sidecar["n_segments"])).validate()
    return lm, sidecar
