"""Desk-scale synthetic corpus: pink cell disks with one dark stained blob.

Each image mimics a single blood-smear cell: a pink-tinted disk on a grey
background with exactly one dark blue-purple indicator blob inside it. The
blob disk is also written as the reference relevance mask. Blob colors are
chosen so the built-in stub classifier fires on the blob and nothing else.
"""

from pathlib import Path

import numpy as np

from .imaging import save_png

__all__ = ["generate_blob_image", "generate_corpus"]

BACKGROUND = (168, 168, 168)
CELL = (235, 170, 190)
BLOB = (60, 40, 130)
NOISE_SIGMA = 4.0


def _disk(size, cy, cx, radius):
    ys, xs = np.mgrid[0:size, 0:size]
    return (ys - cy) ** 2 + (xs - cx) ** 2 <= radius * radius


def generate_blob_image(rng, size):
    """One synthetic cell image and its blob reference mask."""
    if size < 16:
        raise ValueError(f"size must be >= 16, got {size}")
    cell_r = size * rng.uniform(0.34, 0.40)
    cell_cy = size / 2 + rng.uniform(-size * 0.04, size * 0.04)
    cell_cx = size / 2 + rng.uniform(-size * 0.04, size * 0.04)
    blob_r = rng.uniform(size / 12, size / 8)

    # Blob strictly inside the cell disk.
    max_offset = cell_r - blob_r - 2
    angle = rng.uniform(0, 2 * np.pi)
    offset = max_offset * np.sqrt(rng.uniform(0, 1))
    blob_cy = cell_cy + offset * np.sin(angle)
    blob_cx = cell_cx + offset * np.cos(angle)

    img = np.empty((size, size, 3), dtype=np.float64)
    img[:] = BACKGROUND
    img[_disk(size, cell_cy, cell_cx, cell_r)] = CELL
    mask = _disk(size, blob_cy, blob_cx, blob_r)
    img[mask] = BLOB
    img += rng.normal(0.0, NOISE_SIGMA, img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8), mask


def generate_corpus(count, size, seed, out_dir):
    """Write `count` images plus `.ref.png` masks; returns the file stems."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    stems = []
    for i in range(count):
        img, mask = generate_blob_image(rng, size)
        stem = f"synth_{i:04d}"
        save_png(img, out_dir / f"{stem}.png")
        ref = np.zeros_like(img)
        ref[mask] = 255
        save_png(ref, out_dir / f"{stem}.ref.png")
        stems.append(stem)
    return stems
