"""Input validation helpers shared by all estimators and pipeline functions."""

import numpy as np


def check_rgb_image(img):
    """Validate an 8-bit RGB image and return it as a (H, W, 3) uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected RGB image of shape (H, W, 3), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image dimensions must be positive, got {arr.shape[:2]}")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"expected uint8 pixel data, got dtype {arr.dtype}")
    return arr


def check_lab_image(img):
    """Validate a CIELAB image and return it as a (H, W, 3) float64 array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected Lab image of shape (H, W, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Lab image contains non-finite values")
    return arr


def check_binary_mask(mask, shape=None, name="mask"):
    """Validate a binary mask and return it as a (H, W) bool array."""
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} shape {arr.shape} does not match expected {tuple(shape)}")
    return arr.astype(bool)


def check_positive(value, name, strict=True):
    v = float(value)
    if not np.isfinite(v) or (v <= 0 if strict else v < 0):
        bound = "> 0" if strict else ">= 0"
        raise ValueError(f"{name} must be finite and {bound}, got {value}")
    return v


def check_count(value, name, minimum=1):
    v = int(value)
    if v != value or v < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value}")
    return v
