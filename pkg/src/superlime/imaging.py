"""Raster basics: sRGB/CIELAB conversion, Lab gradients, and PNG I/O.

Images are (H, W, 3) uint8 arrays in sRGB; Lab images are (H, W, 3) float64
with L in [0, 100]; gradient maps are (H, W) float64, non-negative.
"""

import io
import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from ._validation import check_lab_image, check_rgb_image

__all__ = [
    "MalformedPngError",
    "UnsupportedPngError",
    "rgb_to_lab",
    "lab_to_rgb",
    "gradient_magnitude",
    "load_png",
    "save_png",
]


class UnsupportedPngError(ValueError):
    """PNG is valid but uses an unsupported bit depth or pixel layout."""


class MalformedPngError(ValueError):
    """File is not a decodable PNG (bad signature, truncated, corrupt)."""


# sRGB (IEC 61966-2-1) linear-RGB -> XYZ, D65 2-degree observer.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
# Row sums, so that pure white maps exactly to L=100, a=b=0.
_WHITE = _RGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def rgb_to_lab(img):
    """Convert an 8-bit sRGB image to CIELAB (D65 white point)."""
    img = check_rgb_image(img)
    c = img.astype(np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_rgb(lab):
    """Convert a CIELAB image back to 8-bit sRGB, clipping out-of-gamut values."""
    lab = check_lab_image(lab)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    t = np.where(f > _DELTA, f**3, 3 * _DELTA**2 * (f - 4.0 / 29.0))
    linear = (t * _WHITE) @ _XYZ_TO_RGB.T
    linear = np.clip(linear, 0.0, 1.0)
    c = np.where(linear <= 0.0031308, 12.92 * linear, 1.055 * linear ** (1 / 2.4) - 0.055)
    return np.rint(np.clip(c, 0.0, 1.0) * 255.0).astype(np.uint8)


def gradient_magnitude(lab):
    """Squared central-difference gradient of a Lab image.

    G(x, y) = ||I(x+1,y) - I(x-1,y)||^2 + ||I(x,y+1) - I(x,y-1)||^2 summed
    over the Lab channels; borders use clamp-replicated neighbors.
    """
    lab = check_lab_image(lab)
    padded = np.pad(lab, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = padded[1:-1, 2:] - padded[1:-1, :-2]
    dy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return np.sum(dx * dx, axis=2) + np.sum(dy * dy, axis=2)


def load_png(path):
    """Load an 8-bit RGB/RGBA PNG as a (H, W, 3) uint8 array (alpha discarded).

    Raises OSError for I/O failures, UnsupportedPngError for 16-bit or other
    unsupported layouts, MalformedPngError for undecodable files.
    """
    path = os.fspath(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 33 or not data.startswith(_PNG_SIGNATURE):
        raise MalformedPngError(f"{path}: not a PNG file")
    bit_depth = data[24]
    if bit_depth > 8:
        raise UnsupportedPngError(f"{path}: unsupported bit depth {bit_depth} (only 8-bit supported)")
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.mode in ("RGB", "RGBA"):
                arr = np.asarray(im)
            elif im.mode in ("L", "LA", "P", "1"):
                arr = np.asarray(im.convert("RGB"))
            else:
                raise UnsupportedPngError(f"{path}: unsupported pixel mode {im.mode}")
    except UnidentifiedImageError as exc:
        raise MalformedPngError(f"{path}: cannot decode PNG: {exc}") from exc
    except OSError as exc:
        # Decoding happens on in-memory bytes, so OSError here means corruption.
        raise MalformedPngError(f"{path}: corrupt or truncated PNG: {exc}") from exc
    if arr.ndim == 3 and arr.shape[2] == 4:
        arr = arr[:, :, :3]
    return check_rgb_image(arr)


def save_png(img, path):
    """Write a (H, W, 3) uint8 image as an 8-bit RGB PNG."""
    img = check_rgb_image(img)
    Image.fromarray(img).save(os.fspath(path), format="PNG")
