"""The four superpixel backends, exposed as scikit-learn-style estimators."""

from ._base import SuperpixelSegmenter, connected_components_4, seed_grid
from .felzenszwalb import FelzenszwalbSegmenter
from .quickshift import QuickShiftSegmenter
from .slic import SlicSegmenter, slic_distance
from .watershed import CompactWatershedSegmenter

SEGMENTERS = {
    FelzenszwalbSegmenter.method: FelzenszwalbSegmenter,
    QuickShiftSegmenter.method: QuickShiftSegmenter,
    SlicSegmenter.method: SlicSegmenter,
    CompactWatershedSegmenter.method: CompactWatershedSegmenter,
}


def make_segmenter(method, **params):
    """Instantiate a segmenter by registry name, validating parameter names."""
    if method not in SEGMENTERS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(SEGMENTERS)}")
    cls = SEGMENTERS[method]
    known = cls().get_params()
    unknown = set(params) - set(known)
    if unknown:
        raise ValueError(f"unknown {method} parameter(s) {sorted(unknown)}; valid: {sorted(known)}")
    return cls(**params)


__all__ = [
    "SEGMENTERS",
    "CompactWatershedSegmenter",
    "FelzenszwalbSegmenter",
    "QuickShiftSegmenter",
    "SlicSegmenter",
    "SuperpixelSegmenter",
    "connected_components_4",
    "make_segmenter",
    "seed_grid",
    "slic_distance",
]
