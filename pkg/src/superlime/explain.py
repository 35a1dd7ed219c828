"""LIME for images: perturbation pool, proximity weighting, K-Lasso surrogate.

A pool of N perturbed versions of the image is built by switching superpixels
off (replaced by a fixed color or the patch mean); the black-box classifier
scores every version, a proximity kernel weights each sample by closeness to
the original, and a two-stage weighted K-Lasso produces per-patch weights.
"""

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_count, check_positive, check_rgb_image
from .classifiers import classify_batch
from .labelmap import LabelMap
from .lasso import WeightedKLasso

__all__ = [
    "Explanation",
    "PerturbationConfig",
    "PerturbedSample",
    "dim_outside_mask",
    "explain",
    "explanation_mask",
    "explanation_to_dict",
    "fit_k_lasso",
    "proximity_to_original",
    "render_perturbation",
    "sample_pool",
    "save_explanation",
]

GREY = (128, 128, 128)


@dataclass(frozen=True)
class PerturbationConfig:
    """Knobs of the perturbation pool.

    replacement is either the string "mean" (per-patch mean color) or an RGB
    triple used for every switched-off patch (default grey).
    """

    n_samples: int = 1000
    replacement: object = GREY
    on_probability: float = 0.5
    kernel_width: float = 0.25
    seed: int = 0

    def __post_init__(self):
        check_count(self.n_samples, "n_samples", minimum=2)
        if not 0 < self.on_probability < 1:
            raise ValueError(f"on_probability must be in (0, 1), got {self.on_probability}")
        check_positive(self.kernel_width, "kernel_width")
        if self.replacement != "mean":
            color = tuple(int(c) for c in self.replacement)
            if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
                raise ValueError(f"replacement must be 'mean' or an RGB triple, got {self.replacement!r}")
            object.__setattr__(self, "replacement", color)


@dataclass(frozen=True)
class PerturbedSample:
    z_prime: np.ndarray  # one bit per superpixel, 1 = patch kept
    prediction: object
    proximity: float


@dataclass(frozen=True)
class Explanation:
    """Sparse linear surrogate around one image: the K selected patches.

    selected is ordered by descending |weight| (ties to the smaller segment
    id); together with the intercept it embodies the fitted linear model.
    """

    target_class: int
    selected: tuple
    intercept: float
    label_map: LabelMap
    metadata: dict = field(default_factory=dict)

    @property
    def n_segments(self):
        return self.label_map.n_segments


def proximity_to_original(z, kernel_width):
    """exp(-d^2 / kernel_width^2) with d the cosine distance from z to all-ones.

    For binary z with s bits on out of n, d = 1 - sqrt(s/n); the all-zero
    vector is assigned the maximal distance 1.
    """
    z = np.asarray(z, dtype=np.float64)
    s = float(z.sum())
    d = 1.0 if s == 0 else 1.0 - math.sqrt(s / z.size)
    return math.exp(-(d * d) / (kernel_width * kernel_width))


def _patch_mean_colors(img, label_map):
    flat = img.reshape(-1, 3).astype(np.float64)
    labels = label_map.labels.ravel()
    counts = np.bincount(labels, minlength=label_map.n_segments).astype(np.float64)
    means = np.stack(
        [np.bincount(labels, weights=flat[:, c], minlength=label_map.n_segments) for c in range(3)],
        axis=1,
    )
    return np.rint(means / counts[:, None]).astype(np.uint8)


def render_perturbation(img, label_map, z, replacement=GREY, mean_colors=None):
    """Image with every switched-off patch's pixels replaced.

    Pixels of kept patches stay byte-identical to the original.
    """
    img = check_rgb_image(img)
    z = np.asarray(z)
    if len(z) != label_map.n_segments:
        raise ValueError(f"z has {len(z)} bits for {label_map.n_segments} segments")
    if replacement == "mean":
        colors = _patch_mean_colors(img, label_map) if mean_colors is None else mean_colors
    else:
        colors = np.tile(np.asarray(replacement, dtype=np.uint8), (label_map.n_segments, 1))
    keep = z.astype(bool)[label_map.labels]
    return np.where(keep[..., None], img, colors[label_map.labels])


def sample_pool(label_map, img, config, classifier):
    """Build the pool of perturbed samples and classify it in one batch.

    The first sample is always the unperturbed all-ones anchor (proximity 1);
    the remaining bits are i.i.d. Bernoulli(on_probability) from the seeded
    generator. Gateway errors carry the offending row index where one exists.
    """
    img = check_rgb_image(img)
    n_seg = label_map.n_segments
    rng = np.random.default_rng(config.seed)
    bits = np.ones((config.n_samples, n_seg), dtype=np.uint8)
    bits[1:] = rng.random((config.n_samples - 1, n_seg)) < config.on_probability

    mean_colors = _patch_mean_colors(img, label_map) if config.replacement == "mean" else None
    images = [
        render_perturbation(img, label_map, z, config.replacement, mean_colors) for z in bits
    ]
    predictions = classify_batch(classifier, images)
    return [
        PerturbedSample(
            z_prime=bits[i],
            prediction=predictions[i],
            proximity=proximity_to_original(bits[i], config.kernel_width),
        )
        for i in range(config.n_samples)
    ]


def fit_k_lasso(samples, k, target_class, label_map, metadata=None):
    """Fit the sparse surrogate on a sampled pool; returns the Explanation.

    Raises ZeroSignalError when every pool response is identical.
    """
    if len(samples) < 2:
        raise ValueError("need at least 2 samples")
    k = check_count(k, "k")
    X = np.stack([s.z_prime for s in samples]).astype(np.float64)
    y = np.array([s.prediction.probabilities[target_class] for s in samples])
    weights = np.array([s.proximity for s in samples])

    model = WeightedKLasso(k=k).fit(X, y, sample_weight=weights)
    order = sorted(
        range(len(model.selected_)),
        key=lambda i: (-abs(float(model.coef_[i])), int(model.selected_[i])),
    )
    selected = tuple((int(model.selected_[i]), float(model.coef_[i])) for i in order)
    return Explanation(
        target_class=int(target_class),
        selected=selected,
        intercept=float(model.intercept_),
        label_map=label_map,
        metadata=dict(metadata or {}),
    )


def explain(img, classifier, segmenter, config=None, k=5, target_class=None):
    """Segment, sample, and fit: the end-to-end pipeline for one image.

    target_class defaults to the argmax class of the unperturbed prediction,
    i.e. the decision being explained.
    """
    config = config or PerturbationConfig()
    img = check_rgb_image(img)
    label_map = segmenter.segment(img)
    samples = sample_pool(label_map, img, config, classifier)
    if target_class is None:
        target_class = samples[0].prediction.argmax
    metadata = {
        "method": segmenter.method,
        "params": segmenter.get_params(),
        "seed": config.seed,
        "n_samples": config.n_samples,
        "k": int(k),
    }
    return fit_k_lasso(samples, k, target_class, label_map, metadata)


def explanation_mask(explanation, top=1):
    """Union mask of the `top` highest-|weight| positively weighted patches.

    An all-false mask (no positively weighted patch) is a valid outcome, not
    an error; callers should treat mask.any() as the empty-mask flag.
    """
    top = check_count(top, "top")
    mask = np.zeros(explanation.label_map.shape, dtype=bool)
    positive = [seg for seg, wgt in explanation.selected if wgt > 0]
    for seg in positive[:top]:
        mask |= explanation.label_map.labels == seg
    return mask


def dim_outside_mask(img, mask, factor=0.3):
    """Copy of img with pixels outside the mask dimmed to `factor` brightness."""
    img = check_rgb_image(img)
    out = img.copy()
    dimmed = np.rint(img.astype(np.float64) * factor).astype(np.uint8)
    out[~mask] = dimmed[~mask]
    return out


def explanation_to_dict(explanation):
    return {
        "method": explanation.metadata.get("method"),
        "params": explanation.metadata.get("params", {}),
        "seed": explanation.metadata.get("seed"),
        "k": explanation.metadata.get("k"),
        "target_class": explanation.target_class,
        "intercept": explanation.intercept,
        "selected": [{"segment": seg, "weight": wgt} for seg, wgt in explanation.selected],
        "n_segments": explanation.n_segments,
    }


def save_explanation(explanation, path):
    with open(os.fspath(path), "w") as fh:
        json.dump(explanation_to_dict(explanation), fh, indent=2, sort_keys=True)
        fh.write("\n")
