"""superlime: LIME visual explanations for image classifiers with
interchangeable superpixel backends and a Jaccard evaluation harness."""

from .classifiers import (
    ClassifierSpec,
    ExternalClassifier,
    Prediction,
    StubClassifier,
    build_classifier,
    classify_batch,
    stub_score,
)
from .evaluation import EvalRecord, EvalReport, evaluate_corpus, jaccard, load_corpus, sweep
from .explain import (
    Explanation,
    PerturbationConfig,
    PerturbedSample,
    explain,
    explanation_mask,
    fit_k_lasso,
    sample_pool,
    save_explanation,
)
from .imaging import gradient_magnitude, lab_to_rgb, load_png, rgb_to_lab, save_png
from .labelmap import LabelMap, boundary_overlay, load_label_map, save_label_map
from .lasso import WeightedKLasso, ZeroSignalError
from .segmenters import (
    SEGMENTERS,
    CompactWatershedSegmenter,
    FelzenszwalbSegmenter,
    QuickShiftSegmenter,
    SlicSegmenter,
    make_segmenter,
)
from .synth import generate_blob_image, generate_corpus

__version__ = "0.1.0"

__all__ = [
    "SEGMENTERS",
    "ClassifierSpec",
    "CompactWatershedSegmenter",
    "EvalRecord",
    "EvalReport",
    "Explanation",
    "ExternalClassifier",
    "FelzenszwalbSegmenter",
    "LabelMap",
    "PerturbationConfig",
    "PerturbedSample",
    "Prediction",
    "QuickShiftSegmenter",
    "SlicSegmenter",
    "StubClassifier",
    "WeightedKLasso",
    "ZeroSignalError",
    "boundary_overlay",
    "build_classifier",
    "classify_batch",
    "evaluate_corpus",
    "explain",
    "explanation_mask",
    "fit_k_lasso",
    "generate_blob_image",
    "generate_corpus",
    "gradient_magnitude",
    "jaccard",
    "lab_to_rgb",
    "load_corpus",
    "load_label_map",
    "load_png",
    "make_segmenter",
    "rgb_to_lab",
    "sample_pool",
    "save_explanation",
    "save_label_map",
    "save_png",
    "stub_score",
    "sweep",
]
