"""Black-box classifier gateway: a deterministic built-in stub and a
file-protocol adapter for external models.

External protocol (bit-exact contract): the gateway writes the batch as
``<dir>/batch/NNNNN.png`` (5 digits, 0-based) into a fresh temporary
directory and runs ``command <dir>``. The adapter must write
``<dir>/predictions.csv`` with header ``index,p_0,p_1[,p_2...]``, one row per
image in index order, and exit 0. Every row must lie on the probability
simplex within 1e-6.
"""

import csv
import math
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_rgb_image
from .imaging import save_png

__all__ = [
    "AdapterCountMismatchError",
    "AdapterLaunchError",
    "AdapterOutputError",
    "ClassifierError",
    "ClassifierSpec",
    "ExternalClassifier",
    "Prediction",
    "StubClassifier",
    "build_classifier",
    "classify_batch",
    "parse_classifier_spec",
    "stub_score",
]

SIMPLEX_TOL = 1e-6

# Stub constants are contractual: golden tests depend on them.
STUB_BLUE_MARGIN = 20
STUB_RATE = 40.0
STUB_CLASS_NAMES = ("clean", "indicator")


class ClassifierError(RuntimeError):
    """Base for gateway failures."""


class AdapterLaunchError(ClassifierError):
    """External command could not be started or exited nonzero."""


class AdapterOutputError(ClassifierError):
    """predictions.csv is missing, malformed, or off the simplex."""


class AdapterCountMismatchError(ClassifierError):
    """Row count does not match the submitted batch."""


@dataclass(frozen=True)
class Prediction:
    """Class probabilities for one image."""

    probabilities: np.ndarray
    class_names: tuple

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        object.__setattr__(self, "probabilities", probs)
        if probs.ndim != 1 or len(probs) != len(self.class_names):
            raise ValueError("probabilities and class_names lengths differ")
        if np.any(probs < -SIMPLEX_TOL) or np.any(probs > 1 + SIMPLEX_TOL):
            raise ValueError(f"probabilities outside [0, 1]: {probs}")
        if abs(float(probs.sum()) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")

    @property
    def argmax(self):
        return int(np.argmax(self.probabilities))


@dataclass(frozen=True)
class ClassifierSpec:
    """Declarative classifier choice: the built-in stub or an external command."""

    kind: str  # "builtin-stub" | "external-command"
    command: str = ""
    class_count: int = 2

    def __post_init__(self):
        if self.kind not in ("builtin-stub", "external-command"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.kind == "external-command" and not self.command.strip():
            raise ValueError("external-command classifier needs a non-empty command")
        if self.class_count < 2:
            raise ValueError("class_count must be >= 2")


def parse_classifier_spec(text, class_count=2):
    """Parse a CLI-style classifier spec: 'stub' or 'external:<command>'."""
    if text == "stub":
        return ClassifierSpec(kind="builtin-stub")
    if text.startswith("external:"):
        return ClassifierSpec(kind="external-command", command=text[len("external:"):], class_count=class_count)
    raise ValueError(f"classifier spec must be 'stub' or 'external:<command>', got {text!r}")


def stub_score(img):
    """Deterministic stand-in for a trained network.

    s is the fraction of pixels whose blue channel exceeds both red and green
    by more than 20 (a stained-blob detector); p(indicator) = 1 - exp(-40 s).
    """
    img = check_rgb_image(img).astype(np.int32)
    stained = (img[..., 2] > img[..., 0] + STUB_BLUE_MARGIN) & (img[..., 2] > img[..., 1] + STUB_BLUE_MARGIN)
    s = float(np.count_nonzero(stained)) / stained.size
    p = 1.0 - math.exp(-STUB_RATE * s)
    return Prediction(probabilities=np.array([1.0 - p, p]), class_names=STUB_CLASS_NAMES)


class StubClassifier:
    """Pure, reentrant built-in classifier; see stub_score."""

    class_names = STUB_CLASS_NAMES

    def predict_proba(self, images):
        return [stub_score(img) for img in images]


class ExternalClassifier:
    """Runs an external command over a temp-directory batch (serialized per instance)."""

    def __init__(self, command, class_count=2):
        if not str(command).strip():
            raise ValueError("command must be non-empty")
        self.command = str(command)
        self.class_count = int(class_count)
        self.class_names = tuple(f"class_{i}" for i in range(self.class_count))

    def predict_proba(self, images):
        if not images:
            raise ValueError("empty batch")
        with tempfile.TemporaryDirectory(prefix="superlime-batch-") as tmp:
            tmp = Path(tmp)
            batch_dir = tmp / "batch"
            batch_dir.mkdir()
            for i, img in enumerate(images):
                save_png(check_rgb_image(img), batch_dir / f"{i:05d}.png")
            argv = shlex.split(self.command) + [str(tmp)]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True)
            except OSError as exc:
                raise AdapterLaunchError(f"cannot launch adapter {argv[0]!r}: {exc}") from exc
            if proc.returncode != 0:
                raise AdapterLaunchError(
                    f"adapter exited {proc.returncode}: {proc.stderr.strip() or proc.stdout.strip()}"
                )
            return _read_predictions(tmp / "predictions.csv", len(images), self.class_names)


def _read_predictions(path, expected_rows, class_names):
    if not path.exists():
        raise AdapterOutputError(f"adapter wrote no {path.name}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise AdapterOutputError(f"{path.name} is empty") from None
        expected_header = ["index"] + [f"p_{i}" for i in range(len(class_names))]
        if [h.strip() for h in header] != expected_header:
            raise AdapterOutputError(f"{path.name} header {header} != expected {expected_header}")
        predictions = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 1 + len(class_names):
                raise AdapterOutputError(f"{path.name} line {line_no}: expected {1 + len(class_names)} fields, got {len(row)}")
            try:
                idx = int(row[0])
                probs = np.array([float(v) for v in row[1:]], dtype=np.float64)
            except ValueError as exc:
                raise AdapterOutputError(f"{path.name} line {line_no}: {exc}") from exc
            if idx != len(predictions):
                raise AdapterOutputError(f"{path.name} line {line_no}: index {idx}, expected {len(predictions)}")
            try:
                predictions.append(Prediction(probabilities=probs, class_names=class_names))
            except ValueError as exc:
                raise AdapterOutputError(f"{path.name} line {line_no}: {exc}") from exc
    if len(predictions) != expected_rows:
        raise AdapterCountMismatchError(
            f"adapter returned {len(predictions)} rows for a batch of {expected_rows}"
        )
    return predictions


def build_classifier(spec):
    """Materialize a ClassifierSpec into a classifier object."""
    if spec.kind == "builtin-stub":
        return StubClassifier()
    return ExternalClassifier(spec.command, spec.class_count)


def classify_batch(classifier, images):
    """One Prediction per image, order-preserving.

    Accepts a classifier object or a ClassifierSpec.
    """
    if isinstance(classifier, ClassifierSpec):
        classifier = build_classifier(classifier)
    if not images:
        raise ValueError("empty batch")
    predictions = classifier.predict_proba(list(images))
    if len(predictions) != len(images):
        raise AdapterCountMismatchError(f"{len(predictions)} predictions for {len(images)} images")
    return predictions
