"""Jaccard scoring of explanation masks against reference masks, corpus
statistics shaped like the per-method mean/variance/std table, and parameter
sweeps that pick the grid point maximizing the mean Jaccard."""

import csv
import json
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path

from sklearn.model_selection import ParameterGrid

import numpy as np

from ._validation import check_binary_mask
from .classifiers import classify_batch
from .explain import PerturbationConfig, explain, explanation_mask
from .imaging import load_png
from .segmenters import make_segmenter

__all__ = [
    "EvalRecord",
    "EvalReport",
    "SweepFailureError",
    "UndefinedJaccardError",
    "evaluate_corpus",
    "jaccard",
    "load_corpus",
    "read_records_csv",
    "sweep",
    "write_records_csv",
    "write_report_json",
    "write_sweep_csv",
]

logger = logging.getLogger(__name__)

RECORDS_HEADER = ["image", "method", "verdict", "jaccard", "n_segments"]

# Quick-Shift can fall apart into per-pixel segments on flat input; such
# segmentations are flagged, not rejected.
DEGENERATE_SEGMENT_FRACTION = 0.25


class UndefinedJaccardError(ValueError):
    """Both masks empty: the coefficient is undefined."""


class SweepFailureError(RuntimeError):
    """Every grid point failed; carries the per-point reasons."""


def jaccard(a, b):
    """|a & b| / |a | b| for two binary masks of equal shape."""
    a = check_binary_mask(a, name="first mask")
    b = check_binary_mask(b, shape=a.shape, name="second mask")
    union = np.count_nonzero(a | b)
    if union == 0:
        raise UndefinedJaccardError("jaccard undefined for two empty masks")
    return float(np.count_nonzero(a & b) / union)


@dataclass(frozen=True)
class EvalRecord:
    image: str
    method: str
    verdict: str
    jaccard: float
    n_segments: int
    degenerate: bool = False


@dataclass(frozen=True)
class EvalReport:
    """Per-method mean, population variance, and std of the Jaccard scores."""

    rows: tuple
    verdict_filter: str
    variance_estimator: str = "population"

    def row(self, method):
        for r in self.rows:
            if r["method"] == method:
                return r
        raise KeyError(method)


def _verdict(prediction, positive_class):
    if prediction.argmax == positive_class:
        return "true-positive"
    if len(prediction.probabilities) == 2:
        return "false-negative"
    return "other"


def load_corpus(directory):
    """(image_id, image, reference mask) triples from a corpus directory.

    Images are `<stem>.png` with a sibling `<stem>.ref.png` binary mask;
    order is sorted by stem for determinism.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory {directory} does not exist")
    items = []
    for png in sorted(directory.glob("*.png")):
        if png.name.endswith(".ref.png"):
            continue
        ref_path = directory / f"{png.stem}.ref.png"
        if not ref_path.exists():
            raise FileNotFoundError(f"missing reference mask {ref_path} for {png.name}")
        img = load_png(png)
        ref = np.any(load_png(ref_path) > 0, axis=2)
        if ref.shape != img.shape[:2]:
            raise ValueError(f"{ref_path.name}: mask shape {ref.shape} != image {img.shape[:2]}")
        if not ref.any():
            raise ValueError(f"{ref_path.name}: reference mask has no relevant pixel")
        items.append((png.stem, img, ref))
    return items


def evaluate_corpus(
    corpus,
    methods,
    classifier,
    config=None,
    k=1,
    top=1,
    verdict_filter="true-positive",
    positive_class=1,
):
    """Explain every corpus image with every method and score the top masks.

    Per image: classify, tag the verdict, and (when it passes the filter) run
    the explanation per method with a per-image seed of config.seed XOR the
    image index, score the union of the `top` strongest positive patches
    against the reference mask. Per-image failures are recorded with their
    reason and excluded, never fatal. Returns (EvalReport, records, failures).
    """
    if not corpus:
        raise ValueError("empty corpus")
    config = config or PerturbationConfig()
    methods = dict(methods)

    records = []
    failures = []
    for index, (image_id, img, ref) in enumerate(corpus):
        try:
            prediction = classify_batch(classifier, [img])[0]
        except Exception as exc:  # per-image isolation
            failures.append({"image": image_id, "method": "*", "error": str(exc)})
            continue
        verdict = _verdict(prediction, positive_class)
        if verdict_filter and verdict != verdict_filter:
            continue
        image_config = replace(config, seed=config.seed ^ index)
        for name, segmenter in methods.items():
            try:
                explanation = explain(img, classifier, segmenter, image_config, k=k)
                mask = explanation_mask(explanation, top=top)
                score = jaccard(mask, ref) if mask.any() else 0.0
                degenerate = explanation.n_segments > img.shape[0] * img.shape[1] * DEGENERATE_SEGMENT_FRACTION
                if degenerate:
                    logger.warning(
                        "%s/%s: degenerate segmentation (%d segments on %d pixels)",
                        image_id, name, explanation.n_segments, img.shape[0] * img.shape[1],
                    )
                records.append(
                    EvalRecord(
                        image=image_id,
                        method=name,
                        verdict=verdict,
                        jaccard=score,
                        n_segments=explanation.n_segments,
                        degenerate=degenerate,
                    )
                )
            except Exception as exc:
                failures.append({"image": image_id, "method": name, "error": str(exc)})

    rows = []
    for name in methods:
        scores = np.array([r.jaccard for r in records if r.method == name], dtype=np.float64)
        if len(scores) == 0:
            rows.append({"method": name, "n": 0, "mean": None, "variance": None, "std": None})
            continue
        mean = float(scores.mean())
        variance = float(scores.var())  # population variance: divide by n
        rows.append(
            {
                "method": name,
                "n": int(len(scores)),
                "mean": mean,
                "variance": variance,
                "std": float(np.sqrt(variance)),
            }
        )
    report = EvalReport(rows=tuple(rows), verdict_filter=verdict_filter or "none")
    return report, records, failures


def sweep(method, grid, corpus, classifier, config=None, k=1, top=1):
    """Exhaustive grid search maximizing the true-positive mean Jaccard.

    grid is either a list of parameter dicts (evaluated in order) or a dict
    of lists expanded via ParameterGrid. Ties keep the earlier point. Returns
    (best_params, points) where points carries one row per grid point for
    audit; raises SweepFailureError when every point fails.
    """
    if isinstance(grid, dict):
        points = list(ParameterGrid(grid))
    else:
        points = [dict(p) for p in grid]
    if not points:
        raise ValueError("empty parameter grid")
    if not corpus:
        raise ValueError("empty corpus")

    results = []
    for point in points:
        try:
            segmenter = make_segmenter(method, **point)
            report, records, failures = evaluate_corpus(
                corpus, {method: segmenter}, classifier, config, k=k, top=top
            )
            row = report.row(method)
            if row["n"] == 0:
                reason = failures[0]["error"] if failures else "no record passed the verdict filter"
                results.append({"params": point, "mean": None, "n": 0, "error": reason})
            else:
                results.append({"params": point, "mean": row["mean"], "n": row["n"], "error": None})
        except Exception as exc:
            results.append({"params": point, "mean": None, "n": 0, "error": str(exc)})

    best = None
    for res in results:
        if res["mean"] is not None and (best is None or res["mean"] > best["mean"]):
            best = res
    if best is None:
        reasons = "; ".join(f"{r['params']}: {r['error']}" for r in results)
        raise SweepFailureError(f"every grid point failed: {reasons}")
    return best["params"], results


def write_records_csv(records, path):
    with open(os.fspath(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORDS_HEADER)
        for r in records:
            writer.writerow([r.image, r.method, r.verdict, repr(r.jaccard), r.n_segments])


def read_records_csv(path):
    with open(os.fspath(path), newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            EvalRecord(
                image=row["image"],
                method=row["method"],
                verdict=row["verdict"],
                jaccard=float(row["jaccard"]),
                n_segments=int(row["n_segments"]),
            )
            for row in reader
        ]


def write_report_json(report, path, failures=None):
    payload = {
        "verdict_filter": report.verdict_filter,
        "variance_estimator": report.variance_estimator,
        "rows": list(report.rows),
        "failures": list(failures or []),
    }
    with open(os.fspath(path), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_csv(results, path):
    keys = sorted({k for res in results for k in res["params"]})
    with open(os.fspath(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(keys + ["mean", "n", "error"])
        for res in results:
            writer.writerow(
                [repr(res["params"].get(k)) for k in keys]
                + [repr(res["mean"]) if res["mean"] is not None else "", res["n"], res["error"] or ""]
            )
