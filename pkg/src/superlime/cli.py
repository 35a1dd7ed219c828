"""Command-line interface: segment, explain, evaluate, sweep, synth.

Exit codes are scripting API: 1 usage, 2 I/O, 3 compute, 4 classifier
adapter. Failed commands remove the partial outputs they created.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image as PilImage

from .classifiers import ClassifierError, build_classifier, classify_batch, parse_classifier_spec
from .evaluation import (
    SweepFailureError,
    evaluate_corpus,
    load_corpus,
    sweep,
    write_records_csv,
    write_report_json,
    write_sweep_csv,
)
from .explain import PerturbationConfig, dim_outside_mask, explain, explanation_mask, save_explanation
from .imaging import MalformedPngError, UnsupportedPngError, load_png, save_png
from .labelmap import boundary_overlay, save_label_map
from .lasso import ZeroSignalError
from .segmenters import SEGMENTERS, make_segmenter
from .synth import generate_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_COMPUTE = 3
EXIT_ADAPTER = 4

BOUNDARY_COLOR = (255, 255, 0)
DIM_FACTOR = 0.3


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; the contract says 1."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Outputs:
    """Tracks files written by a command so failures can clean them up."""

    def __init__(self):
        self.paths = []

    def path(self, p):
        p = Path(p)
        self.paths.append(p)
        return p

    def discard(self):
        for p in self.paths:
            p.unlink(missing_ok=True)


def _parse_param(text):
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ValueError(f"--param expects key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _apply_config(args, parser):
    """Merge a JSON config file as defaults; explicit flags win."""
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"{args.config}: config must be a JSON object")
    for key, value in config.items():
        if not hasattr(args, key):
            raise ValueError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, key) == parser.get_default(key):
            setattr(args, key, value)
    return args


def _perturbation_config(args):
    replacement = args.replacement
    if replacement == "grey":
        replacement = (128, 128, 128)
    elif replacement == "mean":
        pass
    else:
        replacement = tuple(int(v) for v in str(replacement).split(","))
    return PerturbationConfig(
        n_samples=args.n,
        replacement=replacement,
        on_probability=args.on_probability,
        kernel_width=args.kernel_width,
        seed=args.seed,
    )


def _save_mask(mask, path):
    PilImage.fromarray(mask.astype(np.uint8) * 255).save(str(path), format="PNG")


def _segmenter_from_args(args):
    params = dict(args.params or [])
    return make_segmenter(args.method, **params)


def cmd_segment(args, outputs):
    img = load_png(args.input)
    segmenter = _segmenter_from_args(args)
    label_map = segmenter.segment(img)
    prefix = args.out
    save_label_map(
        label_map,
        outputs.path(f"{prefix}.labels.png"),
        outputs.path(f"{prefix}.labels.json"),
        method=segmenter.method,
        params=segmenter.get_params(),
    )
    save_png(boundary_overlay(img, label_map, BOUNDARY_COLOR), outputs.path(f"{prefix}.overlay.png"))
    print(f"{args.input}: {label_map.n_segments} segments -> {prefix}.labels.png")
    return EXIT_OK


def cmd_explain(args, outputs):
    img = load_png(args.input)
    classifier = build_classifier(parse_classifier_spec(args.classifier, args.classes))
    segmenter = _segmenter_from_args(args)
    config = _perturbation_config(args)
    explanation = explain(img, classifier, segmenter, config, k=args.k, target_class=args.target_class)
    mask = explanation_mask(explanation, top=args.top)
    prefix = args.out
    save_explanation(explanation, outputs.path(f"{prefix}.explanation.json"))
    _save_mask(mask, outputs.path(f"{prefix}.mask.png"))
    save_png(dim_outside_mask(img, mask, DIM_FACTOR), outputs.path(f"{prefix}.explained.png"))
    note = "" if mask.any() else " (empty mask: no positively weighted patch)"
    print(f"{args.input}: explained class {explanation.target_class}{note} -> {prefix}.explanation.json")
    return EXIT_OK


def _method_table(names, method_params):
    methods = {}
    for name in names:
        params = (method_params or {}).get(name, {})
        methods[name] = make_segmenter(name, **params)
    return methods


def _print_report(report):
    widths = (22, 14, 14, 20, 6)
    header = ("Superpixel method", "Mean Value", "Variance", "Standard deviation", "n")
    print("".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in report.rows:
        if row["n"] == 0:
            cells = (row["method"], "-", "-", "-", "0")
        else:
            cells = (
                row["method"],
                f"{row['mean']:.8f}",
                f"{row['variance']:.8f}",
                f"{row['std']:.8f}",
                str(row["n"]),
            )
        print("".join(c.ljust(w) for c, w in zip(cells, widths)))


def cmd_evaluate(args, outputs):
    corpus = load_corpus(args.corpus)
    classifier = build_classifier(parse_classifier_spec(args.classifier, args.classes))
    methods = _method_table([m.strip() for m in args.methods.split(",") if m.strip()], args.method_params)
    config = _perturbation_config(args)
    report, records, failures = evaluate_corpus(
        corpus, methods, classifier, config, k=args.k, top=args.top, verdict_filter=args.filter
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records_csv(records, outputs.path(out_dir / "records.csv"))
    write_report_json(report, outputs.path(out_dir / "report.json"), failures)
    _print_report(report)
    if failures:
        print(f"{len(failures)} image/method failures recorded in report.json", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args, outputs):
    corpus = load_corpus(args.corpus)
    classifier = build_classifier(parse_classifier_spec(args.classifier, args.classes))
    text = args.grid.strip()
    if text.startswith(("{", "[")):
        grid = json.loads(text)
    else:
        with open(text) as fh:
            grid = json.load(fh)
    config = _perturbation_config(args)
    best, results = sweep(args.method, grid, corpus, classifier, config, k=args.k, top=args.top)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(results, outputs.path(out_dir / "sweep.csv"))
    with open(outputs.path(out_dir / "best_params.json"), "w") as fh:
        json.dump({"method": args.method, "params": best}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"best {args.method} params: {json.dumps(best, sort_keys=True)}")
    return EXIT_OK


def cmd_synth(args, outputs):
    stems = generate_corpus(args.count, args.size, args.seed, args.out)
    print(f"wrote {len(stems)} images to {args.out}")
    return EXIT_OK


def _add_classifier_flags(p):
    p.add_argument("--classifier", default="stub", help="'stub' or 'external:<command>'")
    p.add_argument("--classes", type=int, default=2, help="class count for external classifiers")


def _add_perturbation_flags(p):
    p.add_argument("--n", type=int, default=1000, help="perturbation pool size N")
    p.add_argument("--k", type=int, default=5, help="number of explanation features K")
    p.add_argument("--top", type=int, default=1, help="patches in the rendered mask")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--on-probability", dest="on_probability", type=float, default=0.5,
                   help="probability a patch stays on in a perturbed sample")
    p.add_argument("--kernel-width", dest="kernel_width", type=float, default=0.25,
                   help="proximity kernel width")
    p.add_argument("--replacement", default="grey",
                   help="'grey', 'mean', or R,G,B for switched-off patches")


def build_parser():
    parser = _Parser(prog="superlime", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    methods = sorted(SEGMENTERS)

    p = sub.add_parser("segment", help="segment an image into superpixels",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("input", help="input PNG")
    p.add_argument("--method", required=True, choices=methods)
    p.add_argument("--param", dest="params", action="append", type=_parse_param, metavar="KEY=VALUE",
                   help="segmenter parameter override (repeatable)")
    p.add_argument("--out", required=True, help="output file prefix")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("explain", help="LIME-explain one image",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("input", help="input PNG")
    p.add_argument("--method", required=True, choices=methods)
    p.add_argument("--param", dest="params", action="append", type=_parse_param, metavar="KEY=VALUE")
    _add_classifier_flags(p)
    _add_perturbation_flags(p)
    p.add_argument("--target-class", dest="target_class", type=int, default=None,
                   help="class to explain (default: the predicted class)")
    p.add_argument("--out", required=True, help="output file prefix")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("evaluate", help="score methods against reference masks",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("corpus", help="directory of <stem>.png + <stem>.ref.png")
    p.add_argument("--methods", default=",".join(methods), help="comma-separated method list")
    p.add_argument("--method-params", dest="method_params", type=json.loads, default=None,
                   help='JSON object {method: {param: value}}')
    _add_classifier_flags(p)
    _add_perturbation_flags(p)
    p.add_argument("--filter", default="true-positive", choices=["true-positive", "false-negative", "other", ""],
                   help="verdict filter for the statistics")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="grid-search one method's parameters",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("corpus", help="directory of <stem>.png + <stem>.ref.png")
    p.add_argument("--method", required=True, choices=methods)
    p.add_argument("--grid", required=True,
                   help="inline JSON (dict of lists or list of dicts) or a path to a JSON file")
    _add_classifier_flags(p)
    _add_perturbation_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic blob corpus",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--count", type=int, default=50, help="number of images")
    p.add_argument("--size", type=int, default=64, help="image side length")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_synth)

    return parser


def _exit_code_for(exc):
    if isinstance(exc, ClassifierError):
        return EXIT_ADAPTER
    if isinstance(exc, (MalformedPngError, UnsupportedPngError, FileNotFoundError, OSError)):
        return EXIT_IO
    if isinstance(exc, (ZeroSignalError, SweepFailureError)):
        return EXIT_COMPUTE
    if isinstance(exc, (ValueError, KeyError, json.JSONDecodeError)):
        return EXIT_USAGE
    return EXIT_COMPUTE


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    outputs = _Outputs()
    try:
        args = _apply_config(args, parser)
        return args.func(args, outputs)
    except Exception as exc:
        outputs.discard()
        print(f"superlime {args.command}: error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
