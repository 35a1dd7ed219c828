import math
import sys
import textwrap

import numpy as np
import pytest

from superlime.classifiers import (
    AdapterCountMismatchError,
    AdapterLaunchError,
    AdapterOutputError,
    ClassifierSpec,
    ExternalClassifier,
    Prediction,
    StubClassifier,
    build_classifier,
    classify_batch,
    parse_classifier_spec,
    stub_score,
)


def solid(color, h=6, w=6):
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = color
    return img


class TestPrediction:
    def test_simplex_enforced(self):
        with pytest.raises(ValueError, match="sum"):
            Prediction(probabilities=np.array([0.6, 0.6]), class_names=("a", "b"))
        with pytest.raises(ValueError, match="lengths"):
            Prediction(probabilities=np.array([1.0]), class_names=("a", "b"))
        Prediction(probabilities=np.array([0.5, 0.5]), class_names=("a", "b"))


class TestStub:
    def test_all_black_has_zero_indicator(self):
        p = stub_score(solid((0, 0, 0)))
        assert p.probabilities[1] == 0.0
        assert p.probabilities[0] == 1.0

    def test_fully_stained_saturates(self):
        p = stub_score(solid((0, 0, 255)))
        assert p.probabilities[1] == pytest.approx(1.0 - math.exp(-40.0), abs=1e-15)

    def test_formula_at_partial_stain(self):
        img = solid((0, 0, 0), h=4, w=5)
        img[:2, :2] = (10, 10, 200)  # 4 of 20 pixels stained
        p = stub_score(img)
        assert p.probabilities[1] == pytest.approx(1.0 - math.exp(-40.0 * 4 / 20), abs=1e-15)

    def test_margin_is_strict(self):
        # blue exactly +20 over red and green does not count
        p = stub_score(solid((100, 100, 120)))
        assert p.probabilities[1] == 0.0
        p = stub_score(solid((100, 100, 121)))
        assert p.probabilities[1] > 0.0

    def test_monotone_in_stained_count(self):
        base = solid((0, 0, 0), h=5, w=5)
        last = -1.0
        for k in range(0, 26, 5):
            img = base.copy()
            img.reshape(-1, 3)[:k] = (0, 0, 255)
            p = stub_score(img).probabilities[1]
            assert p >= last
            last = p

    def test_removing_the_only_stained_patch_decreases_score(self):
        img = solid((200, 180, 190))
        img[2:4, 2:4] = (60, 40, 130)
        with_blob = stub_score(img).probabilities[1]
        img[2:4, 2:4] = (128, 128, 128)
        without = stub_score(img).probabilities[1]
        assert without < with_blob

    def test_batch_statelessness(self):
        rng = np.random.default_rng(0)
        imgs = [rng.integers(0, 256, (5, 5, 3), dtype=np.uint8) for _ in range(6)]
        stub = StubClassifier()
        joint = classify_batch(stub, imgs)
        split = classify_batch(stub, imgs[:2]) + classify_batch(stub, imgs[2:])
        assert [tuple(p.probabilities) for p in joint] == [tuple(p.probabilities) for p in split]


def write_adapter(tmp_path, body):
    script = tmp_path / "adapter.py"
    script.write_text(textwrap.dedent(body))
    return f"{sys.executable} {script}"


GOOD_ADAPTER = """
    import csv, os, sys
    from PIL import Image
    d = sys.argv[1]
    batch = os.path.join(d, "batch")
    names = sorted(os.listdir(batch))
    assert names == [f"{i:05d}.png" for i in range(len(names))], names
    with open(os.path.join(d, "predictions.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "p_0", "p_1"])
        for i, name in enumerate(names):
            img = Image.open(os.path.join(batch, name)).convert("RGB")
            mean = sum(img.getdata(0)) / (img.width * img.height) / 255.0
            w.writerow([i, 1.0 - mean, mean])
"""


class TestExternalProtocol:
    def test_round_trip_preserves_order(self, tmp_path):
        cmd = write_adapter(tmp_path, GOOD_ADAPTER)
        clf = ExternalClassifier(cmd)
        images = [solid((r, 0, 0)) for r in (0, 51, 255, 102)]
        preds = clf.predict_proba(images)
        assert len(preds) == 4
        means = [p.probabilities[1] for p in preds]
        assert means == pytest.approx([0.0, 0.2, 1.0, 0.4], abs=1e-9)

    def test_row_shortfall_is_count_mismatch(self, tmp_path):
        cmd = write_adapter(
            tmp_path,
            """
            import csv, os, sys
            d = sys.argv[1]
            n = len(os.listdir(os.path.join(d, "batch")))
            with open(os.path.join(d, "predictions.csv"), "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["index", "p_0", "p_1"])
                for i in range(n - 1):
                    w.writerow([i, 0.5, 0.5])
            """,
        )
        with pytest.raises(AdapterCountMismatchError, match="2 rows for a batch of 3"):
            ExternalClassifier(cmd).predict_proba([solid((9, 9, 9))] * 3)

    def test_bad_header_is_output_error(self, tmp_path):
        cmd = write_adapter(
            tmp_path,
            """
            import os, sys
            open(os.path.join(sys.argv[1], "predictions.csv"), "w").write("idx,a,b\\n0,0.5,0.5\\n")
            """,
        )
        with pytest.raises(AdapterOutputError, match="header"):
            ExternalClassifier(cmd).predict_proba([solid((1, 2, 3))])

    def test_simplex_violation_reports_line(self, tmp_path):
        cmd = write_adapter(
            tmp_path,
            """
            import os, sys
            open(os.path.join(sys.argv[1], "predictions.csv"), "w").write(
                "index,p_0,p_1\\n0,0.5,0.5\\n1,0.9,0.9\\n")
            """,
        )
        with pytest.raises(AdapterOutputError, match="line 3"):
            ExternalClassifier(cmd).predict_proba([solid((1, 2, 3))] * 2)

    def test_out_of_order_index_rejected(self, tmp_path):
        cmd = write_adapter(
            tmp_path,
            """
            import os, sys
            open(os.path.join(sys.argv[1], "predictions.csv"), "w").write(
                "index,p_0,p_1\\n1,0.5,0.5\\n0,0.5,0.5\\n")
            """,
        )
        with pytest.raises(AdapterOutputError, match="index 1"):
            ExternalClassifier(cmd).predict_proba([solid((1, 2, 3))] * 2)

    def test_nonzero_exit_is_launch_error(self, tmp_path):
        cmd = write_adapter(tmp_path, "import sys; sys.exit(3)")
        with pytest.raises(AdapterLaunchError, match="exited 3"):
            ExternalClassifier(cmd).predict_proba([solid((1, 2, 3))])

    def test_missing_executable_is_launch_error(self):
        with pytest.raises(AdapterLaunchError, match="launch"):
            ExternalClassifier("/nonexistent/adapter-bin").predict_proba([solid((1, 2, 3))])

    def test_missing_csv_is_output_error(self, tmp_path):
        cmd = write_adapter(tmp_path, "pass")
        with pytest.raises(AdapterOutputError, match="predictions.csv"):
            ExternalClassifier(cmd).predict_proba([solid((1, 2, 3))])


class TestSpec:
    def test_parse_and_build(self):
        spec = parse_classifier_spec("stub")
        assert spec.kind == "builtin-stub"
        assert isinstance(build_classifier(spec), StubClassifier)
        spec = parse_classifier_spec("external:python3 foo.py", class_count=3)
        assert spec.command == "python3 foo.py"
        clf = build_classifier(spec)
        assert isinstance(clf, ExternalClassifier)
        assert clf.class_names == ("class_0", "class_1", "class_2")

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            parse_classifier_spec("magic")
        with pytest.raises(ValueError):
            ClassifierSpec(kind="external-command", command="  ")
        with pytest.raises(ValueError):
            ClassifierSpec(kind="builtin-stub", class_count=1)

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            classify_batch(StubClassifier(), [])
