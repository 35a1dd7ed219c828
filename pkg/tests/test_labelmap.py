import numpy as np
import pytest

from superlime.labelmap import LabelMap, boundary_overlay, densify_labels, load_label_map, save_label_map


def test_densify_orders_by_first_appearance():
    raw = np.array([[7, 7, 3], [3, 9, 9]])
    labels, n = densify_labels(raw)
    assert n == 3
    assert np.array_equal(labels, [[0, 0, 1], [1, 2, 2]])


def test_validate_rejects_sparse_labels():
    lm = LabelMap(labels=np.array([[0, 2], [2, 0]]), n_segments=3)
    with pytest.raises(ValueError, match="dense"):
        lm.validate()


def test_segment_sizes_and_masks():
    lm = LabelMap.from_labels(np.array([[0, 0, 1], [1, 1, 1]]))
    assert lm.segment_sizes().tolist() == [2, 4]
    assert lm.segment_mask(0).sum() == 2
    with pytest.raises(ValueError):
        lm.segment_mask(2)


class TestBoundaryOverlay:
    def test_single_segment_leaves_image_unchanged(self):
        img = np.random.default_rng(0).integers(0, 256, (4, 4, 3), dtype=np.uint8)
        lm = LabelMap.from_labels(np.zeros((4, 4), dtype=int))
        assert np.array_equal(boundary_overlay(img, lm), img)

    def test_two_vertical_halves_recolor_adjacent_columns(self):
        img = np.zeros((4, 4, 3), dtype=np.uint8)
        labels = np.zeros((4, 4), dtype=int)
        labels[:, 2:] = 1
        out = boundary_overlay(img, LabelMap.from_labels(labels), color=(255, 255, 0))
        # Exactly columns 1 and 2 have a 4-neighbor with a different label.
        expected = np.zeros((4, 4, 3), dtype=np.uint8)
        expected[:, 1] = (255, 255, 0)
        expected[:, 2] = (255, 255, 0)
        assert np.array_equal(out, expected)

    def test_dimension_mismatch_raises(self):
        img = np.zeros((4, 4, 3), dtype=np.uint8)
        lm = LabelMap.from_labels(np.zeros((3, 3), dtype=int))
        with pytest.raises(ValueError, match="match"):
            boundary_overlay(img, lm)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(8)
        lm = LabelMap.from_labels(rng.integers(0, 9, (6, 7)))
        png, js = tmp_path / "x.labels.png", tmp_path / "x.labels.json"
        save_label_map(lm, png, js, method="slic", params={"k": 9})
        back, sidecar = load_label_map(png, js)
        assert np.array_equal(back.labels, lm.labels)
        assert back.n_segments == lm.n_segments
        assert sidecar["method"] == "slic"
        assert sidecar["params"] == {"k": 9}

    def test_label_overflow_rejected(self, tmp_path):
        labels = np.arange(66000, dtype=np.int64).reshape(220, 300)
        lm = LabelMap(labels=labels, n_segments=66000)
        with pytest.raises(ValueError, match="16-bit"):
            save_label_map(lm, tmp_path / "a.png", tmp_path / "a.json")
