"""Unit tests for datasets: IDX parsing, MNIST loading and synthetic generators."""

import gzip

import numpy as np
import pytest

from src.datasets import (
    Dataset,
    independent_batch,
    load_mnist,
    load_mnist_idx,
    mnist_available,
    parse_idx_images,
    parse_idx_labels,
    resolve_data_dir,
    synth_linear_map,
    synth_regression,
    write_idx_images,
    write_idx_labels,
)
from src.datasets.mnist import TEST_IMAGES, TEST_LABELS, TRAIN_IMAGES, TRAIN_LABELS
from src.tensor_core import Rng, numerical_rank
from src.utils import FormatError, ShapeError


def _images(n, seed=0):
    return Rng(seed).uniform(0, 256, (n, 4, 3)).astype(np.uint8)


def _write_mnist(root, n_train=12, n_test=5, gz=False):
    files = {
        TRAIN_IMAGES: ("images", _images(n_train, 1)),
        TRAIN_LABELS: ("labels", np.arange(n_train) % 10),
        TEST_IMAGES: ("images", _images(n_test, 2)),
        TEST_LABELS: ("labels", np.arange(n_test) % 10),
    }
    for stem, (kind, data) in files.items():
        path = root / stem
        (write_idx_images if kind == "images" else write_idx_labels)(path, data)
        if gz:
            with gzip.open(root / f"{stem}.gz", "wb") as f:
                f.write(path.read_bytes())
            path.unlink()
    return files


class TestIdxParsing:
    """Test the IDX file format."""

    def test_images_roundtrip(self, tmp_path):
        """Test IDX3 images read back unchanged."""
        images = _images(3)
        path = write_idx_images(tmp_path / "img", images)
        np.testing.assert_array_equal(parse_idx_images(path.read_bytes()), images)

    def test_labels_roundtrip(self, tmp_path):
        """Test IDX1 labels read back unchanged."""
        path = write_idx_labels(tmp_path / "lab", np.array([3, 1, 4]))
        np.testing.assert_array_equal(parse_idx_labels(path.read_bytes()), [3, 1, 4])

    def test_wrong_magic(self, tmp_path):
        """Test a label file is not accepted as images."""
        raw = write_idx_labels(tmp_path / "lab", np.array([1])).read_bytes()
        with pytest.raises(FormatError) as err:
            parse_idx_images(raw)
        assert err.value.field == "magic"
        assert err.value.offset == 0

    def test_truncated_header(self):
        """Test a cut header points at the dims field."""
        with pytest.raises(FormatError) as err:
            parse_idx_images((0x803).to_bytes(4, "big") + b"\x00\x00")
        assert err.value.field == "dims"
        assert err.value.offset == 4

    def test_truncated_pixels(self, tmp_path):
        """Test a short pixel body is reported after the header."""
        raw = write_idx_images(tmp_path / "img", _images(2)).read_bytes()
        with pytest.raises(FormatError) as err:
            parse_idx_images(raw[:-1])
        assert err.value.field == "pixels"
        assert err.value.offset == 16

    def test_truncated_labels(self, tmp_path):
        """Test a short label body is reported after the header."""
        raw = write_idx_labels(tmp_path / "lab", np.array([1, 2])).read_bytes()
        with pytest.raises(FormatError) as err:
            parse_idx_labels(raw[:-1])
        assert err.value.offset == 8

    def test_label_out_of_range(self, tmp_path):
        """Test a non-digit label reports its byte offset."""
        images = write_idx_images(tmp_path / "img", _images(3))
        labels = write_idx_labels(tmp_path / "lab", np.array([4, 7, 12]))
        with pytest.raises(FormatError) as err:
            load_mnist_idx(images, labels)
        assert err.value.field == "labels"
        assert err.value.offset == 10
        assert "12" in str(err.value)

    def test_count_mismatch(self, tmp_path):
        """Test image and label counts must agree."""
        images = write_idx_images(tmp_path / "img", _images(3))
        labels = write_idx_labels(tmp_path / "lab", np.array([1, 2]))
        with pytest.raises(FormatError) as err:
            load_mnist_idx(images, labels)
        assert err.value.field == "count"


class TestMnistLoader:
    """Test normalization and the train/test loader on tiny fixture files."""

    def test_normalization_and_raw_pixels(self, tmp_path):
        """Test pixels are scaled and centered, and raw pixels recoverable."""
        files = _write_mnist(tmp_path)
        data = load_mnist_idx(tmp_path / TRAIN_IMAGES, tmp_path / TRAIN_LABELS)
        raw = files[TRAIN_IMAGES][1]
        assert data.inputs.shape == (12, 12)
        assert np.mean(data.inputs) == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_array_equal(data.raw_pixels(), raw.reshape(12, -1))
        assert data.num_classes == 10

    def test_test_split_reuses_training_mean(self, tmp_path):
        """Test the test split is normalized with training statistics."""
        _write_mnist(tmp_path)
        train, test = load_mnist(tmp_path, train_limit=None)
        assert test.normalization == train.normalization
        assert test.split == "test"

    def test_limits_applied_after_mean(self, tmp_path):
        """Test subsetting does not change the normalization."""
        _write_mnist(tmp_path)
        full, _ = load_mnist(tmp_path, train_limit=None)
        small, test = load_mnist(tmp_path, train_limit=4, test_limit=2)
        assert small.n_samples == 4
        assert test.n_samples == 2
        assert small.normalization == full.normalization

    def test_gzip_files(self, tmp_path):
        """Test gzipped IDX files load."""
        _write_mnist(tmp_path, gz=True)
        assert mnist_available(tmp_path)
        train, _ = load_mnist(tmp_path)
        assert train.n_samples == 12

    def test_missing_files(self, tmp_path):
        """Test absent files raise FileNotFoundError."""
        assert not mnist_available(tmp_path)
        with pytest.raises(FileNotFoundError):
            load_mnist(tmp_path)

    def test_data_dir_from_environment(self, monkeypatch, tmp_path):
        """Test the data directory falls back to IDINIT_DATA_DIR."""
        monkeypatch.setenv("IDINIT_DATA_DIR", str(tmp_path))
        assert resolve_data_dir() == tmp_path
        assert resolve_data_dir("elsewhere").name == "elsewhere"


class TestDataset:
    """Test the in-memory dataset."""

    def setup_method(self):
        self.data = Dataset(inputs=np.arange(12.0).reshape(6, 2), labels=np.array([0, 1, 2, 0, 1, 2]))

    def test_one_hot(self):
        """Test one-hot encoding of labels."""
        encoded = self.data.one_hot()
        assert encoded.shape == (6, 3)
        np.testing.assert_array_equal(encoded.argmax(axis=1), self.data.labels)

    def test_targets_for(self):
        """Test targets per loss kind."""
        np.testing.assert_array_equal(self.data.targets_for("cross_entropy"), self.data.labels)
        assert self.data.targets_for("mse").shape == (6, 3)

    def test_subset(self):
        """Test leading-sample subsets."""
        assert self.data.subset(None) is self.data
        assert self.data.subset(2).n_samples == 2

    def test_validation(self):
        """Test shape, label and split checks."""
        with pytest.raises(ShapeError):
            Dataset(inputs=np.ones((3, 2)), targets=np.ones((2, 1)))
        with pytest.raises(ValueError):
            Dataset(inputs=np.ones((2, 2)), labels=np.array([0, 5]), num_classes=3)
        with pytest.raises(ValueError):
            Dataset(inputs=np.ones((2, 2)), split="valid")


class TestSynthetic:
    """Test seeded synthetic generators."""

    def test_linear_map_without_noise(self):
        """Test noiseless targets are the mapped inputs."""
        mapping = -np.eye(3)
        data = synth_linear_map(20, 3, mapping, seed=1)
        np.testing.assert_array_equal(data.targets, -data.inputs)

    def test_regression_is_seeded(self):
        """Test regression data is reproducible."""
        a = synth_regression(10, 4, 2, noise_std=0.1, seed=5)
        b = synth_regression(10, 4, 2, noise_std=0.1, seed=5)
        np.testing.assert_array_equal(a.inputs, b.inputs)
        np.testing.assert_array_equal(a.targets, b.targets)

    def test_mapping_columns_checked(self):
        """Test a mapping of the wrong width is refused."""
        with pytest.raises(ValueError):
            synth_linear_map(5, 3, np.eye(2))

    def test_independent_batch(self):
        """Test a square batch has full rank."""
        batch = independent_batch(8, 8, seed=3)
        assert batch.shape == (8, 8)
        assert numerical_rank(batch) == 8

    def test_independent_batch_limits(self):
        """Test impossible batch sizes are refused."""
        with pytest.raises(ValueError):
            independent_batch(4, 5)
        with pytest.raises(ValueError):
            independent_batch(4, 0)

    def test_rank_deficient_draws_are_repeated(self):
        """Test singular draws are retried."""
        calls = []

        def sampler(rng, rows, cols):
            calls.append(1)
            if len(calls) < 3:
                return np.ones((rows, cols))
            return np.eye(rows, cols)

        batch = independent_batch(4, 3, sampler=sampler)
        np.testing.assert_array_equal(batch, np.eye(3, 4))
        assert len(calls) == 3

    def test_redraw_limit(self):
        """Test retries stop after the limit."""
        with pytest.raises(RuntimeError):
            independent_batch(3, 2, sampler=lambda rng, rows, cols: np.zeros((rows, cols)))
