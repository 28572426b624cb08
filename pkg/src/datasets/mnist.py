"""MNIST in IDX format: parsing, writing and the standard train/test loader."""

import gzip
import os
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..utils import FormatError, get_logger
from .dataset import Dataset, Normalization

logger = get_logger(__name__)

PathLike = Union[str, Path]

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
PIXEL_SCALE = 1.0 / 255.0
NUM_CLASSES = 10

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"
TEST_IMAGES = "t10k-images-idx3-ubyte"
TEST_LABELS = "t10k-labels-idx1-ubyte"

DATA_DIR_ENV = "IDINIT_DATA_DIR"
DEFAULT_DATA_DIR = "./data"


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _header(raw: bytes, magic: int, n_dims: int, what: str) -> Tuple[int, ...]:
    if len(raw) < 4:
        raise FormatError(f"{what} file too short for a magic number", field="magic", offset=0)
    found = int.from_bytes(raw[:4], "big")
    if found != magic:
        raise FormatError(
            f"{what} file has wrong magic 0x{found:08x}, expected 0x{magic:08x}",
            field="magic",
            offset=0,
        )
    end = 4 + 4 * n_dims
    if len(raw) < end:
        raise FormatError(f"{what} header truncated", field="dims", offset=4)
    return tuple(int.from_bytes(raw[i:i + 4], "big") for i in range(4, end, 4))


def parse_idx_images(raw: bytes) -> np.ndarray:
    """(n, rows, cols) uint8 array from an IDX3 image file."""
    n, rows, cols = _header(raw, IMAGES_MAGIC, 3, "images")
    expected = n * rows * cols
    body = raw[16:]
    if len(body) != expected:
        raise FormatError(
            f"images body has {len(body)} bytes, expected {expected} for {n}x{rows}x{cols}",
            field="pixels",
            offset=16,
        )
    return np.frombuffer(body, dtype=np.uint8).reshape(n, rows, cols).copy()


def parse_idx_labels(raw: bytes) -> np.ndarray:
    """(n,) uint8 array from an IDX1 label file; every label must be a digit class."""
    (n,) = _header(raw, LABELS_MAGIC, 1, "labels")
    body = raw[8:]
    if len(body) != n:
        raise FormatError(f"labels body has {len(body)} bytes, expected {n}", field="labels", offset=8)
    labels = np.frombuffer(body, dtype=np.uint8).copy()
    bad = np.flatnonzero(labels >= NUM_CLASSES)
    if bad.size:
        index = int(bad[0])
        raise FormatError(
            f"label {labels[index]} at index {index} is outside 0-{NUM_CLASSES - 1}",
            field="labels",
            offset=8 + index,
        )
    return labels


def write_idx_images(path: PathLike, images: np.ndarray) -> Path:
    images = np.asarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError(f"images must be (n, rows, cols), got shape {images.shape}")
    header = b"".join(int(v).to_bytes(4, "big") for v in (IMAGES_MAGIC,) + images.shape)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + images.tobytes())
    return path


def write_idx_labels(path: PathLike, labels: np.ndarray) -> Path:
    labels = np.asarray(labels, dtype=np.uint8).reshape(-1)
    header = LABELS_MAGIC.to_bytes(4, "big") + len(labels).to_bytes(4, "big")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + labels.tobytes())
    return path


def load_mnist_idx(
    images_path: PathLike,
    labels_path: PathLike,
    split: str = "train",
    normalization: Optional[Normalization] = None,
) -> Dataset:
    """Load one IDX image/label pair.

    Pixels are scaled by 1/255 and then shifted by the global mean. Without an
    explicit ``normalization`` the mean is computed from these images, which
    is what the training split should do; the test split reuses the training
    normalization.

    Raises:
        FormatError: On a wrong magic number, truncated data, an out-of-range
            label or a count mismatch
    """
    images = parse_idx_images(_read_bytes(images_path))
    labels = parse_idx_labels(_read_bytes(labels_path))
    if images.shape[0] != labels.shape[0]:
        raise FormatError(
            f"{images.shape[0]} images but {labels.shape[0]} labels", field="count", offset=4
        )

    flat = images.reshape(images.shape[0], -1)
    if normalization is None:
        mean = float(np.mean(flat, dtype=np.float64)) * PIXEL_SCALE if flat.size else 0.0
        normalization = Normalization(scale=PIXEL_SCALE, mean=mean)

    logger.debug(f"Loaded {images.shape[0]} {split} images of {images.shape[1]}x{images.shape[2]}")
    return Dataset(
        inputs=normalization.apply(flat),
        labels=labels.astype(np.int64),
        split=split,
        normalization=normalization,
        num_classes=NUM_CLASSES,
    )


def resolve_data_dir(data_dir: Optional[PathLike] = None) -> Path:
    return Path(data_dir if data_dir is not None else os.getenv(DATA_DIR_ENV, DEFAULT_DATA_DIR))


def _find(root: Path, stem: str) -> Path:
    for candidate in (root / stem, root / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(
        f"{stem} not found in {root}; run scripts/fetch_mnist.py or set {DATA_DIR_ENV}"
    )


def mnist_available(data_dir: Optional[PathLike] = None) -> bool:
    root = resolve_data_dir(data_dir)
    try:
        for stem in (TRAIN_IMAGES, TRAIN_LABELS, TEST_IMAGES, TEST_LABELS):
            _find(root, stem)
    except FileNotFoundError:
        return False
    return True


def load_mnist(
    data_dir: Optional[PathLike] = None,
    train_limit: Optional[int] = 10000,
    test_limit: Optional[int] = None,
) -> Tuple[Dataset, Dataset]:
    """Standard MNIST train/test pair from ``data_dir`` (default ``$IDINIT_DATA_DIR``).

    The normalization mean comes from the full training file, then the splits
    are truncated to ``train_limit`` / ``test_limit`` samples.
    """
    root = resolve_data_dir(data_dir)
    train = load_mnist_idx(_find(root, TRAIN_IMAGES), _find(root, TRAIN_LABELS), "train")
    test = load_mnist_idx(
        _find(root, TEST_IMAGES), _find(root, TEST_LABELS), "test", train.normalization
    )
    train, test = train.subset(train_limit), test.subset(test_limit)
    logger.info(f"MNIST from {root}: {train.n_samples} train / {test.n_samples} test")
    return train, test
