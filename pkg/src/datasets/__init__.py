"""Datasets: MNIST IDX files and seeded synthetic generators."""

from .dataset import Dataset, Normalization
from .mnist import (
    DATA_DIR_ENV,
    load_mnist,
    load_mnist_idx,
    mnist_available,
    parse_idx_images,
    parse_idx_labels,
    resolve_data_dir,
    write_idx_images,
    write_idx_labels,
)
from .synthetic import independent_batch, synth_linear_map, synth_regression

__all__ = [
    "DATA_DIR_ENV",
    "Dataset",
    "Normalization",
    "independent_batch",
    "load_mnist",
    "load_mnist_idx",
    "mnist_available",
    "parse_idx_images",
    "parse_idx_labels",
    "resolve_data_dir",
    "synth_linear_map",
    "synth_regression",
    "write_idx_images",
    "write_idx_labels",
]
