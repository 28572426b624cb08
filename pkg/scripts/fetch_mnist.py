#!/usr/bin/env python3
"""
Download the four MNIST IDX files into the data directory.

Usage:
    python scripts/fetch_mnist.py [--data-dir DIR] [--mirror URL] [--force]

The directory defaults to $IDINIT_DATA_DIR, then ./data. Files are stored
gzipped; the loader reads .gz files directly.
"""

import argparse
import sys
from pathlib import Path

import requests

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.datasets import mnist_available, resolve_data_dir  # noqa: E402
from src.datasets.mnist import TEST_IMAGES, TEST_LABELS, TRAIN_IMAGES, TRAIN_LABELS  # noqa: E402
from src.utils import get_logger, setup_logger  # noqa: E402

logger = get_logger(__name__)

DEFAULT_MIRROR = "https://ossci-datasets.s3.amazonaws.com/mnist/"
CHUNK_SIZE = 1 << 16


def download(url: str, target: Path, timeout: float = 30.0) -> Path:
    """Stream one file to disk; a partial download never replaces the target."""
    partial = target.with_suffix(target.suffix + ".part")
    with requests.get(url, stream=True, timeout=timeout) as response:
        response.raise_for_status()
        with open(partial, "wb") as f:
            for chunk in response.iter_content(chunk_size=CHUNK_SIZE):
                f.write(chunk)
    partial.replace(target)
    return target


def fetch(data_dir: Path, mirror: str = DEFAULT_MIRROR, force: bool = False) -> int:
    data_dir.mkdir(parents=True, exist_ok=True)
    if mnist_available(data_dir) and not force:
        logger.info(f"MNIST already present in {data_dir}")
        return 0

    for stem in (TRAIN_IMAGES, TRAIN_LABELS, TEST_IMAGES, TEST_LABELS):
        name = f"{stem}.gz"
        url = mirror.rstrip("/") + "/" + name
        logger.info(f"Downloading {url}")
        try:
            download(url, data_dir / name)
        except requests.RequestException as e:
            logger.error(f"Download failed for {name}: {e}")
            return 1

    logger.info(f"MNIST written to {data_dir}")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description="Download MNIST IDX files")
    parser.add_argument("--data-dir", default=None, help="Target directory")
    parser.add_argument("--mirror", default=DEFAULT_MIRROR, help="Base URL holding the .gz files")
    parser.add_argument("--force", action="store_true", help="Download even if files exist")
    args = parser.parse_args()

    setup_logger("fetch_mnist", log_file=None)
    return fetch(resolve_data_dir(args.data_dir), args.mirror, args.force)


if __name__ == "__main__":
    sys.exit(main())
