"""IDX image/label files (the MNIST on-disk format).

Big-endian headers: images carry magic 0x00000803 and dims
(count, rows, cols); labels carry 0x00000801 and (count,). Gzipped
files are detected by their two-byte signature and decompressed
transparently. Readers validate the header and the exact payload
length before touching pixel data.
"""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

from .validation import DataError

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _open_maybe_gzip(path):
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"\x1f\x8b":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_exact(fh, count, offset, path):
    data = fh.read(count)
    if len(data) != count:
        raise DataError(
            f"{path}: truncated at byte offset {offset}: "
            f"expected {count} more bytes, got {len(data)}"
        )
    return data


def read_idx_images(path):
    """Load an IDX image file as a (count, rows, cols) uint8 array."""
    path = Path(path)
    with _open_maybe_gzip(path) as fh:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(fh, 16, 0, path))
        if magic != IMAGE_MAGIC:
            raise DataError(
                f"{path}: bad image magic 0x{magic:08x} at byte offset 0, "
                f"expected 0x{IMAGE_MAGIC:08x}"
            )
        payload = _read_exact(fh, count * rows * cols, 16, path)
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after offset {16 + len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path):
    """Load an IDX label file as a (count,) uint8 array."""
    path = Path(path)
    with _open_maybe_gzip(path) as fh:
        magic, count = struct.unpack(">II", _read_exact(fh, 8, 0, path))
        if magic != LABEL_MAGIC:
            raise DataError(
                f"{path}: bad label magic 0x{magic:08x} at byte offset 0, "
                f"expected 0x{LABEL_MAGIC:08x}"
            )
        payload = _read_exact(fh, count, 8, path)
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after offset {8 + len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8)


def load_idx_pair(images_path, labels_path):
    """Load matching image and label files, checking that counts agree."""
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise DataError(
            f"count mismatch: {images_path} has {images.shape[0]} images, "
            f"{labels_path} has {labels.shape[0]} labels"
        )
    return images, labels


# Conventional file names inside an MNIST-layout directory.
SPLIT_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


def load_split(directory, split):
    """Load the train or test split from an MNIST-layout directory."""
    if split not in SPLIT_FILES:
        raise DataError(f"split must be 'train' or 'test', got {split!r}")
    directory = Path(directory)
    img_name, lab_name = SPLIT_FILES[split]
    img_path, lab_path = directory / img_name, directory / lab_name
    for p in (img_path, lab_path):
        if not p.exists() and not p.with_suffix(p.suffix + ".gz").exists():
            gz = Path(str(p) + ".gz")
            if not gz.exists():
                raise DataError(f"missing IDX file {p} (or {gz.name})")
    if not img_path.exists():
        img_path = Path(str(img_path) + ".gz")
    if not lab_path.exists():
        lab_path = Path(str(lab_path) + ".gz")
    return load_idx_pair(img_path, lab_path)


def write_idx_images(path, images):
    """Write a (count, rows, cols) uint8 array as an IDX image file."""
    arr = np.ascontiguousarray(images, dtype=np.uint8)
    if arr.ndim != 3:
        raise DataError(f"images must be (count, rows, cols), got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IMAGE_MAGIC, *arr.shape))
        fh.write(arr.tobytes())


def write_idx_labels(path, labels):
    """Write a (count,) uint8 array as an IDX label file."""
    arr = np.ascontiguousarray(labels, dtype=np.uint8)
    if arr.ndim != 1:
        raise DataError(f"labels must be 1-D, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", LABEL_MAGIC, arr.shape[0]))
        fh.write(arr.tobytes())
