"""Binary container formats: dictionaries, feature matrices, NN models.

All multi-byte fields are little-endian and packed without padding.

Dictionary file ("DSELD\\0", version 1):
    magic[6] | version u16 | M u64 | N u64 | class_count u32
    | atoms f32[M*N] row-major | labels u32[M] | atom_norms f32[M]

Feature matrix ("FMAT\\0", version 1):
    magic[5] | version u16 | rows u64 | dim u64 | has_labels u8
    | values f32[rows*dim] row-major | labels u32[rows] if has_labels
    | tag_len u32 | source_tag utf-8[tag_len]

Readout model ("DSNN\\0", version 1):
    magic[5] | version u16 | class_count u32 | M u64
    | weights f64[class_count*M] | bias f64[class_count]
    | epochs u32 | learning_rate f64 | batch_size i64 (-1 none)
    | seed u64 | final_train_accuracy f64

Readers validate magic, version, and the exact expected byte length
before allocating payload buffers, so absurd header claims fail fast.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dictionary import ExemplarDictionary
from .decoders import ShallowNnModel
from .validation import DataError, check_labels

DICT_MAGIC = b"DSELD\0"
FMAT_MAGIC = b"FMAT\0"
NN_MAGIC = b"DSNN\0"
FORMAT_VERSION = 1

# refuse headers whose payload could not possibly be intended
_MAX_REASONABLE_BYTES = 1 << 40


@dataclass
class FeatureMatrix:
    """Row-major float32 feature rows with optional labels and a provenance tag."""

    values: np.ndarray            # (rows, dim) float32
    labels: np.ndarray | None = None
    source_tag: str = ""

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def validate(self):
        if self.values.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {self.values.shape}")
        bad = ~np.isfinite(self.values).all(axis=1)
        if bad.any():
            raise DataError(
                f"non-finite feature value in row {int(np.flatnonzero(bad)[0])}"
            )
        if self.labels is not None and self.labels.shape != (self.rows,):
            raise DataError(
                f"labels shape {self.labels.shape} does not match rows {self.rows}"
            )
        return self


def _expect_file_size(path, fh, expected, detail):
    fh.seek(0, 2)
    actual = fh.tell()
    if actual != expected:
        raise DataError(
            f"{path}: wrong length for {detail}: expected {expected} bytes, "
            f"file has {actual}"
        )


def _read_header(fh, fmt, path, offset):
    size = struct.calcsize(fmt)
    data = fh.read(size)
    if len(data) != size:
        raise DataError(f"{path}: truncated header at byte offset {offset}")
    return struct.unpack(fmt, data)


def _check_magic(fh, magic, path):
    got = fh.read(len(magic))
    if got != magic:
        raise DataError(f"{path}: bad magic {got!r}, expected {magic!r}")


def _check_version(version, path):
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: unknown format version {version}")


def _check_claim(n_bytes, path):
    if n_bytes > _MAX_REASONABLE_BYTES:
        raise DataError(f"{path}: header claims an implausible {n_bytes}-byte payload")


def write_dictionary(path, dictionary):
    with open(path, "wb") as fh:
        fh.write(DICT_MAGIC)
        fh.write(
            struct.pack(
                "<HQQI",
                FORMAT_VERSION,
                dictionary.m,
                dictionary.n,
                dictionary.class_count,
            )
        )
        fh.write(dictionary.atoms.astype("<f4").tobytes())
        fh.write(dictionary.labels.astype("<u4").tobytes())
        fh.write(dictionary.atom_norms.astype("<f4").tobytes())


def read_dictionary(path):
    path = Path(path)
    with open(path, "rb") as fh:
        _check_magic(fh, DICT_MAGIC, path)
        version, m, n, class_count = _read_header(fh, "<HQQI", path, len(DICT_MAGIC))
        _check_version(version, path)
        header = len(DICT_MAGIC) + struct.calcsize("<HQQI")
        payload = m * n * 4 + m * 4 + m * 4
        _check_claim(payload, path)
        _expect_file_size(path, fh, header + payload, f"{m}x{n} dictionary")
        if m < 1 or n < 1:
            raise DataError(f"{path}: dictionary must be non-empty, got {m}x{n}")
        fh.seek(header)
        atoms = np.fromfile(fh, dtype="<f4", count=m * n).reshape(m, n)
        labels = np.fromfile(fh, dtype="<u4", count=m).astype(np.int64)
        norms = np.fromfile(fh, dtype="<f4", count=m)
    labels = check_labels(labels, m, int(class_count), f"{path} labels")
    d = ExemplarDictionary(
        atoms=atoms, labels=labels, class_count=int(class_count), atom_norms=norms
    )
    for arr in (d.atoms, d.labels, d.atom_norms):
        arr.setflags(write=False)
    return d


def write_feature_matrix(path, fm):
    fm.validate()
    tag = fm.source_tag.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(FMAT_MAGIC)
        fh.write(
            struct.pack("<HQQB", FORMAT_VERSION, fm.rows, fm.dim, int(fm.labels is not None))
        )
        fh.write(np.ascontiguousarray(fm.values, dtype="<f4").tobytes())
        if fm.labels is not None:
            fh.write(np.ascontiguousarray(fm.labels, dtype="<u4").tobytes())
        fh.write(struct.pack("<I", len(tag)))
        fh.write(tag)


def read_feature_matrix(path):
    path = Path(path)
    with open(path, "rb") as fh:
        _check_magic(fh, FMAT_MAGIC, path)
        version, rows, dim, has_labels = _read_header(fh, "<HQQB", path, len(FMAT_MAGIC))
        _check_version(version, path)
        if has_labels not in (0, 1):
            raise DataError(f"{path}: has_labels must be 0 or 1, got {has_labels}")
        header = len(FMAT_MAGIC) + struct.calcsize("<HQQB")
        payload = rows * dim * 4 + (rows * 4 if has_labels else 0)
        _check_claim(payload, path)
        fh.seek(0, 2)
        actual = fh.tell()
        minimum = header + payload + 4
        if actual < minimum:
            raise DataError(
                f"{path}: wrong length for {rows}x{dim} feature matrix: "
                f"expected at least {minimum} bytes, file has {actual}"
            )
        fh.seek(header)
        values = np.fromfile(fh, dtype="<f4", count=rows * dim).reshape(rows, dim)
        labels = None
        if has_labels:
            labels = np.fromfile(fh, dtype="<u4", count=rows)
        (tag_len,) = _read_header(fh, "<I", path, fh.tell())
        tag = fh.read(tag_len)
        if len(tag) != tag_len:
            raise DataError(f"{path}: truncated source_tag at byte offset {fh.tell()}")
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after source_tag")
    return FeatureMatrix(
        values=values, labels=labels, source_tag=tag.decode("utf-8")
    ).validate()


def write_shallow_nn(path, model):
    meta = model.training_meta
    batch = meta.get("batch_size")
    with open(path, "wb") as fh:
        fh.write(NN_MAGIC)
        fh.write(struct.pack("<HIQ", FORMAT_VERSION, model.class_count, model.m))
        fh.write(np.ascontiguousarray(model.weights, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.bias, dtype="<f8").tobytes())
        fh.write(
            struct.pack(
                "<IdqQd",
                int(meta.get("epochs", 0)),
                float(meta.get("learning_rate", 0.0)),
                -1 if batch is None else int(batch),
                int(meta.get("seed", 0)),
                float(meta.get("final_train_accuracy", 0.0)),
            )
        )


def read_shallow_nn(path):
    path = Path(path)
    with open(path, "rb") as fh:
        _check_magic(fh, NN_MAGIC, path)
        version, class_count, m = _read_header(fh, "<HIQ", path, len(NN_MAGIC))
        _check_version(version, path)
        header = len(NN_MAGIC) + struct.calcsize("<HIQ")
        payload = class_count * m * 8 + class_count * 8 + struct.calcsize("<IdqQd")
        _check_claim(payload, path)
        _expect_file_size(path, fh, header + payload, f"{class_count}x{m} readout")
        fh.seek(header)
        weights = np.fromfile(fh, dtype="<f8", count=class_count * m).reshape(
            class_count, m
        )
        bias = np.fromfile(fh, dtype="<f8", count=class_count)
        epochs, lr, batch, seed, acc = _read_header(fh, "<IdqQd", path, fh.tell())
    return ShallowNnModel(
        weights=weights,
        bias=bias,
        training_meta={
            "epochs": int(epochs),
            "learning_rate": float(lr),
            "batch_size": None if batch == -1 else int(batch),
            "seed": int(seed),
            "final_train_accuracy": float(acc),
        },
    )
