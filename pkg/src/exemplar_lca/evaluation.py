"""Batch evaluation of decoders over a shared encoding pass.

Inputs are encoded exactly once per evaluation; every requested decoder
consumes the same codes. Firing statistics are accumulated from the
same pass, so accuracy and sparsity always describe the same run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import decoders as _dec
from . import encoder as _enc
from .decoders import codes_to_matrix
from .dictionary import resolve_operator
from .validation import DataError


@dataclass
class DecoderResult:
    decoder: str
    top1: float
    correct: int
    abstain_count: int
    total: int


@dataclass
class EvalReport:
    results: list
    per_step_firing_fraction: np.ndarray
    mean_firing_fraction: float
    wall_seconds: float
    total: int

    def result(self, decoder):
        for r in self.results:
            if r.decoder == decoder:
                return r
        raise KeyError(decoder)


def encode_dataset(dictionary, vectors, cfg, batch_size=256, operator=None):
    """Encode rows batch by batch, yielding lists of SparseCode."""
    if operator is None:
        operator = resolve_operator(dictionary, cfg.backend, cfg.gramian_budget_bytes)
    for start in range(0, vectors.shape[0], batch_size):
        yield _enc.encode_batch(
            dictionary, vectors[start:start + batch_size], cfg, operator
        )


def evaluate_decoders(
    dictionary,
    vectors,
    labels,
    cfg,
    decoder_kinds,
    nn_model=None,
    batch_size=256,
    collect_codes=False,
):
    """Top-1 accuracy of the requested decoders on one encoding pass.

    Abstentions (codes that fired nothing) count as errors. Returns an
    EvalReport; with ``collect_codes`` the (report, codes) pair.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if vectors.shape[0] == 0:
        raise DataError("empty evaluation set")
    if labels.shape[0] != vectors.shape[0]:
        raise DataError(
            f"{vectors.shape[0]} inputs but {labels.shape[0]} labels"
        )
    for kind in decoder_kinds:
        if kind not in _dec.DECODER_KINDS:
            raise DataError(f"unknown decoder {kind!r}")
    if _dec.SHALLOW_NN in decoder_kinds and nn_model is None:
        raise DataError("shallow_nn evaluation needs a trained model")

    t0 = time.perf_counter()
    correct = {k: 0 for k in decoder_kinds}
    abstain = {k: 0 for k in decoder_kinds}
    step_sum = np.zeros(cfg.steps, dtype=np.float64)
    total = 0
    kept = []
    for batch_codes in encode_dataset(dictionary, vectors, cfg, batch_size):
        batch_labels = labels[total:total + len(batch_codes)]
        matrix = codes_to_matrix(batch_codes, dictionary.m)
        for kind in decoder_kinds:
            if kind == _dec.MAX_ACTIVATION:
                pred, abst = _dec.batch_max_activation(matrix, dictionary)
            elif kind == _dec.MAX_CLASS_SUM:
                pred, abst = _dec.batch_max_class_sum(matrix, dictionary)
            else:
                pred, abst = _dec.batch_shallow_nn(matrix, nn_model)
            correct[kind] += int(np.sum((pred == batch_labels) & ~abst))
            abstain[kind] += int(abst.sum())
        for code in batch_codes:
            step_sum += code.fired_per_step / dictionary.m
        total += len(batch_codes)
        if collect_codes:
            kept.extend(batch_codes)
    wall = time.perf_counter() - t0
    per_step = step_sum / total
    report = EvalReport(
        results=[
            DecoderResult(
                decoder=k,
                top1=correct[k] / total,
                correct=correct[k],
                abstain_count=abstain[k],
                total=total,
            )
            for k in decoder_kinds
        ],
        per_step_firing_fraction=per_step,
        mean_firing_fraction=float(per_step.mean()),
        wall_seconds=wall,
        total=total,
    )
    if collect_codes:
        return report, kept
    return report


def train_readout(dictionary, vectors, labels, cfg, nn_cfg, batch_size=256):
    """Encode training rows and fit the softmax readout on their codes."""
    codes = []
    for batch in encode_dataset(dictionary, vectors, cfg, batch_size):
        codes.extend(batch)
    matrix = codes_to_matrix(codes, dictionary.m)
    return _dec.train_shallow_nn(
        matrix, labels, class_count=dictionary.class_count, cfg=nn_cfg
    )
