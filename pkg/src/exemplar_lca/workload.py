"""Analytical operation counts and empirical sparsity measurement.

The closed-form model charges the drive once per input (its result is
reused every step) plus per-step inhibition restricted to firing
neurons and the leak update:

    flops(K, N, M, M_hat) = (2N - 1) * M + K * (2 * M * M_hat + M)

One-off dictionary preparation (the Gramian) costs M(M+1)N/2 multiplies
and M(M+1)(N-1)/2 additions. All evaluation is exact integer
arithmetic. Threshold comparisons are not charged as floating-point
work; the instrumented counters count the shrink subtraction on firing
neurons, which the model's tolerance absorbs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import DataError


@dataclass
class WorkloadEstimate:
    training_flops: int
    inference_flops: int
    params: dict


def inference_flops(steps, feature_dim, dict_size, firing_count):
    """Per-input inference cost for a fixed-step encode.

    ``firing_count`` is the expected number of simultaneously firing
    neurons per step (an average; must not exceed the dictionary size).
    """
    k, n, m, m_hat = int(steps), int(feature_dim), int(dict_size), int(firing_count)
    if k < 1 or n < 1 or m < 1:
        raise DataError(f"steps, feature_dim, dict_size must be >= 1, got {k}, {n}, {m}")
    if m_hat < 0:
        raise DataError(f"firing_count must be >= 0, got {m_hat}")
    if m_hat > m:
        raise DataError(f"firing_count {m_hat} exceeds dictionary size {m}")
    return (2 * n - 1) * m + k * (2 * m * m_hat + m)


def training_flops(feature_dim, dict_size):
    """One-off cost of materializing the co-linearity matrix."""
    n, m = int(feature_dim), int(dict_size)
    if n < 1 or m < 1:
        raise DataError(f"feature_dim and dict_size must be >= 1, got {n}, {m}")
    return m * (m + 1) * n // 2 + m * (m + 1) * (n - 1) // 2


def inference_flops_mean(steps, feature_dim, dict_size, mean_firing):
    """Model evaluated at a fractional mean firing count (float result)."""
    k, n, m = int(steps), int(feature_dim), int(dict_size)
    return float((2 * n - 1) * m) + k * (2.0 * m * float(mean_firing) + m)


def estimate(steps, feature_dim, dict_size, firing_count):
    return WorkloadEstimate(
        training_flops=training_flops(feature_dim, dict_size),
        inference_flops=inference_flops(steps, feature_dim, dict_size, firing_count),
        params={
            "K": int(steps),
            "N": int(feature_dim),
            "M": int(dict_size),
            "M_hat": int(firing_count),
        },
    )


# Reference operating points for common CNN feature widths, evaluated at
# a 50K-atom dictionary with 200 firing neurons per step.
REFERENCE_CONFIGS = (
    ("Inception", 2048),
    ("ResNet-50 & ResNet-152", 2048),
    ("EfficientNet", 1280),
    ("DenseNet", 1024),
    ("MobileNet", 960),
    ("VGG-16", 512),
)
REFERENCE_DICT_SIZE = 50_000
REFERENCE_FIRING = 200
REFERENCE_STEP_COUNTS = (100, 10)


def reference_table():
    """Rows (extractor, training TFLOPs, K, N, M, M_hat, inference GFLOPs)."""
    rows = []
    for name, n in REFERENCE_CONFIGS:
        train = training_flops(n, REFERENCE_DICT_SIZE)
        for k in REFERENCE_STEP_COUNTS:
            inf = inference_flops(k, n, REFERENCE_DICT_SIZE, REFERENCE_FIRING)
            rows.append(
                {
                    "extractor": name,
                    "training_tflops": train / 1e12,
                    "K": k,
                    "N": n,
                    "M": REFERENCE_DICT_SIZE,
                    "M_hat": REFERENCE_FIRING,
                    "inference_gflops": inf / 1e9,
                    "training_flops": train,
                    "inference_flops": inf,
                }
            )
    return rows


class OpCounter:
    """Tally of multiplies and additions per pipeline stage."""

    def __init__(self):
        self.muls = {}
        self.adds = {}

    def record(self, path, mul=0, add=0):
        if mul == 0 and add == 0:
            return
        self.muls[path] = self.muls.get(path, 0) + int(mul)
        self.adds[path] = self.adds.get(path, 0) + int(add)

    @property
    def total_muls(self):
        return sum(self.muls.values())

    @property
    def total_adds(self):
        return sum(self.adds.values())

    @property
    def total(self):
        return self.total_muls + self.total_adds

    def by_path(self):
        paths = sorted(set(self.muls) | set(self.adds))
        return {
            p: {"mul": self.muls.get(p, 0), "add": self.adds.get(p, 0)} for p in paths
        }

    def merge(self, other):
        for p, v in other.muls.items():
            self.muls[p] = self.muls.get(p, 0) + v
        for p, v in other.adds.items():
            self.adds[p] = self.adds.get(p, 0) + v
        return self


def measure_sparsity(codes):
    """Mean firing fraction per step across codes, plus the overall mean.

    All codes must share the same step count; the fraction at step k is
    the firing count divided by the dictionary size.
    """
    codes = list(codes)
    if not codes:
        raise DataError("no codes given")
    k = codes[0].fired_per_step.shape[0]
    m = codes[0].m
    acc = np.zeros(k, dtype=np.float64)
    for i, c in enumerate(codes):
        if c.fired_per_step.shape[0] != k:
            raise DataError(
                f"code {i} ran {c.fired_per_step.shape[0]} steps, expected {k}"
            )
        acc += c.fired_per_step / c.m
    per_step = acc / len(codes)
    return per_step, float(per_step.mean())
