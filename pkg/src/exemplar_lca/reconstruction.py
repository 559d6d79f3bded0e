"""Rebuild inputs from sparse codes and score the result.

Reconstruction maps a code back to the exemplars' original feature
scale: each unit atom is rescaled by its stored pre-normalization norm
before the weighted sum, so a one-hot code returns the original
exemplar row. Metrics follow the 0-255 pixel convention (PSNR peak
255); values are never clamped in the metric path, only when exporting
images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage.metrics import structural_similarity

from .dictionary import ExemplarDictionary, build_dictionary
from .validation import DataError, as_vector

PSNR_PEAK = 255.0


@dataclass
class QualityReport:
    mse: float
    psnr: float
    ssim: float
    iterations: int


def reconstruct(dictionary, code):
    """Weighted sum of atoms rescaled to the original exemplar scale."""
    a = as_vector(getattr(code, "a", code), dictionary.m, "code")
    weights = a.astype(np.float64) * dictionary.atom_norms.astype(np.float64)
    return dictionary.atoms.astype(np.float64).T @ weights


def mse(x, y):
    """Mean squared elementwise difference (0-255 pixel units by convention)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DataError(f"image shapes differ: {x.shape} vs {y.shape}")
    d = x - y
    return float(np.mean(d * d))


def psnr(mse_value, peak=PSNR_PEAK):
    """10 * log10(peak^2 / mse) in dB; +inf when the error is exactly zero."""
    if mse_value < 0:
        raise DataError(f"mse must be >= 0, got {mse_value}")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse_value)


def ssim(x, y, window=11, k1=0.01, k2=0.03, sigma=1.5, dynamic_range=255.0):
    """Mean structural similarity with a Gaussian window.

    Grayscale 2-D images or channel-last RGB; channels are averaged.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DataError(f"image shapes differ: {x.shape} vs {y.shape}")
    if x.ndim not in (2, 3):
        raise DataError(f"images must be 2-D or HxWx3, got shape {x.shape}")
    if window % 2 == 0 or window < 3:
        raise DataError(f"window must be odd and >= 3, got {window}")
    if window > min(x.shape[0], x.shape[1]):
        raise DataError(
            f"window {window} exceeds smallest image dimension "
            f"{min(x.shape[0], x.shape[1])}"
        )
    kwargs = dict(
        win_size=window,
        gaussian_weights=True,
        sigma=sigma,
        use_sample_covariance=False,
        K1=k1,
        K2=k2,
        data_range=dynamic_range,
    )
    if x.ndim == 3:
        kwargs["channel_axis"] = -1
    return float(structural_similarity(x, y, **kwargs))


def quality_report(original, reconstructed, iterations):
    """Bundle MSE / PSNR / SSIM for a reconstruction against its target."""
    err = mse(original, reconstructed)
    return QualityReport(
        mse=err,
        psnr=psnr(err),
        ssim=ssim(np.asarray(original, dtype=np.float64),
                  np.asarray(reconstructed, dtype=np.float64)),
        iterations=int(iterations),
    )


def dictionary_update_baseline(dictionary, s, code, eta):
    """One classic dictionary-learning step: atoms move along the residual.

    Atoms with nonzero activation are nudged by ``eta * residual * a_i``
    (residual taken against the unit-atom reconstruction, the space the
    dynamics operate in) and re-normalized; untouched atoms and all
    labels are carried over unchanged. Only used by the random-dictionary
    reconstruction baseline, never by exemplar classification.
    """
    if eta <= 0:
        raise DataError(f"eta must be > 0, got {eta}")
    a = as_vector(getattr(code, "a", code), dictionary.m, "code").astype(np.float64)
    s = as_vector(s, dictionary.n, "input").astype(np.float64)
    atoms64 = dictionary.atoms.astype(np.float64)
    residual = s - atoms64.T @ a
    idx = np.flatnonzero(a)
    if idx.size == 0:
        return dictionary
    updated = atoms64[idx] + eta * np.outer(a[idx], residual)
    norms = np.linalg.norm(updated, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DataError(f"update zeroed atom {int(idx[zero[0]])}; reduce eta")
    new_atoms = dictionary.atoms.copy()
    new_atoms[idx] = (updated / norms[:, None]).astype(np.float32)
    new_norms = dictionary.atom_norms.copy()
    new_norms[idx] = norms.astype(np.float32)
    rebuilt = ExemplarDictionary(
        atoms=new_atoms,
        labels=dictionary.labels,
        class_count=dictionary.class_count,
        atom_norms=new_norms,
    )
    rebuilt.atoms.setflags(write=False)
    rebuilt.atom_norms.setflags(write=False)
    return rebuilt


def random_dictionary(m, n, seed, class_count=1):
    """Gaussian N(0, 1) atoms, normalized; the reconstruction baseline."""
    rng = np.random.default_rng(seed)
    feats = rng.standard_normal((m, n)).astype(np.float32)
    labels = np.arange(m) % class_count
    return build_dictionary(feats, labels, class_count)


def export_pgm(path, image):
    """Write a grayscale image as binary PGM, clamping to [0, 255]."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise DataError(f"PGM export needs a 2-D image, got shape {img.shape}")
    data = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def export_ppm(path, image):
    """Write an RGB image (HxWx3) as binary PPM, clamping to [0, 255]."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DataError(f"PPM export needs HxWx3, got shape {img.shape}")
    data = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
