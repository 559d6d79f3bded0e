"""Dataset splitting, pixel preprocessing, and a synthetic digit corpus.

The synthetic corpus renders digit glyphs in several typefaces with
random affine warps, blur, and noise into MNIST-layout 28x28 grayscale
arrays. It exists because this package's evaluation pipelines need a
freely regenerable stand-in with the same file formats and class
structure as handwritten-digit data; generation is fully deterministic
for a given seed.
"""

from __future__ import annotations

import glob
import os

import numpy as np

from .validation import DataError


def split_dataset(features, labels, size, seed, stratified=True):
    """Deterministically split rows into a dictionary subset and the rest.

    Returns (dictionary_indices, heldout_indices), disjoint index arrays
    in shuffled order. With ``stratified`` (default), each class gets
    ``floor(size * class_share)`` slots and the remainder goes to the
    largest fractional shares (ties to the lowest class id); sampling
    within a class follows the seeded shuffle.
    """
    labels = np.asarray(labels, dtype=np.int64)
    rows = labels.shape[0]
    if features is not None and len(features) != rows:
        raise DataError(f"features ({len(features)}) and labels ({rows}) disagree")
    if not 1 <= size <= rows:
        raise DataError(f"dictionary size {size} must be in [1, {rows}]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(rows)
    if not stratified:
        return perm[:size].copy(), perm[size:].copy()

    class_count = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=class_count)
    shares = size * counts / rows
    quotas = np.floor(shares).astype(np.int64)
    remainder = size - int(quotas.sum())
    frac_order = np.lexsort((np.arange(class_count), -(shares - quotas)))
    while remainder > 0:
        progressed = False
        for c in frac_order:
            if remainder == 0:
                break
            if quotas[c] < counts[c]:
                quotas[c] += 1
                remainder -= 1
                progressed = True
        if not progressed:
            raise DataError("stratified split cannot satisfy the requested size")

    taken = np.zeros(class_count, dtype=np.int64)
    pick = np.zeros(rows, dtype=bool)
    for pos, idx in enumerate(perm):
        c = labels[idx]
        if taken[c] < quotas[c]:
            taken[c] += 1
            pick[pos] = True
    return perm[pick].copy(), perm[~pick].copy()


def pixels_to_features(images, gain=1.0):
    """Flatten uint8 images to float32 rows scaled to [0, gain]."""
    arr = np.asarray(images)
    flat = arr.reshape(arr.shape[0], -1).astype(np.float32)
    return flat * np.float32(gain / 255.0)


def prepare_inputs(vectors, input_norm="l2", gain=19.0):
    """Scale raw feature rows into the encoder's working range.

    "l2" maps each row to ``gain * row / ||row||`` (zero rows pass
    through as zeros), giving every input the same drive scale against
    the threshold. "pixel" assumes 0-255-scaled rows and maps them to
    [0, gain].
    """
    x = np.asarray(vectors, dtype=np.float32)
    if x.ndim != 2:
        raise DataError(f"vectors must be 2-D, got shape {x.shape}")
    if input_norm == "l2":
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return x / norms * np.float32(gain)
    if input_norm == "pixel":
        return x * np.float32(gain / 255.0)
    raise DataError(f"input_norm must be l2|pixel, got {input_norm!r}")


_FONT_DIRS = (
    "/usr/share/fonts/truetype/dejavu",
)


def _find_fonts():
    names = (
        "DejaVuSans.ttf",
        "DejaVuSans-Bold.ttf",
        "DejaVuSerif.ttf",
        "DejaVuSerif-Bold.ttf",
        "DejaVuSansMono.ttf",
        "DejaVuSansMono-Bold.ttf",
    )
    found = []
    for d in _FONT_DIRS:
        for n in names:
            p = os.path.join(d, n)
            if os.path.exists(p):
                found.append(p)
    if not found:
        try:
            import matplotlib
            mpl_dir = os.path.join(
                os.path.dirname(matplotlib.__file__), "mpl-data", "fonts", "ttf"
            )
            found = sorted(glob.glob(os.path.join(mpl_dir, "DejaVu*.ttf")))
        except ImportError:
            pass
    if not found:
        raise DataError("no TTF fonts found for synthetic digit rendering")
    return found


def synthetic_digits(count, seed, size=28, balanced=True):
    """Render a deterministic corpus of warped digit glyphs.

    Returns (images, labels): uint8 arrays of shape (count, size, size)
    and (count,). ``balanced`` cycles the ten classes before shuffling
    so every class is populated for any count >= 10.
    """
    from PIL import Image, ImageDraw, ImageFilter, ImageFont

    if count < 1:
        raise DataError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    fonts = _find_fonts()
    if balanced:
        labels = np.tile(np.arange(10, dtype=np.uint8), count // 10 + 1)[:count]
        labels = labels[rng.permutation(count)]
    else:
        labels = rng.integers(0, 10, size=count).astype(np.uint8)

    canvas = 56
    images = np.zeros((count, size, size), dtype=np.uint8)
    loaded = {}
    for i in range(count):
        digit = int(labels[i])
        font_path = fonts[int(rng.integers(len(fonts)))]
        font_px = int(rng.integers(34, 44))
        key = (font_path, font_px)
        if key not in loaded:
            loaded[key] = ImageFont.truetype(font_path, font_px)
        font = loaded[key]

        big = Image.new("L", (canvas, canvas), 0)
        draw = ImageDraw.Draw(big)
        left, top, right, bottom = draw.textbbox((0, 0), str(digit), font=font)
        ox = (canvas - (right - left)) // 2 - left
        oy = (canvas - (bottom - top)) // 2 - top
        draw.text((ox, oy), str(digit), fill=255, font=font)

        # random stroke weight, then affine warp around the center
        weight = rng.uniform(0.0, 1.0)
        if weight < 0.18:
            big = big.filter(ImageFilter.MinFilter(3))
        elif weight > 0.80:
            big = big.filter(ImageFilter.MaxFilter(3))
        angle = rng.uniform(-20.0, 20.0)
        shear = rng.uniform(-0.32, 0.32)
        scale = rng.uniform(0.72, 1.12)
        tx = rng.uniform(-2.8, 2.8)
        ty = rng.uniform(-2.8, 2.8)
        rad = np.deg2rad(angle)
        cos_a, sin_a = np.cos(rad) / scale, np.sin(rad) / scale
        cx = cy = canvas / 2.0
        # inverse map for Image.transform: output pixel -> source pixel
        a11, a12 = cos_a, sin_a + shear * cos_a
        a21, a22 = -sin_a, cos_a - shear * sin_a
        a13 = cx - a11 * (cx + tx) - a12 * (cy + ty)
        a23 = cy - a21 * (cx + tx) - a22 * (cy + ty)
        big = big.transform(
            (canvas, canvas),
            Image.Transform.AFFINE,
            (a11, a12, a13, a21, a22, a23),
            resample=Image.Resampling.BILINEAR,
        )

        blur = rng.uniform(0.0, 1.3)
        if blur > 0.15:
            big = big.filter(ImageFilter.GaussianBlur(radius=blur))
        small = big.resize((size, size), Image.Resampling.LANCZOS)
        px = np.asarray(small, dtype=np.float64)
        px *= rng.uniform(0.55, 1.0)
        # mild lighting gradient plus sensor-like noise
        gx, gy = rng.uniform(-0.12, 0.12), rng.uniform(-0.12, 0.12)
        ramp = 1.0 + gx * np.linspace(-1, 1, size)[None, :] \
                   + gy * np.linspace(-1, 1, size)[:, None]
        px *= ramp
        px += rng.normal(0.0, 7.0, px.shape)
        images[i] = np.clip(px, 0, 255).astype(np.uint8)
    return images, labels
