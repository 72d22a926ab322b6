"""Temperature-to-intensity mapping, dataset normalization, augmentation, class weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import BoundsError, DegenerateError, MathError, RangeError, ShapeError
from .ingest import LabelMask, TemperatureField

# Default Kelvin window for 8-bit mapping: ambient up to well above the
# 800 K flame boundary.
DEFAULT_T_MIN = 300.0
DEFAULT_T_MAX = 1300.0

# Stabilizer constant of the inverse-log class weighting scheme.
DEFAULT_WEIGHT_C = 1.02


@dataclass(frozen=True)
class ClassWeights:
    """Inverse-log-propensity weights w_k = 1 / ln(c + p_k) for the 4 classes."""

    w_background: float
    w_outer: float
    w_middle: float
    w_central: float
    c: float
    propensities: tuple[float, float, float, float]

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w_background, self.w_outer, self.w_middle, self.w_central)


def to_intensity(
    f: TemperatureField, t_min: float = DEFAULT_T_MIN, t_max: float = DEFAULT_T_MAX
) -> np.ndarray:
    """Map Kelvin to uint8 via v = round(255 * clamp((T - t_min)/(t_max - t_min)))."""
    if t_min >= t_max:
        raise RangeError(f"t_min {t_min} must be < t_max {t_max}")
    scaled = np.clip((f.values - t_min) / (t_max - t_min), 0.0, 1.0)
    return np.rint(255.0 * scaled).astype(np.uint8)


def normalize_dataset(
    images: list[np.ndarray],
) -> tuple[list[np.ndarray], float, float]:
    """Normalize a dataset of uint8 images to zero mean, unit std.

    Every pixel of every image is divided by 255, then the mean and the
    population standard deviation of the pooled pixel population are removed.
    Statistics accumulate in float64 in a fixed sequential pass, so the result
    does not depend on image order beyond float associativity.
    """
    if not images:
        raise DegenerateError("normalize_dataset needs at least one image")
    pooled = np.concatenate([np.asarray(im, dtype=np.float64).ravel() for im in images])
    pooled /= 255.0
    mean = float(pooled.mean())
    std = float(pooled.std())
    if std <= 0.0:
        raise DegenerateError("dataset is constant: zero standard deviation")
    out = [(np.asarray(im, dtype=np.float64) / 255.0 - mean) / std for im in images]
    return out, mean, std


def augment(
    image: np.ndarray,
    mask: LabelMask,
    op: tuple,
    seed: int | None = None,
) -> tuple[np.ndarray, LabelMask]:
    """Apply one geometric op identically to an image and its mask.

    ``op`` is one of ``("hflip",)``, ``("scale", factor)`` or
    ``("crop", r0, c0, height, width)``. Image resampling is bilinear, mask
    resampling nearest-neighbor so the label alphabet is preserved. ``seed``
    is accepted for interface stability; the ops above are fully determined
    by their parameters.
    """
    img = np.asarray(image)
    lab = mask.labels
    if img.shape != lab.shape:
        raise ShapeError(f"image {img.shape} and mask {lab.shape} dims differ")
    kind = op[0]
    if kind == "hflip":
        return img[:, ::-1].copy(), LabelMask(labels=lab[:, ::-1].copy())
    if kind == "scale":
        factor = float(op[1])
        if factor <= 0:
            raise RangeError(f"scale factor must be > 0, got {factor}")
        if factor == 1.0:
            return img.copy(), LabelMask(labels=lab.copy())
        img_s = ndimage.zoom(img.astype(np.float64), factor, order=1, mode="nearest")
        if np.issubdtype(img.dtype, np.integer):
            img_s = np.clip(np.rint(img_s), 0, 255).astype(img.dtype)
        lab_s = ndimage.zoom(lab, factor, order=0, mode="nearest")
        return img_s, LabelMask(labels=lab_s)
    if kind == "crop":
        r0, c0, h, w = (int(v) for v in op[1:5])
        rows, cols = img.shape
        if h <= 0 or w <= 0 or r0 < 0 or c0 < 0 or r0 + h > rows or c0 + w > cols:
            raise BoundsError(f"crop ({r0},{c0},{h},{w}) outside {rows}x{cols} frame")
        return (
            img[r0 : r0 + h, c0 : c0 + w].copy(),
            LabelMask(labels=lab[r0 : r0 + h, c0 : c0 + w].copy()),
        )
    raise ValueError(f"unknown augmentation op {kind!r}")


def compute_class_weights(
    masks: list[LabelMask], c: float = DEFAULT_WEIGHT_C
) -> ClassWeights:
    """Inverse-log frequency weights over all pixels of all masks."""
    if not masks:
        raise DegenerateError("compute_class_weights needs at least one mask")
    counts = np.zeros(4, dtype=np.int64)
    total = 0
    for m in masks:
        counts += np.bincount(m.labels.ravel(), minlength=4)
        total += m.labels.size
    props = counts / total
    weights = []
    for k, p in enumerate(props):
        if c + p <= 1.0:
            raise MathError(f"ln argument c + p = {c + p} <= 1 for class {k}")
        weights.append(1.0 / math.log(c + p))
    return ClassWeights(
        w_background=weights[0],
        w_outer=weights[1],
        w_middle=weights[2],
        w_central=weights[3],
        c=c,
        propensities=tuple(float(p) for p in props),
    )
