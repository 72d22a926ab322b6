"""Mask-vs-mask and value-vs-value evaluation metrics.

Covers the boundary-sensitive Hausdorff distance, the overlap family
(Jaccard/IoU, F-measure, Cohen's kappa, adjusted Rand index), mutual
information, per-pixel error measures (MAE, MSE, PSNR with peak label 3) and
percentage errors for scalar feature series. Percentage errors come in the
as-published mixed-denominator forms (MAPE over the truth, RMSPE over the
prediction) plus matched-denominator variants that divide both by the truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DivisionError, EmptySetError, ShapeError
from .ingest import LabelMask


@dataclass(frozen=True)
class ConfusionCounts:
    """4x4 pixel tally: entry (i, j) counts truth label i predicted as j."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (4, 4) or (t < 0).any():
            raise ValueError("confusion table must be 4x4 with non-negative counts")
        object.__setattr__(self, "table", t)

    @property
    def total(self) -> int:
        return int(self.table.sum())

    def tp(self, k: int) -> int:
        return int(self.table[k, k])

    def fp(self, k: int) -> int:
        return int(self.table[:, k].sum() - self.table[k, k])

    def fn(self, k: int) -> int:
        return int(self.table[k, :].sum() - self.table[k, k])


@dataclass(frozen=True)
class OverlapMetrics:
    mean_jaccard: float
    f_measure: float
    kappa: float
    ari: float
    per_class_jaccard: tuple[float | None, float | None, float | None, float | None]


@dataclass(frozen=True)
class PixelErrors:
    mae: float
    mse: float
    psnr: float


@dataclass(frozen=True)
class ErrorSeries:
    """Paired ground-truth (x) and predicted (y) scalar values."""

    x: np.ndarray
    y: np.ndarray
    unit: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 1 or x.shape != y.shape or len(x) < 1:
            raise ValueError("series must be equal-length 1-D arrays with n >= 1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class ImageMetrics:
    """Full per-image metric row for one (prediction, truth) mask pair."""

    hausdorff: float
    mean_jaccard: float
    f_measure: float
    ari: float
    mutual_information: float
    kappa: float
    mae: float
    mse: float
    psnr: float

    FIELDS = (
        "hausdorff",
        "mean_jaccard",
        "f_measure",
        "ari",
        "mutual_information",
        "kappa",
        "mae",
        "mse",
        "psnr",
    )

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self.FIELDS)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two (n, 2) pixel point sets.

    HD(A, B) = max(h(A, B), h(B, A)) with the directed distance
    h(A, B) = max over a of min over b of ||a - b|| (Euclidean).
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    if len(a) == 0 or len(b) == 0:
        raise EmptySetError("hausdorff needs two non-empty point sets")
    tree_a = cKDTree(a)
    tree_b = cKDTree(b)
    h_ab = float(tree_b.query(a, k=1)[0].max())
    h_ba = float(tree_a.query(b, k=1)[0].max())
    return max(h_ab, h_ba)


def multiclass_hausdorff(pred: LabelMask, truth: LabelMask) -> float:
    """Unweighted mean of per-zone Hausdorff distances over zones 1..3.

    A zone present in only one mask contributes the frame diagonal (the
    largest possible pixel-center distance) as a bounded penalty; zones
    absent from both are skipped entirely.
    """
    if pred.labels.shape != truth.labels.shape:
        raise ShapeError(f"mask dims differ: {pred.labels.shape} vs {truth.labels.shape}")
    rows, cols = truth.labels.shape
    diagonal = math.hypot(rows - 1, cols - 1)
    values = []
    for k in (1, 2, 3):
        pts_p = np.argwhere(pred.labels == k)
        pts_t = np.argwhere(truth.labels == k)
        if len(pts_p) == 0 and len(pts_t) == 0:
            continue
        if len(pts_p) == 0 or len(pts_t) == 0:
            values.append(diagonal)
        else:
            values.append(hausdorff(pts_p, pts_t))
    if not values:
        raise EmptySetError("no zone present in either mask")
    return float(np.mean(values))


def confusion(pred: LabelMask, truth: LabelMask) -> ConfusionCounts:
    """Exact 4x4 pixel tally of (truth, prediction) label pairs."""
    if pred.labels.shape != truth.labels.shape:
        raise ShapeError(f"mask dims differ: {pred.labels.shape} vs {truth.labels.shape}")
    joint = truth.labels.astype(np.int64).ravel() * 4 + pred.labels.astype(np.int64).ravel()
    table = np.bincount(joint, minlength=16).reshape(4, 4)
    return ConfusionCounts(table=table)


def overlap_metrics(c: ConfusionCounts) -> OverlapMetrics:
    """Jaccard / F-measure / kappa / adjusted Rand index from a confusion table.

    Per-class Jaccard is TP / (TP + FP + FN); classes absent from both masks
    are excluded from the means. F per class follows the Dice identity
    F = 2J / (1 + J). Kappa is (p_o - p_e) / (1 - p_e), defined as 1 when
    both partitions are constant and equal. ARI uses pair counting over the
    contingency table and is 1 for identical partitions.
    """
    t = c.table
    n = c.total
    if n <= 0:
        raise ValueError("empty confusion table")

    jaccards: list[float | None] = []
    for k in range(4):
        tp, fp, fn = c.tp(k), c.fp(k), c.fn(k)
        jaccards.append(None if tp + fp + fn == 0 else tp / (tp + fp + fn))
    present = [j for j in jaccards if j is not None]
    mean_j = float(np.mean(present))
    mean_f = float(np.mean([2.0 * j / (1.0 + j) for j in present]))

    p_o = float(np.trace(t)) / n
    p_e = float((t.sum(axis=1) * t.sum(axis=0)).sum()) / (n * n)
    kappa = 1.0 if abs(1.0 - p_e) < 1e-15 else (p_o - p_e) / (1.0 - p_e)

    def comb2(v):
        return v * (v - 1) / 2.0

    sum_ij = comb2(t.astype(np.float64)).sum()
    sum_a = comb2(t.sum(axis=1).astype(np.float64)).sum()
    sum_b = comb2(t.sum(axis=0).astype(np.float64)).sum()
    pairs = comb2(float(n))
    expected = sum_a * sum_b / pairs if pairs > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    denom = max_index - expected
    ari = 1.0 if abs(denom) < 1e-15 else (sum_ij - expected) / denom

    return OverlapMetrics(
        mean_jaccard=mean_j,
        f_measure=mean_f,
        kappa=float(kappa),
        ari=float(ari),
        per_class_jaccard=tuple(jaccards),
    )


def info_metric(c: ConfusionCounts) -> float:
    """Mutual information of the two labelings in nats, with 0 ln 0 = 0."""
    t = c.table.astype(np.float64)
    n = t.sum()
    if n <= 0:
        raise ValueError("empty confusion table")
    p = t / n
    pr = p.sum(axis=1, keepdims=True)
    pc = p.sum(axis=0, keepdims=True)
    mask = p > 0
    return float((p[mask] * np.log(p[mask] / (pr @ pc)[mask])).sum())


def pixel_error_metrics(pred: LabelMask, truth: LabelMask) -> PixelErrors:
    """MAE / MSE over the integer label values; PSNR with peak label 3."""
    if pred.labels.shape != truth.labels.shape:
        raise ShapeError(f"mask dims differ: {pred.labels.shape} vs {truth.labels.shape}")
    diff = pred.labels.astype(np.float64) - truth.labels.astype(np.float64)
    mae = float(np.abs(diff).mean())
    mse = float((diff**2).mean())
    psnr = math.inf if mse == 0.0 else 10.0 * math.log10(9.0 / mse)
    return PixelErrors(mae=mae, mse=mse, psnr=psnr)


def mape(s: ErrorSeries) -> float:
    """Mean absolute percentage error with the truth x in the denominator."""
    if np.any(s.x == 0.0):
        raise DivisionError("mape denominator x contains zero")
    return float(np.mean(np.abs(s.x - s.y) / s.x) * 100.0)


def rmspe(s: ErrorSeries) -> float:
    """Root-mean-square percentage error with the prediction y in the denominator."""
    if np.any(s.y == 0.0):
        raise DivisionError("rmspe denominator y contains zero")
    return float(math.sqrt(np.mean(((s.x - s.y) / s.y) ** 2)) * 100.0)


def mape_matched(s: ErrorSeries) -> float:
    """MAPE with both forms sharing the truth denominator."""
    if np.any(s.x == 0.0):
        raise DivisionError("matched denominator x contains zero")
    return float(np.mean(np.abs((s.x - s.y) / s.x)) * 100.0)


def rmspe_matched(s: ErrorSeries) -> float:
    """RMSPE with the truth denominator; always >= the matched MAPE."""
    if np.any(s.x == 0.0):
        raise DivisionError("matched denominator x contains zero")
    return float(math.sqrt(np.mean(((s.x - s.y) / s.x) ** 2)) * 100.0)


def image_metrics(pred: LabelMask, truth: LabelMask) -> ImageMetrics:
    """All mask-pair metrics for one frame."""
    c = confusion(pred, truth)
    ov = overlap_metrics(c)
    pe = pixel_error_metrics(pred, truth)
    return ImageMetrics(
        hausdorff=multiclass_hausdorff(pred, truth),
        mean_jaccard=ov.mean_jaccard,
        f_measure=ov.f_measure,
        ari=ov.ari,
        mutual_information=info_metric(c),
        kappa=ov.kappa,
        mae=pe.mae,
        mse=pe.mse,
        psnr=pe.psnr,
    )


def aggregate_metrics(
    rows: list[ImageMetrics],
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Mean and population stddev of each metric across images."""
    if not rows:
        raise ValueError("no metric rows to aggregate")
    data = np.array([r.as_tuple() for r in rows], dtype=np.float64)
    with np.errstate(invalid="ignore"):  # std of all-inf psnr columns is nan
        return tuple(data.mean(axis=0)), tuple(data.std(axis=0))
