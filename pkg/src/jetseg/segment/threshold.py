"""Global band thresholding: fixed bands, histogram-derived bands, median smoothing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ConfigError, RangeError
from ..ingest import LabelMask


@dataclass(frozen=True)
class ThresholdBands:
    """Inclusive intensity ranges for the outer, middle and central zones.

    Intensities outside every band map to background.
    """

    outer: tuple[int, int] = (31, 85)
    middle: tuple[int, int] = (101, 170)
    central: tuple[int, int] = (171, 255)

    def __post_init__(self):
        bands = {"outer": self.outer, "middle": self.middle, "central": self.central}
        for name, (lo, hi) in bands.items():
            if not (0 <= lo <= hi <= 255):
                raise ConfigError(f"{name} band ({lo},{hi}) outside 0 <= lo <= hi <= 255")
        spans = sorted(bands.values())
        for (lo_a, hi_a), (lo_b, _) in zip(spans, spans[1:]):
            if lo_b <= hi_a:
                raise ConfigError(f"bands overlap: ({lo_a},{hi_a}) and starting {lo_b}")


# Default bands for 8-bit IR flame frames.
DEFAULT_BANDS = ThresholdBands()


@dataclass(frozen=True)
class AutoBandsResult:
    bands: ThresholdBands
    fallback: bool
    modes: tuple[int, ...] = ()


def threshold_segment(img: np.ndarray, bands: ThresholdBands = DEFAULT_BANDS) -> LabelMask:
    """Label each pixel with the band containing it; gaps become background."""
    arr = np.asarray(img)
    out = np.zeros(arr.shape, dtype=np.uint8)
    for label, (lo, hi) in (
        (1, bands.outer),
        (2, bands.middle),
        (3, bands.central),
    ):
        out[(arr >= lo) & (arr <= hi)] = label
    return LabelMask(labels=out)


def median_filter(img: np.ndarray, radius: int) -> np.ndarray:
    """Median of the (2r+1)^2 neighborhood around each pixel, edges replicated."""
    if radius < 0:
        raise RangeError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return np.asarray(img).copy()
    return ndimage.median_filter(np.asarray(img), size=2 * radius + 1, mode="nearest")


def auto_bands(
    training_images: list[np.ndarray],
    smooth_window: int = 9,
    min_mode_height: float = 0.003,
    min_separation: int = 10,
) -> AutoBandsResult:
    """Derive zone bands from histogram valleys of the training images.

    The pooled 256-bin histogram is box-smoothed; local maxima at least
    ``min_separation`` levels apart and carrying ``min_mode_height`` of the
    total mass count as modes. With four or more modes the three brightest
    are bracketed by the valleys between consecutive modes; otherwise the
    default bands are returned with ``fallback=True``.
    """
    if not training_images:
        raise ValueError("auto_bands needs at least one image")
    hist = np.zeros(256, dtype=np.float64)
    for img in training_images:
        hist += np.bincount(np.asarray(img, dtype=np.uint8).ravel(), minlength=256)
    kernel = np.ones(smooth_window) / smooth_window
    smoothed = np.convolve(hist, kernel, mode="same")

    total = smoothed.sum()
    modes: list[int] = []
    for i in range(256):
        left = smoothed[i - 1] if i > 0 else -1.0
        right = smoothed[i + 1] if i < 255 else -1.0
        if smoothed[i] > left and smoothed[i] >= right and smoothed[i] >= min_mode_height * total:
            if modes and i - modes[-1] < min_separation:
                if smoothed[i] > smoothed[modes[-1]]:
                    modes[-1] = i
                continue
            modes.append(i)

    if len(modes) < 4:
        return AutoBandsResult(bands=DEFAULT_BANDS, fallback=True, modes=tuple(modes))

    # keep the four most massive modes, ordered dark to bright
    top = sorted(sorted(modes, key=lambda m: smoothed[m], reverse=True)[:4])
    valleys = [
        top[i] + int(np.argmin(smoothed[top[i] : top[i + 1] + 1])) for i in range(3)
    ]
    bands = ThresholdBands(
        outer=(valleys[0] + 1, valleys[1]),
        middle=(valleys[1] + 1, valleys[2]),
        central=(valleys[2] + 1, 255),
    )
    return AutoBandsResult(bands=bands, fallback=False, modes=tuple(top))
