"""Synthetic vertical jet-flame frames with exactly known geometry.

Each generated flame is a vertical capsule (a rectangle capped by
semicircles) hanging above the nozzle. Temperatures decay linearly with the
distance from the capsule axis: the configured peak on the axis segment,
exactly the 800 K flame boundary on the capsule contour, and ambient
everywhere outside. Zone labels come from temperature bands carved out of
the peak-to-boundary range by the configured zone fractions, so the truth
mask, the truth geometry and the noisy temperature field all derive from one
closed-form shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ConfigError
from .geometry import FlameGeometry
from .ingest import Calibration, LabelMask, TemperatureField

FLAME_BOUNDARY_KELVIN = 800.0


@dataclass(frozen=True)
class FlameSpec:
    """Ground-truth description of one synthetic flame frame."""

    rows: int
    cols: int
    mpp: float
    nozzle_row: int
    nozzle_col: int
    liftoff_m: float
    height_m: float
    max_width_m: float
    peak_temperature: float = 1200.0
    ambient_temperature: float = 300.0
    zone_fractions: tuple[float, float, float] = (0.4, 0.3, 0.3)  # central, middle, outer
    noise_sigma: float = 0.0
    seed: int = 0
    frame_id: str = "synthetic"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("frame must have positive dimensions")
        if self.mpp <= 0:
            raise ConfigError("mpp must be > 0")
        if self.liftoff_m < 0:
            raise ConfigError("liftoff must be >= 0")
        if self.height_m <= 0:
            raise ConfigError("height must be > 0")
        if self.max_width_m <= 0:
            raise ConfigError("width must be > 0")
        if not (self.peak_temperature > FLAME_BOUNDARY_KELVIN > self.ambient_temperature > 0):
            raise ConfigError("need peak > 800 K > ambient > 0")
        fc, fm, fo = self.zone_fractions
        if min(fc, fm, fo) <= 0 or abs(fc + fm + fo - 1.0) > 1e-9:
            raise ConfigError("zone fractions must be positive and sum to 1")
        if self.noise_sigma < 0:
            raise ConfigError("noise sigma must be >= 0")


@dataclass(frozen=True)
class SynthResult:
    field: TemperatureField
    truth_mask: LabelMask
    truth_geometry: FlameGeometry
    calibration: Calibration
    analytic_area_m2: float


def generate_flame(spec: FlameSpec) -> SynthResult:
    """Rasterize one flame from its FlameSpec; deterministic for a fixed seed.

    The capsule spans the pixel rows from ``nozzle_row - round((S+L)/mpp) + 1``
    down to ``nozzle_row - round(S/mpp)``, so the extracted height and
    lift-off agree with the requested values to within half a pixel. Noise
    perturbs the temperature field only, never the truth mask. The truth
    area is the rasterized pixel count times mpp^2 (the same region-based
    definition the geometry extraction uses); ``analytic_area_m2`` carries
    the closed-form capsule area w*(h - w) + pi*(w/2)^2 as a diagnostic.
    """
    base_row = spec.nozzle_row - int(math.floor(spec.liftoff_m / spec.mpp + 0.5))
    n_rows = int(math.floor(spec.height_m / spec.mpp + 0.5))
    if n_rows < 1:
        raise BoundsError("flame height shorter than one pixel")
    tip_row = base_row - n_rows + 1

    # capsule: points within radius r of the vertical axis segment
    height_px = float(n_rows - 1)
    width_px = spec.max_width_m / spec.mpp
    if width_px > height_px:
        raise BoundsError(
            f"capsule needs width <= height, got {width_px:.1f} px wide "
            f"over {height_px:.1f} px tall"
        )
    r_px = width_px / 2.0
    if r_px < 0.5:
        raise BoundsError("flame must be at least one pixel wide and two rows tall")
    seg_top = tip_row + r_px
    seg_bot = base_row - r_px

    if tip_row < 0 or base_row >= spec.rows:
        raise BoundsError(
            f"flame rows [{tip_row}, {base_row}] exceed frame of {spec.rows} rows"
        )
    if spec.nozzle_col - r_px < 0 or spec.nozzle_col + r_px > spec.cols - 1:
        raise BoundsError("flame width exceeds frame columns")
    if not (0 <= spec.nozzle_row < spec.rows and 0 <= spec.nozzle_col < spec.cols):
        raise BoundsError("nozzle outside frame")

    rr, cc = np.mgrid[: spec.rows, : spec.cols]
    seg_r = np.clip(rr, seg_top, seg_bot)
    dist = np.hypot(rr - seg_r, cc - spec.nozzle_col)
    interior = np.clip(1.0 - dist / r_px, 0.0, 1.0)  # 0 on the contour, 1 on the axis
    # sub-pixel slack so the tangent pixels at the tip and base rows always
    # rasterize in despite floating-point rounding
    inside = dist <= r_px + 1e-9
    if not (inside[tip_row].any() and inside[base_row].any()):
        raise RuntimeError("capsule rasterization lost its tip or base row")

    span = spec.peak_temperature - FLAME_BOUNDARY_KELVIN
    temps = np.where(
        inside,
        FLAME_BOUNDARY_KELVIN + span * interior,
        spec.ambient_temperature,
    )

    fc, fm, _ = spec.zone_fractions
    t_central = spec.peak_temperature - fc * span
    t_middle = spec.peak_temperature - (fc + fm) * span
    labels = np.zeros((spec.rows, spec.cols), dtype=np.uint8)
    labels[inside & (temps < t_middle)] = 1
    labels[inside & (temps >= t_middle) & (temps < t_central)] = 2
    labels[inside & (temps >= t_central)] = 3

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        temps = temps + rng.normal(0.0, spec.noise_sigma, temps.shape)
        temps = np.maximum(temps, 1.0)  # temperatures stay physical

    count = int(inside.sum())
    tip_col = int(np.nonzero(inside[tip_row])[0].min())
    base_col = int(np.nonzero(inside[base_row])[0].min())
    truth_geometry = FlameGeometry(
        height_m=spec.height_m,
        liftoff_m=spec.liftoff_m,
        area_m2=count * spec.mpp**2,
        tip_px=(tip_row, tip_col),
        base_px=(base_row, base_col),
        component_pixel_count=count,
    )
    width_m = 2.0 * r_px * spec.mpp
    analytic = width_m * (height_px * spec.mpp - width_m) + math.pi * (width_m / 2.0) ** 2

    return SynthResult(
        field=TemperatureField(values=temps, frame_id=spec.frame_id),
        truth_mask=LabelMask(labels=labels),
        truth_geometry=truth_geometry,
        calibration=Calibration(
            meters_per_pixel=spec.mpp,
            nozzle_row=spec.nozzle_row,
            nozzle_col=spec.nozzle_col,
        ),
        analytic_area_m2=analytic,
    )
