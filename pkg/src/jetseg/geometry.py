"""Flame geometry extraction: height, lift-off distance and area from a label mask.

The flame region is the union of the three zone labels. Detached pockets are
discarded by keeping only the largest 8-connected component (the stable
flame); its vertical pixel extent gives the height, its gap to the nozzle row
the lift-off distance, and its pixel count the area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import NoFlameError
from .ingest import Calibration, LabelMask


@dataclass(frozen=True)
class FlameGeometry:
    """Risk-relevant geometry of the stable flame, in meters."""

    height_m: float
    liftoff_m: float
    area_m2: float
    tip_px: tuple[int, int]
    base_px: tuple[int, int]
    component_pixel_count: int
    liftoff_clamped: bool = False

    def __post_init__(self):
        if self.height_m < 0 or self.liftoff_m < 0 or self.area_m2 < 0:
            raise ValueError("geometry values must be non-negative")
        if self.tip_px[0] > self.base_px[0]:
            raise ValueError("tip row must not lie below base row")


def flame_region(mask: LabelMask) -> np.ndarray:
    """Binary union of the outer, middle and central zones."""
    return mask.labels > 0


def largest_component(fm: np.ndarray, connectivity: int = 8) -> np.ndarray:
    """Keep only the largest connected component of a binary mask.

    Size ties break toward the component whose first pixel comes earliest in
    row-major order.
    """
    fm = np.asarray(fm, dtype=bool)
    if not fm.any():
        raise NoFlameError("empty flame mask")
    if connectivity == 8:
        structure = np.ones((3, 3), dtype=int)
    elif connectivity == 4:
        structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    else:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    labeled, n = ndimage.label(fm, structure=structure)
    sizes = np.bincount(labeled.ravel())
    sizes[0] = 0
    best = sizes.max()
    candidates = np.nonzero(sizes == best)[0]
    if len(candidates) == 1:
        keep = candidates[0]
    else:
        flat = labeled.ravel()
        keep = min(candidates, key=lambda lab: int(np.argmax(flat == lab)))
    return labeled == keep


def extract_features(fm: np.ndarray, cal: Calibration) -> FlameGeometry:
    """Measure the stable flame component against the calibration.

    Height spans the inclusive row extent (a one-pixel flame is one pixel
    tall, not zero). Lift-off is the nozzle-to-base gap, clamped at zero with
    ``liftoff_clamped`` set when the flame reaches past the nozzle row.
    """
    comp = largest_component(fm)
    cal.check_bounds(*comp.shape)
    rows_idx, cols_idx = np.nonzero(comp)
    tip_row = int(rows_idx.min())
    base_row = int(rows_idx.max())
    tip_col = int(cols_idx[rows_idx == tip_row].min())
    base_col = int(cols_idx[rows_idx == base_row].min())
    mpp = cal.meters_per_pixel
    count = int(comp.sum())
    gap = cal.nozzle_row - base_row
    return FlameGeometry(
        height_m=(base_row - tip_row + 1) * mpp,
        liftoff_m=max(0, gap) * mpp,
        area_m2=count * mpp * mpp,
        tip_px=(tip_row, tip_col),
        base_px=(base_row, base_col),
        component_pixel_count=count,
        liftoff_clamped=gap < 0,
    )


# Moore neighborhood in counter-clockwise screen order (row axis points down),
# starting from the west neighbor.
_MOORE = (
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
)


def contour(fm: np.ndarray) -> np.ndarray:
    """Moore-neighbor boundary trace of the largest component.

    Returns the closed boundary as an (n, 2) array of (row, col) pixels,
    oriented counter-clockwise on screen; the last pixel connects back to the
    first. Every traced pixel belongs to the component. One-pixel-thin
    sections are walked out and back, so pixels may repeat within the path.
    """
    comp = largest_component(fm)
    rows_idx, cols_idx = np.nonzero(comp)
    start = (int(rows_idx.min()), int(cols_idx[rows_idx == rows_idx.min()].min()))
    if comp.sum() == 1:
        return np.array([start], dtype=np.int64)

    rows, cols = comp.shape

    def is_set(p):
        r, c = p
        return 0 <= r < rows and 0 <= c < cols and comp[r, c]

    path = [start]
    # the west neighbor of the topmost-leftmost pixel is guaranteed background
    prev_dir = 0
    current = start
    first_state: tuple[tuple[int, int], int] | None = None
    while True:
        found = None
        for step in range(1, 9):
            d = (prev_dir + step) % 8
            cand = (current[0] + _MOORE[d][0], current[1] + _MOORE[d][1])
            if is_set(cand):
                found = (cand, d)
                break
        if found is None:  # isolated pixel, handled above
            break
        nxt, d = found
        # Jacob's criterion: stop when the first move out of the start repeats
        state = (current, d)
        if first_state is None:
            first_state = state
        elif state == first_state:
            break
        path.append(nxt)
        current = nxt
        # resume the scan three positions behind the direction just taken
        prev_dir = (d + 5) % 8
        if len(path) > 4 * comp.size + 8:
            raise RuntimeError("contour trace failed to close")
    pts = np.array(path, dtype=np.int64)
    if len(pts) > 1 and pts[-1][0] == pts[0][0] and pts[-1][1] == pts[0][1]:
        pts = pts[:-1]
    return pts


def polygon_area(points: np.ndarray) -> float:
    """Shoelace area of a traced contour, as a diagnostic (screen CCW positive)."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 3:
        return 0.0
    y = -pts[:, 0]  # flip row axis so screen CCW is mathematically CCW
    x = pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
