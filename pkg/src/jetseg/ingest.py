"""File formats and dataset plumbing: temperature CSVs, label PGMs, config files, splits.

On-disk formats are deliberately minimal and bit-stable:

* temperature frames: UTF-8 CSV of Kelvin floats, ``\\n`` line ends, one frame per file;
* label masks: binary PGM ("P5", maxval 255) whose raw byte values are the labels 0..3;
* calibration / experiment metadata: plain ``key = value`` lines, ``#`` comments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BoundsError,
    ConfigError,
    EmptyDatasetError,
    FormatError,
    LabelError,
)

VALID_LABELS = (0, 1, 2, 3)

LABEL_BACKGROUND = 0
LABEL_OUTER = 1
LABEL_MIDDLE = 2
LABEL_CENTRAL = 3


@dataclass(frozen=True)
class TemperatureField:
    """A 2-D matrix of per-pixel temperatures in Kelvin for one IR frame."""

    values: np.ndarray
    frame_id: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("temperature field must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(arr)):
            raise ValueError("temperature field contains non-finite values")
        if not np.all(arr > 0.0):
            raise ValueError("temperature field contains values <= 0 K")
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LabelMask:
    """Per-pixel zone labels: 0 background, 1 outer, 2 middle, 3 central."""

    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("label mask must be a non-empty 2-D matrix")
        if not np.issubdtype(arr.dtype, np.integer):
            raise LabelError("label mask must hold integers")
        if arr.min() < 0 or arr.max() > 3:
            raise LabelError(
                f"label values outside {{0,1,2,3}}: min={arr.min()} max={arr.max()}"
            )
        object.__setattr__(self, "labels", arr.astype(np.uint8))

    @property
    def rows(self) -> int:
        return self.labels.shape[0]

    @property
    def cols(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class Calibration:
    """Pixel-to-world mapping for one camera set-up.

    Row index 0 is the top of the frame; the nozzle sits at
    (nozzle_row, nozzle_col) in pixel coordinates.
    """

    meters_per_pixel: float
    nozzle_row: int
    nozzle_col: int
    row_axis: str = "downward"

    def __post_init__(self):
        if self.meters_per_pixel <= 0:
            raise ConfigError("meters_per_pixel must be > 0")
        if self.row_axis != "downward":
            raise ConfigError(f"unsupported row_axis {self.row_axis!r}")
        if self.nozzle_row < 0 or self.nozzle_col < 0:
            raise ConfigError("nozzle position must be non-negative")

    def check_bounds(self, rows: int, cols: int) -> None:
        if not (0 <= self.nozzle_row < rows and 0 <= self.nozzle_col < cols):
            raise BoundsError(
                f"nozzle ({self.nozzle_row},{self.nozzle_col}) outside {rows}x{cols} frame"
            )


@dataclass(frozen=True)
class ExperimentMeta:
    """Test-campaign metadata for one experiment."""

    pipe_outlet_diameter: float
    wind_speed: float
    ambient_temperature: float
    fuel_velocity_range: tuple[float, float]
    image_count: int

    def __post_init__(self):
        if not 0 < self.pipe_outlet_diameter < 1:
            raise ConfigError("pipe_outlet_diameter must be in (0, 1) m")
        lo, hi = self.fuel_velocity_range
        if min(self.wind_speed, self.ambient_temperature, lo, hi) <= 0:
            raise ConfigError("experiment metadata values must be positive")
        if self.image_count <= 0:
            raise ConfigError("image_count must be positive")


@dataclass(frozen=True)
class DatasetSplit:
    """Disjoint train/val/test id lists covering a dataset."""

    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]
    test_ids: tuple[str, ...]

    def __post_init__(self):
        groups = (set(self.train_ids), set(self.val_ids), set(self.test_ids))
        total = sum(len(g) for g in groups)
        if len(groups[0] | groups[1] | groups[2]) != total:
            raise ValueError("split groups are not pairwise disjoint")


def load_temperature_csv(path: str | Path) -> TemperatureField:
    """Parse one CSV temperature frame; frame_id is the file stem."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise FormatError(f"{path}: empty temperature file")
    rows = []
    ncols = None
    for i, line in enumerate(lines):
        fields = line.split(",")
        if ncols is None:
            ncols = len(fields)
        elif len(fields) != ncols:
            raise FormatError(
                f"{path}: ragged row {i}: expected {ncols} fields, got {len(fields)}"
            )
        row = []
        for j, tok in enumerate(fields):
            try:
                v = float(tok)
            except ValueError:
                raise ValueError(f"{path}: non-numeric value at row {i}, col {j}: {tok!r}")
            if not math.isfinite(v):
                raise ValueError(f"{path}: non-finite value at row {i}, col {j}")
            if v <= 0.0:
                raise ValueError(f"{path}: non-positive Kelvin at row {i}, col {j}: {v}")
            row.append(v)
        rows.append(row)
    return TemperatureField(values=np.array(rows, dtype=np.float64), frame_id=path.stem)


def save_temperature_csv(f: TemperatureField, path: str | Path) -> None:
    """Write a frame so that load(save(x)) == x (repr round-trips floats)."""
    lines = [",".join(repr(v) for v in row) for row in f.values.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_label_mask_pgm(path: str | Path) -> LabelMask:
    """Read a binary PGM whose byte values are zone labels."""
    path = Path(path)
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise FormatError(f"{path}: not a binary PGM (magic != P5)")
    # header = magic, width, height, maxval separated by whitespace/comments
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace byte after maxval
    try:
        cols, rows, maxval = (int(t) for t in tokens)
    except ValueError:
        raise FormatError(f"{path}: non-numeric PGM header fields {tokens}")
    if maxval != 255:
        raise FormatError(f"{path}: PGM maxval must be 255, got {maxval}")
    body = data[pos:]
    if len(body) != rows * cols:
        raise FormatError(
            f"{path}: PGM body has {len(body)} bytes, expected {rows * cols}"
        )
    arr = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
    if arr.max(initial=0) > 3:
        bad = int(arr.max())
        raise LabelError(f"{path}: pixel value {bad} outside labels 0..3")
    return LabelMask(labels=arr.copy())


def save_label_mask_pgm(mask: LabelMask, path: str | Path) -> None:
    """Write the byte-stable header "P5\\n<cols> <rows>\\n255\\n" plus raw labels."""
    header = f"P5\n{mask.cols} {mask.rows}\n255\n".encode("ascii")
    Path(path).write_bytes(header + mask.labels.tobytes())


def split_dataset(
    ids: list[str],
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> DatasetSplit:
    """Shuffle ids with the seed and split them train/val/test.

    Val and test sizes are round(n * fraction) (half away from zero); whatever
    remains goes to train, so 201 ids at (0.8, 0.1, 0.1) give 161/20/20.
    """
    if not ids:
        raise EmptyDatasetError("cannot split an empty id list")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate ids")
    f_train, f_val, f_test = fractions
    if min(fractions) < 0 or abs(f_train + f_val + f_test - 1.0) > 1e-9:
        raise ConfigError(f"fractions must be >= 0 and sum to 1, got {fractions}")
    n = len(ids)
    n_val = min(int(math.floor(n * f_val + 0.5)), n)
    n_test = min(int(math.floor(n * f_test + 0.5)), n - n_val)
    rng = np.random.default_rng(seed)
    order = list(rng.permutation(n))
    shuffled = [ids[i] for i in order]
    n_train = n - n_val - n_test
    return DatasetSplit(
        train_ids=tuple(shuffled[:n_train]),
        val_ids=tuple(shuffled[n_train : n_train + n_val]),
        test_ids=tuple(shuffled[n_train + n_val :]),
    )


def load_config(path: str | Path) -> dict[str, str]:
    """Parse a ``key = value`` file; '#' starts a comment, blank lines ignored."""
    cfg: dict[str, str] = {}
    for i, raw in enumerate(Path(path).read_text(encoding="utf-8").split("\n")):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {i + 1}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}: line {i + 1}: empty key")
        cfg[key] = value.strip()
    return cfg


def save_config(cfg: dict[str, str], path: str | Path) -> None:
    lines = [f"{k} = {v}" for k, v in cfg.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_calibration(cfg: dict[str, str]) -> Calibration:
    """Build a Calibration from config keys meters_per_pixel / nozzle_row / nozzle_col."""
    try:
        return Calibration(
            meters_per_pixel=float(cfg["meters_per_pixel"]),
            nozzle_row=int(cfg["nozzle_row"]),
            nozzle_col=int(cfg["nozzle_col"]),
        )
    except KeyError as missing:
        raise ConfigError(f"calibration key missing: {missing}")


def parse_experiment_meta(cfg: dict[str, str]) -> ExperimentMeta:
    try:
        return ExperimentMeta(
            pipe_outlet_diameter=float(cfg["pipe_outlet_diameter"]),
            wind_speed=float(cfg["wind_speed"]),
            ambient_temperature=float(cfg["ambient_temperature"]),
            fuel_velocity_range=(
                float(cfg["fuel_velocity_min"]),
                float(cfg["fuel_velocity_max"]),
            ),
            image_count=int(cfg["image_count"]),
        )
    except KeyError as missing:
        raise ConfigError(f"experiment key missing: {missing}")
